#pragma once

// Instantaneous-pulse dynamical decoupling sequences and the segment driver
// that interleaves engine evolution with pulses.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ddsim/operators.hpp"

namespace ddsim {

enum class Axis { X, Y, Z };

char axis_char(Axis a);
Axis axis_from_char(char c);

struct Pulse {
    double time = 0.0;
    int qubit = 0;
    Axis axis = Axis::X;
    double angle = kPi;
};

enum class SequenceKind { pure_x, pure_y, xy4, xy4_palindrome, udd, custom };

SequenceKind sequence_kind_from_string(const std::string& s, int* udd_order = nullptr);

struct DDSequence {
    std::vector<Pulse> pulses;  // one cycle, sorted by time, all in (0, cycle]
    double cycle = 0.0;
    double tau = 0.0;
    SequenceKind kind = SequenceKind::custom;
    int udd_order = 0;

    std::string name() const;
    void validate() const;
};

DDSequence make_pure_x(double tau, int qubit);
DDSequence make_pure_y(double tau, int qubit);
DDSequence make_xy4(double tau, int qubit, bool palindrome);
DDSequence make_udd(int n, double total_T, int qubit);
DDSequence make_custom(std::vector<Pulse> pulses, double cycle);
// By name: pure_x, pure_y, xy4, xy4_palindrome, uddN (total time (N+1) tau).
DDSequence make_sequence(const std::string& name, double tau, int qubit);

// Same timing, pulses replicated onto every qubit in `qubits`.
DDSequence retarget(const DDSequence& seq, const std::vector<int>& qubits);

// Repeats the cycle from t = 0 and keeps pulses with time <= t_end.
// max_cycles < 0 means unlimited.
std::vector<Pulse> schedule(const DDSequence& seq, double t_end, int max_cycles = -1);

// exp(-i angle sigma / 2) on the pulse's qubit.
Mat pulse_unitary(const Pulse& p, int n);

// Product of the ideal pulses of one cycle on an n-qubit register (last pulse leftmost).
Mat cycle_pulse_product(const DDSequence& seq, int n);

enum class StateKind { density, propagator };

using AdvanceFn = std::function<void(Mat& state, double t0, double t1)>;
using ObserveFn = std::function<void(std::size_t index, const Mat& state)>;

// Walks the grid, advancing with `advance` between consecutive event times and
// applying every pulse with time <= t before observing at grid time t.
void apply_sequence(Mat& state, StateKind kind, const std::vector<Pulse>& pulses,
                    const std::vector<double>& grid, int n, const AdvanceFn& advance,
                    const ObserveFn& observe);

struct Gate {
    double time = 0.0;  // center
    Axis axis = Axis::X;
    double angle = 0.0;
};

// Set G: R_x(+-pi/8), R_x(+-pi/4), R_y(+-pi/8), R_y(+-pi/4).
std::vector<Gate> gate_set_G();

// depth gates drawn uniformly from `gate_set`, centers at (2k+1) * gate_duration
// so consecutive centers sit two gate durations apart.
std::vector<Gate> random_gate_circuit(std::uint64_t seed, int depth, const std::vector<Gate>& gate_set,
                                      double gate_duration = 35.55);

}  // namespace ddsim
