#pragma once

// Ramsey-style state-protection runs, shot sampling with bootstrap, and the
// random-gate DD comparison.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ddsim/dd.hpp"
#include "ddsim/device.hpp"
#include "ddsim/fit.hpp"
#include "ddsim/lindblad.hpp"
#include "ddsim/redfield.hpp"
#include "ddsim/rng.hpp"

namespace ddsim {

enum class Engine { lindblad, redfield, closed };
Engine engine_from_string(const std::string& s);
std::string to_string(Engine e);

enum class MainState { plus, minus, plus_i, minus_i };
MainState main_state_from_string(const std::string& s);
std::string to_string(MainState m);

struct DDConfig {
    DDSequence sequence;  // qubit indices ignored; applied to every spectator
    int repeats = -1;     // < 0: as many cycles as fit
};

struct ExperimentConfig {
    DeviceSpec device;
    bool omega_d_given = false;  // otherwise derived from device.frame
    std::optional<LindbladSpec> lindblad;
    std::optional<OhmicBathSpec> bath;
    int main_qubit = 0;
    std::vector<SpectatorState> spectator_states{SpectatorState::zero, SpectatorState::one, SpectatorState::plus};
    MainState main_state = MainState::plus;
    std::optional<DDConfig> dd;
    bool include_free = true;  // with dd set, also run the unprotected arm
    double t_max = 20000.0;
    int points = 70;
    std::optional<long> shots;
    int bootstrap_resamples = 10;
    double prep_error = 0.0;  // relative over-rotation of R_y(+-pi/2)
    std::uint64_t seed = 0;
    Engine engine = Engine::lindblad;
    EvolveOptions lindblad_options;
    RedfieldOptions redfield_options;

    void validate() const;
    std::vector<int> spectators() const;
};

// Drive frequency: explicit, or the main qubit's dressed frequency for the frame.
double resolve_omega_d(const ExperimentConfig& cfg);

// 0..t_max in points steps, snapped to whole DD cycles when DD is configured.
std::vector<double> experiment_grid(const ExperimentConfig& cfg);

struct FidelitySeries {
    SpectatorState spectator = SpectatorState::zero;
    std::string arm = "free";
    std::vector<double> times;
    std::vector<double> fidelity;
    std::vector<double> ci_half_width;  // zero in exact mode
    std::vector<double> envelope;       // 2 |rho_01| of the main qubit before undoing the preparation
};

struct StateProtectionResult {
    std::vector<FidelitySeries> series;
    Diagnostics diagnostics;

    const FidelitySeries& get(SpectatorState s, const std::string& arm) const;
};

StateProtectionResult run_state_protection(const ExperimentConfig& cfg);

FitResult extract_crosstalk(const FidelitySeries& series, Frame frame, const FitOptions& opt = {});

// Number of |0> outcomes out of `shots` for P(0) = p.
long shot_sample(double p, long shots, Rng& rng);
long shot_sample(double p, long shots, std::uint64_t seed);

struct BootstrapResult {
    double mean = 0.0;
    double half_width = 0.0;  // 2 sigma
};

// Resamples the shot record with replacement `resamples` times.
BootstrapResult bootstrap_ci(long zeros, long shots, Rng& rng, int resamples = 10);

struct DDPGConfig {
    DeviceSpec device;  // rotating-frame device; omega_d used as given
    LindbladSpec noise;
    int main_qubit = 0;
    double gate_duration = 35.55;  // ns; gate centers two durations apart
    std::string dd_sequence = "xy4";
    double dd_tau = 71.1;
    int runs = 100;
    std::vector<int> depths;  // each a multiple of the DD cycle in gate slots
    std::vector<SpectatorState> spectator_states{SpectatorState::zero, SpectatorState::one, SpectatorState::plus};
    std::uint64_t seed = 0;
};

struct DDPGResult {
    std::vector<double> times;
    std::vector<double> free_curve, dd_curve;
    ExponentialFit free_fit, dd_fit;
    double free_rate = 0.0, dd_rate = 0.0, ratio = 0.0;
};

DDPGResult run_random_gate_ddpg(const DDPGConfig& cfg);

// Propagator of a static Hamiltonian interleaved with ideal pulses, from 0 to t_end.
Mat pulsed_propagator(const Mat& H, const std::vector<Pulse>& pulses, double t_end);

// || U - e^{i phi} V ||_2 with phi = arg tr(V^dag U).
double phase_distance(const Mat& U, const Mat& V);

}  // namespace ddsim
