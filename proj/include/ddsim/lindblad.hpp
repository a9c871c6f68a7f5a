#pragma once

// Phenomenological Lindblad master equation: fixed-step RK4 and closed-form
// fidelities of the two-qubit dephasing, X/Y-noise and emission models.

#include <string>
#include <vector>

#include "ddsim/dd.hpp"
#include "ddsim/device.hpp"
#include "ddsim/operators.hpp"

namespace ddsim {

struct LindbladOp {
    Mat L;
    double gamma = 0.0;  // 1/ns
    std::string tag;
};

struct LindbladSpec {
    std::vector<LindbladOp> ops;
    void validate(Eigen::Index dim) const;
};

LindbladOp pauli_op(const std::string& label, double gamma);
// |0><1| on one qubit.
LindbladOp lower_op(int qubit, int n, double gamma);
// sigma^- (x) sigma^- on a pair.
LindbladOp lower_joint_op(int qa, int qb, int n, double gamma);

Mat lindblad_rhs(const Mat& rho, const Mat& H, const LindbladSpec& spec);

struct EvolveOptions {
    int steps_per_period = 100;
    double trace_abort = 1e-6;
    double renormalize_above = 1e-12;
    double positivity_flag = -1e-7;
};

struct Diagnostics {
    long steps = 0;
    long renormalizations = 0;
    long positivity_flags = 0;
    double max_trace_drift = 0.0;
    double max_hermiticity_drift = 0.0;
    double min_eigenvalue = 1.0;
    std::vector<std::string> events;

    void note(const std::string& msg);
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Mat> states;
    Diagnostics diagnostics;
};

class LindbladEngine {
public:
    LindbladEngine(FrameHamiltonian h, LindbladSpec spec, EvolveOptions opt = {});

    void advance(Mat& rho, double t0, double t1);
    double max_step() const { return h_cap_; }
    const Diagnostics& diagnostics() const { return diag_; }

private:
    Mat rhs(const Mat& rho, double t) const;
    void settle(Mat& rho);

    FrameHamiltonian h_;
    LindbladSpec spec_;
    EvolveOptions opt_;
    std::vector<Mat> ldag_l_;
    double h_cap_ = 0.0;
    Diagnostics diag_;
};

Trajectory evolve(const Mat& rho0, const FrameHamiltonian& h, const LindbladSpec& spec,
                  const std::vector<double>& grid, const std::vector<Pulse>& pulses = {},
                  EvolveOptions opt = {});

enum class SpectatorState { zero, one, plus };

SpectatorState spectator_from_string(const std::string& s);
std::string to_string(SpectatorState s);

// cos(W t) + (k / W) sin(W t) with W = sqrt(W2), continued analytically for W2 <= 0.
double damped_cos(double t, double W2, double k);

double closed_form_fidelity(Frame frame, SpectatorState s, double t, double J, double gamma);

struct XNoiseRates {
    double g1 = 0, g2 = 0, g3 = 0, g4 = 0, g5 = 0, g6 = 0;
};
struct YNoiseRates {
    double g1 = 0, g3 = 0, g7 = 0, g8 = 0, g9 = 0;
};
struct EmissionRates {
    double g1 = 0, g3 = 0, g10 = 0, g11 = 0, g12 = 0;
};

double closed_form_x_noise(double t, double J, const XNoiseRates& r);
double closed_form_y_noise(double t, double J, const YNoiseRates& r);
double closed_form_emission(SpectatorState s, double t, double J, const EmissionRates& r);

// <+| Tr_other(rho) |+> for the main qubit.
double plus_fidelity(const Mat& rho, int main_qubit, int n);

}  // namespace ddsim
