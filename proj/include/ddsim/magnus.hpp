#pragma once

// First-order Magnus (toggling-frame) analysis of rotating-frame system-bath
// couplings sigma^a (x) sigma^b under instantaneous DD pulses.
// Two-qubit picture: qubit 0 carries alpha (main), qubit 1 carries beta (spectator).

#include <string>
#include <vector>

#include "ddsim/dd.hpp"
#include "ddsim/operators.hpp"

namespace ddsim {

struct CouplingTerm {
    char alpha = '0';
    char beta = '0';
    double g = 1.0;

    bool pure_bath() const { return alpha == '0' && beta == '0'; }
    std::string label() const { return std::string("(") + alpha + "," + beta + ")"; }
};

// The 15 nontrivial (alpha, beta) pairs over {0,x,y,z}.
std::vector<CouplingTerm> all_coupling_terms();

enum class CancelClass { always_cancels, cancels_at_fine_tuned_tau, suppressed_as_g_over_omega_d, never_cancels };
std::string to_string(CancelClass c);

struct MagnusOptions {
    double rel_tol = 1e-10;
    int max_depth = 40;
};

struct IntegralResult {
    Mat integral;     // g * int_0^dt integrand, 4x4
    double norm = 0;  // spectral norm of `integral`
    double residual = 0;  // norm / (g dt)
};

IntegralResult first_order_integral(const CouplingTerm& term, const DDSequence& seq, double omega_d,
                                    const MagnusOptions& opt = {});

// tau * omega_d is a positive integer multiple of 2 pi to relative tolerance 1e-9 (always true at omega_d = 0).
bool is_fine_tuned(double tau, double omega_d);

// Nearest tau >= 2 pi / omega_d that is fine tuned.
double fine_tuned_tau(double tau, double omega_d);

// Geometric ladder on [lo/dt, hi/dt].
std::vector<double> omega_ladder(double cycle, int points = 21, double lo = 10.0, double hi = 1000.0);

struct ScalingFit {
    double slope = 0.0;
    std::vector<double> omegas;  // after phase snapping
    std::vector<double> residuals;
};

// Log-log slope of the residual against omega_d. Each rung is moved to the nearest
// frequency with omega tau = theta0 (mod 2 pi), theta0 a fixed non-resonant phase,
// so the sin^2(omega tau / 2) factors do not scatter the fit.
ScalingFit fast_drive_scaling(const CouplingTerm& term, const DDSequence& seq, const std::vector<double>& ladder,
                              const MagnusOptions& opt = {});

struct CancellationRow {
    CouplingTerm term;
    std::vector<double> taus;
    std::vector<double> residuals;
    CancelClass cls = CancelClass::never_cancels;
    double slope = 0.0;  // only set when the fast-drive fit ran
};

struct CancellationReport {
    std::string sequence;
    double omega_d = 0.0;
    std::vector<CancellationRow> rows;

    const CancellationRow& row(char alpha, char beta) const;
};

inline constexpr double kCancelThreshold = 1e-10;

// Sequence rebuilt by name for every tau in the list.
CancellationReport cancellation_table(const std::string& sequence_name, int pulsed_qubit, double omega_d,
                                      const std::vector<double>& tau_list, const MagnusOptions& opt = {});

struct SwitchingFunctions {
    std::vector<double> edges;  // 0 = edges[0] < ... < edges.back() = cycle
    std::vector<int> fx;        // value on [edges[k], edges[k+1])
    std::vector<int> fy;
};

SwitchingFunctions switching_functions(const DDSequence& seq);

struct ToggleBound {
    double lhs = 0.0;
    double bound = 0.0;
    double cx = 0.0, cy = 0.0, cz = 0.0;  // coefficients of X, Y, Z
};

// Constant scalar baths of norm B on every axis.
ToggleBound toggling_bound_check(double gx, double gy, double gz, double B, double omega_d, const DDSequence& seq);

// Drift-free terms left by a bath rotating at omega_d: X B'_X, X B''_Y, Y B''_X, Y B'_Y.
struct SingleFrequencyTerms {
    double x_bx = 0.0, x_by = 0.0, y_bx = 0.0, y_by = 0.0;
};
SingleFrequencyTerms single_frequency_terms(double gx, double gy, const DDSequence& seq);

}  // namespace ddsim
