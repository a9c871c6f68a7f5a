#pragma once

// Time-local second-order (Redfield/TCL2) evolution with an Ohmic bath in the
// drive rotating frame. Channels are uncorrelated; each couples one qubit
// through sigma^a(t) with the rotating-frame time dependence.

#include <map>
#include <vector>

#include "ddsim/dd.hpp"
#include "ddsim/lindblad.hpp"
#include "ddsim/operators.hpp"

namespace ddsim {

struct BathCoupling {
    int qubit = 0;
    char axis = 'z';
    double g = 0.0;  // rad/ns
};

struct OhmicBathSpec {
    double eta_ohmic = 1e-4;  // ns^2
    double omega_c = kTwoPi * 2.0;
    double beta = 0.382;  // ns
    std::vector<BathCoupling> couplings;

    void validate() const;
};

// hbar / (k_B T) in ns.
double beta_from_temperature_mk(double temp_mk);

// 2 pi eta g^2 w exp(-|w|/wc) / (1 - exp(-beta w)); the w -> 0 limit is 2 pi eta g^2 / beta.
double ohmic_spectrum(double omega, const OhmicBathSpec& spec, double g = 1.0);

struct CorrelationTable {
    double dt = 0.0;
    std::vector<cplx> values;  // C(n dt), n = 0..
    int channel = -1;

    double window() const { return dt * double(values.size() - 1); }
    // Linear interpolation; negative t uses C(-t) = C(t)^*.
    cplx at(double t) const;
};

struct CorrelationOptions {
    double window = 0.0;         // ns; 0: start at 10 / omega_c, doubled until the round trip passes
    int samples = 1 << 14;       // spectrum samples on [-Omega, Omega)
    int pad_factor = 16;         // zero padding for time resolution
    double omega_max_factor = 10.0;
    double roundtrip_tol = 0.01;
};

// C(t) = (1/2pi) int gamma(w) e^{-iwt} dw through one FFT; throws NumericalError
// when transforming the windowed table back misses gamma by more than the tolerance.
CorrelationTable correlation_from_spectrum(const OhmicBathSpec& spec, double g,
                                           const CorrelationOptions& opt = {});

// Relative round-trip error of a table against the spectrum on a few test frequencies.
double correlation_roundtrip_error(const CorrelationTable& table, const OhmicBathSpec& spec, double g);

// Lambda(t) = int_0^t C(s) U(s) A(t-s) U(s)^dag ds, trapezoid on the table grid,
// with H_S = diag(energies) and A(t) = sum_k A_k e^{i k omega_d t}.
Mat lambda_operator(double t, const std::map<int, Mat>& a_harmonics, const Eigen::VectorXd& energies,
                    double omega_d, const CorrelationTable& table);

struct RedfieldOptions {
    int steps_per_period = 32;
    double positivity_abort = 1e-3;
    double positivity_flag = -1e-7;
    double static_period = 1.0;  // ns, lattice period when nothing rotates
    CorrelationOptions correlation;
};

class RedfieldEngine {
public:
    // h_static must be diagonal (rotating-frame static system Hamiltonian).
    RedfieldEngine(const Mat& h_static, double omega_d, OhmicBathSpec bath, RedfieldOptions opt = {});

    void advance(Mat& rho, double t0, double t1);

    Mat lambda(std::size_t channel, double t) const;
    Mat rhs(const Mat& rho, double t) const;
    double memory_window() const { return window_; }
    const Diagnostics& diagnostics() const { return diag_; }
    int dim() const { return int(d_); }

private:
    Mat generator(double t) const;  // superoperator for t >= window
    void advance_early(Vec& v, double t0, double t1) const;
    void advance_late(Vec& v, double t0, double t1);
    void rk4_vec(Vec& v, double t, double h) const;
    void build_lattice();
    Mat early_F(int q, double t) const;
    void settle(Mat& rho, double t);

    Eigen::Index d_ = 0;
    Eigen::VectorXd energies_;
    Mat h_;
    double omega_d_ = 0.0;
    OhmicBathSpec bath_;
    RedfieldOptions opt_;
    CorrelationTable table_;
    double window_ = 0.0;

    struct Channel {
        std::map<int, Mat> a;          // harmonics of A_m
        std::map<int, Mat> lam_late;   // harmonics of Lambda_m for t >= window
        double g2 = 0.0;
    };
    std::vector<Channel> channels_;
    // F_q(t)_{ab} = int_0^t C(s) e^{-i(q w + E_a - E_b)s} ds on the table nodes (unit g)
    std::map<int, std::vector<Mat>> early_;

    std::map<int, Mat> l_harm_;  // superoperator harmonics for t >= window
    double period_ = 0.0;
    double dt_ = 0.0;  // lattice step
    int nsteps_ = 0;
    bool rotating_ = false;
    std::vector<Mat> step_;      // one RK4 step from lattice phase r
    std::vector<Mat> period_pow_;  // P^(2^i)
    Diagnostics diag_;
};

Trajectory redfield_evolve(const Mat& rho0, const Mat& h_static, double omega_d, const OhmicBathSpec& bath,
                           const std::vector<double>& grid, const std::vector<Pulse>& pulses = {},
                           RedfieldOptions opt = {});

}  // namespace ddsim
