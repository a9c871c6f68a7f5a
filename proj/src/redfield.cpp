#include "ddsim/redfield.hpp"

#include <unsupported/Eigen/FFT>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ddsim/device.hpp"
#include "ddsim/errors.hpp"

namespace ddsim {

void OhmicBathSpec::validate() const {
    if (!(eta_ohmic > 0.0)) throw ValidationError("eta_ohmic must be positive");
    if (!(omega_c > 0.0)) throw ValidationError("cutoff must be positive");
    if (!(beta > 0.0)) throw ValidationError("beta must be positive");
    for (const auto& c : couplings) {
        if (c.qubit < 0) throw ValidationError("bath coupling qubit index out of range");
        if (c.axis != 'x' && c.axis != 'y' && c.axis != 'z')
            throw ValidationError(std::string("bath coupling axis must be x, y or z, got '") + c.axis + "'");
    }
}

double beta_from_temperature_mk(double temp_mk) {
    if (!(temp_mk > 0.0)) throw ValidationError("temperature must be positive");
    constexpr double hbar_over_kb_kelvin_ns = 7.638232577577646e-3;
    return hbar_over_kb_kelvin_ns / (temp_mk * 1e-3);
}

double ohmic_spectrum(double omega, const OhmicBathSpec& spec, double g) {
    const double pref = kTwoPi * spec.eta_ohmic * g * g;
    const double x = spec.beta * omega;
    if (std::abs(x) < 1e-8) return pref / spec.beta * std::exp(-std::abs(omega) / spec.omega_c) * (1.0 + 0.5 * x);
    return pref * omega * std::exp(-std::abs(omega) / spec.omega_c) / (-std::expm1(-x));
}

cplx CorrelationTable::at(double t) const {
    if (values.empty() || !(dt > 0.0)) throw ValidationError("empty correlation table");
    const bool neg = t < 0.0;
    const double s = std::abs(t) / dt;
    const auto n = std::size_t(s);
    if (n + 1 >= values.size()) {
        if (n + 1 == values.size() && s - double(n) < 1e-9) return neg ? std::conj(values.back()) : values.back();
        throw ValidationError("correlation table does not cover t = " + std::to_string(t));
    }
    const double f = s - double(n);
    const cplx v = (1.0 - f) * values[n] + f * values[n + 1];
    return neg ? std::conj(v) : v;
}

double correlation_roundtrip_error(const CorrelationTable& table, const OhmicBathSpec& spec, double g) {
    // gamma(w) = 2 Re int_0^W C(t) e^{iwt} dt, trapezoid on the table.
    const double wc = spec.omega_c;
    const double peak = ohmic_spectrum(wc, spec, g);
    double worst = 0.0;
    for (double w : {0.0, 0.25 * wc, 0.5 * wc, wc, 1.5 * wc, 2.0 * wc, -0.1 * wc}) {
        cplx acc = 0.0;
        const std::size_t N = table.values.size();
        for (std::size_t n = 0; n < N; ++n) {
            const double wt = (n == 0 || n + 1 == N) ? 0.5 : 1.0;
            acc += wt * table.values[n] * std::exp(kI * (w * double(n) * table.dt));
        }
        const double back = 2.0 * (acc * table.dt).real();
        const double ref = ohmic_spectrum(w, spec, g);
        worst = std::max(worst, std::abs(back - ref) / std::max(std::abs(ref), 1e-3 * peak));
    }
    return worst;
}

CorrelationTable correlation_from_spectrum(const OhmicBathSpec& spec, double g, const CorrelationOptions& opt) {
    spec.validate();
    const int N = opt.samples;
    if (N < 4 || (N & (N - 1)) != 0) throw ValidationError("spectrum samples must be a power of two");
    if (opt.pad_factor < 1 || (opt.pad_factor & (opt.pad_factor - 1)) != 0)
        throw ValidationError("pad factor must be a power of two");
    const double base = 10.0 / spec.omega_c;
    if (opt.window > 0.0 && opt.window < base * (1.0 - 1e-12))
        throw ValidationError("correlation window shorter than 10 / omega_c");

    const double Om = opt.omega_max_factor * spec.omega_c;
    const double dw = 2.0 * Om / double(N);
    const int Np = N * opt.pad_factor;
    const double dt = kTwoPi / (double(Np) * dw);
    const double period_limit = 0.5 * double(Np) * dt;
    if (opt.window > period_limit) throw ValidationError("correlation window exceeds the transform period");

    std::vector<cplx> x(std::size_t(Np), 0.0);
    for (int k = 0; k < N; ++k) x[std::size_t(k)] = ohmic_spectrum(-Om + double(k) * dw, spec, g);
    std::vector<cplx> X;
    Eigen::FFT<double> fft;
    fft.fwd(X, x);

    // The ohmic tail decays like 1/t^2, so the low-frequency round trip converges
    // slowly; an unset window doubles from 10 / omega_c until the check passes.
    double window = opt.window > 0.0 ? opt.window : base;
    for (;;) {
        CorrelationTable table;
        table.dt = dt;
        const auto nw = std::size_t(std::ceil(window / dt - 1e-9));
        table.values.resize(nw + 1);
        for (std::size_t n = 0; n <= nw; ++n) {
            const double t = double(n) * dt;
            table.values[n] = dw / kTwoPi * std::exp(kI * (Om * t)) * X[n];
        }
        const double err = correlation_roundtrip_error(table, spec, g);
        if (err <= opt.roundtrip_tol) return table;
        if (opt.window > 0.0 || 2.0 * window > period_limit || window > 64.0 * base) {
            std::ostringstream os;
            os << "correlation round trip misses the spectrum by " << err * 100.0 << "% (aliasing or short window)";
            throw NumericalError(os.str());
        }
        window *= 2.0;
    }
}

namespace {

// int_0^t C(s) e^{-i nu_ab s} ds for every (a, b), trapezoid on nodes plus a partial last panel.
Mat phase_integral(double t, double base_freq, const Eigen::VectorXd& e, const CorrelationTable& table) {
    const Eigen::Index d = e.size();
    Mat out = Mat::Zero(d, d);
    if (t <= 0.0) return out;
    if (t > table.window() * (1.0 + 1e-12)) throw ValidationError("correlation table does not cover Lambda integral");
    const double dt = table.dt;
    const auto full = std::size_t(std::floor(t / dt + 1e-12));
    for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b) {
            const double nu = base_freq + e(a) - e(b);
            cplx acc = 0.0;
            for (std::size_t n = 0; n < full; ++n) {
                const double s0 = double(n) * dt;
                const double s1 = s0 + dt;
                acc += 0.5 * dt * (table.values[n] * std::exp(-kI * (nu * s0)) +
                                   table.values[n + 1] * std::exp(-kI * (nu * s1)));
            }
            const double s0 = double(full) * dt;
            const double rem = t - s0;
            if (rem > 1e-15) acc += 0.5 * rem * (table.values[full] * std::exp(-kI * (nu * s0)) +
                                                 table.at(t) * std::exp(-kI * (nu * t)));
            out(a, b) = acc;
        }
    return out;
}

}  // namespace

Mat lambda_operator(double t, const std::map<int, Mat>& a_harmonics, const Eigen::VectorXd& energies,
                    double omega_d, const CorrelationTable& table) {
    const Eigen::Index d = energies.size();
    Mat out = Mat::Zero(d, d);
    for (const auto& [q, aq] : a_harmonics) {
        if (aq.rows() != d) throw ValidationError("lambda_operator: dimension mismatch");
        const Mat F = phase_integral(t, double(q) * omega_d, energies, table);
        out += std::exp(kI * (double(q) * omega_d * t)) * aq.cwiseProduct(F);
    }
    return out;
}

RedfieldEngine::RedfieldEngine(const Mat& h_static, double omega_d, OhmicBathSpec bath, RedfieldOptions opt)
    : h_(h_static), omega_d_(omega_d), bath_(std::move(bath)), opt_(opt) {
    bath_.validate();
    if (!h_static.isDiagonal(1e-12)) throw ValidationError("Redfield engine needs a diagonal system Hamiltonian");
    if (opt_.steps_per_period < 1) throw ValidationError("steps_per_period must be >= 1");
    d_ = h_static.rows();
    const int n = register_size(d_);
    energies_ = h_static.diagonal().real();
    table_ = correlation_from_spectrum(bath_, 1.0, opt_.correlation);
    window_ = table_.window();

    for (const auto& c : bath_.couplings) {
        if (c.qubit >= n) throw ValidationError("bath coupling qubit index out of range");
        Channel ch;
        ch.g2 = c.g * c.g;
        for (const auto& [k, m] : rotating_pauli_harmonics(c.axis)) ch.a.emplace(k, embed_single(m, c.qubit, n));
        if (c.axis != 'z' && omega_d_ != 0.0) rotating_ = true;
        channels_.push_back(std::move(ch));
    }

    // Early-time cumulative integrals on the table nodes, shared by all channels.
    std::vector<int> qs;
    for (const auto& ch : channels_)
        for (const auto& kv : ch.a)
            if (std::find(qs.begin(), qs.end(), kv.first) == qs.end()) qs.push_back(kv.first);
    const std::size_t nodes = table_.values.size();
    for (int q : qs) {
        std::vector<Mat> F(nodes, Mat::Zero(d_, d_));
        Eigen::MatrixXd nu(d_, d_);
        for (Eigen::Index a = 0; a < d_; ++a)
            for (Eigen::Index b = 0; b < d_; ++b) nu(a, b) = double(q) * omega_d_ + energies_(a) - energies_(b);
        for (std::size_t k = 0; k + 1 < nodes; ++k) {
            const double s0 = double(k) * table_.dt;
            const double s1 = s0 + table_.dt;
            Mat inc(d_, d_);
            for (Eigen::Index a = 0; a < d_; ++a)
                for (Eigen::Index b = 0; b < d_; ++b)
                    inc(a, b) = 0.5 * table_.dt * (table_.values[k] * std::exp(-kI * (nu(a, b) * s0)) +
                                                   table_.values[k + 1] * std::exp(-kI * (nu(a, b) * s1)));
            F[k + 1] = F[k] + inc;
        }
        early_.emplace(q, std::move(F));
    }
    for (auto& ch : channels_)
        for (const auto& [q, aq] : ch.a) ch.lam_late.emplace(q, ch.g2 * aq.cwiseProduct(early_.at(q).back()));

    // Superoperator harmonics, column-major vec: vec(X rho Y) = (Y^T kron X) vec(rho).
    const Mat I = Mat::Identity(d_, d_);
    auto add = [&](int K, const Mat& m) {
        auto it = l_harm_.find(K);
        if (it == l_harm_.end()) l_harm_.emplace(K, m);
        else it->second += m;
    };
    add(0, -kI * (Mat(Eigen::kroneckerProduct(I, h_)) - Mat(Eigen::kroneckerProduct(h_.transpose(), I))));
    for (const auto& ch : channels_)
        for (const auto& [p, ap] : ch.a)
            for (const auto& [q, lq] : ch.lam_late) {
                add(p + q, -Mat(Eigen::kroneckerProduct(I, ap * lq)) + Mat(Eigen::kroneckerProduct(ap.transpose(), lq)));
                add(p - q, -Mat(Eigen::kroneckerProduct((lq.adjoint() * ap).transpose(), I)) +
                               Mat(Eigen::kroneckerProduct(lq.conjugate(), ap)));
            }
    build_lattice();
}

Mat RedfieldEngine::generator(double t) const {
    Mat g = Mat::Zero(d_ * d_, d_ * d_);
    for (const auto& [K, m] : l_harm_) {
        if (K == 0) g += m;
        else g += std::exp(kI * (double(K) * omega_d_ * t)) * m;
    }
    return g;
}

void RedfieldEngine::build_lattice() {
    period_ = rotating_ ? kTwoPi / std::abs(omega_d_) : opt_.static_period;
    nsteps_ = opt_.steps_per_period;
    dt_ = period_ / double(nsteps_);
    const Eigen::Index D = d_ * d_;
    const Mat I = Mat::Identity(D, D);
    auto rk4_matrix = [&](double t) {
        const Mat L1 = generator(t);
        const Mat L2 = generator(t + 0.5 * dt_);
        const Mat L3 = generator(t + dt_);
        const Mat K2 = L2 + (0.5 * dt_) * (L2 * L1);
        const Mat K3 = L2 + (0.5 * dt_) * (L2 * K2);
        const Mat K4 = L3 + dt_ * (L3 * K3);
        return Mat(I + (dt_ / 6.0) * (L1 + 2.0 * K2 + 2.0 * K3 + K4));
    };
    step_.clear();
    if (rotating_) {
        for (int r = 0; r < nsteps_; ++r) step_.push_back(rk4_matrix(window_ + double(r) * dt_));
    } else {
        step_.assign(std::size_t(nsteps_), rk4_matrix(window_));
    }
    Mat P = step_[0];
    for (int r = 1; r < nsteps_; ++r) P = step_[std::size_t(r)] * P;
    period_pow_.clear();
    period_pow_.push_back(std::move(P));
}

Mat RedfieldEngine::early_F(int q, double t) const {
    const auto& F = early_.at(q);
    const double s = t / table_.dt;
    auto n = std::size_t(std::max(0.0, std::floor(s)));
    if (n + 1 >= F.size()) return F.back();
    const double f = s - double(n);
    return (1.0 - f) * F[n] + f * F[n + 1];
}

Mat RedfieldEngine::lambda(std::size_t channel, double t) const {
    const Channel& ch = channels_.at(channel);
    Mat out = Mat::Zero(d_, d_);
    for (const auto& [q, aq] : ch.a) {
        const Mat lq = t >= window_ ? ch.lam_late.at(q) : Mat(ch.g2 * aq.cwiseProduct(early_F(q, t)));
        out += std::exp(kI * (double(q) * omega_d_ * t)) * lq;
    }
    return out;
}

Mat RedfieldEngine::rhs(const Mat& rho, double t) const {
    Mat d = -kI * (h_ * rho - rho * h_);
    for (std::size_t m = 0; m < channels_.size(); ++m) {
        Mat A = Mat::Zero(d_, d_);
        for (const auto& [p, ap] : channels_[m].a) A += std::exp(kI * (double(p) * omega_d_ * t)) * ap;
        const Mat L = lambda(m, t);
        const Mat Ld = L.adjoint();
        d -= A * L * rho - L * rho * A + rho * Ld * A - A * rho * Ld;
    }
    return d;
}

void RedfieldEngine::advance_early(Vec& v, double t0, double t1) const {
    const double span = t1 - t0;
    if (span <= 0.0) return;
    const long m = std::max<long>(1, long(std::ceil(span / dt_ - 1e-9)));
    const double h = span / double(m);
    Mat rho = Eigen::Map<Mat>(v.data(), d_, d_);
    for (long s = 0; s < m; ++s) {
        const double t = t0 + double(s) * h;
        const Mat k1 = rhs(rho, t);
        const Mat k2 = rhs(rho + 0.5 * h * k1, t + 0.5 * h);
        const Mat k3 = rhs(rho + 0.5 * h * k2, t + 0.5 * h);
        const Mat k4 = rhs(rho + h * k3, t + h);
        rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    v = Eigen::Map<const Vec>(rho.data(), d_ * d_);
}

void RedfieldEngine::rk4_vec(Vec& v, double t, double h) const {
    if (h <= 0.0) return;
    const Mat L1 = generator(t);
    const Mat L2 = generator(t + 0.5 * h);
    const Mat L3 = generator(t + h);
    const Vec k1 = L1 * v;
    const Vec k2 = L2 * (v + 0.5 * h * k1);
    const Vec k3 = L2 * (v + 0.5 * h * k2);
    const Vec k4 = L3 * (v + h * k3);
    v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

void RedfieldEngine::advance_late(Vec& v, double t0, double t1) {
    if (t1 <= t0) return;
    const double eps = 1e-7;
    const auto lattice = [&](long j) { return window_ + double(j) * dt_; };
    const long ja = long(std::ceil((t0 - window_) / dt_ - eps));
    const long jb = long(std::floor((t1 - window_) / dt_ + eps));
    if (ja > jb) {
        rk4_vec(v, t0, t1 - t0);
        return;
    }
    rk4_vec(v, t0, lattice(ja) - t0);
    long j = ja;
    const long N = nsteps_;
    while (j < jb && j % N != 0) {
        v = step_[std::size_t(j % N)] * v;
        ++j;
    }
    long periods = (jb - j) / N;
    for (std::size_t bit = 0; periods > 0; ++bit, periods >>= 1) {
        if (bit >= period_pow_.size()) period_pow_.push_back(period_pow_.back() * period_pow_.back());
        if (periods & 1) {
            v = period_pow_[bit] * v;
            j += N << bit;
        }
    }
    while (j < jb) {
        v = step_[std::size_t(j % N)] * v;
        ++j;
    }
    rk4_vec(v, lattice(jb), t1 - lattice(jb));
}

void RedfieldEngine::settle(Mat& rho, double t) {
    const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    diag_.max_hermiticity_drift = std::max(diag_.max_hermiticity_drift, herm);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    const double drift = std::abs(rho.trace() - 1.0);
    diag_.max_trace_drift = std::max(diag_.max_trace_drift, drift);
    if (drift > 1e-6) throw NumericalError("Redfield trace drift " + std::to_string(drift));
    if (drift > 1e-12) {
        rho /= rho.trace().real();
        ++diag_.renormalizations;
    }
    const DensityCheck c = check_density(rho);
    diag_.min_eigenvalue = std::min(diag_.min_eigenvalue, c.min_eigenvalue);
    if (c.min_eigenvalue < -opt_.positivity_abort) {
        std::ostringstream os;
        os << "Redfield positivity violated: eigenvalue " << c.min_eigenvalue << " at t = " << t
           << " ns (check coupling strengths and cutoff)";
        throw NumericalError(os.str());
    }
    if (c.min_eigenvalue < opt_.positivity_flag) {
        ++diag_.positivity_flags;
        diag_.note("negative eigenvalue " + std::to_string(c.min_eigenvalue) + " at t = " + std::to_string(t));
    }
}

void RedfieldEngine::advance(Mat& rho, double t0, double t1) {
    if (rho.rows() != d_) throw ValidationError("Redfield advance: dimension mismatch");
    if (t0 < 0.0) throw ValidationError("Redfield time must be >= 0");
    if (t1 <= t0) return;
    Vec v = Eigen::Map<const Vec>(rho.data(), d_ * d_);
    if (t0 < window_) advance_early(v, t0, std::min(t1, window_));
    if (t1 > window_) advance_late(v, std::max(t0, window_), t1);
    rho = Eigen::Map<const Mat>(v.data(), d_, d_);
    ++diag_.steps;
    settle(rho, t1);
}

Trajectory redfield_evolve(const Mat& rho0, const Mat& h_static, double omega_d, const OhmicBathSpec& bath,
                           const std::vector<double>& grid, const std::vector<Pulse>& pulses, RedfieldOptions opt) {
    RedfieldEngine eng(h_static, omega_d, bath, opt);
    Trajectory tr;
    tr.times = grid;
    tr.states.resize(grid.size());
    Mat rho = rho0;
    apply_sequence(
        rho, StateKind::density, pulses, grid, register_size(rho0.rows()),
        [&](Mat& r, double a, double b) { eng.advance(r, a, b); },
        [&](std::size_t k, const Mat& r) { tr.states[k] = r; });
    tr.diagnostics = eng.diagnostics();
    return tr;
}

}  // namespace ddsim
