#include "ddsim/fit.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include <unsupported/Eigen/FFT>
#include <unsupported/Eigen/LevenbergMarquardt>

#include "ddsim/errors.hpp"
#include "ddsim/operators.hpp"

namespace ddsim {

namespace {

struct Scaled {
    Eigen::VectorXd t, y;
    double t0 = 0.0, tspan = 1.0, ymean = 0.0, yscale = 1.0;
};

Scaled normalize(const std::vector<double>& t, const std::vector<double>& y, std::size_t min_points) {
    if (t.size() != y.size()) throw ValidationError("fit: time and value lengths differ");
    if (t.size() < min_points) throw NumericalError("fit: too few points");
    for (std::size_t k = 1; k < t.size(); ++k)
        if (!(t[k] > t[k - 1])) throw ValidationError("fit: times must be strictly increasing");
    Scaled s;
    const auto m = Eigen::Index(t.size());
    s.t.resize(m);
    s.y.resize(m);
    s.t0 = t.front();
    s.tspan = t.back() - t.front();
    s.ymean = std::accumulate(y.begin(), y.end(), 0.0) / double(m);
    double var = 0.0;
    for (double v : y) var += (v - s.ymean) * (v - s.ymean);
    s.yscale = std::sqrt(var / double(m));
    for (Eigen::Index k = 0; k < m; ++k) {
        s.t(k) = (t[std::size_t(k)] - s.t0) / s.tspan;
        s.y(k) = s.yscale > 0.0 ? (y[std::size_t(k)] - s.ymean) / s.yscale : 0.0;
    }
    return s;
}

// Parameters p = (A, G, W, phi, c) in scaled units.
struct CosFunctor : Eigen::DenseFunctor<double> {
    const Eigen::VectorXd& t;
    const Eigen::VectorXd& y;
    CosFunctor(const Eigen::VectorXd& tt, const Eigen::VectorXd& yy)
        : DenseFunctor<double>(5, int(tt.size())), t(tt), y(yy) {}

    int operator()(const InputType& p, ValueType& f) const {
        for (Eigen::Index k = 0; k < t.size(); ++k)
            f(k) = p(0) * std::exp(-p(1) * t(k)) * std::cos(p(2) * t(k) + p(3)) + p(4) - y(k);
        return 0;
    }
    int df(const InputType& p, JacobianType& J) const {
        for (Eigen::Index k = 0; k < t.size(); ++k) {
            const double e = std::exp(-p(1) * t(k));
            const double c = std::cos(p(2) * t(k) + p(3));
            const double s = std::sin(p(2) * t(k) + p(3));
            J(k, 0) = e * c;
            J(k, 1) = -t(k) * p(0) * e * c;
            J(k, 2) = -t(k) * p(0) * e * s;
            J(k, 3) = -p(0) * e * s;
            J(k, 4) = 1.0;
        }
        return 0;
    }
};

struct ExpFunctor : Eigen::DenseFunctor<double> {
    const Eigen::VectorXd& t;
    const Eigen::VectorXd& y;
    ExpFunctor(const Eigen::VectorXd& tt, const Eigen::VectorXd& yy)
        : DenseFunctor<double>(3, int(tt.size())), t(tt), y(yy) {}

    int operator()(const InputType& p, ValueType& f) const {
        for (Eigen::Index k = 0; k < t.size(); ++k) f(k) = p(0) * std::exp(-p(1) * t(k)) + p(2) - y(k);
        return 0;
    }
    int df(const InputType& p, JacobianType& J) const {
        for (Eigen::Index k = 0; k < t.size(); ++k) {
            const double e = std::exp(-p(1) * t(k));
            J(k, 0) = e;
            J(k, 1) = -t(k) * p(0) * e;
            J(k, 2) = 1.0;
        }
        return 0;
    }
};

// Standard errors from s^2 (J^T J)^-1 at the optimum.
template <class F>
Eigen::VectorXd standard_errors(const F& f, const Eigen::VectorXd& p) {
    const Eigen::Index m = f.values(), n = f.inputs();
    Eigen::VectorXd r(m);
    Eigen::MatrixXd J(m, n);
    f(p, r);
    f.df(p, J);
    const double dof = double(std::max<Eigen::Index>(1, m - n));
    const double s2 = r.squaredNorm() / dof;
    const Eigen::MatrixXd cov = (J.transpose() * J).completeOrthogonalDecomposition().pseudoInverse() * s2;
    return cov.diagonal().cwiseMax(0.0).cwiseSqrt();
}

// Peak angular frequency (scaled time) of the mean-removed data resampled on a uniform grid.
double spectral_peak(const Scaled& s, const FitOptions& opt) {
    const Eigen::Index m = s.t.size();
    const Eigen::Index n = std::max<Eigen::Index>(m, 64);
    const int pad = 8;
    std::vector<double> u(std::size_t(n * pad), 0.0);
    Eigen::Index j = 0;
    for (Eigen::Index k = 0; k < n; ++k) {
        const double tk = double(k) / double(n - 1);
        while (j + 2 < m && s.t(j + 1) < tk) ++j;
        const double w = (tk - s.t(j)) / (s.t(j + 1) - s.t(j));
        u[std::size_t(k)] = s.y(j) + std::clamp(w, 0.0, 1.0) * (s.y(j + 1) - s.y(j));
    }
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> spec;
    fft.fwd(spec, u);
    const std::size_t half = u.size() / 2;
    std::vector<double> power(half);
    for (std::size_t k = 0; k < half; ++k) power[k] = std::norm(spec[k]);
    // skip bins below half a period over the span
    const std::size_t kmin = std::size_t(pad);
    std::size_t kp = kmin;
    for (std::size_t k = kmin; k < half; ++k)
        if (power[k] > power[kp]) kp = k;
    std::vector<double> sorted(power.begin() + long(kmin), power.end());
    std::nth_element(sorted.begin(), sorted.begin() + long(sorted.size() / 2), sorted.end());
    const double floor = sorted[sorted.size() / 2];
    if (!(power[kp] > opt.peak_to_floor * floor) || power[kp] <= 0.0)
        throw NumericalError("fit: no spectral peak above the noise floor");
    double shift = 0.0;
    if (kp > kmin && kp + 1 < half) {
        const double a = power[kp - 1], b = power[kp], c = power[kp + 1];
        const double den = a - 2.0 * b + c;
        if (den < 0.0) shift = 0.5 * (a - c) / den;
    }
    const double cycles = (double(kp) + shift) / double(u.size()) * double(n - 1);
    return kTwoPi * cycles;
}

}  // namespace

DampedCosineFit fit_damped_cosine(const std::vector<double>& t, const std::vector<double>& y,
                                  const FitOptions& opt) {
    const Scaled s = normalize(t, y, 8);
    if (!(s.yscale > 1e-14 * std::max(1.0, std::abs(s.ymean))))
        throw NumericalError("fit: series is constant, no oscillation to fit");
    const double w0 = spectral_peak(s, opt);
    if (w0 / kTwoPi < opt.min_periods * 0.9)
        throw NumericalError("fit: series spans fewer than 1.5 oscillation periods");

    // linear solve for amplitude, phase and offset at the seed frequency
    const Eigen::Index m = s.t.size();
    Eigen::MatrixXd B(m, 3);
    for (Eigen::Index k = 0; k < m; ++k) B.row(k) << std::cos(w0 * s.t(k)), std::sin(w0 * s.t(k)), 1.0;
    const Eigen::Vector3d lin = B.colPivHouseholderQr().solve(s.y);

    Eigen::VectorXd p(5);
    p << std::hypot(lin(0), lin(1)), 0.0, w0, std::atan2(-lin(1), lin(0)), lin(2);
    CosFunctor f(s.t, s.y);
    Eigen::LevenbergMarquardt<CosFunctor> lm(f);
    lm.setMaxfev(opt.max_evaluations);
    lm.setXtol(opt.xtol);
    lm.minimize(p);
    if (!p.allFinite()) throw NumericalError("fit: Levenberg-Marquardt diverged");
    if (p(0) < 0.0) {
        p(0) = -p(0);
        p(3) += kPi;
    }
    if (p(2) < 0.0) {
        p(2) = -p(2);
        p(3) = -p(3);
    }
    p(3) = std::remainder(p(3), kTwoPi);
    if (p(2) / kTwoPi < opt.min_periods) throw NumericalError("fit: series spans fewer than 1.5 oscillation periods");
    const Eigen::VectorXd se = standard_errors(f, p);

    DampedCosineFit r;
    const double ts = s.tspan;
    r.amplitude = p(0) * s.yscale;
    r.decay = p(1) / ts;
    r.omega = p(2) / ts;
    // undo the time shift: cos(W (t - t0) + phi)
    r.phase = std::remainder(p(3) - r.omega * s.t0, kTwoPi);
    r.offset = p(4) * s.yscale + s.ymean;
    r.amplitude *= std::exp(r.decay * s.t0);
    r.sigma = {{"amplitude", se(0) * s.yscale},
               {"decay", se(1) / ts},
               {"omega", se(2) / ts},
               {"phase", se(3)},
               {"offset", se(4) * s.yscale}};
    r.evaluations = int(lm.nfev());
    return r;
}

FitResult extract_crosstalk(const std::vector<double>& t, const std::vector<double>& y, Frame frame,
                            const FitOptions& opt) {
    double div = 0.0;
    switch (frame) {
        case Frame::plus: div = 2.0; break;
        case Frame::zero: div = 4.0; break;
        default: throw ValidationError("extract_crosstalk needs the plus or zero frame");
    }
    const DampedCosineFit f = fit_damped_cosine(t, y, opt);
    FitResult r;
    r.omega = f.omega;
    r.J_estimate = f.omega / div;
    r.decay_rate = f.decay;
    r.uncertainty = f.sigma;
    r.uncertainty["J_estimate"] = f.sigma.at("omega") / div;
    r.method = "fft_seed+levenberg_marquardt";
    return r;
}

ExponentialFit fit_exponential(const std::vector<double>& t, const std::vector<double>& y, const FitOptions& opt) {
    const Scaled s = normalize(t, y, 4);
    ExponentialFit r;
    if (!(s.yscale > 1e-12 * std::max(1.0, std::abs(s.ymean)))) {
        r.offset = s.ymean;
        return r;
    }
    const Eigen::Index m = s.t.size();
    // grid of rate seeds, each with a linear solve for A and B
    Eigen::VectorXd best(3);
    double best_rss = std::numeric_limits<double>::infinity();
    for (double g : {0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0}) {
        Eigen::MatrixXd B(m, 2);
        for (Eigen::Index k = 0; k < m; ++k) B.row(k) << std::exp(-g * s.t(k)), 1.0;
        const Eigen::Vector2d ab = B.colPivHouseholderQr().solve(s.y);
        const double rss = (B * ab - s.y).squaredNorm();
        if (rss < best_rss) {
            best_rss = rss;
            best << ab(0), g, ab(1);
        }
    }
    ExpFunctor f(s.t, s.y);
    Eigen::LevenbergMarquardt<ExpFunctor> lm(f);
    lm.setMaxfev(opt.max_evaluations);
    lm.setXtol(opt.xtol);
    lm.minimize(best);
    if (!best.allFinite()) throw NumericalError("exponential fit diverged");
    const Eigen::VectorXd se = standard_errors(f, best);
    const double ts = s.tspan;
    const double shift = std::exp(best(1) * s.t0 / ts);
    r.amplitude = best(0) * s.yscale * shift;
    r.rate = best(1) / ts;
    r.offset = best(2) * s.yscale + s.ymean;
    r.sigma_amplitude = se(0) * s.yscale * shift;
    r.sigma_rate = se(1) / ts;
    r.sigma_offset = se(2) * s.yscale;
    return r;
}

}  // namespace ddsim
