#include "ddsim/magnus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ddsim/errors.hpp"

namespace ddsim {

std::vector<CouplingTerm> all_coupling_terms() {
    std::vector<CouplingTerm> out;
    for (char a : std::string("0xyz"))
        for (char b : std::string("0xyz"))
            if (a != '0' || b != '0') out.push_back({a, b, 1.0});
    return out;
}

std::string to_string(CancelClass c) {
    switch (c) {
        case CancelClass::always_cancels: return "always_cancels";
        case CancelClass::cancels_at_fine_tuned_tau: return "cancels_at_fine_tuned_tau";
        case CancelClass::suppressed_as_g_over_omega_d: return "suppressed_as_g_over_omega_d";
        case CancelClass::never_cancels: return "never_cancels";
    }
    return "never_cancels";
}

namespace {

// sigma^a(t) with x -> cos X + sin Y, y -> cos Y - sin X.
Eigen::Matrix2cd rot(char a, double c, double s) {
    Eigen::Matrix2cd m;
    switch (a) {
        case 'x': m << 0.0, c - kI * s, c + kI * s, 0.0; break;
        case 'y': m << 0.0, -s - kI * c, -s + kI * c, 0.0; break;
        case 'z': m << 1.0, 0.0, 0.0, -1.0; break;
        case '0': m << 1.0, 0.0, 0.0, 1.0; break;
        default: throw ValidationError(std::string("coupling axis must be 0, x, y or z, got '") + a + "'");
    }
    return m;
}

using Mat4 = Eigen::Matrix4cd;

Mat4 kron2(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
    Mat4 m;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) m.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    return m;
}

struct Segment {
    double t0, t1;
    Eigen::Matrix2cd T0, T1;  // accumulated pulses on qubit 0 and qubit 1
};

std::vector<Segment> segments(const DDSequence& seq) {
    seq.validate();
    std::vector<Segment> out;
    Eigen::Matrix2cd T0 = Eigen::Matrix2cd::Identity();
    Eigen::Matrix2cd T1 = Eigen::Matrix2cd::Identity();
    double t = 0.0;
    for (const auto& p : seq.pulses) {
        if (p.qubit != 0 && p.qubit != 1) throw ValidationError("Magnus analysis expects pulses on qubit 0 or 1");
        if (p.time > t) {
            out.push_back({t, p.time, T0, T1});
            t = p.time;
        }
        const Eigen::Matrix2cd u = pulse_unitary({0.0, 0, p.axis, p.angle}, 1);
        if (p.qubit == 0) T0 = u * T0;
        else T1 = u * T1;
    }
    if (seq.cycle > t) out.push_back({t, seq.cycle, T0, T1});
    return out;
}

class AdaptiveSimpson {
public:
    AdaptiveSimpson(const Segment& s, char a, char b, double w, int max_depth)
        : seg_(s), a_(a), b_(b), w_(w), max_depth_(max_depth) {}

    Mat4 f(double t) const {
        const double c = std::cos(w_ * t);
        const double sn = std::sin(w_ * t);
        return kron2(seg_.T0.adjoint() * rot(a_, c, sn) * seg_.T0, seg_.T1.adjoint() * rot(b_, c, sn) * seg_.T1);
    }

    Mat4 integrate(double tol) const {
        const double len = seg_.t1 - seg_.t0;
        // Start at a quarter period per panel so aliasing cannot fake convergence.
        const int panels = std::max(1, int(std::ceil(std::abs(w_) * len / (0.5 * kPi))));
        const double h = len / double(panels);
        Mat4 total = Mat4::Zero();
        for (int k = 0; k < panels; ++k) {
            const double a = seg_.t0 + double(k) * h;
            const double b = a + h;
            const double m = 0.5 * (a + b);
            const Mat4 fa = f(a), fm = f(m), fb = f(b);
            const Mat4 whole = (h / 6.0) * (fa + 4.0 * fm + fb);
            total += recurse(a, b, fa, fm, fb, whole, tol / double(panels), 0);
        }
        return total;
    }

private:
    Mat4 recurse(double a, double b, const Mat4& fa, const Mat4& fm, const Mat4& fb, const Mat4& whole, double tol,
                 int depth) const {
        const double m = 0.5 * (a + b);
        const double lm = 0.5 * (a + m);
        const double rm = 0.5 * (m + b);
        const Mat4 flm = f(lm), frm = f(rm);
        const Mat4 left = ((m - a) / 6.0) * (fa + 4.0 * flm + fm);
        const Mat4 right = ((b - m) / 6.0) * (fm + 4.0 * frm + fb);
        const Mat4 diff = left + right - whole;
        if (diff.norm() <= 15.0 * tol) return left + right + diff / 15.0;
        if (depth >= max_depth_) throw NumericalError("adaptive Simpson did not converge");
        return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
               recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
    }

    const Segment& seg_;
    char a_, b_;
    double w_;
    int max_depth_;
};

double spectral_norm(const Mat& m) {
    Eigen::JacobiSVD<Mat> svd(m);
    return svd.singularValues()(0);
}

}  // namespace

IntegralResult first_order_integral(const CouplingTerm& term, const DDSequence& seq, double omega_d,
                                    const MagnusOptions& opt) {
    const auto segs = segments(seq);
    Mat4 total = Mat4::Zero();
    // Pauli products have unit operator norm, so |integral| <= cycle sets the scale.
    const double tol = opt.rel_tol * 1e-2 * seq.cycle;
    for (const auto& s : segs) {
        AdaptiveSimpson q(s, term.alpha, term.beta, omega_d, opt.max_depth);
        total += q.integrate(tol * (s.t1 - s.t0) / seq.cycle);
    }
    IntegralResult r;
    r.integral = term.g * Mat(total);
    r.norm = spectral_norm(r.integral);
    r.residual = term.g != 0.0 ? r.norm / (std::abs(term.g) * seq.cycle) : 0.0;
    return r;
}

bool is_fine_tuned(double tau, double omega_d) {
    if (omega_d == 0.0) return true;
    const double x = tau * std::abs(omega_d) / kTwoPi;
    const double k = std::round(x);
    return k >= 1.0 && std::abs(x - k) <= 1e-9 * x;
}

double fine_tuned_tau(double tau, double omega_d) {
    if (omega_d == 0.0) return tau;
    const double period = kTwoPi / std::abs(omega_d);
    return period * std::max(1.0, std::round(tau / period));
}

std::vector<double> omega_ladder(double cycle, int points, double lo, double hi) {
    if (points < 2 || !(cycle > 0.0) || !(hi > lo) || !(lo > 0.0)) throw ValidationError("degenerate omega ladder");
    std::vector<double> out;
    for (int k = 0; k < points; ++k)
        out.push_back(lo / cycle * std::pow(hi / lo, double(k) / double(points - 1)));
    return out;
}

ScalingFit fast_drive_scaling(const CouplingTerm& term, const DDSequence& seq, const std::vector<double>& ladder,
                              const MagnusOptions& opt) {
    if (ladder.size() < 3) throw ValidationError("fast_drive_scaling: degenerate ladder (need >= 3 rungs)");
    const auto [lo, hi] = std::minmax_element(ladder.begin(), ladder.end());
    if (!(*lo > 0.0) || *hi / *lo < 100.0 * (1.0 - 1e-9))
        throw ValidationError("fast_drive_scaling: ladder must span at least two decades");
    const double theta0 = kTwoPi * (0.5 * (std::sqrt(5.0) - 1.0));
    const double tau = seq.tau;
    ScalingFit fit;
    for (double w : ladder) {
        const double m = std::max(0.0, std::round((w * tau - theta0) / kTwoPi));
        const double ws = (kTwoPi * m + theta0) / tau;
        const auto r = first_order_integral(term, seq, ws, opt);
        if (!(r.residual > 0.0)) throw ValidationError("fast_drive_scaling: residual vanishes, slope undefined");
        fit.omegas.push_back(ws);
        fit.residuals.push_back(r.residual);
    }
    const std::size_t n = fit.omegas.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double x = std::log(fit.omegas[k]);
        const double y = std::log(fit.residuals[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double den = double(n) * sxx - sx * sx;
    if (std::abs(den) < 1e-300) throw ValidationError("fast_drive_scaling: degenerate ladder");
    fit.slope = (double(n) * sxy - sx * sy) / den;
    return fit;
}

const CancellationRow& CancellationReport::row(char alpha, char beta) const {
    for (const auto& r : rows)
        if (r.term.alpha == alpha && r.term.beta == beta) return r;
    throw ValidationError(std::string("no row for (") + alpha + "," + beta + ")");
}

CancellationReport cancellation_table(const std::string& sequence_name, int pulsed_qubit, double omega_d,
                                      const std::vector<double>& tau_list, const MagnusOptions& opt) {
    if (tau_list.empty()) throw ValidationError("cancellation_table needs at least one tau");
    CancellationReport rep;
    rep.sequence = sequence_name;
    rep.omega_d = omega_d;
    for (const auto& term : all_coupling_terms()) {
        CancellationRow row;
        row.term = term;
        bool all_small = true;
        bool any_fine = false;
        bool fine_small = true;
        double generic_tau = -1.0;
        for (double tau : tau_list) {
            const DDSequence seq = make_sequence(sequence_name, tau, pulsed_qubit);
            const double r = first_order_integral(term, seq, omega_d, opt).residual;
            row.taus.push_back(tau);
            row.residuals.push_back(r);
            const bool small = r < kCancelThreshold;
            all_small = all_small && small;
            if (is_fine_tuned(tau, omega_d)) {
                any_fine = true;
                fine_small = fine_small && small;
            } else if (generic_tau < 0.0) {
                generic_tau = tau;
            }
        }
        if (all_small) {
            row.cls = CancelClass::always_cancels;
        } else if (any_fine && fine_small) {
            row.cls = CancelClass::cancels_at_fine_tuned_tau;
        } else if (omega_d != 0.0) {
            const DDSequence seq = make_sequence(sequence_name, generic_tau > 0.0 ? generic_tau : tau_list.front(),
                                                 pulsed_qubit);
            row.slope = fast_drive_scaling(term, seq, omega_ladder(seq.cycle), opt).slope;
            row.cls = row.slope < -0.5 ? CancelClass::suppressed_as_g_over_omega_d : CancelClass::never_cancels;
        } else {
            row.cls = CancelClass::never_cancels;
        }
        rep.rows.push_back(row);
    }
    return rep;
}

SwitchingFunctions switching_functions(const DDSequence& seq) {
    seq.validate();
    std::vector<double> tx, ty;
    for (const auto& p : seq.pulses) {
        if (p.axis == Axis::X) tx.push_back(p.time);
        else if (p.axis == Axis::Y) ty.push_back(p.time);
        else throw ValidationError("switching functions are defined for X and Y pulses only");
    }
    for (double a : tx)
        for (double b : ty)
            if (std::abs(a - b) <= 1e-12 * std::max(1.0, seq.cycle))
                throw ValidationError("coincident X and Y pulses");
    SwitchingFunctions sf;
    sf.edges.push_back(0.0);
    for (const auto& p : seq.pulses)
        if (p.time > sf.edges.back() && p.time < seq.cycle) sf.edges.push_back(p.time);
    sf.edges.push_back(seq.cycle);
    // f_R = -1 on [t_{2i}, t_{2i+1}) and +1 elsewhere.
    auto value = [](const std::vector<double>& ts, double t) {
        int flips = 0;
        for (double x : ts)
            if (x <= t) ++flips;
        return flips % 2 == 1 ? -1 : 1;
    };
    for (std::size_t k = 0; k + 1 < sf.edges.size(); ++k) {
        const double mid = 0.5 * (sf.edges[k] + sf.edges[k + 1]);
        sf.fx.push_back(value(tx, mid));
        sf.fy.push_back(value(ty, mid));
    }
    return sf;
}

namespace {

void require_supported(const DDSequence& seq) {
    if (seq.kind != SequenceKind::pure_x && seq.kind != SequenceKind::pure_y && seq.kind != SequenceKind::xy4)
        throw ValidationError("toggling bound is only established for pure_x, pure_y and xy4");
}

}  // namespace

ToggleBound toggling_bound_check(double gx, double gy, double gz, double B, double omega_d, const DDSequence& seq) {
    require_supported(seq);
    const auto sf = switching_functions(seq);
    double fy_cos = 0, fy_sin = 0, fx_cos = 0, fx_sin = 0, fxfy = 0;
    for (std::size_t k = 0; k + 1 < sf.edges.size(); ++k) {
        const double a = sf.edges[k], b = sf.edges[k + 1];
        double ic, is;
        if (omega_d == 0.0) {
            ic = b - a;
            is = 0.0;
        } else {
            ic = (std::sin(omega_d * b) - std::sin(omega_d * a)) / omega_d;
            is = (std::cos(omega_d * a) - std::cos(omega_d * b)) / omega_d;
        }
        fy_cos += sf.fy[k] * ic;
        fy_sin += sf.fy[k] * is;
        fx_cos += sf.fx[k] * ic;
        fx_sin += sf.fx[k] * is;
        fxfy += sf.fx[k] * sf.fy[k] * (b - a);
    }
    ToggleBound out;
    out.cx = B * (gx * fy_cos - gy * fx_sin);
    out.cy = B * (gx * fy_sin + gy * fx_cos);
    out.cz = B * gz * fxfy;
    out.lhs = std::sqrt(out.cx * out.cx + out.cy * out.cy + out.cz * out.cz);
    const double g = std::max(std::abs(gx), std::abs(gy));
    out.bound = omega_d == 0.0 ? (g == 0.0 ? 0.0 : std::numeric_limits<double>::infinity())
                               : 16.0 * g * B / std::abs(omega_d);
    return out;
}

SingleFrequencyTerms single_frequency_terms(double gx, double gy, const DDSequence& seq) {
    require_supported(seq);
    const auto sf = switching_functions(seq);
    double ify = 0, ifx = 0;
    for (std::size_t k = 0; k + 1 < sf.edges.size(); ++k) {
        ify += sf.fy[k] * (sf.edges[k + 1] - sf.edges[k]);
        ifx += sf.fx[k] * (sf.edges[k + 1] - sf.edges[k]);
    }
    return {0.5 * gx * ify, -0.5 * gy * ifx, 0.5 * gx * ify, -0.5 * gy * ifx};
}

}  // namespace ddsim
