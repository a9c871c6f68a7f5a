#include "ddsim/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ddsim/errors.hpp"

namespace ddsim {

void LindbladSpec::validate(Eigen::Index dim) const {
    for (const auto& op : ops) {
        if (op.gamma < 0.0) throw ValidationError("Lindblad rate must be nonnegative (" + op.tag + ")");
        if (op.L.rows() != dim || op.L.cols() != dim)
            throw ValidationError("Lindblad operator dimension mismatch (" + op.tag + ")");
    }
}

LindbladOp pauli_op(const std::string& label, double gamma) {
    return {pauli_expand({label, 1.0}), gamma, label};
}

namespace {

Mat sigma_minus() {
    Mat s = Mat::Zero(2, 2);
    s(0, 1) = 1.0;
    return s;
}

}  // namespace

LindbladOp lower_op(int qubit, int n, double gamma) {
    return {embed_single(sigma_minus(), qubit, n), gamma, "lower" + std::to_string(qubit)};
}

LindbladOp lower_joint_op(int qa, int qb, int n, double gamma) {
    return {embed_pair(sigma_minus(), qa, sigma_minus(), qb, n), gamma,
            "lower" + std::to_string(qa) + std::to_string(qb)};
}

Mat lindblad_rhs(const Mat& rho, const Mat& H, const LindbladSpec& spec) {
    if (rho.rows() != H.rows() || rho.cols() != H.cols()) throw ValidationError("lindblad_rhs: dimension mismatch");
    spec.validate(rho.rows());
    Mat d = -kI * (H * rho - rho * H);
    for (const auto& op : spec.ops) {
        if (op.gamma == 0.0) continue;
        const Mat ld = op.L.adjoint();
        const Mat ldl = ld * op.L;
        d += op.gamma * (op.L * rho * ld - 0.5 * (ldl * rho + rho * ldl));
    }
    return d;
}

void Diagnostics::note(const std::string& msg) {
    if (events.size() < 64) events.push_back(msg);
}

LindbladEngine::LindbladEngine(FrameHamiltonian h, LindbladSpec spec, EvolveOptions opt)
    : h_(std::move(h)), spec_(std::move(spec)), opt_(opt) {
    spec_.validate(h_.static_part.rows());
    if (opt_.steps_per_period < 1) throw ValidationError("steps_per_period must be >= 1");
    for (const auto& op : spec_.ops) ldag_l_.push_back(op.L.adjoint() * op.L);
    double f = h_.max_frequency();
    double rate = 0.0;
    for (const auto& op : spec_.ops) rate += op.gamma * op.L.squaredNorm() / double(op.L.rows());
    f = std::max(f, rate);
    h_cap_ = f > 0.0 ? kTwoPi / (double(opt_.steps_per_period) * f) : 0.0;
}

Mat LindbladEngine::rhs(const Mat& rho, double t) const {
    const Mat H = h_.harmonics.empty() ? h_.static_part : h_.at(t);
    Mat d = -kI * (H * rho - rho * H);
    for (std::size_t m = 0; m < spec_.ops.size(); ++m) {
        const auto& op = spec_.ops[m];
        if (op.gamma == 0.0) continue;
        d += op.gamma * (op.L * rho * op.L.adjoint() - 0.5 * (ldag_l_[m] * rho + rho * ldag_l_[m]));
    }
    return d;
}

void LindbladEngine::settle(Mat& rho) {
    const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    diag_.max_hermiticity_drift = std::max(diag_.max_hermiticity_drift, herm);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    const double drift = std::abs(rho.trace() - 1.0);
    diag_.max_trace_drift = std::max(diag_.max_trace_drift, drift);
    if (drift > opt_.trace_abort) {
        std::ostringstream os;
        os << "trace drift " << drift << " exceeds " << opt_.trace_abort;
        throw NumericalError(os.str());
    }
    if (drift > opt_.renormalize_above) {
        rho /= rho.trace().real();
        ++diag_.renormalizations;
    }
}

void LindbladEngine::advance(Mat& rho, double t0, double t1) {
    const double span = t1 - t0;
    if (span <= 0.0) return;
    long m = 1;
    if (h_cap_ > 0.0) m = std::max<long>(1, long(std::ceil(span / h_cap_ - 1e-9)));
    const double h = span / double(m);
    if (!(h > 0.0) || t0 + h == t0) throw NumericalError("RK4 step size underflow");
    for (long s = 0; s < m; ++s) {
        const double t = t0 + double(s) * h;
        const Mat k1 = rhs(rho, t);
        const Mat k2 = rhs(rho + 0.5 * h * k1, t + 0.5 * h);
        const Mat k3 = rhs(rho + 0.5 * h * k2, t + 0.5 * h);
        const Mat k4 = rhs(rho + h * k3, t + h);
        rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        settle(rho);
        ++diag_.steps;
    }
    const DensityCheck c = check_density(rho);
    diag_.min_eigenvalue = std::min(diag_.min_eigenvalue, c.min_eigenvalue);
    if (c.min_eigenvalue < opt_.positivity_flag) {
        ++diag_.positivity_flags;
        diag_.note("negative eigenvalue " + std::to_string(c.min_eigenvalue) + " at t = " + std::to_string(t1));
    }
}

Trajectory evolve(const Mat& rho0, const FrameHamiltonian& h, const LindbladSpec& spec,
                  const std::vector<double>& grid, const std::vector<Pulse>& pulses, EvolveOptions opt) {
    if (rho0.rows() != h.static_part.rows()) throw ValidationError("evolve: dimension mismatch");
    LindbladEngine eng(h, spec, opt);
    Trajectory tr;
    tr.times = grid;
    tr.states.resize(grid.size());
    Mat rho = rho0;
    const int n = register_size(rho0.rows());
    apply_sequence(
        rho, StateKind::density, pulses, grid, n,
        [&](Mat& r, double a, double b) { eng.advance(r, a, b); },
        [&](std::size_t k, const Mat& r) { tr.states[k] = r; });
    tr.diagnostics = eng.diagnostics();
    if (tr.diagnostics.renormalizations > 0)
        tr.diagnostics.note("renormalized trace " + std::to_string(tr.diagnostics.renormalizations) + " times");
    return tr;
}

SpectatorState spectator_from_string(const std::string& s) {
    if (s == "zero" || s == "0") return SpectatorState::zero;
    if (s == "one" || s == "1") return SpectatorState::one;
    if (s == "plus" || s == "+") return SpectatorState::plus;
    throw ValidationError("unknown spectator state '" + s + "'");
}

std::string to_string(SpectatorState s) {
    switch (s) {
        case SpectatorState::zero: return "zero";
        case SpectatorState::one: return "one";
        case SpectatorState::plus: return "plus";
    }
    return "plus";
}

double damped_cos(double t, double W2, double k) {
    if (W2 > 0.0) {
        const double W = std::sqrt(W2);
        return std::cos(W * t) + (k / W) * std::sin(W * t);
    }
    if (W2 < 0.0) {
        const double W = std::sqrt(-W2);
        return std::cosh(W * t) + (k / W) * std::sinh(W * t);
    }
    return 1.0 + k * t;
}

double closed_form_fidelity(Frame frame, SpectatorState s, double t, double J, double gamma) {
    if (gamma < 0.0) throw ValidationError("gamma must be nonnegative");
    const double e = std::exp(-2.0 * gamma * t);
    if (frame == Frame::plus) return 0.5 * (1.0 + e * std::cos(2.0 * J * t));
    if (frame != Frame::zero) throw ValidationError("closed_form_fidelity supports plus and zero frames");
    double f = 1.0;
    switch (s) {
        case SpectatorState::plus: {
            const double c = std::cos(2.0 * J * t);
            f = c * c;
            break;
        }
        case SpectatorState::zero: f = 1.0; break;
        case SpectatorState::one: f = std::cos(4.0 * J * t); break;
    }
    return 0.5 * (1.0 + e * f);
}

double closed_form_x_noise(double t, double J, const XNoiseRates& r) {
    const double k = r.g4 + r.g5;
    const double e = std::exp(-(2.0 * (r.g1 + r.g3) + k) * t);
    return 0.5 * (1.0 + e * damped_cos(t, 4.0 * J * J - k * k, k));
}

double closed_form_y_noise(double t, double J, const YNoiseRates& r) {
    const double k = r.g8 - r.g7;
    const double e = std::exp(-(2.0 * (r.g1 + r.g3 + r.g9) + r.g7 + r.g8) * t);
    return 0.5 * (1.0 + e * damped_cos(t, 4.0 * J * J - k * k, k));
}

double closed_form_emission(SpectatorState s, double t, double J, const EmissionRates& r) {
    const double gd = 2.0 * r.g11 + r.g12;
    const double E = std::exp(-(2.0 * (r.g1 + r.g3) + 0.5 * r.g10) * t);
    const double D = 64.0 * J * J + gd * gd;
    const double ed = std::exp(-0.5 * gd * t);
    const double c = std::cos(2.0 * J * t);
    const double sn = std::sin(2.0 * J * t);
    switch (s) {
        case SpectatorState::zero:
            return 0.5 * (1.0 + c * E);
        case SpectatorState::one: {
            const double a = (64.0 * J * J * ed + gd * (2.0 * r.g11 + r.g12 * ed)) / D;
            const double b = 16.0 * J * r.g11 * (1.0 + ed) / D;
            return 0.5 * (1.0 + E * (a * c + b * sn));
        }
        case SpectatorState::plus: {
            const double br = (1.0 + ed) * (0.25 * c * 64.0 * J * J + 4.0 * sn * J * r.g11) +
                              0.25 * c * gd * (r.g12 * ed + 4.0 * r.g11 + r.g12);
            return 0.5 + E / D * br;
        }
    }
    return 0.0;
}

double plus_fidelity(const Mat& rho, int main_qubit, int n) {
    const Mat r = partial_trace(rho, {main_qubit}, n);
    return (0.5 * (r(0, 0) + r(0, 1) + r(1, 0) + r(1, 1))).real();
}

}  // namespace ddsim
