#include "ddsim/dd.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ddsim/errors.hpp"
#include "ddsim/rng.hpp"

namespace ddsim {

char axis_char(Axis a) {
    switch (a) {
        case Axis::X: return 'X';
        case Axis::Y: return 'Y';
        case Axis::Z: return 'Z';
    }
    return 'X';
}

Axis axis_from_char(char c) {
    switch (c) {
        case 'X': case 'x': return Axis::X;
        case 'Y': case 'y': return Axis::Y;
        case 'Z': case 'z': return Axis::Z;
        default: throw ValidationError(std::string("unknown pulse axis '") + c + "'");
    }
}

SequenceKind sequence_kind_from_string(const std::string& s, int* udd_order) {
    if (s == "pure_x") return SequenceKind::pure_x;
    if (s == "pure_y") return SequenceKind::pure_y;
    if (s == "xy4") return SequenceKind::xy4;
    if (s == "xy4_palindrome") return SequenceKind::xy4_palindrome;
    if (s == "custom") return SequenceKind::custom;
    if (s.rfind("udd", 0) == 0) {
        const std::string digits = s.substr(s.find_first_of("0123456789") == std::string::npos
                                                ? s.size()
                                                : s.find_first_of("0123456789"));
        if (digits.empty()) throw ValidationError("udd sequence needs an order, e.g. udd4");
        if (udd_order) *udd_order = std::stoi(digits);
        return SequenceKind::udd;
    }
    throw ValidationError("unknown sequence '" + s + "'");
}

std::string DDSequence::name() const {
    switch (kind) {
        case SequenceKind::pure_x: return "pure_x";
        case SequenceKind::pure_y: return "pure_y";
        case SequenceKind::xy4: return "xy4";
        case SequenceKind::xy4_palindrome: return "xy4_palindrome";
        case SequenceKind::udd: return "udd" + std::to_string(udd_order);
        case SequenceKind::custom: return "custom";
    }
    return "custom";
}

void DDSequence::validate() const {
    if (!(cycle > 0.0)) throw ValidationError("DD cycle length must be positive");
    double prev = 0.0;
    for (const auto& p : pulses) {
        if (p.time < prev) throw ValidationError("DD pulses not sorted by time");
        if (p.time < 0.0 || p.time > cycle * (1.0 + 1e-12)) throw ValidationError("DD pulse outside its cycle");
        if (!(p.angle > 0.0) || p.angle > kTwoPi) throw ValidationError("pulse angle outside (0, 2pi]");
        prev = p.time;
    }
}

namespace {

DDSequence equidistant(double tau, int qubit, const std::string& axes, SequenceKind kind) {
    if (!(tau > 0.0)) throw ValidationError("tau must be positive");
    DDSequence s;
    s.tau = tau;
    s.kind = kind;
    s.cycle = tau * double(axes.size());
    for (std::size_t k = 0; k < axes.size(); ++k)
        s.pulses.push_back({tau * double(k + 1), qubit, axis_from_char(axes[k]), kPi});
    return s;
}

}  // namespace

DDSequence make_pure_x(double tau, int qubit) { return equidistant(tau, qubit, "XX", SequenceKind::pure_x); }

DDSequence make_pure_y(double tau, int qubit) { return equidistant(tau, qubit, "YY", SequenceKind::pure_y); }

// Axes in the order they act, so the cycle operator reads X f Y f X f Y f.
DDSequence make_xy4(double tau, int qubit, bool palindrome) {
    if (palindrome) return equidistant(tau, qubit, "YXYXXYXY", SequenceKind::xy4_palindrome);
    return equidistant(tau, qubit, "YXYX", SequenceKind::xy4);
}

DDSequence make_udd(int n, double total_T, int qubit) {
    if (n < 1) throw ValidationError("UDD order must be >= 1");
    if (!(total_T > 0.0)) throw ValidationError("UDD total time must be positive");
    DDSequence s;
    s.kind = SequenceKind::udd;
    s.udd_order = n;
    s.cycle = total_T;
    s.tau = total_T / double(n + 1);
    for (int j = 1; j <= n; ++j) {
        const double sn = std::sin(double(j) * kPi / (2.0 * double(n + 1)));
        s.pulses.push_back({total_T * sn * sn, qubit, Axis::X, kPi});
    }
    return s;
}

DDSequence make_custom(std::vector<Pulse> pulses, double cycle) {
    DDSequence s;
    s.kind = SequenceKind::custom;
    s.cycle = cycle;
    std::stable_sort(pulses.begin(), pulses.end(), [](const Pulse& a, const Pulse& b) { return a.time < b.time; });
    s.pulses = std::move(pulses);
    s.tau = s.pulses.empty() ? cycle : s.pulses.front().time;
    s.validate();
    return s;
}

DDSequence make_sequence(const std::string& name, double tau, int qubit) {
    int order = 0;
    switch (sequence_kind_from_string(name, &order)) {
        case SequenceKind::pure_x: return make_pure_x(tau, qubit);
        case SequenceKind::pure_y: return make_pure_y(tau, qubit);
        case SequenceKind::xy4: return make_xy4(tau, qubit, false);
        case SequenceKind::xy4_palindrome: return make_xy4(tau, qubit, true);
        case SequenceKind::udd: return make_udd(order, double(order + 1) * tau, qubit);
        case SequenceKind::custom: break;
    }
    throw ValidationError("sequence '" + name + "' cannot be built from tau alone");
}

DDSequence retarget(const DDSequence& seq, const std::vector<int>& qubits) {
    DDSequence out = seq;
    out.pulses.clear();
    for (const auto& p : seq.pulses)
        for (int q : qubits) {
            Pulse c = p;
            c.qubit = q;
            out.pulses.push_back(c);
        }
    return out;
}

std::vector<Pulse> schedule(const DDSequence& seq, double t_end, int max_cycles) {
    seq.validate();
    std::vector<Pulse> out;
    const double eps = 1e-9 * std::max(1.0, std::abs(t_end));
    for (int c = 0; max_cycles < 0 || c < max_cycles; ++c) {
        const double base = double(c) * seq.cycle;
        if (base > t_end + eps) break;
        for (const auto& p : seq.pulses) {
            const double t = base + p.time;
            if (t > t_end + eps) return out;
            Pulse q = p;
            q.time = t;
            out.push_back(q);
        }
    }
    return out;
}

Mat pulse_unitary(const Pulse& p, int n) {
    const Mat s = pauli(axis_char(p.axis));
    const Mat u = std::cos(0.5 * p.angle) * Mat::Identity(2, 2) - kI * std::sin(0.5 * p.angle) * s;
    return embed_single(u, p.qubit, n);
}

Mat cycle_pulse_product(const DDSequence& seq, int n) {
    const Eigen::Index dim = Eigen::Index(1) << n;
    Mat u = Mat::Identity(dim, dim);
    for (const auto& p : seq.pulses) u = pulse_unitary(p, n) * u;
    return u;
}

void apply_sequence(Mat& state, StateKind kind, const std::vector<Pulse>& pulses,
                    const std::vector<double>& grid, int n, const AdvanceFn& advance,
                    const ObserveFn& observe) {
    if (grid.empty()) return;
    for (std::size_t k = 1; k < grid.size(); ++k)
        if (!(grid[k] > grid[k - 1])) throw ValidationError("time grid must be strictly increasing");
    const double tol = 1e-9 * std::max(1.0, std::abs(grid.back()));
    for (const auto& p : pulses)
        if (p.time < grid.front() - tol || p.time > grid.back() + tol)
            throw ValidationError("pulse at t = " + std::to_string(p.time) + " ns lies outside the time grid");

    std::vector<Pulse> sorted = pulses;
    std::stable_sort(sorted.begin(), sorted.end(), [](const Pulse& a, const Pulse& b) { return a.time < b.time; });

    auto apply_pulse = [&](const Pulse& p) {
        const Mat u = pulse_unitary(p, n);
        if (kind == StateKind::density) state = u * state * u.adjoint();
        else state = u * state;
    };

    double t = grid.front();
    std::size_t ip = 0;
    while (ip < sorted.size() && sorted[ip].time <= t + tol) apply_pulse(sorted[ip++]);
    observe(0, state);
    for (std::size_t k = 1; k < grid.size(); ++k) {
        const double target = grid[k];
        while (ip < sorted.size() && sorted[ip].time < target - tol) {
            const double tp = sorted[ip].time;
            if (tp > t) {
                advance(state, t, tp);
                t = tp;
            }
            apply_pulse(sorted[ip++]);
        }
        if (target > t) {
            advance(state, t, target);
            t = target;
        }
        while (ip < sorted.size() && sorted[ip].time <= target + tol) apply_pulse(sorted[ip++]);
        observe(k, state);
    }
}

std::vector<Gate> gate_set_G() {
    std::vector<Gate> g;
    for (Axis a : {Axis::X, Axis::Y})
        for (double ang : {kPi / 8.0, -kPi / 8.0, kPi / 4.0, -kPi / 4.0}) g.push_back({0.0, a, ang});
    return g;
}

std::vector<Gate> random_gate_circuit(std::uint64_t seed, int depth, const std::vector<Gate>& gate_set,
                                      double gate_duration) {
    if (depth < 0) throw ValidationError("depth must be >= 0");
    if (depth > 0 && gate_set.empty()) throw ValidationError("empty gate set");
    Rng rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, gate_set.empty() ? 0 : gate_set.size() - 1);
    std::vector<Gate> out;
    out.reserve(std::size_t(depth));
    for (int k = 0; k < depth; ++k) {
        Gate g = gate_set[pick(rng)];
        g.time = double(2 * k + 1) * gate_duration;
        out.push_back(g);
    }
    return out;
}

}  // namespace ddsim
