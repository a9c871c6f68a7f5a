#include "ddsim/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <random>
#include <set>

#include "ddsim/errors.hpp"

namespace ddsim {

Engine engine_from_string(const std::string& s) {
    if (s == "lindblad") return Engine::lindblad;
    if (s == "redfield") return Engine::redfield;
    if (s == "closed") return Engine::closed;
    throw ValidationError("unknown engine '" + s + "'");
}

std::string to_string(Engine e) {
    switch (e) {
        case Engine::lindblad: return "lindblad";
        case Engine::redfield: return "redfield";
        case Engine::closed: return "closed";
    }
    return "lindblad";
}

MainState main_state_from_string(const std::string& s) {
    if (s == "plus" || s == "+") return MainState::plus;
    if (s == "minus" || s == "-") return MainState::minus;
    if (s == "plus_i" || s == "+i") return MainState::plus_i;
    if (s == "minus_i" || s == "-i") return MainState::minus_i;
    throw ValidationError("unknown main state '" + s + "'");
}

std::string to_string(MainState m) {
    switch (m) {
        case MainState::plus: return "plus";
        case MainState::minus: return "minus";
        case MainState::plus_i: return "plus_i";
        case MainState::minus_i: return "minus_i";
    }
    return "plus";
}

void ExperimentConfig::validate() const {
    device.validate();
    if (main_qubit < 0 || main_qubit >= device.n) throw ValidationError("main_qubit out of range");
    if (!(t_max > 0.0)) throw ValidationError("t_max must be positive");
    if (points < 2) throw ValidationError("points must be >= 2");
    if (spectator_states.empty()) throw ValidationError("no spectator states requested");
    if (shots && *shots < 1) throw ValidationError("shots must be positive");
    if (bootstrap_resamples < 2) throw ValidationError("bootstrap_resamples must be >= 2");
    if (dd) dd->sequence.validate();
    switch (engine) {
        case Engine::lindblad:
            if (!lindblad) throw ConfigError("lindblad engine needs a Lindblad noise model");
            lindblad->validate(Eigen::Index(1) << device.n);
            break;
        case Engine::redfield:
            if (!bath) throw ConfigError("redfield engine needs an Ohmic bath");
            bath->validate();
            for (const auto& c : bath->couplings)
                if (c.qubit < 0 || c.qubit >= device.n) throw ValidationError("bath coupling qubit out of range");
            break;
        case Engine::closed:
            if (device.n != 2 || device.couplings.size() != 1)
                throw ConfigError("closed engine needs a two-qubit device with one coupling");
            if (device.frame != Frame::plus && device.frame != Frame::zero)
                throw ConfigError("closed engine needs the plus or zero frame");
            if (dd) throw ConfigError("closed forms cover free evolution only");
            if (main_state != MainState::plus) throw ConfigError("closed forms assume the |+> main state");
            break;
    }
}

std::vector<int> ExperimentConfig::spectators() const {
    std::vector<int> s;
    for (int q = 0; q < device.n; ++q)
        if (q != main_qubit) s.push_back(q);
    return s;
}

double resolve_omega_d(const ExperimentConfig& cfg) {
    if (cfg.omega_d_given) return cfg.device.omega_d;
    const double w = cfg.device.omega_q.at(std::size_t(cfg.main_qubit));
    const double jt = cfg.device.total_coupling(cfg.main_qubit);
    switch (cfg.device.frame) {
        case Frame::plus: return w;
        case Frame::zero: return w - 2.0 * jt;
        case Frame::one: return w + 2.0 * jt;
        case Frame::custom: break;
    }
    throw ConfigError("custom frame requires an explicit omega_d");
}

std::vector<double> experiment_grid(const ExperimentConfig& cfg) {
    std::vector<double> g(std::size_t(cfg.points));
    for (int k = 0; k < cfg.points; ++k) g[std::size_t(k)] = cfg.t_max * double(k) / double(cfg.points - 1);
    if (!cfg.dd) return g;
    const double c = cfg.dd->sequence.cycle;
    for (auto& t : g) t = std::round(t / c) * c;
    for (std::size_t k = 1; k < g.size(); ++k)
        if (!(g[k] > g[k - 1])) throw ValidationError("time grid is finer than one DD cycle");
    return g;
}

const FidelitySeries& StateProtectionResult::get(SpectatorState s, const std::string& arm) const {
    for (const auto& f : series)
        if (f.spectator == s && f.arm == arm) return f;
    throw ValidationError("no series for spectator " + to_string(s) + ", arm " + arm);
}

namespace {

Mat rotation(char axis, double angle) {
    return std::cos(0.5 * angle) * Mat::Identity(2, 2) - kI * std::sin(0.5 * angle) * pauli(axis);
}

// Preparation unitary taking |0> to the main state.
Mat main_prep(MainState m, double eps) {
    const double a = 0.5 * kPi;
    switch (m) {
        case MainState::plus: return rotation('Y', a * (1.0 + eps));
        case MainState::minus: return rotation('Y', -a * (1.0 + eps));
        case MainState::plus_i: return rotation('X', -a);
        case MainState::minus_i: return rotation('X', a);
    }
    return Mat::Identity(2, 2);
}

Mat spectator_prep(SpectatorState s) {
    switch (s) {
        case SpectatorState::zero: return Mat::Identity(2, 2);
        case SpectatorState::one: return rotation('X', kPi);
        case SpectatorState::plus: return rotation('Y', 0.5 * kPi);
    }
    return Mat::Identity(2, 2);
}

Mat initial_state(int n, int main, const Mat& u_main, SpectatorState s) {
    Mat u(1, 1);
    u(0, 0) = 1.0;
    const Mat us = spectator_prep(s);
    for (int q = 0; q < n; ++q) u = kron(u, q == main ? u_main : us);
    const Eigen::Index dim = u.rows();
    Vec psi = Vec::Zero(dim);
    psi(0) = 1.0;
    return projector(u * psi);
}

void merge(Diagnostics& into, const Diagnostics& d) {
    into.steps += d.steps;
    into.renormalizations += d.renormalizations;
    into.positivity_flags += d.positivity_flags;
    into.max_trace_drift = std::max(into.max_trace_drift, d.max_trace_drift);
    into.max_hermiticity_drift = std::max(into.max_hermiticity_drift, d.max_hermiticity_drift);
    into.min_eigenvalue = std::min(into.min_eigenvalue, d.min_eigenvalue);
    into.events.insert(into.events.end(), d.events.begin(), d.events.end());
}

// Dephasing rate on the main qubit from Z-type Pauli jump operators.
double closed_form_gamma(const ExperimentConfig& cfg) {
    if (!cfg.lindblad) return 0.0;
    double g = 0.0;
    for (const auto& op : cfg.lindblad->ops) {
        const std::string& l = op.tag;
        if (int(l.size()) != cfg.device.n) throw ConfigError("closed engine supports Pauli dephasing operators only");
        bool diag = true;
        for (char c : l) diag = diag && (c == 'I' || c == 'Z' || c == '0' || c == 'z' || c == 'i');
        if (!diag) throw ConfigError("closed engine supports Z-type dephasing only, got " + l);
        const char cm = l[std::size_t(cfg.main_qubit)];
        if (cm == 'Z' || cm == 'z') g += op.gamma;
    }
    return g;
}

}  // namespace

StateProtectionResult run_state_protection(const ExperimentConfig& cfg) {
    cfg.validate();
    const int n = cfg.device.n;
    const int main = cfg.main_qubit;
    const std::vector<double> grid = experiment_grid(cfg);
    const Mat u_prep = main_prep(cfg.main_state, cfg.prep_error);
    const Mat u_undo = u_prep.adjoint();

    StateProtectionResult out;
    std::vector<std::pair<std::string, std::vector<Pulse>>> arms;
    if (!cfg.dd || cfg.include_free) arms.push_back({"free", {}});
    if (cfg.dd) {
        const DDSequence seq = retarget(cfg.dd->sequence, cfg.spectators());
        arms.push_back({"dd", schedule(seq, grid.back(), cfg.dd->repeats)});
    }

    if (cfg.engine == Engine::closed) {
        const double J = cfg.device.couplings.front().J;
        const double gamma = closed_form_gamma(cfg);
        for (SpectatorState s : cfg.spectator_states) {
            FidelitySeries f;
            f.spectator = s;
            f.times = grid;
            for (double t : grid) f.fidelity.push_back(closed_form_fidelity(cfg.device.frame, s, t, J, gamma));
            f.ci_half_width.assign(grid.size(), 0.0);
            out.series.push_back(std::move(f));
        }
    } else {
        const double omega_d = resolve_omega_d(cfg);
        const FrameHamiltonian fh = to_rotating_frame(build_lab_hamiltonian(cfg.device), {}, omega_d);
        std::unique_ptr<RedfieldEngine> redfield;
        if (cfg.engine == Engine::redfield)
            redfield = std::make_unique<RedfieldEngine>(fh.static_part, omega_d, *cfg.bath, cfg.redfield_options);

        for (SpectatorState s : cfg.spectator_states) {
            for (const auto& [arm, pulses] : arms) {
                FidelitySeries f;
                f.spectator = s;
                f.arm = arm;
                f.times = grid;
                f.fidelity.resize(grid.size());
                f.envelope.resize(grid.size());
                f.ci_half_width.assign(grid.size(), 0.0);
                auto observe = [&](std::size_t k, const Mat& rho) {
                    const Mat rm = partial_trace(rho, {main}, n);
                    f.envelope[k] = 2.0 * std::abs(rm(0, 1));
                    const Mat ru = u_undo * rm * u_undo.adjoint();
                    f.fidelity[k] = std::clamp(ru(0, 0).real(), 0.0, 1.0);
                };
                Mat rho = initial_state(n, main, u_prep, s);
                try {
                    if (redfield) {
                        apply_sequence(
                            rho, StateKind::density, pulses, grid, n,
                            [&](Mat& r, double a, double b) { redfield->advance(r, a, b); }, observe);
                    } else {
                        LindbladEngine eng(fh, *cfg.lindblad, cfg.lindblad_options);
                        apply_sequence(
                            rho, StateKind::density, pulses, grid, n,
                            [&](Mat& r, double a, double b) { eng.advance(r, a, b); }, observe);
                        merge(out.diagnostics, eng.diagnostics());
                    }
                } catch (const NumericalError& e) {
                    throw NumericalError("spectator " + to_string(s) + ", arm " + arm + ": " + e.what());
                }
                out.series.push_back(std::move(f));
            }
        }
        if (redfield) merge(out.diagnostics, redfield->diagnostics());
    }

    if (cfg.shots) {
        const Rng base(cfg.seed);
        for (std::size_t i = 0; i < out.series.size(); ++i) {
            Rng rng = base.derive(i);
            auto& f = out.series[i];
            for (std::size_t k = 0; k < f.fidelity.size(); ++k) {
                const long z = shot_sample(f.fidelity[k], *cfg.shots, rng);
                f.fidelity[k] = double(z) / double(*cfg.shots);
                f.ci_half_width[k] = bootstrap_ci(z, *cfg.shots, rng, cfg.bootstrap_resamples).half_width;
            }
        }
    }
    return out;
}

FitResult extract_crosstalk(const FidelitySeries& series, Frame frame, const FitOptions& opt) {
    return extract_crosstalk(series.times, series.fidelity, frame, opt);
}

long shot_sample(double p, long shots, Rng& rng) {
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("probability outside [0, 1]");
    if (shots < 0) throw ValidationError("shots must be nonnegative");
    std::binomial_distribution<long> dist(shots, p);
    return dist(rng);
}

long shot_sample(double p, long shots, std::uint64_t seed) {
    Rng rng(seed);
    return shot_sample(p, shots, rng);
}

BootstrapResult bootstrap_ci(long zeros, long shots, Rng& rng, int resamples) {
    if (shots < 1) throw ValidationError("bootstrap needs at least one shot");
    if (zeros < 0 || zeros > shots) throw ValidationError("zero count outside [0, shots]");
    if (resamples < 2) throw ValidationError("bootstrap needs at least two resamples");
    // drawing `shots` outcomes with replacement from the record is a binomial draw
    const double p = double(zeros) / double(shots);
    std::vector<double> est(static_cast<std::size_t>(resamples));
    for (auto& e : est) e = double(shot_sample(p, shots, rng)) / double(shots);
    const double mean = std::accumulate(est.begin(), est.end(), 0.0) / double(resamples);
    double var = 0.0;
    for (double e : est) var += (e - mean) * (e - mean);
    var /= double(resamples - 1);
    return {mean, 2.0 * std::sqrt(var)};
}

DDPGResult run_random_gate_ddpg(const DDPGConfig& cfg) {
    cfg.device.validate();
    const int n = cfg.device.n;
    const int main = cfg.main_qubit;
    if (main < 0 || main >= n) throw ValidationError("main_qubit out of range");
    cfg.noise.validate(Eigen::Index(1) << n);
    if (cfg.runs < 1) throw ValidationError("runs must be >= 1");
    if (cfg.depths.empty()) throw ValidationError("empty depth schedule");
    if (!(cfg.gate_duration > 0.0)) throw ValidationError("gate duration must be positive");

    std::vector<int> spect;
    for (int q = 0; q < n; ++q)
        if (q != main) spect.push_back(q);
    const DDSequence seq = retarget(make_sequence(cfg.dd_sequence, cfg.dd_tau, 0), spect);
    const double slot = 2.0 * cfg.gate_duration;
    const double slots_per_cycle = seq.cycle / slot;
    if (std::abs(slots_per_cycle - std::round(slots_per_cycle)) > 1e-9)
        throw ValidationError("DD cycle must span a whole number of gate slots");
    const int spc = int(std::round(slots_per_cycle));
    std::set<int> depth_set(cfg.depths.begin(), cfg.depths.end());
    for (int d : depth_set)
        if (d < 0 || d % spc != 0)
            throw ValidationError("each depth must be a nonnegative multiple of " + std::to_string(spc));
    depth_set.insert(0);
    const std::vector<int> depths(depth_set.begin(), depth_set.end());
    const int max_depth = depths.back();

    std::vector<double> grid;
    for (int d : depths) grid.push_back(slot * double(d));
    if (grid.size() < 3) throw ValidationError("depth schedule needs at least two nonzero depths");
    const std::vector<Pulse> dd_pulses = schedule(seq, grid.back());

    const FrameHamiltonian fh = to_rotating_frame(build_lab_hamiltonian(cfg.device), {}, cfg.device.omega_d);
    const std::vector<Gate> gate_set = gate_set_G();
    const Rng base(cfg.seed);

    DDPGResult res;
    res.times = grid;
    res.free_curve.assign(grid.size(), 0.0);
    res.dd_curve.assign(grid.size(), 0.0);
    const double norm = 1.0 / double(cfg.runs * int(cfg.spectator_states.size()));

    for (int r = 0; r < cfg.runs; ++r) {
        Rng seeder = base.derive(std::uint64_t(r));
        const std::vector<Gate> gates = random_gate_circuit(seeder(), max_depth, gate_set, cfg.gate_duration);
        std::vector<Pulse> gate_pulses;
        for (const auto& g : gates) {
            for (const auto& p : dd_pulses)
                if (std::abs(p.time - g.time) < 1e-9 * std::max(1.0, g.time))
                    throw ValidationError("gate at t = " + std::to_string(g.time) + " ns collides with a DD pulse");
            gate_pulses.push_back({g.time, main, g.axis, g.angle < 0.0 ? g.angle + kTwoPi : g.angle});
        }
        // ideal main-qubit state after each depth in the schedule
        std::vector<Vec> ideal;
        Vec psi(2);
        psi << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
        std::size_t gi = 0;
        for (int d : depths) {
            for (; int(gi) < d; ++gi) psi = rotation(axis_char(gates[gi].axis), gates[gi].angle) * psi;
            ideal.push_back(psi);
        }
        std::vector<Pulse> protected_pulses = gate_pulses;
        protected_pulses.insert(protected_pulses.end(), dd_pulses.begin(), dd_pulses.end());

        for (SpectatorState s : cfg.spectator_states) {
            for (int arm = 0; arm < 2; ++arm) {
                std::vector<double>& curve = arm == 0 ? res.free_curve : res.dd_curve;
                LindbladEngine eng(fh, cfg.noise);
                Mat rho = initial_state(n, main, rotation('Y', 0.5 * kPi), s);
                apply_sequence(
                    rho, StateKind::density, arm == 0 ? gate_pulses : protected_pulses, grid, n,
                    [&](Mat& st, double a, double b) { eng.advance(st, a, b); },
                    [&](std::size_t k, const Mat& st) {
                        const Mat rm = partial_trace(st, {main}, n);
                        curve[k] += norm * (ideal[k].adjoint() * rm * ideal[k])(0, 0).real();
                    });
            }
        }
    }
    res.free_fit = fit_exponential(res.times, res.free_curve);
    res.dd_fit = fit_exponential(res.times, res.dd_curve);
    res.free_rate = res.free_fit.rate;
    res.dd_rate = res.dd_fit.rate;
    res.ratio = res.dd_rate != 0.0 ? res.free_rate / res.dd_rate : std::numeric_limits<double>::infinity();
    return res;
}

Mat pulsed_propagator(const Mat& H, const std::vector<Pulse>& pulses, double t_end) {
    const int n = register_size(H.rows());
    Mat U = Mat::Identity(H.rows(), H.cols());
    apply_sequence(
        U, StateKind::propagator, pulses, {0.0, t_end}, n,
        [&](Mat& u, double a, double b) { u = matrix_exp(H, cplx(0.0, -(b - a))) * u; },
        [](std::size_t, const Mat&) {});
    return U;
}

double phase_distance(const Mat& U, const Mat& V) {
    // phase aligned through the trace overlap
    const cplx ov = (V.adjoint() * U).trace();
    const cplx ph = std::abs(ov) > 0.0 ? ov / std::abs(ov) : cplx(1.0);
    const Mat d = U - ph * V;
    Eigen::JacobiSVD<Mat> svd(d);
    return svd.singularValues()(0);
}

}  // namespace ddsim
