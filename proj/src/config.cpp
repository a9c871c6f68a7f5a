#include "ddsim/config.hpp"

#include <cctype>
#include <fstream>

#include "ddsim/errors.hpp"

namespace ddsim {

using nlohmann::json;

double ghz_to_rad_per_ns(double ghz) { return kTwoPi * ghz; }
double khz_to_rad_per_ns(double khz) { return kTwoPi * khz * 1e-6; }

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("cannot parse " + path.string() + ": " + e.what());
    }
}

namespace {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

const json& require(const json& j, const char* key, const char* where) {
    if (!j.is_object() || !j.contains(key)) throw ConfigError(std::string(where) + ": missing '" + key + "'");
    return j.at(key);
}

double time_ns(const json& j, const char* ns_key, const char* us_key, double fallback) {
    if (j.contains(ns_key)) return j.at(ns_key).get<double>();
    if (j.contains(us_key)) return 1000.0 * j.at(us_key).get<double>();
    return fallback;
}

}  // namespace

DeviceSpec parse_device(const json& j) {
    DeviceSpec d;
    d.n = require(j, "n", "device").get<int>();
    for (double w : require(j, "omega_q_ghz", "device").get<std::vector<double>>())
        d.omega_q.push_back(ghz_to_rad_per_ns(w));
    if (j.contains("couplings"))
        for (const auto& c : j.at("couplings")) {
            Coupling k;
            k.i = require(c, "i", "coupling").get<int>();
            k.j = require(c, "j", "coupling").get<int>();
            if (k.i > k.j) std::swap(k.i, k.j);
            if (c.contains("j_khz")) k.J = khz_to_rad_per_ns(c.at("j_khz").get<double>());
            else k.J = require(c, "j_rad_per_ns", "coupling").get<double>();
            d.couplings.push_back(k);
        }
    if (j.contains("omega_d_ghz")) d.omega_d = ghz_to_rad_per_ns(j.at("omega_d_ghz").get<double>());
    d.frame = frame_from_string(get_or<std::string>(j, "frame", "custom"));
    d.allow_signed_j = get_or(j, "allow_signed_j", false);
    d.validate();
    return d;
}

LindbladSpec parse_lindblad(const json& j, int n) {
    if (!j.is_array()) throw ConfigError("lindblad noise must be a list of operators");
    LindbladSpec s;
    for (const auto& op : j) {
        const std::string kind = get_or<std::string>(op, "kind", "pauli");
        const double g = require(op, "gamma_per_us", "lindblad operator").get<double>() * 1e-3;
        if (kind == "pauli") {
            const std::string label = require(op, "label", "lindblad operator").get<std::string>();
            if (int(label.size()) != n) throw ConfigError("Pauli label '" + label + "' does not match n");
            s.ops.push_back(pauli_op(label, g));
        } else if (kind == "lower") {
            s.ops.push_back(lower_op(require(op, "qubit", "lindblad operator").get<int>(), n, g));
        } else if (kind == "lower_joint") {
            const auto q = require(op, "qubits", "lindblad operator").get<std::vector<int>>();
            if (q.size() != 2) throw ConfigError("lower_joint needs two qubits");
            s.ops.push_back(lower_joint_op(q[0], q[1], n, g));
        } else {
            throw ConfigError("unknown Lindblad operator kind '" + kind + "'");
        }
    }
    s.validate(Eigen::Index(1) << n);
    return s;
}

OhmicBathSpec parse_bath(const json& j) {
    OhmicBathSpec b;
    b.eta_ohmic = get_or(j, "eta_ohmic_ns2", b.eta_ohmic);
    if (j.contains("cutoff_ghz")) b.omega_c = ghz_to_rad_per_ns(j.at("cutoff_ghz").get<double>());
    if (j.contains("temp_mk")) b.beta = beta_from_temperature_mk(j.at("temp_mk").get<double>());
    else b.beta = get_or(j, "beta_ns", b.beta);
    // bath couplings are taken as given in 1/ns, without a 2 pi factor
    for (const auto& c : require(j, "couplings", "bath")) {
        BathCoupling k;
        k.qubit = require(c, "qubit", "bath coupling").get<int>();
        const std::string ax = require(c, "axis", "bath coupling").get<std::string>();
        if (ax.size() != 1 || std::string("xyzXYZ").find(ax[0]) == std::string::npos)
            throw ConfigError("bath coupling axis must be x, y or z");
        k.axis = char(std::tolower(ax[0]));
        k.g = require(c, "g_ghz", "bath coupling").get<double>();
        b.couplings.push_back(k);
    }
    b.validate();
    return b;
}

DDSequence parse_sequence(const json& j) {
    const std::string name = require(j, "sequence", "dd").get<std::string>();
    if (name == "custom") {
        std::vector<Pulse> pulses;
        for (const auto& p : require(j, "pulses", "dd")) {
            Pulse q;
            q.time = require(p, "time_ns", "pulse").get<double>();
            q.qubit = get_or(p, "qubit", 0);
            const std::string ax = get_or<std::string>(p, "axis", "X");
            if (ax.size() != 1) throw ConfigError("pulse axis must be one letter");
            q.axis = axis_from_char(ax[0]);
            q.angle = get_or(p, "angle", kPi);
            pulses.push_back(q);
        }
        return make_custom(std::move(pulses), require(j, "cycle_ns", "dd").get<double>());
    }
    return make_sequence(name, require(j, "tau_ns", "dd").get<double>(), get_or(j, "qubit", 0));
}

ExperimentConfig parse_experiment(const json& j) {
    try {
        ExperimentConfig c;
        c.device = parse_device(require(j, "device", "config"));
        c.omega_d_given = require(j, "device", "config").contains("omega_d_ghz");
        if (j.contains("noise")) {
            const json& nz = j.at("noise");
            if (nz.contains("lindblad")) c.lindblad = parse_lindblad(nz.at("lindblad"), c.device.n);
            if (nz.contains("bath")) c.bath = parse_bath(nz.at("bath"));
        }
        if (j.contains("dd") && !j.at("dd").is_null()) {
            DDConfig d;
            d.sequence = parse_sequence(j.at("dd"));
            d.repeats = get_or(j.at("dd"), "repeats", -1);
            c.dd = d;
        }
        const json e = j.contains("experiment") ? j.at("experiment") : json::object();
        c.main_qubit = get_or(e, "main_qubit", 0);
        if (e.contains("spectator_states")) {
            c.spectator_states.clear();
            for (const auto& s : e.at("spectator_states")) c.spectator_states.push_back(spectator_from_string(s));
        }
        c.main_state = main_state_from_string(get_or<std::string>(e, "main_state", "plus"));
        c.include_free = get_or(e, "include_free", true);
        c.t_max = time_ns(e, "t_max_ns", "t_max_us", c.t_max);
        c.points = get_or(e, "points", c.points);
        if (e.contains("shots") && !e.at("shots").is_null()) c.shots = e.at("shots").get<long>();
        c.bootstrap_resamples = get_or(e, "bootstrap_resamples", c.bootstrap_resamples);
        c.prep_error = get_or(e, "prep_error", 0.0);
        c.seed = get_or<std::uint64_t>(e, "seed", 0);
        if (e.contains("engine")) c.engine = engine_from_string(e.at("engine").get<std::string>());
        else c.engine = c.lindblad ? Engine::lindblad : (c.bath ? Engine::redfield : Engine::lindblad);
        c.lindblad_options.steps_per_period = get_or(e, "steps_per_period", c.lindblad_options.steps_per_period);
        c.redfield_options.steps_per_period = get_or(e, "redfield_steps_per_period", c.redfield_options.steps_per_period);
        return c;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    } catch (const ValidationError& e) {
        throw ConfigError(e.what());
    }
}

CancellationConfig parse_cancellation(const json& root) {
    try {
        const json j = root.contains("cancellation") ? root.at("cancellation") : root;
        CancellationConfig c;
        c.sequence = get_or<std::string>(j, "sequence", c.sequence);
        sequence_kind_from_string(c.sequence);
        c.pulsed_qubit = get_or(j, "pulsed_qubit", c.pulsed_qubit);
        if (c.pulsed_qubit != 0 && c.pulsed_qubit != 1) throw ConfigError("pulsed_qubit must be 0 or 1");
        if (j.contains("omega_d_ghz")) c.omega_d = ghz_to_rad_per_ns(j.at("omega_d_ghz").get<double>());
        if (j.contains("tau_ns")) c.taus = j.at("tau_ns").get<std::vector<double>>();
        c.fine_tuned = get_or(j, "fine_tuned", false);
        return c;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad cancellation config: ") + e.what());
    } catch (const ValidationError& e) {
        throw ConfigError(e.what());
    }
}

SweepAxis sweep_axis_from_string(const std::string& s) {
    if (s == "tau") return SweepAxis::tau;
    if (s == "omega_d") return SweepAxis::omega_d;
    if (s == "g") return SweepAxis::g;
    if (s == "J") return SweepAxis::J;
    throw ConfigError("unknown sweep axis '" + s + "'");
}

std::string to_string(SweepAxis a) {
    switch (a) {
        case SweepAxis::tau: return "tau";
        case SweepAxis::omega_d: return "omega_d";
        case SweepAxis::g: return "g";
        case SweepAxis::J: return "J";
    }
    return "tau";
}

SweepConfig parse_sweep(const json& root) {
    try {
        const json& j = require(root, "sweep", "config");
        SweepConfig c;
        const std::string kind = get_or<std::string>(j, "kind", "state_protection");
        c.axis = sweep_axis_from_string(require(j, "axis", "sweep").get<std::string>());
        const auto raw = require(j, "values", "sweep").get<std::vector<double>>();
        if (raw.empty()) throw ConfigError("sweep needs at least one value");
        // values are given in ns (tau), GHz (omega_d, g) or kHz (J)
        for (double v : raw) {
            switch (c.axis) {
                case SweepAxis::tau: c.values.push_back(v); break;
                case SweepAxis::omega_d: c.values.push_back(ghz_to_rad_per_ns(v)); break;
                case SweepAxis::g: c.values.push_back(v); break;
                case SweepAxis::J: c.values.push_back(khz_to_rad_per_ns(v)); break;
            }
        }
        if (kind == "state_protection") {
            c.kind = SweepKind::state_protection;
            c.base = parse_experiment(root);
            if (c.axis == SweepAxis::tau && !c.base.dd) throw ConfigError("tau sweep needs a dd block");
            if (c.axis == SweepAxis::g && !c.base.bath) throw ConfigError("g sweep needs a bath");
        } else if (kind == "fast_drive") {
            c.kind = SweepKind::fast_drive;
            if (c.axis != SweepAxis::omega_d) throw ConfigError("fast_drive sweeps omega_d");
            const std::string t = get_or<std::string>(j, "term", "xz");
            if (t.size() != 2) throw ConfigError("term must be two characters, e.g. xz");
            c.term = {t[0], t[1], 1.0};
            c.sequence = get_or<std::string>(j, "sequence", c.sequence);
            c.pulsed_qubit = get_or(j, "pulsed_qubit", c.pulsed_qubit);
            c.tau = get_or(j, "tau_ns", c.tau);
        } else if (kind == "propagator_error") {
            c.kind = SweepKind::propagator_error;
            if (c.axis != SweepAxis::tau) throw ConfigError("propagator_error sweeps tau");
            c.J = khz_to_rad_per_ns(require(j, "j_khz", "sweep").get<double>());
            c.h = khz_to_rad_per_ns(require(j, "h_khz", "sweep").get<double>());
            c.total_time = require(j, "total_time_ns", "sweep").get<double>();
        } else {
            throw ConfigError("unknown sweep kind '" + kind + "'");
        }
        return c;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad sweep config: ") + e.what());
    } catch (const ValidationError& e) {
        throw ConfigError(e.what());
    }
}

}  // namespace ddsim
