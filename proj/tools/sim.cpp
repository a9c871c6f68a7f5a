// Command-line driver: simulate, cancellation, sweep, extract-j.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ddsim/config.hpp"
#include "ddsim/errors.hpp"
#include "ddsim/output.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ddsim;

namespace {

constexpr int kConfigExit = 2;
constexpr int kEngineExit = 3;

json diagnostics_json(const Diagnostics& d) {
    return {{"steps", d.steps},
            {"renormalizations", d.renormalizations},
            {"positivity_flags", d.positivity_flags},
            {"max_trace_drift", d.max_trace_drift},
            {"min_eigenvalue", d.min_eigenvalue},
            {"events", d.events}};
}

json fit_json(const FitResult& f) {
    return {{"J_estimate_rad_per_ns", f.J_estimate},
            {"J_estimate_khz", f.J_estimate / kTwoPi * 1e6},
            {"decay_rate_per_ns", f.decay_rate},
            {"omega_rad_per_ns", f.omega},
            {"uncertainty", f.uncertainty},
            {"method", f.method}};
}

void write_text(const fs::path& dir, const std::string& stem, const std::string& ext, const std::string& body) {
    const fs::path p = unique_path(dir, stem, ext);
    write_atomic(p, body);
    std::cerr << "wrote " << p.string() << '\n';
}

int cmd_simulate(const std::string& config, const std::string& outdir, const std::string& engine,
                 std::optional<std::uint64_t> seed, bool svg) {
    ExperimentConfig cfg = parse_experiment(read_json_file(config));
    if (!engine.empty()) cfg.engine = engine_from_string(engine);
    if (seed) cfg.seed = *seed;
    try {
        cfg.validate();
    } catch (const ValidationError& e) {
        throw ConfigError(e.what());
    }
    const StateProtectionResult res = run_state_protection(cfg);

    json summary = {{"engine", to_string(cfg.engine)},
                    {"seed", cfg.seed},
                    {"frame", to_string(cfg.device.frame)},
                    {"points", cfg.points},
                    {"diagnostics", diagnostics_json(res.diagnostics)}};
    json fits = json::array();
    for (const auto& s : res.series) {
        json row = {{"spectator_state", to_string(s.spectator)}, {"arm", s.arm}};
        if (cfg.device.frame == Frame::plus || cfg.device.frame == Frame::zero) {
            try {
                row["fit"] = fit_json(extract_crosstalk(s, cfg.device.frame));
            } catch (const NumericalError& e) {
                row["fit"] = nullptr;
                row["fit_error"] = e.what();
            }
        }
        fits.push_back(row);
    }
    summary["fits"] = fits;

    write_text(outdir, "fidelity", ".csv", series_csv(res.series));
    write_text(outdir, "summary", ".json", summary.dump(2) + "\n");
    if (svg) write_text(outdir, "fidelity", ".svg", render_svg(res.series, {640.0, 400.0, to_string(cfg.engine)}));
    return 0;
}

int cmd_cancellation(const std::string& config, const std::string& outdir, std::string sequence, bool fine_tuned,
                     std::optional<double> omega_ghz, std::vector<double> taus) {
    CancellationConfig c;
    c.omega_d = ghz_to_rad_per_ns(5.0);
    if (!config.empty()) c = parse_cancellation(read_json_file(config));
    if (!sequence.empty()) c.sequence = sequence;
    if (omega_ghz) c.omega_d = ghz_to_rad_per_ns(*omega_ghz);
    if (!taus.empty()) c.taus = taus;
    c.fine_tuned = c.fine_tuned || fine_tuned;
    try {
        sequence_kind_from_string(c.sequence);
        make_sequence(c.sequence, 1.0, c.pulsed_qubit);
    } catch (const ValidationError& e) {
        throw ConfigError(e.what());
    }
    if (c.fine_tuned)
        for (double& t : c.taus) t = fine_tuned_tau(t, c.omega_d);
    const CancellationReport rep = cancellation_table(c.sequence, c.pulsed_qubit, c.omega_d, c.taus);
    const std::string csv = cancellation_csv(rep);
    if (outdir.empty()) std::cout << csv;
    else write_text(outdir, "cancellation", ".csv", csv);
    return 0;
}

int cmd_sweep(const std::string& config, const std::string& outdir) {
    const SweepConfig sw = parse_sweep(read_json_file(config));
    std::ostringstream csv;
    switch (sw.kind) {
        case SweepKind::state_protection: {
            csv << "index,value,spectator_state,arm,final_fidelity,mean_fidelity\n";
            for (std::size_t i = 0; i < sw.values.size(); ++i) {
                ExperimentConfig cfg = sw.base;
                const double v = sw.values[i];
                switch (sw.axis) {
                    case SweepAxis::tau:
                        cfg.dd->sequence = make_sequence(cfg.dd->sequence.name(), v, 0);
                        break;
                    case SweepAxis::omega_d:
                        cfg.device.omega_d = v;
                        cfg.omega_d_given = true;
                        break;
                    case SweepAxis::g:
                        for (auto& b : cfg.bath->couplings) b.g = v;
                        break;
                    case SweepAxis::J:
                        for (auto& c : cfg.device.couplings) c.J = v;
                        break;
                }
                const auto res = run_state_protection(cfg);
                for (const auto& s : res.series) {
                    double mean = 0.0;
                    for (double f : s.fidelity) mean += f / double(s.fidelity.size());
                    csv << i << ',' << format_double(v) << ',' << to_string(s.spectator) << ',' << s.arm << ','
                        << format_double(s.fidelity.back()) << ',' << format_double(mean) << '\n';
                }
            }
            break;
        }
        case SweepKind::fast_drive: {
            const DDSequence seq = make_sequence(sw.sequence, sw.tau, sw.pulsed_qubit);
            const ScalingFit fit = fast_drive_scaling(sw.term, seq, sw.values);
            csv << "index,omega_d,residual\n";
            for (std::size_t i = 0; i < fit.omegas.size(); ++i)
                csv << i << ',' << format_double(fit.omegas[i]) << ',' << format_double(fit.residuals[i]) << '\n';
            const json slope = {{"term", sw.term.label()}, {"sequence", sw.sequence}, {"slope", fit.slope}};
            write_text(outdir, "slope", ".json", slope.dump(2) + "\n");
            break;
        }
        case SweepKind::propagator_error: {
            const Mat H = sw.J * pauli_expand({"ZZ", 1.0}) +
                          sw.h * (pauli_expand({"XI", 1.0}) + pauli_expand({"ZI", 1.0}) + pauli_expand({"IX", 1.0}));
            const Mat H0 = H - sw.J * pauli_expand({"ZZ", 1.0});
            csv << "index,tau,error,ratio\n";
            double prev = 0.0;
            for (std::size_t i = 0; i < sw.values.size(); ++i) {
                const double tau = sw.values[i];
                const DDSequence seq = make_custom({{0.5 * tau, 1, Axis::X, kPi}, {1.5 * tau, 1, Axis::X, kPi}}, 2.0 * tau);
                const double cycles = std::max(1.0, std::round(sw.total_time / seq.cycle));
                const double t_end = cycles * seq.cycle;
                const Mat U = pulsed_propagator(H, schedule(seq, t_end), t_end);
                const double err = phase_distance(U, matrix_exp(H0, cplx(0.0, -t_end)));
                csv << i << ',' << format_double(tau) << ',' << format_double(err) << ','
                    << format_double(i ? prev / err : 0.0) << '\n';
                prev = err;
            }
            break;
        }
    }
    write_text(outdir, "sweep", ".csv", csv.str());
    return 0;
}

int cmd_extract_j(const std::string& csv_path, const std::string& frame, const std::string& arm) {
    std::ifstream in(csv_path);
    if (!in) throw ConfigError("cannot open " + csv_path);
    std::stringstream ss;
    ss << in.rdbuf();
    const Frame f = frame_from_string(frame);
    json out = json::array();
    for (const auto& s : parse_series_csv(ss.str())) {
        if (!arm.empty() && s.arm != arm) continue;
        json row = {{"spectator_state", to_string(s.spectator)}, {"arm", s.arm}};
        row["fit"] = fit_json(extract_crosstalk(s, f));
        out.push_back(row);
    }
    std::cout << out.dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Crosstalk and dynamical decoupling simulator"};
    app.require_subcommand(1);

    std::string config, outdir = "out", engine, sequence, frame = "plus", arm;
    std::optional<std::uint64_t> seed;
    std::optional<double> omega_ghz;
    std::vector<double> taus;
    bool svg = false, fine_tuned = false;
    std::string csv_path;

    auto* sim = app.add_subcommand("simulate", "state-protection fidelity curves");
    sim->add_option("-c,--config", config, "experiment JSON")->required();
    sim->add_option("-o,--out", outdir, "output directory");
    sim->add_option("--engine", engine, "lindblad | redfield | closed");
    sim->add_option("--seed", seed, "random seed");
    sim->add_flag("--svg", svg, "also write an SVG plot");

    std::string cancel_out;
    auto* can = app.add_subcommand("cancellation", "first-order cancellation table");
    can->add_option("-c,--config", config, "JSON with a cancellation block");
    can->add_option("-o,--out", cancel_out, "output directory (default: stdout)");
    can->add_option("--sequence", sequence, "pure_x | pure_y | xy4 | xy4_palindrome | uddN");
    can->add_flag("--fine-tuned", fine_tuned, "snap every tau to a multiple of 2 pi / omega_d");
    can->add_option("--omega-d-ghz", omega_ghz, "drive frequency (default 5 GHz)");
    can->add_option("--tau", taus, "pulse intervals in ns");

    auto* swp = app.add_subcommand("sweep", "parameter ladder");
    swp->add_option("-c,--config", config, "JSON with a sweep block")->required();
    swp->add_option("-o,--out", outdir, "output directory");

    auto* ext = app.add_subcommand("extract-j", "fit J from a fidelity CSV");
    ext->add_option("csv", csv_path, "fidelity CSV")->required();
    ext->add_option("--frame", frame, "plus | zero");
    ext->add_option("--arm", arm, "restrict to one arm");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kConfigExit;
    }

    try {
        if (*sim) return cmd_simulate(config, outdir, engine, seed, svg);
        if (*can) return cmd_cancellation(config, cancel_out, sequence, fine_tuned, omega_ghz, taus);
        if (*swp) return cmd_sweep(config, outdir);
        if (*ext) return cmd_extract_j(csv_path, frame, arm);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigExit;
    } catch (const ValidationError& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kConfigExit;
    } catch (const std::exception& e) {
        std::cerr << "engine error: " << e.what() << '\n';
        return kEngineExit;
    }
    return kConfigExit;
}
