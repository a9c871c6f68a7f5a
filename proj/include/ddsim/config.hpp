#pragma once

// JSON configuration. Frequencies are given in GHz (or kHz for couplings) and
// converted to rad/ns; rates in 1/us are converted to 1/ns.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ddsim/experiment.hpp"
#include "ddsim/magnus.hpp"

namespace ddsim {

double ghz_to_rad_per_ns(double ghz);
double khz_to_rad_per_ns(double khz);

nlohmann::json read_json_file(const std::filesystem::path& path);

DeviceSpec parse_device(const nlohmann::json& j);
LindbladSpec parse_lindblad(const nlohmann::json& j, int n);
OhmicBathSpec parse_bath(const nlohmann::json& j);
DDSequence parse_sequence(const nlohmann::json& j);
ExperimentConfig parse_experiment(const nlohmann::json& j);

struct CancellationConfig {
    std::string sequence = "pure_x";
    int pulsed_qubit = 1;
    double omega_d = 0.0;
    std::vector<double> taus{10.0, 37.0, 71.1};
    bool fine_tuned = false;  // replace each tau by its nearest fine-tuned value
};
CancellationConfig parse_cancellation(const nlohmann::json& j);

enum class SweepAxis { tau, omega_d, g, J };
SweepAxis sweep_axis_from_string(const std::string& s);
std::string to_string(SweepAxis a);

enum class SweepKind { state_protection, fast_drive, propagator_error };

struct SweepConfig {
    SweepKind kind = SweepKind::state_protection;
    SweepAxis axis = SweepAxis::tau;
    std::vector<double> values;  // tau in ns, omega_d in rad/ns, g in rad/ns, J in rad/ns
    ExperimentConfig base;       // state_protection only
    // fast_drive
    CouplingTerm term{'x', 'z', 1.0};
    std::string sequence = "pure_x";
    int pulsed_qubit = 1;
    double tau = 71.1;
    // propagator_error: H = J ZZ + h (XI + ZI + IX), centered pure-X on qubit 1
    double J = 0.0, h = 0.0, total_time = 0.0;
};
SweepConfig parse_sweep(const nlohmann::json& j);

}  // namespace ddsim
