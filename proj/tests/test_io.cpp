#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "ddsim/config.hpp"
#include "ddsim/errors.hpp"
#include "ddsim/output.hpp"

using namespace ddsim;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("ddsim_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Balanced-tag check, enough to catch malformed output.
bool well_formed(const std::string& xml) {
    std::vector<std::string> stack;
    const std::regex tag(R"(<(/?)([A-Za-z][\w:-]*)[^>]*?(/?)>)");
    for (auto it = std::sregex_iterator(xml.begin(), xml.end(), tag); it != std::sregex_iterator(); ++it) {
        const auto& m = *it;
        if (m[3] == "/") continue;
        if (m[1] == "/") {
            if (stack.empty() || stack.back() != m[2]) return false;
            stack.pop_back();
        } else {
            stack.push_back(m[2]);
        }
    }
    return stack.empty() && xml.find('&') == std::string::npos;
}

int run_sim(const std::string& args) {
    const std::string cmd = std::string(SIM_PATH) + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

FidelitySeries series(SpectatorState s, std::vector<double> f) {
    FidelitySeries x;
    x.spectator = s;
    for (std::size_t k = 0; k < f.size(); ++k) x.times.push_back(100.0 * double(k));
    x.fidelity = std::move(f);
    x.ci_half_width.assign(x.times.size(), 0.0);
    return x;
}

}  // namespace

TEST_CASE("doubles round-trip through CSV") {
    FidelitySeries s = series(SpectatorState::plus, {0.1, 1.0 / 3.0, 0.999999999999});
    s.times[1] = 71.1 * 3;
    s.ci_half_width[2] = 1e-17;
    const auto back = parse_series_csv(series_csv({s}));
    REQUIRE(back.size() == 1);
    CHECK(back[0].times == s.times);
    CHECK(back[0].fidelity == s.fidelity);
    CHECK(back[0].ci_half_width == s.ci_half_width);
    CHECK(back[0].spectator == SpectatorState::plus);
    CHECK_THROWS_AS(parse_series_csv("a,b\n1,2\n"), ConfigError);
}

TEST_CASE("files are never silently overwritten") {
    const auto dir = scratch("unique");
    const auto a = unique_path(dir, "fidelity", ".csv");
    write_atomic(a, "one");
    const auto b = unique_path(dir, "fidelity", ".csv");
    CHECK(b.filename() == "fidelity-1.csv");
    write_atomic(b, "two");
    CHECK(unique_path(dir, "fidelity", ".csv").filename() == "fidelity-2.csv");
    CHECK(slurp(a) == "one");
    int n = 0;
    for (const auto& e : fs::directory_iterator(dir)) n += e.path().string().find(".tmp") == std::string::npos;
    CHECK(n == 2);
}

TEST_CASE("svg output") {
    std::vector<FidelitySeries> s{series(SpectatorState::zero, {1.0, 0.5, -0.2}),
                                  series(SpectatorState::one, {1.0, 1.4, 0.3}),
                                  series(SpectatorState::plus, {1.0, 0.8, 0.6})};
    const std::string svg = render_svg(s, {640, 400, "a < b"});
    std::size_t count = 0;
    for (std::size_t p = svg.find("<polyline"); p != std::string::npos; p = svg.find("<polyline", p + 1)) ++count;
    CHECK(count == 3);
    CHECK(svg.find("|0⟩") != std::string::npos);
    CHECK(svg.find("|1⟩") != std::string::npos);
    CHECK(svg.find("|+⟩") != std::string::npos);
    CHECK(svg.find("a &lt; b") != std::string::npos);
    // clipped: no point above the top or below the bottom of the plot area
    const std::regex pt(R"(([0-9.]+),([0-9.-]+))");
    const auto pl = svg.find("points=\"");
    const std::string pts = svg.substr(pl + 8, svg.find('"', pl + 8) - pl - 8);
    for (auto it = std::sregex_iterator(pts.begin(), pts.end(), pt); it != std::sregex_iterator(); ++it) {
        const double y = std::stod((*it)[2]);
        CHECK(y >= 30.0 - 1e-9);
        CHECK(y <= 350.0 + 1e-9);
    }
    std::string stripped = std::regex_replace(svg, std::regex("&lt;"), "");
    stripped = std::regex_replace(stripped, std::regex(R"(<\?xml[^>]*\?>)"), "");
    CHECK(well_formed(stripped));
    CHECK_THROWS_AS(render_svg({}), ValidationError);
}

TEST_CASE("config parsing") {
    const auto c = parse_experiment(read_json_file(fs::path(CONFIG_DIR) / "plus_frame.json"));
    CHECK(c.device.n == 2);
    CHECK(c.device.omega_q[0] == doctest::Approx(kTwoPi * 5.0));
    CHECK(c.device.couplings[0].J == doctest::Approx(kTwoPi * 51.55e-6));
    CHECK(c.lindblad->ops[0].gamma == doctest::Approx(1e-5));
    CHECK(c.t_max == doctest::Approx(20000.0));
    CHECK(c.points == 70);
    CHECK_FALSE(c.omega_d_given);
    CHECK_THROWS_AS(read_json_file("/nonexistent/cfg.json"), ConfigError);
    CHECK_THROWS_AS(parse_experiment(nlohmann::json::parse(R"({"device": {"n": 2}})")), ConfigError);
    const auto b = parse_experiment(read_json_file(fs::path(CONFIG_DIR) / "ourense_redfield.json"));
    CHECK(b.engine == Engine::redfield);
    CHECK(b.bath->couplings.size() == 12);
    CHECK(b.bath->couplings[0].g == doctest::Approx(0.1175));
}

TEST_CASE("cli exit codes and outputs") {
    const auto dir = scratch("cli");
    CHECK(run_sim("simulate -c /nonexistent/cfg.json -o " + dir.string()) == 2);
    CHECK(run_sim("cancellation --sequence bogus") == 2);
    CHECK(run_sim("frobnicate") == 2);

    const std::string cfg = (fs::path(CONFIG_DIR) / "plus_frame.json").string();
    REQUIRE(run_sim("simulate -c " + cfg + " -o " + (dir / "a").string() + " --seed 4 --svg") == 0);
    REQUIRE(run_sim("simulate -c " + cfg + " -o " + (dir / "b").string() + " --seed 4") == 0);
    const std::string csv = slurp(dir / "a" / "fidelity.csv");
    CHECK(csv == slurp(dir / "b" / "fidelity.csv"));
    std::size_t rows = 0;
    for (char ch : csv) rows += ch == '\n';
    CHECK(rows == 1 + 3 * 70);
    CHECK(fs::exists(dir / "a" / "summary.json"));
    CHECK(fs::exists(dir / "a" / "fidelity.svg"));
    // second run into the same directory gets a suffix
    REQUIRE(run_sim("simulate -c " + cfg + " -o " + (dir / "a").string() + " --engine closed") == 0);
    CHECK(fs::exists(dir / "a" / "fidelity-1.csv"));

    CHECK(run_sim("extract-j " + (dir / "a" / "fidelity.csv").string()) == 0);
    CHECK(run_sim("cancellation -o " + (dir / "c").string()) == 0);
    const std::string table = slurp(dir / "c" / "cancellation.csv");
    std::size_t lines = 0;
    for (char ch : table) lines += ch == '\n';
    CHECK(lines == 16);

    CHECK(run_sim("cancellation --sequence xy4 --fine-tuned -o " + (dir / "d").string()) == 0);
    std::istringstream in(slurp(dir / "d" / "cancellation.csv"));
    std::string line;
    std::getline(in, line);
    int surviving = 0;
    std::string which;
    while (std::getline(in, line)) {
        std::vector<std::string> f;
        std::stringstream ls(line);
        for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
        if (std::stod(f[5]) >= kCancelThreshold) {
            ++surviving;
            which = f[2] + f[3];
        }
    }
    CHECK(surviving == 1);
    CHECK(which == "z0");

    CHECK(run_sim("sweep -c " + (fs::path(CONFIG_DIR) / "sweep_propagator.json").string() + " -o " +
                  (dir / "s").string()) == 0);
    CHECK(run_sim("sweep -c " + (fs::path(CONFIG_DIR) / "sweep_fast_drive.json").string() + " -o " +
                  (dir / "f").string()) == 0);
    CHECK(fs::exists(dir / "f" / "slope.json"));
}
