#include <doctest.h>

#include "ddsim/errors.hpp"
#include "ddsim/experiment.hpp"
#include "ddsim/fit.hpp"

using namespace ddsim;

namespace {

std::vector<double> grid(double t1, int n) {
    std::vector<double> t;
    for (int k = 0; k < n; ++k) t.push_back(t1 * k / (n - 1));
    return t;
}

ExperimentConfig two_qubit(Frame f) {
    ExperimentConfig c;
    c.device.omega_q = {kTwoPi * 5.0, kTwoPi * 5.05};
    c.device.couplings = {{0, 1, kTwoPi * 51.55e-6}};
    c.device.frame = f;
    c.lindblad = LindbladSpec{{pauli_op("ZI", 1e-5), pauli_op("IZ", 1e-5), pauli_op("ZZ", 1e-5)}};
    c.t_max = 12000.0;
    c.points = 25;
    return c;
}

}  // namespace

TEST_CASE("damped cosine fit recovers J") {
    const double J = kTwoPi * 51.55e-6;
    const auto t = grid(20000.0, 70);
    std::vector<double> y;
    for (double x : t) y.push_back(closed_form_fidelity(Frame::plus, SpectatorState::zero, x, J, 1e-5));
    const auto f = extract_crosstalk(t, y, Frame::plus);
    CHECK(f.J_estimate == doctest::Approx(J).epsilon(0.01));
    CHECK(f.decay_rate == doctest::Approx(2e-5).epsilon(0.05));
    for (const auto& [k, v] : f.uncertainty) CHECK(v >= 0.0);

    // scale invariance
    std::vector<double> z;
    for (double v : y) z.push_back(3.7 * v - 1.2);
    CHECK(std::abs(extract_crosstalk(t, z, Frame::plus).J_estimate / f.J_estimate - 1.0) < 1e-9);
}

TEST_CASE("zero-frame f_1 period") {
    const double J = kTwoPi * 52.63e-6;
    const auto t = grid(20000.0, 70);
    std::vector<double> y;
    for (double x : t) y.push_back(closed_form_fidelity(Frame::zero, SpectatorState::one, x, J, 1e-5));
    const auto f = extract_crosstalk(t, y, Frame::zero);
    CHECK(kTwoPi / f.omega == doctest::Approx(4750.0).epsilon(0.01));
    CHECK(f.J_estimate == doctest::Approx(J).epsilon(0.01));
}

TEST_CASE("fit failures") {
    const auto t = grid(1000.0, 50);
    CHECK_THROWS_AS(fit_damped_cosine(t, std::vector<double>(50, 0.7)), NumericalError);
    std::vector<double> slow;
    for (double x : t) slow.push_back(std::cos(kTwoPi * x / 2000.0));
    CHECK_THROWS_AS(fit_damped_cosine(t, slow), NumericalError);
}

TEST_CASE("exponential fit") {
    const auto t = grid(10000.0, 40);
    std::vector<double> y;
    for (double x : t) y.push_back(0.4 * std::exp(-3e-4 * x) + 0.5);
    const auto f = fit_exponential(t, y);
    CHECK(f.rate == doctest::Approx(3e-4).epsilon(1e-6));
    CHECK(f.offset == doctest::Approx(0.5).epsilon(1e-6));
    const auto flat = fit_exponential(t, std::vector<double>(40, 1.0));
    CHECK(flat.rate == 0.0);
}

TEST_CASE("state protection at t = 0 and against the closed form") {
    auto c = two_qubit(Frame::plus);
    const auto r = run_state_protection(c);
    REQUIRE(r.series.size() == 3);
    for (const auto& s : r.series) CHECK(s.fidelity.front() == doctest::Approx(1.0).epsilon(1e-12));
    auto cc = c;
    cc.engine = Engine::closed;
    const auto rc = run_state_protection(cc);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t k = 0; k < r.series[i].times.size(); ++k)
            CHECK(std::abs(r.series[i].fidelity[k] - rc.series[i].fidelity[k]) < 1e-6);
}

TEST_CASE("pure-X makes the spectator states indistinguishable") {
    auto c = two_qubit(Frame::plus);
    c.dd = DDConfig{make_pure_x(71.1, 1), -1};
    c.include_free = false;
    const auto r = run_state_protection(c);
    for (std::size_t k = 0; k < r.series[0].times.size(); ++k) {
        CHECK(std::abs(r.series[0].fidelity[k] - r.series[1].fidelity[k]) < 1e-6);
        CHECK(std::abs(r.series[0].fidelity[k] - r.series[2].fidelity[k]) < 1e-6);
        // grid is whole cycles
        const double cyc = r.series[0].times[k] / 142.2;
        CHECK(std::abs(cyc - std::round(cyc)) < 1e-9);
    }
}

TEST_CASE("main state preparations") {
    for (MainState m : {MainState::minus, MainState::plus_i, MainState::minus_i}) {
        auto c = two_qubit(Frame::plus);
        c.main_state = m;
        c.points = 3;
        const auto r = run_state_protection(c);
        CHECK(r.series[0].fidelity.front() == doctest::Approx(1.0));
        CHECK(r.series[0].envelope.front() == doctest::Approx(1.0));
    }
}

TEST_CASE("config validation") {
    auto c = two_qubit(Frame::plus);
    c.main_qubit = 2;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = two_qubit(Frame::plus);
    c.points = 1;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = two_qubit(Frame::custom);
    CHECK_THROWS_AS(resolve_omega_d(c), ConfigError);
    c = two_qubit(Frame::zero);
    CHECK(resolve_omega_d(c) == doctest::Approx(kTwoPi * 5.0 - 2.0 * kTwoPi * 51.55e-6));
}

TEST_CASE("shots and bootstrap") {
    CHECK(shot_sample(1.0, 100, 3) == 100);
    CHECK(shot_sample(0.0, 100, 3) == 0);
    CHECK(shot_sample(0.5, 8192, 9) == shot_sample(0.5, 8192, 9));
    const long z = shot_sample(0.5, 8192, 1);
    CHECK(std::abs(double(z) / 8192.0 - 0.5) < 5 * 0.00552);
    CHECK_THROWS_AS(shot_sample(1.5, 10, 1), ValidationError);

    Rng rng(5);
    CHECK(bootstrap_ci(8192, 8192, rng).half_width == 0.0);
    CHECK(bootstrap_ci(0, 8192, rng).half_width == 0.0);
    const auto b = bootstrap_ci(4096, 8192, rng);
    CHECK(b.half_width > 0.0);
    CHECK(b.half_width < 0.05);
}

TEST_CASE("shot mode agrees with exact mode") {
    auto c = two_qubit(Frame::plus);
    const auto exact = run_state_protection(c);
    c.shots = 8192;
    c.seed = 3;
    const auto shots = run_state_protection(c);
    for (std::size_t i = 0; i < exact.series.size(); ++i)
        for (std::size_t k = 0; k < exact.series[i].times.size(); ++k) {
            const double p = exact.series[i].fidelity[k];
            const double se = std::sqrt(std::max(p * (1 - p), 1e-12) / 8192.0);
            CHECK(std::abs(shots.series[i].fidelity[k] - p) <= 5 * se + 1e-12);
        }
    auto again = run_state_protection(c);
    CHECK(again.series[1].fidelity == shots.series[1].fidelity);
}

TEST_CASE("random-gate DDPG") {
    DDPGConfig c;
    c.device.omega_q = {1.0, 1.0};
    c.device.omega_d = 1.0;
    c.device.couplings = {{0, 1, 0.0}};
    c.runs = 3;
    c.depths = {4, 8, 12, 16};
    const auto r = run_random_gate_ddpg(c);
    CHECK(std::abs(r.free_rate) < 1e-9);
    CHECK(std::abs(r.dd_rate) < 1e-9);
    for (double f : r.free_curve) CHECK(f == doctest::Approx(1.0));

    c.depths = {3, 6};
    CHECK_THROWS_AS(run_random_gate_ddpg(c), ValidationError);
    c.depths = {4, 8, 12};
    c.gate_duration = 71.1;  // gates land on DD pulses
    CHECK_THROWS_AS(run_random_gate_ddpg(c), ValidationError);
}

TEST_CASE("propagator helpers") {
    const Mat H = pauli_expand({"ZZ", 0.01});
    const auto seq = make_pure_x(10.0, 1);
    const Mat U = pulsed_propagator(H, schedule(seq, 40.0), 40.0);
    CHECK(phase_distance(U, Mat::Identity(4, 4)) < 1e-12);
    CHECK(phase_distance(-kI * U, U) < 1e-12);
}
