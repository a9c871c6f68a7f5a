#include <doctest.h>

#include <random>

#include "ddsim/errors.hpp"
#include "ddsim/lindblad.hpp"
#include "ddsim/rng.hpp"

using namespace ddsim;

namespace {

Mat random_density(int dim, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> n;
    Mat a(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) a(i, j) = cplx(n(rng), n(rng));
    Mat r = a * a.adjoint();
    return r / r.trace();
}

Mat plus_state(SpectatorState s) {
    Vec p(2), q(2);
    p << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
    switch (s) {
        case SpectatorState::zero: q << 1, 0; break;
        case SpectatorState::one: q << 0, 1; break;
        case SpectatorState::plus: q = p; break;
    }
    return projector(Vec(kron(p, q)));
}

}  // namespace

TEST_CASE("lindblad_rhs") {
    const Mat H = pauli_expand({"ZI", 0.3});
    Mat rho = Mat::Zero(4, 4);
    rho(0, 0) = 0.25;
    rho(3, 3) = 0.75;
    CHECK(lindblad_rhs(rho, H, {}).norm() < 1e-15);

    // one qubit dephasing: d rho01 = -2 gamma rho01 - i (E0 - E1) rho01
    const double g = 0.2, w = 0.7;
    const Mat h1 = 0.5 * w * pauli('Z');
    Mat r(2, 2);
    r << 0.5, 0.5, 0.5, 0.5;
    const Mat d = lindblad_rhs(r, h1, {{pauli_op("Z", g)}});
    CHECK(std::abs(d(0, 1) - (-2.0 * g * 0.5 - kI * w * 0.5)) < 1e-12);

    const LindbladSpec spec{{pauli_op("XY", 0.3), lower_op(1, 2, 0.2), lower_joint_op(0, 1, 2, 0.1)}};
    const Mat rr = random_density(4, 9);
    CHECK(std::abs(lindblad_rhs(rr, pauli_expand({"ZX", 0.4}), spec).trace()) < 1e-12);
}

TEST_CASE("lindblad spec validation") {
    LindbladSpec s{{pauli_op("ZI", -1.0)}};
    CHECK_THROWS_AS(s.validate(4), ValidationError);
    LindbladSpec t{{pauli_op("Z", 1.0)}};
    CHECK_THROWS_AS(t.validate(4), ValidationError);
}

TEST_CASE("evolve") {
    const std::vector<double> grid{0.0, 10.0, 25.0, 40.0};
    const Mat r0 = random_density(4, 1);
    FrameHamiltonian zero{Mat::Zero(4, 4), {}, 0.0};
    const auto tr = evolve(r0, zero, {}, grid);
    for (const auto& s : tr.states) CHECK((s - r0).norm() < 1e-14);

    // unitary oracle, RK4 truncation level
    const Mat H = pauli_expand({"XZ", 0.05}) + pauli_expand({"ZI", 0.02});
    const auto u = evolve(r0, FrameHamiltonian{H, {}, 0.0}, {}, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const Mat U = matrix_exp(H, cplx(0.0, -grid[k]));
        CHECK((u.states[k] - U * r0 * U.adjoint()).norm() < 1e-6);
    }

    // plus frame dephasing matches the closed form
    const double J = kTwoPi * 51.55e-6, g1 = 2e-5, g2 = 1e-5, g3 = 3e-5;
    const LindbladSpec spec{{pauli_op("ZI", g1), pauli_op("IZ", g2), pauli_op("ZZ", g3)}};
    const FrameHamiltonian fh{J * pauli_expand({"ZZ", 1.0}), {}, 0.0};
    std::vector<double> g2grid;
    for (int k = 0; k <= 40; ++k) g2grid.push_back(500.0 * k);
    const auto d = evolve(plus_state(SpectatorState::plus), fh, spec, g2grid);
    for (std::size_t k = 0; k < g2grid.size(); ++k)
        CHECK(std::abs(plus_fidelity(d.states[k], 0, 2) -
                       closed_form_fidelity(Frame::plus, SpectatorState::plus, g2grid[k], J, g1 + g3)) < 1e-6);
    CHECK(d.diagnostics.max_trace_drift < 1e-9);
}

TEST_CASE("closed-form fidelities") {
    for (Frame f : {Frame::plus, Frame::zero})
        for (SpectatorState s : {SpectatorState::zero, SpectatorState::one, SpectatorState::plus})
            CHECK(closed_form_fidelity(f, s, 0.0, 0.1, 0.01) == doctest::Approx(1.0));
    const double g = 1e-4;
    CHECK(closed_form_fidelity(Frame::zero, SpectatorState::zero, 700.0, 0.3, g) ==
          doctest::Approx(0.5 * (1 + std::exp(-2 * g * 700.0))));
    const double J = kTwoPi * 51.55e-6;
    const double t0 = 1.0 / (8.0 * 51.55e-6);  // ns
    CHECK(t0 == doctest::Approx(2425.0).epsilon(1e-3));
    CHECK(closed_form_fidelity(Frame::plus, SpectatorState::zero, t0, J, 0.0) == doctest::Approx(0.5));
    CHECK_THROWS_AS(closed_form_fidelity(Frame::custom, SpectatorState::zero, 1.0, J, 0.0), ValidationError);
}

TEST_CASE("noise closed forms reduce to the dephasing form") {
    const double J = 0.3, t = 2.7;
    const double p3a = closed_form_fidelity(Frame::plus, SpectatorState::plus, t, J, 0.01 + 0.0025);
    CHECK(closed_form_x_noise(t, J, {0.01, 0.02, 0.0025, 0, 0, 0.04}) == doctest::Approx(p3a));
    CHECK(closed_form_x_noise(0.0, J, {0.01, 0.02, 0.0025, 0.1, 0.2, 0.04}) == doctest::Approx(1.0));
    CHECK(closed_form_y_noise(t, J, {0.01, 0.0025, 0, 0, 0}) == doctest::Approx(p3a));
    // g7 = g8: the oscillation frequency stays 2J
    const double a = closed_form_y_noise(kPi / (2 * J), J, {0, 0, 0.05, 0.05, 0});
    CHECK(a == doctest::Approx(0.5 * (1 - std::exp(-0.1 * kPi / (2 * J)))));
    for (SpectatorState s : {SpectatorState::zero, SpectatorState::one, SpectatorState::plus})
        CHECK(closed_form_emission(s, t, J, {0.01, 0.0025, 0, 0, 0}) == doctest::Approx(p3a));
}

TEST_CASE("emission envelope ordering") {
    const EmissionRates r{0.01, 0.0025, 0.01, 0.01, 0.01};
    const double J = 0.3;
    // envelope = amplitude of the oscillation around the decaying mean, sampled over one period
    auto env = [&](SpectatorState s, double t) {
        double hi = -1, lo = 2;
        for (int k = 0; k < 200; ++k) {
            const double x = t + k * (kPi / J) / 200.0;
            hi = std::max(hi, closed_form_emission(s, x, J, r));
            lo = std::min(lo, closed_form_emission(s, x, J, r));
        }
        return hi - lo;
    };
    for (double t : {20.0, 50.0, 100.0}) {
        CHECK(env(SpectatorState::zero, t) >= env(SpectatorState::plus, t));
        CHECK(env(SpectatorState::plus, t) >= env(SpectatorState::one, t));
    }
}

TEST_CASE("damped_cos continues through W2 = 0") {
    CHECK(damped_cos(1.0, 1e-14, 0.5) == doctest::Approx(1.5).epsilon(1e-6));
    CHECK(damped_cos(1.0, -1.0, 0.0) == doctest::Approx(std::cosh(1.0)));
    CHECK(damped_cos(1.0, 4.0, 0.0) == doctest::Approx(std::cos(2.0)));
}

TEST_CASE("spectator state names") {
    CHECK(spectator_from_string("+") == SpectatorState::plus);
    CHECK(to_string(SpectatorState::one) == "one");
    CHECK_THROWS_AS(spectator_from_string("minus"), ValidationError);
}
