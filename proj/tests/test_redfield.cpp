#include <doctest.h>

#include "ddsim/errors.hpp"
#include "ddsim/experiment.hpp"
#include "ddsim/fit.hpp"
#include "ddsim/redfield.hpp"

using namespace ddsim;

namespace {

OhmicBathSpec bath_20mk() {
    OhmicBathSpec b;
    b.eta_ohmic = 1e-4;
    b.omega_c = kTwoPi * 2.0;
    b.beta = beta_from_temperature_mk(20.0);
    return b;
}

}  // namespace

TEST_CASE("ohmic spectrum") {
    const auto b = bath_20mk();
    CHECK(ohmic_spectrum(0.0, b, 0.3) == doctest::Approx(kTwoPi * b.eta_ohmic * 0.09 / b.beta));
    CHECK(ohmic_spectrum(1e-12, b, 0.3) == doctest::Approx(ohmic_spectrum(0.0, b, 0.3)).epsilon(1e-6));
    for (double w : {0.1, 1.0, 7.0, 30.0})
        CHECK(ohmic_spectrum(-w, b) == doctest::Approx(std::exp(-b.beta * w) * ohmic_spectrum(w, b)).epsilon(1e-10));
    const double v = ohmic_spectrum(kTwoPi * 5.0, b, 0.1175);
    CHECK(std::isfinite(v));
    CHECK(v > 0.0);
    OhmicBathSpec bad = b;
    bad.beta = 0.0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("correlation table") {
    const auto b = bath_20mk();
    const auto c = correlation_from_spectrum(b, 1.0);
    CHECK(c.values.front().real() > 0.0);
    CHECK(std::abs(c.values.front().imag()) < 1e-8 * c.values.front().real());
    CHECK(correlation_roundtrip_error(c, b, 1.0) < 0.01);
    CHECK(c.window() >= 10.0 / b.omega_c);
    const double t = 0.37;
    CHECK(std::abs(c.at(-t) - std::conj(c.at(t))) < 1e-12);
    // decays on the 1/omega_c scale when cold
    OhmicBathSpec cold = b;
    cold.beta = 1e3;
    // the zero-temperature kink at w = 0 defeats the round trip check; only the decay is tested
    CorrelationOptions loose;
    loose.roundtrip_tol = 1.0;
    const auto cc = correlation_from_spectrum(cold, 1.0, loose);
    CHECK(std::abs(cc.at(5.0 / b.omega_c)) < 0.1 * std::abs(cc.at(0.0)));
}

TEST_CASE("lambda operator") {
    const auto b = bath_20mk();
    const auto table = correlation_from_spectrum(b, 1.0);
    const Eigen::VectorXd e = Eigen::Vector2d(0.0, 0.3);
    std::map<int, Mat> az{{0, pauli('Z')}};
    CHECK(lambda_operator(0.0, az, e, 0.0, table).norm() == 0.0);
    // diagonal A and H: Lambda = (int_0^t C) A
    const double t = 0.5;
    cplx integral = 0.0;
    const int m = 2000;
    for (int k = 0; k < m; ++k) {
        const double s0 = t * k / m, s1 = t * (k + 1) / m;
        integral += 0.5 * (s1 - s0) * (table.at(s0) + table.at(s1));
    }
    const Mat L = lambda_operator(t, az, e, 0.0, table);
    CHECK(std::abs(L(0, 0) - integral) < 1e-4 * std::abs(integral));
    CHECK(std::abs(L(1, 1) + integral) < 1e-4 * std::abs(integral));
    CHECK(std::abs(L(0, 1)) < 1e-15);
}

TEST_CASE("redfield without couplings is unitary") {
    OhmicBathSpec b = bath_20mk();
    const Mat H = pauli_expand({"ZI", 0.05}) + pauli_expand({"ZZ", 0.01});
    Vec psi = Vec::Constant(4, 0.5);
    const Mat r0 = projector(psi);
    const std::vector<double> grid{0.0, 0.3, 5.0, 40.0};
    const auto tr = redfield_evolve(r0, H, 0.0, b, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const Mat U = matrix_exp(H, cplx(0.0, -grid[k]));
        CHECK((tr.states[k] - U * r0 * U.adjoint()).norm() < 1e-8);
    }
}

TEST_CASE("redfield rejects non-diagonal system Hamiltonians") {
    CHECK_THROWS_AS(RedfieldEngine(pauli_expand({"X", 1.0}), 0.0, bath_20mk()), ValidationError);
}

TEST_CASE("redfield plus frame oscillates with period pi / J") {
    ExperimentConfig c;
    c.device.omega_q = {kTwoPi * 5.0, kTwoPi * 5.0};
    const double J = kTwoPi * 200e-6;
    c.device.couplings = {{0, 1, J}};
    c.device.frame = Frame::plus;
    OhmicBathSpec b = bath_20mk();
    b.couplings = {{0, 'z', 0.02}, {1, 'z', 0.02}};
    c.bath = b;
    c.engine = Engine::redfield;
    c.spectator_states = {SpectatorState::zero};
    c.t_max = 8000.0;
    c.points = 60;
    const auto r = run_state_protection(c);
    const auto f = fit_damped_cosine(r.series.front().times, r.series.front().fidelity);
    CHECK(std::abs(f.omega / (2.0 * J) - 1.0) < 0.02);
    CHECK(r.diagnostics.min_eigenvalue > -1e-3);
}
