#include <doctest.h>

#include "ddsim/device.hpp"
#include "ddsim/errors.hpp"

using namespace ddsim;

TEST_CASE("lab Hamiltonian") {
    DeviceSpec one;
    one.n = 1;
    one.omega_q = {kTwoPi * 5.0};
    const Mat h1 = build_lab_hamiltonian(one);
    CHECK(std::abs(h1(0, 0).real() + kTwoPi * 2.5) < 1e-12);
    CHECK(std::abs(h1(1, 1).real() - kTwoPi * 2.5) < 1e-12);

    DeviceSpec zz;
    zz.omega_q = {0.0, 0.0};
    zz.couplings = {{0, 1, 0.3}};
    CHECK(build_lab_hamiltonian(zz).diagonal().real().isApprox(Eigen::Vector4d(0.3, -0.3, -0.3, 0.3)));

    DeviceSpec o;
    o.omega_q = {kTwoPi * 4.8902, kTwoPi * 4.8203};
    o.couplings = {{0, 1, kTwoPi * 25.48e-6}};
    const Mat h = build_lab_hamiltonian(o);
    const Mat want = -0.5 * o.omega_q[0] * pauli_expand({"ZI", 1.0}) - 0.5 * o.omega_q[1] * pauli_expand({"IZ", 1.0}) +
                     o.couplings[0].J * pauli_expand({"ZZ", 1.0});
    CHECK((h - want).norm() < 1e-12);
}

TEST_CASE("device validation") {
    DeviceSpec d;
    d.omega_q = {1.0, 1.0};
    d.couplings = {{1, 0, 0.1}};
    CHECK_THROWS_AS(d.validate(), ValidationError);
    d.couplings = {{0, 1, -0.1}};
    CHECK_THROWS_AS(d.validate(), ValidationError);
    d.allow_signed_j = true;
    CHECK_NOTHROW(d.validate());
    d.couplings = {{0, 1, 0.1}, {0, 1, 0.2}};
    CHECK_THROWS_AS(d.validate(), ValidationError);
}

TEST_CASE("number operator") {
    CHECK(number_operator(1).diagonal().real().isApprox(Eigen::Vector2d(0, 1)));
    CHECK(number_operator(2).diagonal().real().isApprox(Eigen::Vector4d(0, 1, 1, 2)));
    CHECK(number_operator(3)(5, 5).real() == doctest::Approx(2.0));
}

TEST_CASE("rotating frame") {
    DeviceSpec one;
    one.n = 1;
    one.omega_q = {kTwoPi * 5.0};
    const auto f = to_rotating_frame(build_lab_hamiltonian(one), {}, one.omega_q[0]);
    CHECK(f.static_part.norm() < 1e-12);

    const double w = 2.0;
    const auto g = to_rotating_frame(Mat::Zero(4, 4), {{"XZ", 1.0}}, w);
    const Mat shift = 0.5 * w * (pauli_expand({"ZI", 1.0}) + pauli_expand({"IZ", 1.0}));
    CHECK((g.static_part - shift).norm() < 1e-12);
    for (double t : {0.0, 0.3, 1.7}) {
        const Mat want = shift + kron(std::cos(w * t) * pauli('X') + std::sin(w * t) * pauli('Y'), pauli('Z'));
        CHECK((g.at(t) - want).norm() < 1e-12);
    }
    CHECK((g.at(kTwoPi / w) - g.at(0.0)).norm() < 1e-12);
    CHECK((g.at(0.0) - shift - pauli_expand({"XZ", 1.0})).norm() < 1e-12);
}

TEST_CASE("rotated Pauli matrices") {
    const double w = 3.0;
    CHECK((rotated_pauli('x', 0.0, w) - pauli('X')).norm() < 1e-12);
    CHECK((rotated_pauli('x', kPi / w, w) + pauli('X')).norm() < 1e-12);
    // sigma^y(t) = [[0, -i e^{-iwt}], [i e^{iwt}, 0]]
    const double t = kPi / (2.0 * w);
    Mat want(2, 2);
    want << 0.0, -kI * std::exp(-kI * (w * t)), kI * std::exp(kI * (w * t)), 0.0;
    CHECK((rotated_pauli('y', t, w) - want).norm() < 1e-12);
    CHECK((rotated_pauli('y', t, w) + pauli('X')).norm() < 1e-12);
}

TEST_CASE("frame Hamiltonians") {
    DeviceSpec d;
    const double J = 0.01;
    d.omega_q = {5.0, 5.0};
    d.couplings = {{0, 1, J}};
    CHECK(frame_system_hamiltonian(d, Frame::plus).diagonal().real().isApprox(Eigen::Vector4d(0, -2 * J, -2 * J, 0)));
    d.omega_q = {5.0, 4.9};
    const double delta = 0.1;
    CHECK(frame_system_hamiltonian(d, Frame::zero)(3, 3).real() == doctest::Approx(4 * J - delta));

    // both frames equal the lab Hamiltonian plus w_d (Z1 + Z2)/2, up to a constant
    const Mat lab = build_lab_hamiltonian(d);
    const Mat zsum = pauli_expand({"ZI", 1.0}) + pauli_expand({"IZ", 1.0});
    for (auto [fr, wd] : {std::pair{Frame::plus, d.omega_q[0]}, std::pair{Frame::zero, d.omega_q[0] - 2 * J}}) {
        Mat rot = lab + 0.5 * wd * zsum;
        rot -= rot(0, 0) * Mat::Identity(4, 4);
        CHECK((rot - frame_system_hamiltonian(d, fr)).norm() < 1e-12);
    }
}

TEST_CASE("dressed frequencies") {
    TransmonPair p{kTwoPi * 5.0, kTwoPi * 4.9, 0.0, -kTwoPi * 0.33};
    auto f = dressed_frequencies(p);
    CHECK(f.omega_eig_0 == doctest::Approx(p.omega_q1));
    CHECK(f.omega_eig_1 == doctest::Approx(p.omega_q1));
    CHECK(f.omega_zz == doctest::Approx(0.0));

    p.g = kTwoPi * 3e-3;
    p.omega_q2 = p.omega_q1 - kTwoPi * 0.1;
    f = dressed_frequencies(p);
    CHECK(f.omega_eig_plus == doctest::Approx(0.5 * (f.omega_eig_0 + f.omega_eig_1)).epsilon(1e-15));
    CHECK(f.perturbative_ok);
    const double exact = exact_omega_zz(p);
    CHECK(std::abs(f.omega_zz / exact - 1.0) < 0.05);

    p.g = kTwoPi * 0.05;
    CHECK_FALSE(dressed_frequencies(p).perturbative_ok);
}
