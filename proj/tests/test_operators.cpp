#include <doctest.h>

#include <random>

#include "ddsim/errors.hpp"
#include "ddsim/operators.hpp"
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

}  // namespace

TEST_CASE("pauli_expand builds tensor products") {
    CHECK(pauli_expand({"Z", 1.0}).isApprox(Mat(Eigen::Vector2cd(1, -1).asDiagonal())));
    const Mat zz = pauli_expand({"ZZ", 1.0});
    CHECK(zz.diagonal().real().isApprox(Eigen::Vector4d(1, -1, -1, 1)));
    const Mat xi = pauli_expand({"XI", 2.0});
    CHECK(xi(0, 2) == cplx(2.0));
    CHECK(xi.isApprox(2.0 * kron(pauli('X'), pauli('I'))));
    CHECK(is_hermitian(pauli_expand({"XYZ", 0.7})));
    CHECK_THROWS_AS(pauli_expand({"Q", 1.0}), ValidationError);
}

TEST_CASE("embed_single places the operator on the right factor") {
    CHECK(embed_single(pauli('Z'), 1, 2).diagonal().real().isApprox(Eigen::Vector4d(1, -1, 1, -1)));
    CHECK(embed_single(pauli('X'), 0, 1).isApprox(pauli('X')));
    CHECK(embed_single(pauli('Y'), 2, 3).isApprox(kron(kron(pauli('I'), pauli('I')), pauli('Y'))));
    CHECK_THROWS_AS(embed_single(pauli('X'), 3, 3), ValidationError);
}

TEST_CASE("matrix_exp") {
    const Mat x = pauli('X');
    CHECK(matrix_exp(x, 0.0).isApprox(Mat::Identity(2, 2)));
    Mat want(2, 2);
    want << 0.0, -kI, -kI, 0.0;
    CHECK((matrix_exp(x, cplx(0.0, -kPi / 2)) - want).norm() < 1e-12);
    const Mat rz = matrix_exp(pauli('Z'), cplx(0.0, -kPi / 6));
    CHECK(std::abs(rz(0, 0) - std::exp(-kI * kPi / 6.0)) < 1e-12);
    CHECK(std::abs(rz(1, 1) - std::exp(kI * kPi / 6.0)) < 1e-12);
    // non-Hermitian input
    Mat n(2, 2);
    n << 0.0, 1.0, 0.0, 0.0;
    const Mat e = matrix_exp(n, 1.0);
    CHECK(std::abs(e(0, 1) - 1.0) < 1e-12);
}

TEST_CASE("partial_trace") {
    Vec plus(2), zero(2);
    plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
    zero << 1, 0;
    const Mat prod = projector(Vec(kron(plus, zero)));
    CHECK((partial_trace(prod, {0}, 2) - projector(plus)).norm() < 1e-12);

    Vec bell = Vec::Zero(4);
    bell(0) = bell(3) = 1 / std::sqrt(2.0);
    CHECK((partial_trace(projector(bell), {0}, 2) - 0.5 * Mat::Identity(2, 2)).norm() < 1e-12);

    const Mat r = random_density(4, 11);
    const Mat got = partial_trace(r, {1}, 2);
    Mat want = Mat::Zero(2, 2);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int k = 0; k < 2; ++k) want(a, b) += r(2 * k + a, 2 * k + b);
    CHECK((got - want).cwiseAbs().maxCoeff() < 1e-12);

    const Mat r3 = random_density(8, 5);
    CHECK(std::abs(partial_trace(r3, {0, 2}, 3).trace() - 1.0) < 1e-12);
    CHECK_THROWS_AS(partial_trace(r3, {3}, 3), ValidationError);
}

TEST_CASE("register size and density checks") {
    CHECK(register_size(8) == 3);
    CHECK_THROWS_AS(register_size(6), ValidationError);
    const auto c = check_density(random_density(4, 3));
    CHECK(c.trace_error < 1e-12);
    CHECK(c.hermiticity_error < 1e-12);
    CHECK(c.min_eigenvalue > -1e-12);
}

TEST_CASE("rng streams are reproducible and distinct") {
    Rng a(42), b(42);
    CHECK(a() == b());
    Rng c = Rng(42).derive(1), d = Rng(42).derive(2);
    CHECK(c() != d());
    Rng u(1);
    for (int k = 0; k < 100; ++k) {
        const double x = u.uniform();
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
    }
}
