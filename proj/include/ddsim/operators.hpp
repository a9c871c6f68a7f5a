#pragma once

// Dense operator algebra on n-qubit registers.
// Qubit 0 is the leftmost tensor factor: basis index bit (n-1-q) belongs to qubit q.

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

namespace ddsim {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr cplx kI{0.0, 1.0};

struct PauliTerm {
    std::string label;
    cplx coefficient{1.0, 0.0};
};

// Single-qubit Pauli for 'I','X','Y','Z' (case-insensitive, '0' means identity).
Mat pauli(char axis);

Mat kron(const Mat& a, const Mat& b);
Mat pauli_expand(const PauliTerm& term);
Mat embed_single(const Mat& op, int qubit, int n);
// Two-qubit operator acting on (qa, qb) in that order; qa != qb.
Mat embed_pair(const Mat& op_a, int qa, const Mat& op_b, int qb, int n);

Mat commutator(const Mat& a, const Mat& b);
bool is_hermitian(const Mat& a, double tol = 1e-12);

// exp(scale * A). Hermitian A goes through an eigendecomposition, anything else
// through scaling and squaring with a degree-13 Pade approximant.
Mat matrix_exp(const Mat& a, cplx scale);

Mat partial_trace(const Mat& rho, const std::vector<int>& keep, int n);

// Register size for a 2^n dimension; throws on non powers of two.
int register_size(Eigen::Index dim);

struct DensityCheck {
    double trace_error = 0.0;
    double hermiticity_error = 0.0;
    double min_eigenvalue = 0.0;
};
DensityCheck check_density(const Mat& rho);

// Pure-state projector |psi><psi|.
Mat projector(const Vec& psi);

}  // namespace ddsim
