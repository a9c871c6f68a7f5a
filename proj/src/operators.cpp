#include "ddsim/operators.hpp"

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>

#include "ddsim/errors.hpp"

namespace ddsim {

Mat pauli(char axis) {
    Mat m = Mat::Zero(2, 2);
    switch (axis) {
        case 'I': case 'i': case '0':
            m(0, 0) = 1.0;
            m(1, 1) = 1.0;
            break;
        case 'X': case 'x':
            m(0, 1) = 1.0;
            m(1, 0) = 1.0;
            break;
        case 'Y': case 'y':
            m(0, 1) = -kI;
            m(1, 0) = kI;
            break;
        case 'Z': case 'z':
            m(0, 0) = 1.0;
            m(1, 1) = -1.0;
            break;
        default:
            throw ValidationError(std::string("unknown Pauli axis '") + axis + "'");
    }
    return m;
}

Mat kron(const Mat& a, const Mat& b) {
    return Eigen::kroneckerProduct(a, b).eval();
}

Mat pauli_expand(const PauliTerm& term) {
    if (term.label.empty()) throw ValidationError("empty Pauli label");
    Mat out = Mat::Identity(1, 1);
    for (char c : term.label) {
        if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z')
            throw ValidationError("malformed Pauli label '" + term.label + "'");
        out = kron(out, pauli(c));
    }
    return term.coefficient * out;
}

int register_size(Eigen::Index dim) {
    int n = 0;
    Eigen::Index d = 1;
    while (d < dim) {
        d *= 2;
        ++n;
    }
    if (d != dim || dim < 1) throw ValidationError("dimension is not a power of two");
    return n;
}

Mat embed_single(const Mat& op, int qubit, int n) {
    if (op.rows() != 2 || op.cols() != 2) throw ValidationError("embed_single expects a 2x2 operator");
    if (n < 1 || qubit < 0 || qubit >= n) throw ValidationError("qubit index out of range");
    const Eigen::Index left = Eigen::Index(1) << qubit;
    const Eigen::Index right = Eigen::Index(1) << (n - 1 - qubit);
    return kron(kron(Mat::Identity(left, left), op), Mat::Identity(right, right));
}

Mat embed_pair(const Mat& op_a, int qa, const Mat& op_b, int qb, int n) {
    if (qa == qb) throw ValidationError("embed_pair needs two distinct qubits");
    return embed_single(op_a, qa, n) * embed_single(op_b, qb, n);
}

Mat commutator(const Mat& a, const Mat& b) { return a * b - b * a; }

bool is_hermitian(const Mat& a, double tol) {
    if (a.rows() != a.cols()) return false;
    return (a - a.adjoint()).cwiseAbs().maxCoeff() < tol;
}

Mat matrix_exp(const Mat& a, cplx scale) {
    if (a.rows() != a.cols()) throw ValidationError("matrix_exp needs a square matrix");
    if (!a.allFinite()) throw ValidationError("matrix_exp: non-finite entries");
    if (a.rows() == 0) return a;
    if (is_hermitian(a)) {
        Eigen::SelfAdjointEigenSolver<Mat> es(a);
        const Eigen::VectorXcd phases =
            (scale * es.eigenvalues().cast<cplx>()).array().exp().matrix();
        return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    }
    const Mat scaled = scale * a;
    return scaled.exp();
}

Mat partial_trace(const Mat& rho, const std::vector<int>& keep, int n) {
    if (keep.empty()) throw ValidationError("partial_trace: empty keep set");
    const Eigen::Index dim = Eigen::Index(1) << n;
    if (rho.rows() != dim || rho.cols() != dim) throw ValidationError("partial_trace: dimension mismatch");
    std::vector<int> kept = keep;
    std::sort(kept.begin(), kept.end());
    kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
    for (int q : kept)
        if (q < 0 || q >= n) throw ValidationError("partial_trace: qubit index out of range");
    std::vector<int> traced;
    for (int q = 0; q < n; ++q)
        if (!std::binary_search(kept.begin(), kept.end(), q)) traced.push_back(q);

    const int nk = int(kept.size());
    const int nt = int(traced.size());
    auto bit_of = [n](int q) { return n - 1 - q; };
    // Scatter a reduced index (kept or traced bits, leftmost first) into a full index.
    auto scatter = [&](const std::vector<int>& qs, Eigen::Index idx) {
        Eigen::Index full = 0;
        const int m = int(qs.size());
        for (int k = 0; k < m; ++k)
            if ((idx >> (m - 1 - k)) & 1) full |= Eigen::Index(1) << bit_of(qs[k]);
        return full;
    };

    const Eigen::Index dk = Eigen::Index(1) << nk;
    const Eigen::Index dt = Eigen::Index(1) << nt;
    Mat out = Mat::Zero(dk, dk);
    for (Eigen::Index r = 0; r < dk; ++r) {
        const Eigen::Index rf = scatter(kept, r);
        for (Eigen::Index c = 0; c < dk; ++c) {
            const Eigen::Index cf = scatter(kept, c);
            cplx s = 0.0;
            for (Eigen::Index e = 0; e < dt; ++e) {
                const Eigen::Index ef = scatter(traced, e);
                s += rho(rf | ef, cf | ef);
            }
            out(r, c) = s;
        }
    }
    return out;
}

DensityCheck check_density(const Mat& rho) {
    DensityCheck d;
    d.trace_error = std::abs(rho.trace() - 1.0);
    d.hermiticity_error = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    const Mat h = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
    d.min_eigenvalue = es.eigenvalues().minCoeff();
    return d;
}

Mat projector(const Vec& psi) { return psi * psi.adjoint(); }

}  // namespace ddsim
