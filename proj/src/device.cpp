#include "ddsim/device.hpp"

#include <cmath>
#include <iostream>
#include <set>

#include "ddsim/errors.hpp"

namespace ddsim {

Frame frame_from_string(const std::string& s) {
    if (s == "plus") return Frame::plus;
    if (s == "zero") return Frame::zero;
    if (s == "one") return Frame::one;
    if (s == "custom") return Frame::custom;
    throw ValidationError("unknown frame '" + s + "'");
}

std::string to_string(Frame f) {
    switch (f) {
        case Frame::plus: return "plus";
        case Frame::zero: return "zero";
        case Frame::one: return "one";
        case Frame::custom: return "custom";
    }
    return "custom";
}

void DeviceSpec::validate() const {
    if (n < 1) throw ValidationError("device needs at least one qubit");
    if (int(omega_q.size()) != n) throw ValidationError("omega_q length differs from n");
    std::set<std::pair<int, int>> seen;
    for (const auto& c : couplings) {
        if (c.i < 0 || c.j >= n || c.i >= c.j)
            throw ValidationError("coupling pairs need 0 <= i < j < n");
        if (!seen.insert({c.i, c.j}).second) throw ValidationError("duplicate coupling pair");
        if (c.J < 0.0 && !allow_signed_j) throw ValidationError("negative J without allow_signed_j");
    }
}

double DeviceSpec::total_coupling(int q) const {
    double s = 0.0;
    for (const auto& c : couplings)
        if (c.i == q || c.j == q) s += c.J;
    return s;
}

Mat FrameHamiltonian::at(double t) const {
    Mat h = static_part;
    for (const auto& [k, m] : harmonics) h += std::exp(kI * (double(k) * omega_d * t)) * m;
    return h;
}

double FrameHamiltonian::max_frequency() const {
    double f = 0.0;
    if (static_part.size() > 0) {
        const Eigen::VectorXd d = static_part.diagonal().real();
        if (is_hermitian(static_part) && static_part.isDiagonal(1e-14)) {
            f = d.maxCoeff() - d.minCoeff();
        } else {
            Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (static_part + static_part.adjoint()),
                                                  Eigen::EigenvaluesOnly);
            f = es.eigenvalues().maxCoeff() - es.eigenvalues().minCoeff();
        }
    }
    for (const auto& [k, m] : harmonics)
        if (m.cwiseAbs().maxCoeff() > 0.0) f = std::max(f, std::abs(double(k) * omega_d));
    return f;
}

Mat build_lab_hamiltonian(const DeviceSpec& spec) {
    spec.validate();
    const Eigen::Index dim = Eigen::Index(1) << spec.n;
    Mat h = Mat::Zero(dim, dim);
    const Mat z = pauli('Z');
    for (int q = 0; q < spec.n; ++q) h -= 0.5 * spec.omega_q[q] * embed_single(z, q, spec.n);
    for (const auto& c : spec.couplings) h += c.J * embed_pair(z, c.i, z, c.j, spec.n);
    return h;
}

Mat number_operator(int n) {
    if (n < 1) throw ValidationError("number_operator needs n >= 1");
    const Eigen::Index dim = Eigen::Index(1) << n;
    Mat out = Mat::Zero(dim, dim);
    for (Eigen::Index b = 0; b < dim; ++b) {
        int w = 0;
        for (Eigen::Index x = b; x; x >>= 1) w += int(x & 1);
        out(b, b) = double(w);
    }
    return out;
}

std::map<int, Mat> rotating_pauli_harmonics(char axis) {
    const Mat x = pauli('X');
    const Mat y = pauli('Y');
    switch (axis) {
        case 'x': case 'X':
            return {{1, 0.5 * (x - kI * y)}, {-1, 0.5 * (x + kI * y)}};
        case 'y': case 'Y':
            return {{1, 0.5 * (y + kI * x)}, {-1, 0.5 * (y - kI * x)}};
        default:
            return {{0, pauli(axis)}};
    }
}

Mat rotated_pauli(char axis, double t, double omega_d) {
    Mat out = Mat::Zero(2, 2);
    for (const auto& [k, m] : rotating_pauli_harmonics(axis))
        out += std::exp(kI * (double(k) * omega_d * t)) * m;
    return out;
}

std::map<int, Mat> rotating_term_harmonics(const PauliTerm& term) {
    if (term.label.empty()) throw ValidationError("empty Pauli label");
    std::map<int, Mat> acc{{0, Mat::Identity(1, 1)}};
    for (char c : term.label) {
        if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z')
            throw ValidationError("malformed Pauli label '" + term.label + "'");
        std::map<int, Mat> next;
        for (const auto& [ka, ma] : acc) {
            for (const auto& [kb, mb] : rotating_pauli_harmonics(c)) {
                Mat prod = kron(ma, mb);
                auto it = next.find(ka + kb);
                if (it == next.end()) next.emplace(ka + kb, std::move(prod));
                else it->second += prod;
            }
        }
        acc = std::move(next);
    }
    for (auto& [k, m] : acc) m *= term.coefficient;
    return acc;
}

FrameHamiltonian to_rotating_frame(const Mat& h_lab, const std::vector<PauliTerm>& sb_terms,
                                   double omega_d) {
    if (!h_lab.isDiagonal(1e-12)) throw ValidationError("to_rotating_frame: lab Hamiltonian is not diagonal");
    const int n = register_size(h_lab.rows());
    FrameHamiltonian fh;
    fh.omega_d = omega_d;
    // U = exp(-i omega_d sum Z t / 2); i dU/dt U^dag = omega_d sum Z / 2.
    Mat zsum = Mat::Zero(h_lab.rows(), h_lab.cols());
    for (int q = 0; q < n; ++q) zsum += embed_single(pauli('Z'), q, n);
    fh.static_part = h_lab + 0.5 * omega_d * zsum;
    for (const auto& term : sb_terms) {
        if (int(term.label.size()) != n) throw ValidationError("system-bath label length differs from register");
        for (auto& [k, m] : rotating_term_harmonics(term)) {
            if (k == 0) {
                fh.static_part += m;
                continue;
            }
            auto it = fh.harmonics.find(k);
            if (it == fh.harmonics.end()) fh.harmonics.emplace(k, m);
            else it->second += m;
        }
    }
    return fh;
}

Mat frame_system_hamiltonian(const DeviceSpec& spec, Frame frame) {
    if (spec.n != 2) throw ValidationError("frame_system_hamiltonian needs n = 2");
    spec.validate();
    const double delta = spec.omega_q[0] - spec.omega_q[1];
    const double J = spec.total_coupling(0);
    Eigen::Vector4d d;
    switch (frame) {
        case Frame::plus:
            d << 0.0, -(delta + 2.0 * J), -2.0 * J, -delta;
            break;
        case Frame::zero:
            d << 0.0, -delta, 0.0, 4.0 * J - delta;
            break;
        default:
            throw ValidationError("frame_system_hamiltonian supports plus and zero frames");
    }
    return d.cast<cplx>().asDiagonal();
}

DressedFrequencies dressed_frequencies(const TransmonPair& t) {
    const double delta = t.omega_q1 - t.omega_q2;
    const double eta = t.eta_anharm;
    if (std::abs(delta) < 1e-6 || std::abs(delta + eta) < 1e-6 || std::abs(delta - eta) < 1e-6)
        throw NumericalError("dressed_frequencies: too close to a perturbative pole");
    const double g2 = t.g * t.g;
    DressedFrequencies out;
    out.omega_eig_0 = t.omega_q1 + g2 / delta;
    out.omega_eig_1 = t.omega_q1 - 2.0 * g2 / (delta - eta) + 2.0 * g2 / (delta + eta) + g2 / delta;
    out.omega_eig_plus = 0.5 * (out.omega_eig_0 + out.omega_eig_1);
    out.omega_zz = g2 / (delta + eta) - g2 / (delta - eta);
    out.perturbative_ok = std::abs(t.g / delta) < 0.2;
    if (!out.perturbative_ok)
        std::cerr << "warning: |g/Delta| >= 0.2, perturbative dressed frequencies unreliable\n";
    return out;
}

double exact_omega_zz(const TransmonPair& t) {
    const int L = t.levels;
    if (L < 2) throw ValidationError("exact_omega_zz needs at least two levels");
    const int dim = L * L;
    auto level = [&](double w, int k) { return k * w - 0.5 * t.eta_anharm * k * (k - 1); };
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    auto idx = [L](int k1, int k2) { return k1 * L + k2; };
    for (int k1 = 0; k1 < L; ++k1)
        for (int k2 = 0; k2 < L; ++k2) {
            h(idx(k1, k2), idx(k1, k2)) = level(t.omega_q1, k1) + level(t.omega_q2, k2);
            // a1^dag a2 moves one excitation from transmon 2 to transmon 1
            if (k2 > 0 && k1 + 1 < L) {
                const double amp = t.g * std::sqrt(double(k1 + 1) * double(k2));
                h(idx(k1 + 1, k2 - 1), idx(k1, k2)) += amp;
                h(idx(k1, k2), idx(k1 + 1, k2 - 1)) += amp;
            }
        }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    auto dressed = [&](int k1, int k2) {
        Eigen::Index best = 0;
        es.eigenvectors().row(idx(k1, k2)).cwiseAbs().maxCoeff(&best);
        return es.eigenvalues()(best);
    };
    return 0.5 * (dressed(1, 1) - dressed(1, 0) - dressed(0, 1) + dressed(0, 0));
}

}  // namespace ddsim
