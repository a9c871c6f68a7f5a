#pragma once

// Device Hamiltonians, rotating-frame transformation and transmon dressed frequencies.
// Angular frequencies in rad/ns throughout.

#include <map>
#include <string>
#include <vector>

#include "ddsim/operators.hpp"

namespace ddsim {

enum class Frame { plus, zero, one, custom };

Frame frame_from_string(const std::string& s);
std::string to_string(Frame f);

struct Coupling {
    int i = 0;
    int j = 1;
    double J = 0.0;
};

struct DeviceSpec {
    int n = 2;
    std::vector<double> omega_q;
    std::vector<Coupling> couplings;
    double omega_d = 0.0;
    Frame frame = Frame::custom;
    bool allow_signed_j = false;

    void validate() const;
    // Sum of J over couplings touching qubit q.
    double total_coupling(int q) const;
};

// Fourier decomposition H(t) = static_part + sum_k harmonics[k] e^{i k omega_d t}.
struct FrameHamiltonian {
    Mat static_part;
    std::map<int, Mat> harmonics;
    double omega_d = 0.0;

    Mat at(double t) const;
    // Largest angular frequency present, used to cap integration steps.
    double max_frequency() const;
};

Mat build_lab_hamiltonian(const DeviceSpec& spec);
Mat number_operator(int n);

// Harmonics of the single-qubit rotating-frame Pauli sigma^a(t):
// x -> cos(wt)X + sin(wt)Y, y -> cos(wt)Y - sin(wt)X, z and 0 static.
std::map<int, Mat> rotating_pauli_harmonics(char axis);
Mat rotated_pauli(char axis, double t, double omega_d);

// Harmonics of an n-qubit Pauli product with every X/Y factor rotating.
std::map<int, Mat> rotating_term_harmonics(const PauliTerm& term);

FrameHamiltonian to_rotating_frame(const Mat& h_lab, const std::vector<PauliTerm>& sb_terms,
                                   double omega_d);

// Two-qubit frame Hamiltonians in the plus (omega_d = omega_q1) and zero
// (omega_d = omega_q1 - 2J) frames, shifted so the |00> entry is zero.
Mat frame_system_hamiltonian(const DeviceSpec& spec, Frame frame);

struct TransmonPair {
    double omega_q1 = 0.0;
    double omega_q2 = 0.0;
    double g = 0.0;
    double eta_anharm = 0.0;
    int levels = 3;
};

struct DressedFrequencies {
    double omega_eig_0 = 0.0;
    double omega_eig_1 = 0.0;
    double omega_eig_plus = 0.0;
    double omega_zz = 0.0;
    bool perturbative_ok = true;  // |g/Delta| < 0.2
};

DressedFrequencies dressed_frequencies(const TransmonPair& t);

// omega_zz from exact diagonalization of the two-transmon ladder,
// level k at k*omega - eta*k(k-1)/2, exchange coupling g(a1^dag a2 + h.c.).
double exact_omega_zz(const TransmonPair& t);

}  // namespace ddsim
