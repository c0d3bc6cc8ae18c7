#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dsqe/subspace.hpp"

namespace dsqe {

// Single-qubit basis change bringing one Pauli letter to Z.
enum class BasisChange : std::uint8_t { None, XtoZ, YtoZ };

struct RotationLayer {
    std::vector<BasisChange> per_qubit;
};

// Layer R with R P R^dag diagonal: RY(-pi/2) on X qubits, RX(pi/2) on Y.
RotationLayer diagonalizing_rotation(const PauliString& P, int Q);

void apply_rotation(const RotationLayer& layer, StateVector& state);
void apply_rotation_inverse(const RotationLayer& layer, StateVector& state);

// Eigenvalue sign of the rotated string on outcome n: (-1)^|support(P) & n|.
double rotated_eigenvalue_sign(const PauliString& P, BasisState n);

// Whether the support-threshold epsilon cuts on outcome frequency (count /
// shots, the default) or on the implied amplitude magnitude sqrt(frequency).
enum class EpsilonMode { Frequency, Amplitude };

struct TermStat {
    std::string label;
    int chi = 0;             // X/Y support size of the term
    std::uint64_t n_r = 0;   // back-rotation expansion factor 2^chi
    std::uint64_t shots = 0;
    std::uint64_t kept = 0;  // outcomes surviving the epsilon cut
};

struct MethodReport {
    int method = 0;
    std::size_t basis_size = 0;
    double e_b = 0.0;
    std::uint64_t shots_total = 0;
    std::uint64_t circuits = 0;  // distinct measurement settings used
    std::vector<TermStat> per_term;
};

// Per-term rotated sampling: for every non-identity string, rotate the state
// into the term's eigenbasis, sample (or enumerate exactly when shots == 0),
// keep outcomes above epsilon and expand each back over all 2^chi sign
// choices of the term's X/Y support.
std::pair<SubspaceBasis, MethodReport> sample_method1(const StateVector& state,
                                                      const PauliHamiltonian& H,
                                                      std::uint64_t shots_per_term, double epsilon,
                                                      std::uint64_t seed,
                                                      EpsilonMode mode = EpsilonMode::Frequency);

// Computational-basis sampling followed by one coupling expansion through H.
std::pair<SubspaceBasis, MethodReport> sample_method2(const StateVector& state,
                                                      const PauliHamiltonian& H,
                                                      std::uint64_t shots, double epsilon,
                                                      std::uint64_t seed,
                                                      EpsilonMode mode = EpsilonMode::Frequency);

struct EnergyEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

// Direct term-by-term expectation estimate: sample each rotated string,
// average the eigenvalue signs, and propagate jackknife standard errors.
// The identity contributes its coefficient exactly. shots_per_term == 0
// returns the exact expectation with zero error.
EnergyEstimate vqe_expectation_estimate(const StateVector& state, const PauliHamiltonian& H,
                                        std::uint64_t shots_per_term, std::uint64_t seed);

struct MethodComparison {
    MethodReport m1;
    MethodReport m2;        // same total budget as method 1
    MethodReport m2_boost;  // 16x budget
    double jaccard = 0.0;   // overlap between the two bases at equal budget
    double circuit_ratio = 0.0;
    std::string verdict;
};

// Equal-budget comparison of the two basis-construction routes, including
// the projected energies obtained from each basis.
MethodComparison compare_methods(const StateVector& state, const PauliHamiltonian& H,
                                 std::uint64_t budget, double epsilon, std::uint64_t seed,
                                 EpsilonMode mode = EpsilonMode::Frequency);

struct WeightDiagnosticRow {
    BasisState n = 0;
    double phi_sq = 0.0;      // |<n|R_l|psi>|^2
    double inv_gap_sq = 0.0;  // 1 / (E - E_nl)^2
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;
    bool skipped = false;     // |E - E_nl| below the degeneracy guard
};

struct WeightDiagnostic {
    std::size_t term = 0;
    std::vector<WeightDiagnosticRow> rows;
    double max_residual = 0.0;
    int skipped = 0;
    int tested = 0;
};

// Checks the closed-form identity for eigenstate weights in the term-l
// eigenbasis: for each outcome n, |phi_nl|^2 (E - E_nl) must equal the
// cross-term sum over all other (n', l') pairs. `eigvec` is an eigenvector
// of H on the full 2^Q space with eigenvalue recovered via expectation.
WeightDiagnostic eigenstate_weight_diagnostic(const PauliHamiltonian& H, const StateVector& eigvec,
                                              std::size_t l);

}  // namespace dsqe
