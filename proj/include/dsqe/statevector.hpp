#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <vector>

#include "dsqe/pauli.hpp"

namespace dsqe {

// Dense amplitudes over all 2^Q occupation masks, index = mask.
struct StateVector {
    int Q = 0;
    std::vector<cdouble> amps;

    std::size_t dim() const { return amps.size(); }
};

// Interpolated-evolution schedule: n_steps first-order steps of size dt
// (dt in units of the model time scale 1/t). Step i uses the mixing
// fraction lambda_i = i / n_steps, so the final step applies the full
// target Hamiltonian.
struct EvolutionSchedule {
    int n_steps = 0;
    double dt = 0.0;

    double total_time() const { return n_steps * dt; }
};

// |n> as a dense vector. Guarded at Q <= 26.
StateVector basis_state_vector(int Q, BasisState n);

// In-place exp(-i theta P) for a single Pauli string. Only the masks of P are
// used; theta carries the full rotation angle including any coefficient.
void apply_pauli_exponential(StateVector& state, const PauliString& P, double theta);

// Guiding-state preparation: first-order product steps of
// exp(-i H(lambda_i) dt) with H(lambda) = (1 - lambda) H0 + lambda H, terms
// applied in the merged (x, z)-sorted order (diagonal strings first).
StateVector diabatic_evolve(const StateVector& initial, const PauliHamiltonian& H0,
                            const PauliHamiltonian& H, const EvolutionSchedule& sched);

// Continuum limit of the same interpolation, integrated with an adaptive
// Dormand-Prince scheme at the given tolerance. Guarded at Q <= 12.
StateVector reference_evolution(const StateVector& initial, const PauliHamiltonian& H0,
                                const PauliHamiltonian& H, double T, double tol);

// out = H * in (out is overwritten; both must share Q).
void apply_hamiltonian(const PauliHamiltonian& H, const StateVector& in, StateVector& out);

// <state|H|state>; the imaginary remainder must vanish to 1e-10.
double expectation(const StateVector& state, const PauliHamiltonian& H);

double norm(const StateVector& state);

// |<a|b>| (global-phase-insensitive overlap).
double fidelity(const StateVector& a, const StateVector& b);

// Multinomial draw of `shots` occupation masks from |amps|^2. Deterministic
// for a fixed seed; the returned map iterates in ascending mask order.
std::map<BasisState, std::uint64_t> sample(const StateVector& state, std::uint64_t shots,
                                           std::uint64_t seed);

// Raw little-endian (re, im) double pairs, index order.
void dump_amplitudes(const StateVector& state, const std::filesystem::path& path);

}  // namespace dsqe
