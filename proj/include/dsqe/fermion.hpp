#pragma once

#include <cstdint>
#include <vector>

#include "dsqe/errors.hpp"

namespace dsqe {

// Occupation-number bitmask over a 1D chain of Q spinless orbitals.
// Bit q corresponds to orbital q; the least significant bit is orbital 0.
using BasisState = std::uint64_t;

inline int popcount(BasisState m) { return __builtin_popcountll(m); }

enum class FermionKind {
    Number,          // n_q
    Hopping,         // c^dag_q c_{q+1} + h.c., one Hermitian unit
    DensityDensity,  // n_q n_{q+1}
};

// Number acts on orbital q; Hopping and DensityDensity act on the adjacent
// pair (q, q+1).
struct FermionTerm {
    FermionKind kind;
    int q;
    double coeff;
};

struct FermionHamiltonian {
    int Q = 0;
    std::vector<FermionTerm> terms;
};

// Chain Hamiltonian: dmu * sum_q q n_q - t * sum_q (c^dag_q c_{q+1} + h.c.)
//                    + V * sum_q n_q n_{q+1}.
// Zero-coefficient terms are kept so the term layout is parameter independent.
FermionHamiltonian build_model_hamiltonian(int Q, double dmu, double t, double V);

// The hopping-free, interaction-free starting point: dmu * sum_q q n_q.
FermionHamiltonian build_initial_hamiltonian(int Q, double dmu);

// The Ne energetically lowest orbitals of the initial Hamiltonian filled,
// i.e. orbitals 0..Ne-1 occupied.
BasisState initial_state(int Q, int Ne);

// All C(Q, Ne) occupation masks with Ne particles, ascending as integers.
// Guarded against sectors larger than 1e7 states.
std::vector<BasisState> sector_states(int Q, int Ne);

// C(Q, Ne) as a double (overflow-safe size estimate).
double sector_size(int Q, int Ne);

// <n|H|m> evaluated from the second-quantized rules directly, without any
// qubit encoding. Independent route used to cross-check the Pauli algebra.
double fermion_matrix_element(const FermionHamiltonian& H, BasisState n, BasisState m);

// Exact ground-state energy in the Ne-particle sector. Dense diagonalization
// for small sectors, implicit-matvec Lanczos above that.
double exact_ground_energy_ed(const FermionHamiltonian& H, int Ne);

// Ground-state energy of the V = 0 chain from single-particle orbitals:
// diagonalize the tridiagonal one-body matrix and fill the Ne lowest levels.
double free_fermion_energy(int Q, double dmu, double t, int Ne);

}  // namespace dsqe
