#pragma once

#include <complex>
#include <string>
#include <vector>

#include "dsqe/fermion.hpp"

namespace dsqe {

using cdouble = std::complex<double>;

// Pauli string in the symplectic (x, z) convention: bit q of x_mask flags an
// X or Y factor on qubit q, bit q of z_mask flags a Z or Y factor. A qubit
// with both bits set carries Y = i X Z, so the operator represented is
//   coeff * i^popcount(x & z) * (prod_q X_q^{x_q}) (prod_q Z_q^{z_q}).
struct PauliString {
    BasisState x_mask = 0;
    BasisState z_mask = 0;
    cdouble coeff{1.0, 0.0};
};

// Terms are kept sorted by (x_mask, z_mask) ascending and merged, so all
// diagonal strings come first and the ordering is reproducible.
struct PauliHamiltonian {
    int Q = 0;
    std::vector<PauliString> terms;
};

// <m ^ x | X^x Z^z | m> for the unit-coefficient string with the given masks:
// i^popcount(x & z) * (-1)^popcount(z & m). The only nonzero column entry of
// a Pauli string on basis state |m> is at row m ^ x.
cdouble pauli_phase(BasisState x_mask, BasisState z_mask, BasisState m);

// Map of the occupation-basis Hamiltonian onto qubits. Number and
// density-density terms become Z / ZZ combinations, an adjacent hop becomes
// (XX + YY) / 2. Coefficients below 1e-15 are dropped after merging, except
// the identity string which is always kept.
PauliHamiltonian jordan_wigner(const FermionHamiltonian& H);

// <n|H|m>; zero whenever n ^ m is not one of the stored x-masks.
cdouble matrix_element(const PauliHamiltonian& H, BasisState n, BasisState m);

// All m with |<m|H|n>| > 1e-12, ascending; includes n itself when a diagonal
// term contributes.
std::vector<BasisState> coupled_states(const PauliHamiltonian& H, BasisState n);

// Distinct x-masks of H paired with the [begin, end) term-index range that
// shares each mask. Terms being sorted by x first makes the ranges contiguous.
std::vector<std::pair<BasisState, std::pair<int, int>>> x_mask_groups(const PauliHamiltonian& H);

// "+0.375 · IZZI" style rendering, qubit 0 leftmost.
std::string to_string(const PauliString& P, int Q);
std::string to_string(const PauliHamiltonian& H);

}  // namespace dsqe
