#pragma once

// Shared helpers for the test binaries: a dense Kronecker-product route to
// Pauli matrices that is independent of the mask-based production code,
// plus small conversion and randomness utilities.

#include <Eigen/Dense>
#include <random>

#include "dsqe/pauli.hpp"
#include "dsqe/rng.hpp"
#include "dsqe/statevector.hpp"

namespace testsupport {

using dsqe::BasisState;
using dsqe::cdouble;

inline Eigen::Matrix2cd pauli_letter(bool x, bool z) {
    Eigen::Matrix2cd m;
    if (!x && !z)
        m << 1, 0, 0, 1;
    else if (x && !z)
        m << 0, 1, 1, 0;
    else if (!x && z)
        m << 1, 0, 0, -1;
    else
        m << 0, cdouble(0, -1), cdouble(0, 1), 0;
    return m;
}

// Dense matrix of a Pauli string with the production index convention:
// basis index bit q is qubit q, so qubit q is inserted at significance 2^q.
inline Eigen::MatrixXcd dense_string(const dsqe::PauliString& P, int Q) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Ones(1, 1);
    for (int q = 0; q < Q; ++q) {
        const Eigen::Matrix2cd letter = pauli_letter((P.x_mask >> q) & 1, (P.z_mask >> q) & 1);
        Eigen::MatrixXcd out(m.rows() * 2, m.cols() * 2);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                out.block(a * m.rows(), b * m.cols(), m.rows(), m.cols()) = letter(a, b) * m;
        m = std::move(out);
    }
    return P.coeff * m;
}

inline Eigen::MatrixXcd dense_hamiltonian(const dsqe::PauliHamiltonian& H) {
    const Eigen::Index dim = Eigen::Index{1} << H.Q;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto& P : H.terms) m += dense_string(P, H.Q);
    return m;
}

// exp(-i theta P) for a unit string, dense: cos(theta) I - i sin(theta) P.
inline Eigen::MatrixXcd dense_pauli_exponential(const dsqe::PauliString& P, int Q,
                                                double theta) {
    const Eigen::Index dim = Eigen::Index{1} << Q;
    dsqe::PauliString unit{P.x_mask, P.z_mask, 1.0};
    return std::cos(theta) * Eigen::MatrixXcd::Identity(dim, dim) +
           cdouble(0, -1) * std::sin(theta) * dense_string(unit, Q);
}

inline Eigen::VectorXcd to_eigen(const dsqe::StateVector& s) {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(s.dim()));
    for (std::size_t j = 0; j < s.dim(); ++j) v(static_cast<Eigen::Index>(j)) = s.amps[j];
    return v;
}

inline dsqe::StateVector from_eigen(int Q, const Eigen::VectorXcd& v) {
    dsqe::StateVector s;
    s.Q = Q;
    s.amps.assign(v.data(), v.data() + v.size());
    return s;
}

inline double runif(std::mt19937_64& gen, double lo, double hi) {
    return lo + (hi - lo) * dsqe::uniform01(gen);
}

// Random non-identity string over the first `max_qubits` qubits.
inline dsqe::PauliString random_string(std::mt19937_64& gen, int max_qubits) {
    const BasisState full = (1ull << max_qubits) - 1ull;
    dsqe::PauliString P;
    do {
        P.x_mask = gen() & full;
        P.z_mask = gen() & full;
    } while ((P.x_mask | P.z_mask) == 0);
    return P;
}

inline dsqe::StateVector random_state(std::mt19937_64& gen, int Q) {
    dsqe::StateVector s;
    s.Q = Q;
    s.amps.resize(std::size_t{1} << Q);
    for (auto& a : s.amps) a = cdouble(runif(gen, -1, 1), runif(gen, -1, 1));
    const double n = dsqe::norm(s);
    for (auto& a : s.amps) a /= n;
    return s;
}

// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace testsupport
