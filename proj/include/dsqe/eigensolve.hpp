#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>

#include "dsqe/errors.hpp"

namespace dsqe {

struct LowestEigenpair {
    double value = 0.0;
    Eigen::VectorXcd vector;
    int iterations = 0;
    double residual = 0.0;  // ||A v - value v||
};

// Lowest eigenpair of a Hermitian operator given only by its matvec.
// Lanczos with full reorthogonalization and simple restarts: when the Krylov
// window fills without convergence, the best Ritz vector seeds a fresh sweep.
// Convergence target: residual <= max(tol * scale, 1e-300) where `scale`
// should be a norm estimate of A. Throws SolverError after max_iters total
// matvecs without convergence.
LowestEigenpair lowest_eigenpair_lanczos(
    Eigen::Index dim, const std::function<void(const Eigen::VectorXcd&, Eigen::VectorXcd&)>& matvec,
    double tol, double scale, int max_iters);

}  // namespace dsqe
