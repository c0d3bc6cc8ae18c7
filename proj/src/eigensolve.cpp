#include "dsqe/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "dsqe/rng.hpp"

namespace dsqe {

namespace {

using cdouble = std::complex<double>;

Eigen::VectorXcd seeded_unit_vector(Eigen::Index dim, std::uint64_t seed) {
    std::mt19937_64 gen(derive_stream(seed));
    Eigen::VectorXcd v(dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        v(i) = cdouble(2.0 * uniform01(gen) - 1.0, 2.0 * uniform01(gen) - 1.0);
    v.normalize();
    return v;
}

}  // namespace

LowestEigenpair lowest_eigenpair_lanczos(
    Eigen::Index dim, const std::function<void(const Eigen::VectorXcd&, Eigen::VectorXcd&)>& matvec,
    double tol, double scale, int max_iters) {
    if (dim < 1) throw InvalidArgument("eigensolver needs dim >= 1");
    const double target = std::max(tol * scale, 1e-300);
    const int window = static_cast<int>(std::min<Eigen::Index>(dim, 256));

    Eigen::VectorXcd v = seeded_unit_vector(dim, 0x5eedbeefULL);
    Eigen::VectorXcd v_prev = Eigen::VectorXcd::Zero(dim);
    Eigen::VectorXcd w(dim);
    std::vector<Eigen::VectorXcd> basis;
    std::vector<double> alpha, beta;  // beta[k] couples basis[k-1] and basis[k]
    int total_iters = 0;
    LowestEigenpair best;
    best.value = std::numeric_limits<double>::infinity();

    while (true) {
        basis.clear();
        alpha.clear();
        beta.clear();
        v_prev.setZero();
        double beta_prev = 0.0;

        for (int k = 0; k < window; ++k) {
            if (total_iters >= max_iters)
                throw SolverError("Lanczos failed to converge within " +
                                  std::to_string(max_iters) + " iterations (best residual " +
                                  std::to_string(best.residual) + ")");
            ++total_iters;
            basis.push_back(v);
            matvec(v, w);
            w -= beta_prev * v_prev;
            const double a = std::real(v.dot(w));
            alpha.push_back(a);
            w -= a * v;
            // Full reorthogonalization, twice for numerical safety.
            for (int pass = 0; pass < 2; ++pass)
                for (const auto& b : basis) w -= b.dot(w) * b;

            const double b_next = w.norm();
            const int m = static_cast<int>(alpha.size());

            // Ritz step on the tridiagonal projection.
            Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
            for (int i = 0; i < m; ++i) T(i, i) = alpha[i];
            for (int i = 0; i + 1 < m; ++i) T(i, i + 1) = T(i + 1, i) = beta[i];
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
            if (es.info() != Eigen::Success)
                throw SolverError("tridiagonal Ritz step failed inside Lanczos");
            const double theta = es.eigenvalues()(0);
            const Eigen::VectorXd s = es.eigenvectors().col(0);
            const double res_est = std::abs(b_next * s(m - 1));

            if (res_est <= target || b_next <= 1e-14 * scale || m == dim) {
                Eigen::VectorXcd ritz = Eigen::VectorXcd::Zero(dim);
                for (int i = 0; i < m; ++i) ritz += s(i) * basis[i];
                ritz.normalize();
                Eigen::VectorXcd check(dim);
                matvec(ritz, check);
                const double res = (check - theta * ritz).norm();
                if (res < best.residual || best.vector.size() == 0) {
                    best.value = theta;
                    best.vector = ritz;
                    best.residual = res;
                    best.iterations = total_iters;
                }
                if (res <= target || m == dim) {
                    best.value = theta;
                    best.vector = ritz;
                    best.residual = res;
                    best.iterations = total_iters;
                    return best;
                }
                // The tridiagonal estimate was optimistic; keep sweeping.
            }

            if (b_next <= 1e-14 * scale) {
                // Invariant subspace hit without meeting the target: restart
                // from a fresh vector orthogonal to what we have.
                v = seeded_unit_vector(dim, 0xabc0ffeeULL + total_iters);
                for (const auto& b : basis) v -= b.dot(v) * b;
                const double n = v.norm();
                if (n < 1e-12) {
                    // Space exhausted; the Ritz value is exact on it.
                    Eigen::VectorXcd ritz = Eigen::VectorXcd::Zero(dim);
                    for (int i = 0; i < m; ++i) ritz += s(i) * basis[i];
                    ritz.normalize();
                    matvec(ritz, w);
                    best.value = theta;
                    best.vector = ritz;
                    best.residual = (w - theta * ritz).norm();
                    best.iterations = total_iters;
                    return best;
                }
                v /= n;
                v_prev.setZero();
                beta_prev = 0.0;
                basis.clear();
                alpha.clear();
                beta.clear();
                continue;
            }

            beta.push_back(b_next);
            beta_prev = b_next;
            v_prev = basis.back();
            v = w / b_next;
        }

        // Window exhausted: restart from the current best Ritz vector.
        const int m = static_cast<int>(alpha.size());
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) T(i, i) = alpha[i];
        for (int i = 0; i + 1 < m; ++i) T(i, i + 1) = T(i + 1, i) = beta[i];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        const Eigen::VectorXd s = es.eigenvectors().col(0);
        Eigen::VectorXcd ritz = Eigen::VectorXcd::Zero(dim);
        for (int i = 0; i < m; ++i) ritz += s(i) * basis[i];
        ritz.normalize();
        v = ritz;
    }
}

}  // namespace dsqe
