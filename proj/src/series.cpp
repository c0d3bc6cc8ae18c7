#include "dsqe/series.hpp"

#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <complex>

#include "dsqe/errors.hpp"

namespace dsqe {

namespace {

using cdouble = std::complex<double>;

// Cumulative integral of `u` sampled on a uniform grid of spacing h.
// Simpson pairs on even nodes, one-sided three-point rules for the odd ones,
// so the whole table is fourth-order accurate.
std::vector<double> cumulative_integral(const std::vector<double>& u, double h) {
    const std::size_t n = u.size();
    std::vector<double> cum(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        if (i == 1)
            cum[1] = n >= 3 ? h / 12.0 * (5.0 * u[0] + 8.0 * u[1] - u[2])
                            : h / 2.0 * (u[0] + u[1]);
        else if (i % 2 == 0)
            cum[i] = cum[i - 2] + h / 3.0 * (u[i - 2] + 4.0 * u[i - 1] + u[i]);
        else
            cum[i] = cum[i - 1] + h / 12.0 * (-u[i - 2] + 8.0 * u[i - 1] + 5.0 * u[i]);
    }
    return cum;
}

void check_order(int order, int cap) {
    if (order < 0 || order > cap)
        throw InvalidArgument("order must be in [0, " + std::to_string(cap) + "], got " +
                              std::to_string(order));
}

}  // namespace

int OperatorPattern::target_count() const {
    int c = 0;
    for (const auto b : ops) c += b;
    return c;
}

std::string to_string(const OperatorPattern& p) {
    if (p.ops.empty()) return "1";
    std::string s;
    for (const auto b : p.ops) s += b ? "H1" : "H0";
    return s;
}

OperatorPattern pattern_from_index(int order, unsigned index) {
    check_order(order, 8);
    if (order < 32 && index >= (1u << order))
        throw InvalidArgument("pattern index out of range for the order");
    OperatorPattern p;
    p.ops.resize(order);
    for (int i = 0; i < order; ++i)
        p.ops[i] = static_cast<std::uint8_t>((index >> (order - 1 - i)) & 1u);
    return p;
}

Rational diabatic_weight(const OperatorPattern& p) {
    Rational w(1);
    for (int i = 1; i <= p.order(); ++i) w /= i;
    return w;
}

Rational adiabatic_weight(const OperatorPattern& p) {
    // Nested integration right to left; every factor raises the polynomial
    // degree by one, a target factor by one more (its schedule weight), and
    // integrating tau^{d-1} divides by the running degree d.
    Rational w(1);
    long long degree = 0;
    for (int i = p.order() - 1; i >= 0; --i) {
        degree += 1 + (p.ops[i] ? 1 : 0);
        w /= degree;
    }
    return w;
}

std::vector<PatternEntry> enumerate_order(int order) {
    check_order(order, 8);
    std::vector<PatternEntry> out;
    out.reserve(std::size_t{1} << order);
    for (unsigned index = 0; index < (1u << order); ++index) {
        PatternEntry e;
        e.pattern = pattern_from_index(order, index);
        e.w = diabatic_weight(e.pattern);
        e.wbar = adiabatic_weight(e.pattern);
        e.tau_power = order + e.pattern.target_count();
        out.push_back(std::move(e));
    }
    return out;
}

double verify_weights_numeric(int order, int grid) {
    check_order(order, 5);
    if (grid < 8) throw InvalidArgument("quadrature grid must have at least 8 intervals");
    const std::size_t nodes = static_cast<std::size_t>(grid) + 1;
    const double h = 1.0 / grid;
    double worst = 0.0;
    for (const auto& entry : enumerate_order(order)) {
        // Rebuild the nested integral on [0, 1] one factor at a time.
        std::vector<double> v(nodes, 1.0);
        for (int i = entry.pattern.order() - 1; i >= 0; --i) {
            std::vector<double> u(nodes);
            for (std::size_t j = 0; j < nodes; ++j)
                u[j] = entry.pattern.ops[i] ? (j * h) * v[j] : v[j];
            v = cumulative_integral(u, h);
        }
        const double numeric = v.back();
        const double exact = boost::rational_cast<double>(entry.wbar);
        worst = std::max(worst, std::abs(numeric - exact));
    }
    return worst;
}

SeriesGap compare_truncated_series(const Eigen::MatrixXcd& H0, const Eigen::MatrixXcd& H1,
                                   double T, int order) {
    check_order(order, 8);
    if (H0.rows() != H0.cols() || H1.rows() != H1.cols() || H0.rows() != H1.rows())
        throw InvalidArgument("Hamiltonian matrices must be square and equally sized");
    if (T < 0.0) throw InvalidArgument("evolution time must be >= 0");
    const Eigen::Index dim = H0.rows();
    if ((H0 - H0.adjoint()).norm() > 1e-12 * std::max(1.0, H0.norm()) ||
        (H1 - H1.adjoint()).norm() > 1e-12 * std::max(1.0, H1.norm()))
        throw InvalidArgument("Hamiltonian matrices must be Hermitian");

    const Eigen::MatrixXcd Hsum = H0 + H1;
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(dim, dim);

    // Exact constant-Hamiltonian propagator via eigendecomposition.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Hsum);
    if (es.info() != Eigen::Success) throw SolverError("eigendecomposition failed");
    Eigen::VectorXcd phases(dim);
    for (Eigen::Index k = 0; k < dim; ++k)
        phases(k) = std::exp(cdouble{0.0, -es.eigenvalues()(k) * T});
    const Eigen::MatrixXcd U_const =
        es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();

    // Exact interpolated propagator, ODE integrated.
    Eigen::MatrixXcd U_interp = I;
    if (T > 0.0) {
        using OdeState = std::vector<cdouble>;
        OdeState y(static_cast<std::size_t>(dim) * dim);
        Eigen::Map<Eigen::MatrixXcd>(y.data(), dim, dim) = I;
        auto rhs = [&](const OdeState& yy, OdeState& dydt, double tau) {
            dydt.resize(yy.size());
            const Eigen::Map<const Eigen::MatrixXcd> U(yy.data(), dim, dim);
            Eigen::Map<Eigen::MatrixXcd> D(dydt.data(), dim, dim);
            const double lambda = tau / T;
            D = cdouble{0.0, -1.0} * ((H0 + lambda * H1) * U);
        };
        namespace ode = boost::numeric::odeint;
        auto stepper = ode::make_controlled(1e-12, 1e-12, ode::runge_kutta_dopri5<OdeState>());
        ode::integrate_adaptive(stepper, rhs, y, 0.0, T, std::min(0.01, T));
        U_interp = Eigen::Map<Eigen::MatrixXcd>(y.data(), dim, dim);
    }

    // Both truncated sums from the shared pattern enumeration. At the final
    // time every pattern term reduces to weight * T^order * operator product.
    Eigen::MatrixXcd sum_const = Eigen::MatrixXcd::Zero(dim, dim);
    Eigen::MatrixXcd sum_interp = Eigen::MatrixXcd::Zero(dim, dim);
    for (int n = 0; n <= order; ++n) {
        const cdouble pref = std::pow(cdouble{0.0, -1.0}, n) * std::pow(T, n);
        for (const auto& entry : enumerate_order(n)) {
            Eigen::MatrixXcd prod = I;
            for (const auto b : entry.pattern.ops) prod = prod * (b ? H1 : H0);
            sum_const += pref * boost::rational_cast<double>(entry.w) * prod;
            sum_interp += pref * boost::rational_cast<double>(entry.wbar) * prod;
        }
    }

    SeriesGap gap;
    gap.diabatic = (sum_const - U_const).norm();
    gap.adiabatic = (sum_interp - U_interp).norm();
    return gap;
}

}  // namespace dsqe
