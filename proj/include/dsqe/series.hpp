#pragma once

#include <Eigen/Dense>
#include <boost/rational.hpp>
#include <cstdint>
#include <string>
#include <vector>

namespace dsqe {

using Rational = boost::rational<long long>;

// Word over the two generators of the interpolated evolution. ops[0] is the
// leftmost factor in the printed operator product (applied last); 1 marks the
// target Hamiltonian, 0 the initial one.
struct OperatorPattern {
    std::vector<std::uint8_t> ops;

    int order() const { return static_cast<int>(ops.size()); }
    int target_count() const;  // number of 1 entries
};

std::string to_string(const OperatorPattern& p);

// Pattern `index` of the given order: bit (order - 1 - i) of index is ops[i],
// so index counts 0..2^order - 1 with the leftmost operator as the high bit.
OperatorPattern pattern_from_index(int order, unsigned index);

// Weight of the pattern in the plain time-ordered (constant-Hamiltonian)
// expansion: 1 / order!.
Rational diabatic_weight(const OperatorPattern& p);

// Weight in the interpolated expansion, where every target-Hamiltonian factor
// carries one extra power of the schedule variable. Evaluating the nested
// integrals right to left, each integration step divides by the running sum
// of (1 + extra powers accumulated so far).
Rational adiabatic_weight(const OperatorPattern& p);

struct PatternEntry {
    OperatorPattern pattern;
    Rational w;        // time-ordered weight
    Rational wbar;     // interpolated weight
    int tau_power;     // order + target_count
};

// All 2^order patterns in index order. Guarded at order <= 8.
std::vector<PatternEntry> enumerate_order(int order);

// Recompute every interpolated weight of the order by nested numerical
// quadrature on the given grid and return the largest absolute deviation
// from the rational value. Guarded at order <= 5.
double verify_weights_numeric(int order, int grid);

struct SeriesGap {
    double diabatic = 0.0;   // ||series - exact|| for the time-ordered sum
    double adiabatic = 0.0;  // same for the interpolated sum
};

// Frobenius gaps between the order-truncated expansions and the exact
// propagators they approximate. H1 is the perturbation switched on linearly:
// the time-ordered series targets exp(-i (H0 + H1) T), the interpolated one
// the ODE-integrated evolution under H0 + (t / T) H1.
SeriesGap compare_truncated_series(const Eigen::MatrixXcd& H0, const Eigen::MatrixXcd& H1,
                                   double T, int order);

}  // namespace dsqe
