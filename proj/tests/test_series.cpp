#include <doctest.h>

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "dsqe/errors.hpp"
#include "dsqe/series.hpp"
#include "support.hpp"

using namespace dsqe;

namespace {

OperatorPattern pat(std::initializer_list<int> bits) {
    OperatorPattern p;
    for (const int b : bits) p.ops.push_back(static_cast<std::uint8_t>(b));
    return p;
}

long long factorial(int n) {
    long long f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

long long binomial(int n, int k) {
    long long b = 1;
    for (int i = 0; i < k; ++i) b = b * (n - i) / (i + 1);
    return b;
}

Eigen::MatrixXcd random_hermitian(std::mt19937_64& gen, int dim) {
    Eigen::MatrixXcd A(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c)
            A(r, c) = cdouble(testsupport::runif(gen, -1, 1), testsupport::runif(gen, -1, 1));
    Eigen::MatrixXcd H = 0.5 * (A + A.adjoint());
    return H / H.norm();
}

}  // namespace

TEST_CASE("time-ordered weights are inverse factorials") {
    CHECK(diabatic_weight(pat({})) == Rational(1));
    CHECK(diabatic_weight(pat({1})) == Rational(1));
    CHECK(diabatic_weight(pat({0, 1, 0})) == Rational(1, 6));
    CHECK(diabatic_weight(pat({1, 1, 0, 1})) == Rational(1, 24));
}

TEST_CASE("interpolated weights, full tables through order three") {
    CHECK(adiabatic_weight(pat({0})) == Rational(1));
    CHECK(adiabatic_weight(pat({1})) == Rational(1, 2));

    CHECK(adiabatic_weight(pat({0, 0})) == Rational(1, 2));
    CHECK(adiabatic_weight(pat({0, 1})) == Rational(1, 6));
    CHECK(adiabatic_weight(pat({1, 0})) == Rational(1, 3));
    CHECK(adiabatic_weight(pat({1, 1})) == Rational(1, 8));

    CHECK(adiabatic_weight(pat({0, 0, 0})) == Rational(1, 6));
    CHECK(adiabatic_weight(pat({0, 0, 1})) == Rational(1, 24));
    CHECK(adiabatic_weight(pat({0, 1, 0})) == Rational(1, 12));
    CHECK(adiabatic_weight(pat({0, 1, 1})) == Rational(1, 40));
    CHECK(adiabatic_weight(pat({1, 0, 0})) == Rational(1, 8));
    CHECK(adiabatic_weight(pat({1, 0, 1})) == Rational(1, 30));
    CHECK(adiabatic_weight(pat({1, 1, 0})) == Rational(1, 15));
    CHECK(adiabatic_weight(pat({1, 1, 1})) == Rational(1, 48));
}

TEST_CASE("perturbation factors only ever shrink a weight") {
    for (int order = 0; order <= 8; ++order) {
        for (const auto& e : enumerate_order(order)) {
            if (e.pattern.target_count() == 0)
                CHECK(e.wbar == e.w);  // pure-H0 words keep 1 / order!
            else
                CHECK(e.wbar < e.w);
            CHECK(e.w == Rational(1, factorial(order)));
            CHECK(e.tau_power == order + e.pattern.target_count());
        }
    }
}

TEST_CASE("pattern indexing puts the leftmost factor in the high bit") {
    const auto p = pattern_from_index(3, 5);  // 0b101
    REQUIRE(p.ops.size() == 3);
    CHECK(p.ops[0] == 1);
    CHECK(p.ops[1] == 0);
    CHECK(p.ops[2] == 1);
    CHECK(to_string(p) == "H1H0H1");
    CHECK(to_string(pat({})) == "1");
    CHECK(pattern_from_index(0, 0).ops.empty());

    CHECK_THROWS_AS(pattern_from_index(9, 0), InvalidArgument);
    CHECK_THROWS_AS(pattern_from_index(3, 8), InvalidArgument);
    CHECK_THROWS_AS(enumerate_order(9), InvalidArgument);

    const auto entries = enumerate_order(4);
    REQUIRE(entries.size() == 16);
    for (unsigned idx = 0; idx < 16; ++idx) {
        unsigned rebuilt = 0;
        for (int i = 0; i < 4; ++i)
            rebuilt |= static_cast<unsigned>(entries[idx].pattern.ops[i]) << (3 - i);
        CHECK(rebuilt == idx);
    }
}

TEST_CASE("weights resum to the scalar propagator coefficients") {
    // For commuting generators the order-n, k-perturbation slice must carry
    // the coefficient of a^{n-k} (b/2)^k in exp(-iT(a + b/2)).
    for (int n = 0; n <= 6; ++n) {
        std::vector<Rational> by_count(n + 1, Rational(0));
        for (const auto& e : enumerate_order(n)) by_count[e.pattern.target_count()] += e.wbar;
        for (int k = 0; k <= n; ++k)
            CHECK(by_count[k] == Rational(binomial(n, k), factorial(n) * (1ll << k)));
    }
}

TEST_CASE("dropping the leftmost factor never decreases the weight") {
    for (int order = 1; order <= 6; ++order) {
        for (const auto& e : enumerate_order(order)) {
            OperatorPattern tail;
            tail.ops.assign(e.pattern.ops.begin() + 1, e.pattern.ops.end());
            CHECK(e.wbar <= adiabatic_weight(tail));
        }
    }
}

TEST_CASE("numerical quadrature reproduces the rational weights") {
    CHECK(verify_weights_numeric(1, 64) <= 1e-12);
    CHECK(verify_weights_numeric(2, 256) <= 1e-10);
    CHECK(verify_weights_numeric(3, 1024) <= 1e-10);
    CHECK(verify_weights_numeric(4, 4096) <= 1e-9);
    CHECK(verify_weights_numeric(5, 4096) <= 1e-9);
    CHECK(verify_weights_numeric(3, 2048) < verify_weights_numeric(3, 64));

    CHECK_THROWS_AS(verify_weights_numeric(6, 4096), InvalidArgument);
    CHECK_THROWS_AS(verify_weights_numeric(3, 7), InvalidArgument);
}

TEST_CASE("truncated series: degenerate and zero-time limits") {
    std::mt19937_64 gen(73);
    const auto H0 = random_hermitian(gen, 4);
    const auto H1 = random_hermitian(gen, 4);
    const Eigen::MatrixXcd zero = Eigen::MatrixXcd::Zero(4, 4);

    const auto at_zero = compare_truncated_series(H0, H1, 0.0, 3);
    CHECK(at_zero.diabatic <= 1e-12);
    CHECK(at_zero.adiabatic <= 1e-12);

    // Without a perturbation the two expansions are the same series against
    // the same propagator.
    const auto flat = compare_truncated_series(H0, zero, 0.8, 4);
    CHECK(std::abs(flat.diabatic - flat.adiabatic) <= 1e-8);
    const auto flat_deep = compare_truncated_series(H0, zero, 0.8, 8);
    CHECK(flat_deep.diabatic < 1e-6);
}

TEST_CASE("truncated series: gaps fall with the order") {
    std::mt19937_64 gen(79);
    const auto H0 = random_hermitian(gen, 4);
    const auto H1 = random_hermitian(gen, 4);
    double prev_d = 1e300, prev_a = 1e300;
    for (int order = 0; order <= 8; ++order) {
        const auto gap = compare_truncated_series(H0, H1, 0.5, order);
        CHECK(gap.diabatic <= prev_d + 1e-9);
        CHECK(gap.adiabatic <= prev_a + 1e-9);
        prev_d = gap.diabatic;
        prev_a = gap.adiabatic;
    }
    CHECK(prev_d < 1e-4);
    CHECK(prev_a < 1e-4);
}

TEST_CASE("truncated series: remainders scale one power past the order kept") {
    std::mt19937_64 gen(83);
    const auto H0 = random_hermitian(gen, 4);
    const auto H1 = random_hermitian(gen, 4);
    const std::vector<double> times{0.05, 0.1, 0.2, 0.4};
    for (int order = 1; order <= 3; ++order) {
        std::vector<double> gd, ga;
        for (const double T : times) {
            const auto gap = compare_truncated_series(H0, H1, T, order);
            gd.push_back(gap.diabatic);
            ga.push_back(gap.adiabatic);
        }
        const double want = order + 1;
        CHECK(std::abs(testsupport::loglog_slope(times, gd) - want) < 0.35);
        CHECK(std::abs(testsupport::loglog_slope(times, ga) - want) < 0.35);
    }
}

TEST_CASE("truncated series on the qubit chain matrices") {
    const auto H0p = jordan_wigner(build_initial_hamiltonian(2, 0.75));
    const auto Hp = jordan_wigner(build_model_hamiltonian(2, 0.75, 1.0, 1.0));
    const Eigen::MatrixXcd M0 = testsupport::dense_hamiltonian(H0p);
    const Eigen::MatrixXcd M1 = testsupport::dense_hamiltonian(Hp) - M0;

    const auto low = compare_truncated_series(M0, M1, 0.3, 2);
    const auto high = compare_truncated_series(M0, M1, 0.3, 6);
    CHECK(high.diabatic < low.diabatic);
    CHECK(high.adiabatic < low.adiabatic);
    CHECK(high.adiabatic < 1e-5);
}

TEST_CASE("truncated series input guards") {
    std::mt19937_64 gen(89);
    const auto H = random_hermitian(gen, 4);
    Eigen::MatrixXcd bad = H;
    bad(0, 1) += cdouble(0.0, 0.3);  // breaks Hermiticity
    CHECK_THROWS_AS(compare_truncated_series(H, bad, 0.5, 2), InvalidArgument);
    CHECK_THROWS_AS(compare_truncated_series(bad, H, 0.5, 2), InvalidArgument);
    CHECK_THROWS_AS(compare_truncated_series(H, random_hermitian(gen, 3), 0.5, 2),
                    InvalidArgument);
    CHECK_THROWS_AS(compare_truncated_series(H, H, -0.1, 2), InvalidArgument);
    CHECK_THROWS_AS(compare_truncated_series(H, H, 0.5, 9), InvalidArgument);
    CHECK_THROWS_AS(compare_truncated_series(Eigen::MatrixXcd::Ones(2, 3),
                                             Eigen::MatrixXcd::Ones(2, 3), 0.5, 2),
                    InvalidArgument);
}
