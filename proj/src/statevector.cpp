#include "dsqe/statevector.hpp"

#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "dsqe/rng.hpp"

namespace dsqe {

namespace {

constexpr int kMaxQubitsDense = 26;
constexpr int kMaxQubitsReference = 12;

void check_state_capacity(int Q) {
    if (Q < 1)
        throw InvalidArgument("invalid dimension: Q must be >= 1, got " + std::to_string(Q));
    if (Q > kMaxQubitsDense)
        throw CapacityError("dense statevector limited to Q <= " +
                            std::to_string(kMaxQubitsDense) + ", got Q=" + std::to_string(Q));
}

cdouble ipow(int k) {
    static const cdouble table[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return table[k & 3];
}

}  // namespace

StateVector basis_state_vector(int Q, BasisState n) {
    check_state_capacity(Q);
    if (Q < 64 && (n >> Q) != 0)
        throw InvalidArgument("basis state has bits above qubit Q-1");
    StateVector s;
    s.Q = Q;
    s.amps.assign(std::size_t{1} << Q, cdouble{0.0, 0.0});
    s.amps[n] = 1.0;
    return s;
}

void apply_pauli_exponential(StateVector& state, const PauliString& P, double theta) {
    const std::size_t dim = state.dim();
    const BasisState x = P.x_mask, z = P.z_mask;
    if (x == 0) {
        // Diagonal string: pure phases. exp(-i theta Z...Z) multiplies each
        // amplitude by e^{-i theta s} with s the Z-parity sign of the index.
        const cdouble plus = std::exp(cdouble{0.0, -theta});
        const cdouble minus = std::exp(cdouble{0.0, theta});
        for (std::size_t j = 0; j < dim; ++j)
            state.amps[j] *= (popcount(z & j) & 1) ? minus : plus;
        return;
    }
    // Off-diagonal string: rotate amplitude pairs (j, j ^ x). With
    // ph(m) = i^|x&z| (-1)^|z&m| the update is
    //   a_j' = cos(theta) a_j - i sin(theta) ph(j^x) a_{j^x}.
    const double c = std::cos(theta), s = std::sin(theta);
    const cdouble w = cdouble{0.0, -s} * ipow(popcount(x & z));
    for (std::size_t j = 0; j < dim; ++j) {
        const std::size_t k = j ^ x;
        if (k < j) continue;  // each pair once
        const cdouble aj = state.amps[j], ak = state.amps[k];
        const cdouble wj = (popcount(z & j) & 1) ? -w : w;
        const cdouble wk = (popcount(z & k) & 1) ? -w : w;
        state.amps[j] = c * aj + wk * ak;
        state.amps[k] = c * ak + wj * aj;
    }
}

namespace {

// Merged schedule table: the union of the two term layouts with both
// coefficients, kept in the canonical (x, z) order.
struct ScheduleTerm {
    BasisState x, z;
    double c0, c1;
};

std::vector<ScheduleTerm> merge_terms(const PauliHamiltonian& H0, const PauliHamiltonian& H) {
    for (const auto* h : {&H0, &H})
        for (const auto& P : h->terms)
            if (std::abs(P.coeff.imag()) > 1e-12)
                throw InvalidArgument("time evolution expects real term coefficients");
    std::map<std::pair<BasisState, BasisState>, ScheduleTerm> acc;
    for (const auto& P : H0.terms) {
        auto& e = acc[{P.x_mask, P.z_mask}];
        e.x = P.x_mask;
        e.z = P.z_mask;
        e.c0 = P.coeff.real();
    }
    for (const auto& P : H.terms) {
        auto& e = acc[{P.x_mask, P.z_mask}];
        e.x = P.x_mask;
        e.z = P.z_mask;
        e.c1 = P.coeff.real();
    }
    std::vector<ScheduleTerm> out;
    out.reserve(acc.size());
    for (const auto& [key, e] : acc) out.push_back(e);
    return out;
}

}  // namespace

StateVector diabatic_evolve(const StateVector& initial, const PauliHamiltonian& H0,
                            const PauliHamiltonian& H, const EvolutionSchedule& sched) {
    if (H0.Q != initial.Q || H.Q != initial.Q)
        throw InvalidArgument("state and Hamiltonians disagree on qubit count");
    if (sched.n_steps < 0) throw InvalidArgument("schedule needs n_steps >= 0");
    StateVector state = initial;
    if (sched.n_steps == 0 || sched.dt == 0.0) return state;
    const auto terms = merge_terms(H0, H);
    PauliString P;
    for (int i = 1; i <= sched.n_steps; ++i) {
        const double lambda = static_cast<double>(i) / sched.n_steps;
        for (const auto& term : terms) {
            const double coeff = (1.0 - lambda) * term.c0 + lambda * term.c1;
            if (coeff == 0.0) continue;
            P.x_mask = term.x;
            P.z_mask = term.z;
            apply_pauli_exponential(state, P, coeff * sched.dt);
        }
    }
    return state;
}

void apply_hamiltonian(const PauliHamiltonian& H, const StateVector& in, StateVector& out) {
    const std::size_t dim = in.dim();
    out.Q = in.Q;
    out.amps.assign(dim, cdouble{0.0, 0.0});
    for (const auto& P : H.terms) {
        const cdouble base = P.coeff * ipow(popcount(P.x_mask & P.z_mask));
        for (std::size_t m = 0; m < dim; ++m) {
            const cdouble v = (popcount(P.z_mask & m) & 1) ? -base : base;
            out.amps[m ^ P.x_mask] += v * in.amps[m];
        }
    }
}

StateVector reference_evolution(const StateVector& initial, const PauliHamiltonian& H0,
                                const PauliHamiltonian& H, double T, double tol) {
    if (H0.Q != initial.Q || H.Q != initial.Q)
        throw InvalidArgument("state and Hamiltonians disagree on qubit count");
    if (initial.Q > kMaxQubitsReference)
        throw CapacityError("reference integrator limited to Q <= " +
                            std::to_string(kMaxQubitsReference));
    if (T < 0.0) throw InvalidArgument("evolution time must be >= 0");
    StateVector state = initial;
    if (T == 0.0) return state;

    using OdeState = std::vector<cdouble>;
    StateVector tmp0, tmp1;
    auto rhs = [&](const OdeState& y, OdeState& dydt, double tau) {
        StateVector view;
        view.Q = initial.Q;
        view.amps = y;
        apply_hamiltonian(H0, view, tmp0);
        apply_hamiltonian(H, view, tmp1);
        const double lambda = tau / T;
        dydt.resize(y.size());
        for (std::size_t j = 0; j < y.size(); ++j)
            dydt[j] = cdouble{0.0, -1.0} *
                      ((1.0 - lambda) * tmp0.amps[j] + lambda * tmp1.amps[j]);
    };

    namespace ode = boost::numeric::odeint;
    OdeState y = state.amps;
    auto stepper = ode::make_controlled(tol, tol, ode::runge_kutta_dopri5<OdeState>());
    ode::integrate_adaptive(stepper, rhs, y, 0.0, T, std::min(0.01, T));
    state.amps = std::move(y);
    return state;
}

double expectation(const StateVector& state, const PauliHamiltonian& H) {
    if (H.Q != state.Q) throw InvalidArgument("state and Hamiltonian disagree on qubit count");
    StateVector hs;
    apply_hamiltonian(H, state, hs);
    cdouble acc = 0.0;
    for (std::size_t j = 0; j < state.dim(); ++j)
        acc += std::conj(state.amps[j]) * hs.amps[j];
    if (std::abs(acc.imag()) > 1e-10)
        throw SolverError("expectation value has a non-vanishing imaginary part");
    return acc.real();
}

double norm(const StateVector& state) {
    double n2 = 0.0;
    for (const auto& a : state.amps) n2 += std::norm(a);
    return std::sqrt(n2);
}

double fidelity(const StateVector& a, const StateVector& b) {
    if (a.dim() != b.dim()) throw InvalidArgument("fidelity needs equal dimensions");
    cdouble acc = 0.0;
    for (std::size_t j = 0; j < a.dim(); ++j) acc += std::conj(a.amps[j]) * b.amps[j];
    return std::abs(acc);
}

std::map<BasisState, std::uint64_t> sample(const StateVector& state, std::uint64_t shots,
                                           std::uint64_t seed) {
    if (shots < 1) throw InvalidArgument("sampling needs shots >= 1");
    // Compressed cumulative table over nonzero probabilities.
    std::vector<double> cum;
    std::vector<BasisState> masks;
    double total = 0.0;
    for (std::size_t j = 0; j < state.dim(); ++j) {
        const double p = std::norm(state.amps[j]);
        if (p <= 0.0) continue;
        total += p;
        cum.push_back(total);
        masks.push_back(j);
    }
    if (cum.empty()) throw InvalidArgument("cannot sample the zero vector");
    std::mt19937_64 gen(derive_stream(seed));
    std::map<BasisState, std::uint64_t> counts;
    for (std::uint64_t s = 0; s < shots; ++s) {
        const double u = uniform01(gen) * total;
        const auto it = std::upper_bound(cum.begin(), cum.end(), u);
        const std::size_t k = std::min<std::size_t>(it - cum.begin(), cum.size() - 1);
        ++counts[masks[k]];
    }
    return counts;
}

void dump_amplitudes(const StateVector& state, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    for (const auto& a : state.amps) {
        const double re = a.real(), im = a.imag();
        out.write(reinterpret_cast<const char*>(&re), sizeof re);
        out.write(reinterpret_cast<const char*>(&im), sizeof im);
    }
    if (!out) throw Error("short write to " + path.string());
}

}  // namespace dsqe
