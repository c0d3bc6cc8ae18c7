#include "dsqe/fermion.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <unordered_map>

#include "dsqe/eigensolve.hpp"

namespace dsqe {

namespace {

void check_dimension(int Q) {
    if (Q < 1 || Q > 63)
        throw InvalidArgument("invalid dimension: Q must be in [1, 63], got " + std::to_string(Q));
}

void check_filling(int Q, int Ne) {
    check_dimension(Q);
    if (Ne < 0 || Ne > Q)
        throw InvalidArgument("invalid filling: Ne must be in [0, Q], got Ne=" +
                              std::to_string(Ne) + " with Q=" + std::to_string(Q));
}

bool occupied(BasisState m, int q) { return (m >> q) & 1ull; }

}  // namespace

FermionHamiltonian build_model_hamiltonian(int Q, double dmu, double t, double V) {
    check_dimension(Q);
    FermionHamiltonian H;
    H.Q = Q;
    for (int q = 0; q < Q; ++q)
        H.terms.push_back({FermionKind::Number, q, dmu * q});
    for (int q = 0; q + 1 < Q; ++q)
        H.terms.push_back({FermionKind::Hopping, q, -t});
    for (int q = 0; q + 1 < Q; ++q)
        H.terms.push_back({FermionKind::DensityDensity, q, V});
    return H;
}

FermionHamiltonian build_initial_hamiltonian(int Q, double dmu) {
    check_dimension(Q);
    FermionHamiltonian H;
    H.Q = Q;
    for (int q = 0; q < Q; ++q)
        H.terms.push_back({FermionKind::Number, q, dmu * q});
    return H;
}

BasisState initial_state(int Q, int Ne) {
    check_filling(Q, Ne);
    return Ne == 0 ? 0ull : ((1ull << Ne) - 1ull);
}

double sector_size(int Q, int Ne) {
    check_filling(Q, Ne);
    double c = 1.0;
    for (int i = 0; i < Ne; ++i) c = c * (Q - i) / (i + 1);
    return c;
}

std::vector<BasisState> sector_states(int Q, int Ne) {
    check_filling(Q, Ne);
    if (sector_size(Q, Ne) > 1e7)
        throw CapacityError("particle sector exceeds 1e7 states for Q=" + std::to_string(Q) +
                            ", Ne=" + std::to_string(Ne));
    std::vector<BasisState> out;
    out.reserve(static_cast<std::size_t>(sector_size(Q, Ne)));
    if (Ne == 0) {
        out.push_back(0);
        return out;
    }
    // Gosper's hack walks the Ne-bit masks in ascending integer order.
    BasisState v = (1ull << Ne) - 1ull;
    const BasisState limit = (Q == 63) ? ~0ull : ((1ull << Q) - 1ull);
    while (v <= limit) {
        out.push_back(v);
        BasisState c = v & (~v + 1ull);
        BasisState r = v + c;
        if (r > limit || r < v) break;  // overflow guard
        v = r | ((((v ^ r) >> 2) / c));
    }
    return out;
}

double fermion_matrix_element(const FermionHamiltonian& H, BasisState n, BasisState m) {
    double val = 0.0;
    if (n == m) {
        for (const auto& term : H.terms) {
            switch (term.kind) {
                case FermionKind::Number:
                    if (occupied(m, term.q)) val += term.coeff;
                    break;
                case FermionKind::DensityDensity:
                    if (occupied(m, term.q) && occupied(m, term.q + 1)) val += term.coeff;
                    break;
                case FermionKind::Hopping:
                    break;
            }
        }
        return val;
    }
    // Off-diagonal contributions only come from hops, which toggle an
    // adjacent pair with exactly one side occupied. With orbitals ordered
    // along the chain the fermionic reordering sign of an adjacent hop is +1:
    // no occupied orbital can sit strictly between q and q+1.
    const BasisState diff = n ^ m;
    for (const auto& term : H.terms) {
        if (term.kind != FermionKind::Hopping) continue;
        const BasisState pair = (1ull << term.q) | (1ull << (term.q + 1));
        if (diff == pair && popcount(m & pair) == 1) val += term.coeff;
    }
    return val;
}

namespace {

// Apply H to a sector-restricted vector through an index map; shared by the
// dense fill and the Lanczos matvec.
template <typename Visitor>
void for_each_entry(const FermionHamiltonian& H, BasisState n, Visitor&& visit) {
    double diag = 0.0;
    for (const auto& term : H.terms) {
        switch (term.kind) {
            case FermionKind::Number:
                if (occupied(n, term.q)) diag += term.coeff;
                break;
            case FermionKind::DensityDensity:
                if (occupied(n, term.q) && occupied(n, term.q + 1)) diag += term.coeff;
                break;
            case FermionKind::Hopping: {
                const BasisState pair = (1ull << term.q) | (1ull << (term.q + 1));
                if (popcount(n & pair) == 1) visit(n ^ pair, term.coeff);
                break;
            }
        }
    }
    if (diag != 0.0) visit(n, diag);
}

}  // namespace

double exact_ground_energy_ed(const FermionHamiltonian& H, int Ne) {
    const auto states = sector_states(H.Q, Ne);
    const auto dim = static_cast<Eigen::Index>(states.size());
    std::unordered_map<BasisState, Eigen::Index> idx;
    idx.reserve(states.size() * 2);
    for (Eigen::Index i = 0; i < dim; ++i) idx.emplace(states[i], i);

    if (dim == 1) return fermion_matrix_element(H, states[0], states[0]);

    if (dim <= 2000) {
        Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(dim, dim);
        for (Eigen::Index j = 0; j < dim; ++j)
            for_each_entry(H, states[j],
                           [&](BasisState m, double v) { mat(idx.at(m), j) += v; });
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mat, Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success)
            throw SolverError("dense eigensolver failed in the exact-diagonalization oracle");
        return es.eigenvalues()(0);
    }

    double scale = 0.0;
    for (const auto& term : H.terms)
        scale += std::abs(term.coeff) * (term.kind == FermionKind::Number ? H.Q : 2.0);
    auto matvec = [&](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
        out.setZero();
        for (Eigen::Index j = 0; j < dim; ++j) {
            const std::complex<double> a = in(j);
            if (a == std::complex<double>{}) continue;
            for_each_entry(H, states[j], [&](BasisState m, double v) { out(idx.at(m)) += v * a; });
        }
    };
    const auto pair = lowest_eigenpair_lanczos(dim, matvec, 1e-12, std::max(scale, 1.0),
                                               10 * static_cast<int>(dim));
    return pair.value;
}

double free_fermion_energy(int Q, double dmu, double t, int Ne) {
    check_filling(Q, Ne);
    if (Ne == 0) return 0.0;
    Eigen::VectorXd diag(Q), sub(std::max(Q - 1, 1));
    for (int q = 0; q < Q; ++q) diag(q) = dmu * q;
    for (int q = 0; q + 1 < Q; ++q) sub(q) = -t;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub.head(std::max(Q - 1, 0)), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw SolverError("tridiagonal eigensolver failed in the one-body oracle");
    double e = 0.0;
    for (int k = 0; k < Ne; ++k) e += es.eigenvalues()(k);
    return e;
}

}  // namespace dsqe
