#include "dsqe/pauli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace dsqe {

namespace {

constexpr double kMergeDrop = 1e-15;    // post-merge coefficient cutoff
constexpr double kCouplingCut = 1e-12;  // coupled_states magnitude cutoff

// i^k for k mod 4.
cdouble ipow(int k) {
    static const cdouble table[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return table[k & 3];
}

}  // namespace

cdouble pauli_phase(BasisState x_mask, BasisState z_mask, BasisState m) {
    cdouble phase = ipow(popcount(x_mask & z_mask));
    if (popcount(z_mask & m) & 1) phase = -phase;
    return phase;
}

PauliHamiltonian jordan_wigner(const FermionHamiltonian& H) {
    if (H.Q < 1 || H.Q > 63)
        throw InvalidArgument("invalid dimension: Q must be in [1, 63], got " +
                              std::to_string(H.Q));
    // Accumulate merged coefficients keyed by (x, z); std::map keeps the
    // (x_mask, z_mask) ascending order we want for the term list.
    std::map<std::pair<BasisState, BasisState>, cdouble> acc;
    acc[{0, 0}] = 0.0;  // identity is always part of the layout
    auto add = [&](BasisState x, BasisState z, double c) {
        acc[{x, z}] += c;
    };
    for (const auto& term : H.terms) {
        if (term.q < 0 || term.q >= H.Q)
            throw InvalidArgument("fermion term site out of range");
        const BasisState bq = 1ull << term.q;
        switch (term.kind) {
            case FermionKind::Number:
                // n_q = (1 - Z_q) / 2
                add(0, 0, 0.5 * term.coeff);
                add(0, bq, -0.5 * term.coeff);
                break;
            case FermionKind::Hopping: {
                // Adjacent hop: (X_q X_{q+1} + Y_q Y_{q+1}) / 2, no
                // interior string for nearest neighbours.
                if (term.q + 1 >= H.Q) throw InvalidArgument("hopping term needs site q+1");
                const BasisState pair = bq | (bq << 1);
                add(pair, 0, 0.5 * term.coeff);
                add(pair, pair, 0.5 * term.coeff);
                break;
            }
            case FermionKind::DensityDensity: {
                // n_q n_{q+1} = (1 - Z_q - Z_{q+1} + Z_q Z_{q+1}) / 4
                if (term.q + 1 >= H.Q) throw InvalidArgument("pair term needs site q+1");
                const BasisState pair = bq | (bq << 1);
                add(0, 0, 0.25 * term.coeff);
                add(0, bq, -0.25 * term.coeff);
                add(0, bq << 1, -0.25 * term.coeff);
                add(0, pair, 0.25 * term.coeff);
                break;
            }
        }
    }
    PauliHamiltonian out;
    out.Q = H.Q;
    for (const auto& [key, c] : acc) {
        const bool identity = key.first == 0 && key.second == 0;
        if (!identity && std::abs(c) < kMergeDrop) continue;
        out.terms.push_back({key.first, key.second, c});
    }
    return out;
}

cdouble matrix_element(const PauliHamiltonian& H, BasisState n, BasisState m) {
    const BasisState x = n ^ m;
    cdouble val = 0.0;
    for (const auto& P : H.terms) {
        if (P.x_mask != x) continue;
        val += P.coeff * pauli_phase(P.x_mask, P.z_mask, m);
    }
    return val;
}

std::vector<BasisState> coupled_states(const PauliHamiltonian& H, BasisState n) {
    std::vector<BasisState> out;
    for (const auto& group : x_mask_groups(H)) {
        const BasisState m = n ^ group.first;
        cdouble val = 0.0;
        for (int i = group.second.first; i < group.second.second; ++i) {
            const auto& P = H.terms[i];
            val += P.coeff * pauli_phase(P.x_mask, P.z_mask, n);  // <m|P|n>
        }
        if (std::abs(val) > kCouplingCut) out.push_back(m);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::pair<BasisState, std::pair<int, int>>> x_mask_groups(const PauliHamiltonian& H) {
    std::vector<std::pair<BasisState, std::pair<int, int>>> groups;
    const int L = static_cast<int>(H.terms.size());
    for (int i = 0; i < L;) {
        int j = i;
        while (j < L && H.terms[j].x_mask == H.terms[i].x_mask) ++j;
        groups.push_back({H.terms[i].x_mask, {i, j}});
        i = j;
    }
    return groups;
}

std::string to_string(const PauliString& P, int Q) {
    char buf[64];
    const double re = P.coeff.real(), im = P.coeff.imag();
    if (std::abs(im) < 1e-14)
        std::snprintf(buf, sizeof buf, "%+.6g", re);
    else
        std::snprintf(buf, sizeof buf, "(%+.6g%+.6gi)", re, im);
    std::string s(buf);
    s += " · ";
    for (int q = 0; q < Q; ++q) {
        const bool x = (P.x_mask >> q) & 1ull, z = (P.z_mask >> q) & 1ull;
        s += x ? (z ? 'Y' : 'X') : (z ? 'Z' : 'I');
    }
    return s;
}

std::string to_string(const PauliHamiltonian& H) {
    std::string s;
    for (const auto& P : H.terms) {
        s += to_string(P, H.Q);
        s += '\n';
    }
    return s;
}

}  // namespace dsqe
