#include "dsqe/subspace.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>

#include "dsqe/eigensolve.hpp"
#include "dsqe/rng.hpp"

namespace dsqe {

namespace {

SubspaceBasis require_nonempty(SubspaceBasis B) {
    if (B.size() == 0)
        throw EmptyBasisError("selection rule produced an empty seed basis");
    return B;
}

}  // namespace

std::string to_string(const Selection& sel) {
    switch (sel.kind) {
        case SelectionKind::TopK:
            return "top_k:" + std::to_string(sel.param);
        case SelectionKind::MinCount:
            return "min_count:" + std::to_string(sel.param);
        case SelectionKind::All:
            return "all";
    }
    return "?";
}

void SubspaceBasis::append(BasisState n, StateOrigin origin) {
    index.emplace(n, static_cast<int>(states.size()));
    states.push_back(n);
    origins.push_back(origin);
}

SubspaceBasis make_basis(const std::vector<BasisState>& states, StateOrigin origin) {
    SubspaceBasis B;
    for (const auto n : states)
        if (!B.contains(n)) B.append(n, origin);
    return B;
}

SubspaceBasis build_B0(const std::map<BasisState, std::uint64_t>& counts, const Selection& sel) {
    // Canonical seed order: descending count, ties by ascending mask.
    std::vector<std::pair<std::uint64_t, BasisState>> ranked;
    ranked.reserve(counts.size());
    for (const auto& [mask, c] : counts)
        if (c > 0) ranked.push_back({c, mask});
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });

    SubspaceBasis B;
    for (const auto& [c, mask] : ranked) {
        switch (sel.kind) {
            case SelectionKind::TopK:
                if (static_cast<std::uint64_t>(B.size()) >= sel.param) return require_nonempty(B);
                break;
            case SelectionKind::MinCount:
                if (c < sel.param) return require_nonempty(B);
                break;
            case SelectionKind::All:
                break;
        }
        B.append(mask, StateOrigin::Measured);
    }
    return require_nonempty(B);
}

SubspaceBasis expand_basis(const SubspaceBasis& B0, const PauliHamiltonian& H) {
    SubspaceBasis B = B0;
    std::vector<BasisState> fresh;
    for (const auto n : B0.states)
        for (const auto m : coupled_states(H, n))
            if (!B0.contains(m)) fresh.push_back(m);
    std::sort(fresh.begin(), fresh.end());
    fresh.erase(std::unique(fresh.begin(), fresh.end()), fresh.end());
    for (const auto m : fresh) B.append(m, StateOrigin::Coupled);
    return B;
}

ProjectedHamiltonian project(const PauliHamiltonian& H, const SubspaceBasis& B) {
    if (B.size() == 0) throw EmptyBasisError("cannot project onto an empty basis");
    ProjectedHamiltonian out;
    out.dim = B.size();
    const auto groups = x_mask_groups(H);
    std::vector<Eigen::Triplet<cdouble>> trip;
    trip.reserve(static_cast<std::size_t>(B.size()) * groups.size());
    std::vector<double> row_sum(B.size(), 0.0);
    for (int col = 0; col < B.size(); ++col) {
        const BasisState m = B.states[col];
        for (const auto& g : groups) {
            const BasisState n = m ^ g.first;
            const auto it = B.index.find(n);
            if (it == B.index.end()) continue;
            cdouble val = 0.0;
            for (int i = g.second.first; i < g.second.second; ++i) {
                const auto& P = H.terms[i];
                val += P.coeff * pauli_phase(P.x_mask, P.z_mask, m);
            }
            if (val == cdouble{}) continue;
            trip.emplace_back(it->second, col, val);
            row_sum[it->second] += std::abs(val);
        }
    }
    out.mat.resize(B.size(), B.size());
    out.mat.setFromTriplets(trip.begin(), trip.end());
    out.inf_norm = row_sum.empty() ? 0.0 : *std::max_element(row_sum.begin(), row_sum.end());
    return out;
}

SolveResult ground_eigen(const ProjectedHamiltonian& Hb) {
    const auto start = std::chrono::steady_clock::now();
    SolveResult r;
    r.b_size = Hb.dim;
    const double scale = std::max(Hb.inf_norm, 1.0);
    if (Hb.dim <= 200) {
        Eigen::MatrixXcd dense(Hb.mat);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense);
        if (es.info() != Eigen::Success)
            throw SolverError("dense eigensolver failed on the projected matrix");
        r.e_b = es.eigenvalues()(0);
        r.eigenvector = es.eigenvectors().col(0);
        r.residual = (Hb.mat * r.eigenvector - r.e_b * r.eigenvector).norm();
    } else {
        auto matvec = [&](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
            out = Hb.mat * in;
        };
        const auto pair =
            lowest_eigenpair_lanczos(Hb.dim, matvec, 1e-10, scale, 10 * Hb.dim);
        r.e_b = pair.value;
        r.eigenvector = pair.vector;
        r.iterations = pair.iterations;
        r.residual = pair.residual;
    }
    if (r.residual > 1e-8 * scale)
        throw SolverError("projected eigenpair residual " + std::to_string(r.residual) +
                          " exceeds tolerance");
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

PipelineResult run_pipeline(const ModelConfig& model, const EvolutionSchedule& sched,
                            std::uint64_t shots, std::uint64_t seed, const Selection& sel,
                            int expansion_rounds) {
    if (expansion_rounds < 0) throw InvalidArgument("expansion_rounds must be >= 0");
    const auto start = std::chrono::steady_clock::now();
    const auto Hf = build_model_hamiltonian(model.Q, model.dmu, model.t, model.V);
    const auto H0f = build_initial_hamiltonian(model.Q, model.dmu);
    const auto H = jordan_wigner(Hf);
    const auto H0 = jordan_wigner(H0f);

    const auto phi0 = basis_state_vector(model.Q, initial_state(model.Q, model.Ne));
    const auto guide = diabatic_evolve(phi0, H0, H, sched);

    PipelineResult out;
    out.e_guiding = expectation(guide, H);

    // Every (grid point, shot budget) pair draws from its own substream so
    // that runs differing only in the selection rule see identical counts.
    const std::uint64_t stream = derive_stream(
        seed, static_cast<std::uint64_t>(sched.n_steps),
        std::bit_cast<std::uint64_t>(sched.dt), shots);
    out.counts = sample(guide, shots, stream);

    SubspaceBasis B = build_B0(out.counts, sel);
    const int b0 = B.size();
    for (int round = 0; round < expansion_rounds; ++round) {
        const int before = B.size();
        B = expand_basis(B, H);
        if (B.size() == before) break;  // closed under H already
    }
    const auto Hb = project(H, B);
    out.solve = ground_eigen(Hb);
    out.solve.b0_size = b0;
    out.solve.b_size = B.size();
    out.basis = std::move(B);
    out.solve.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

ConvergeResult converge_loop(const ModelConfig& model, const std::vector<GridPoint>& grid,
                             std::uint64_t shots, std::uint64_t seed, const Selection& sel,
                             const StopRule& stop, int expansion_rounds) {
    if (grid.empty()) throw InvalidArgument("converge_loop needs a non-empty grid");
    ConvergeResult out;
    int streak = 0;
    double prev = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        EvolutionSchedule sched{grid[i].n_steps, grid[i].dt};
        auto r = run_pipeline(model, sched, shots, seed, sel, expansion_rounds);
        out.trace.push_back({grid[i], r.solve.e_b, r.e_guiding, r.solve.b0_size, r.solve.b_size});
        if (out.best_index < 0 || r.solve.e_b < out.best.solve.e_b) {
            out.best = std::move(r);
            out.best_index = static_cast<int>(i);
        }
        const double e = out.trace.back().e_b;
        if (i > 0 && std::abs(e - prev) <= stop.tol_rel * std::max(std::abs(e), 1e-300)) {
            if (++streak >= stop.patience) {
                out.stopped_early = i + 1 < grid.size();
                break;
            }
        } else {
            streak = 0;
        }
        prev = e;
    }
    return out;
}

}  // namespace dsqe
