#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <map>
#include <unordered_map>
#include <vector>

#include "dsqe/statevector.hpp"

namespace dsqe {

// How measured occupation masks are turned into the seed basis B0.
enum class SelectionKind { TopK, MinCount, All };

struct Selection {
    SelectionKind kind = SelectionKind::All;
    std::uint64_t param = 0;  // k for TopK, threshold for MinCount

    static Selection top_k(std::uint64_t k) { return {SelectionKind::TopK, k}; }
    static Selection min_count(std::uint64_t c) { return {SelectionKind::MinCount, c}; }
    static Selection all() { return {SelectionKind::All, 0}; }
};

std::string to_string(const Selection& sel);

enum class StateOrigin : std::uint8_t { Measured, Coupled };

// Ordered list of distinct occupation masks with a reverse index. Measured
// states come first (descending count, ties by ascending mask), expansion
// appends coupled states in ascending mask order.
struct SubspaceBasis {
    std::vector<BasisState> states;
    std::vector<StateOrigin> origins;
    std::unordered_map<BasisState, int> index;

    int size() const { return static_cast<int>(states.size()); }
    bool contains(BasisState n) const { return index.count(n) != 0; }
    void append(BasisState n, StateOrigin origin);
};

SubspaceBasis make_basis(const std::vector<BasisState>& states, StateOrigin origin);

// Seed basis from a measurement histogram. Throws EmptyBasisError when the
// rule selects nothing.
SubspaceBasis build_B0(const std::map<BasisState, std::uint64_t>& counts, const Selection& sel);

// One expansion round: append every state coupled to B0 through H that is not
// already present. Idempotent on closed sets.
SubspaceBasis expand_basis(const SubspaceBasis& B0, const PauliHamiltonian& H);

// H restricted to a basis, stored sparse; every matrix element reachable
// through the x-masks of H is kept.
struct ProjectedHamiltonian {
    int dim = 0;
    Eigen::SparseMatrix<cdouble> mat;
    double inf_norm = 0.0;  // max absolute row sum, scale for residual tests
};

ProjectedHamiltonian project(const PauliHamiltonian& H, const SubspaceBasis& B);

struct SolveResult {
    double e_b = 0.0;
    Eigen::VectorXcd eigenvector;  // coordinates over the basis order
    int b0_size = 0;
    int b_size = 0;
    double wall_seconds = 0.0;
    int iterations = 0;    // 0 for the dense path
    double residual = 0.0;
};

// Lowest eigenpair of the projected matrix: dense for dim <= 200, restarted
// Lanczos (relative tolerance 1e-10, at most 10 * dim iterations) above.
SolveResult ground_eigen(const ProjectedHamiltonian& Hb);

struct ModelConfig {
    int Q = 0;
    int Ne = 0;
    double dmu = 0.0;
    double t = 1.0;
    double V = 0.0;
};

// End-to-end single run: prepare the guiding state, sample, select, expand,
// project, diagonalize.
struct PipelineResult {
    SolveResult solve;
    double e_guiding = 0.0;          // <guide|H|guide>
    SubspaceBasis basis;
    std::map<BasisState, std::uint64_t> counts;
};

PipelineResult run_pipeline(const ModelConfig& model, const EvolutionSchedule& sched,
                            std::uint64_t shots, std::uint64_t seed, const Selection& sel,
                            int expansion_rounds = 1);

// Relative-change stopping rule: stop once |E_i - E_{i-1}| <= tol_rel * |E_i|
// holds for `patience` consecutive grid points.
struct StopRule {
    double tol_rel = 1e-6;
    int patience = 3;
};

struct GridPoint {
    int n_steps = 0;
    double dt = 0.0;
};

struct TracePoint {
    GridPoint point;
    double e_b = 0.0;
    double e_guiding = 0.0;
    int b0_size = 0;
    int b_size = 0;
};

struct ConvergeResult {
    PipelineResult best;
    int best_index = -1;
    std::vector<TracePoint> trace;
    bool stopped_early = false;
};

// Walk the schedule grid in order, keeping the lowest subspace energy seen.
ConvergeResult converge_loop(const ModelConfig& model, const std::vector<GridPoint>& grid,
                             std::uint64_t shots, std::uint64_t seed, const Selection& sel,
                             const StopRule& stop, int expansion_rounds = 1);

}  // namespace dsqe
