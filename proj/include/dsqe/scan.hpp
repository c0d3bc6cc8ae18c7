#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dsqe/measurement.hpp"
#include "dsqe/subspace.hpp"

namespace dsqe {

// Parsed and validated scan configuration (JSON on disk).
struct ScanConfig {
    int schema_version = 1;
    ModelConfig model;
    std::vector<int> ntau_list;
    std::vector<double> dtau_list;  // units of 1/t
    std::uint64_t shots = 4096;
    std::vector<std::uint64_t> seeds;
    Selection selection;
    int expansion_rounds = 1;
    StopRule stop;
    std::optional<double> t_ha;  // hopping amplitude in Hartree, report-time anchor

    // compare-methods knobs
    double epsilon = 1e-3;
    EpsilonMode epsilon_mode = EpsilonMode::Frequency;
    std::uint64_t method_budget = 65536;
};

ScanConfig load_config(const std::filesystem::path& path);

// FNV-1a over the canonical (sorted-key, minified) JSON rendering; hex string.
std::string config_hash(const ScanConfig& cfg);

struct ScanRow {
    int ntau = 0;
    double dtau = 0.0;
    std::uint64_t seed = 0;
    double e_guiding = 0.0;
    double e_b = 0.0;
    int b0_size = 0;
    int b_size = 0;
    double e_exact = 0.0;  // NaN when no exact reference is tractable
    double de = 0.0;
};

// Full grid sweep (dtau outer, ntau inner, seed innermost). Writes scan.csv,
// scan_aggregate.csv and records.jsonl into out_dir; byte-identical across
// re-runs and thread counts.
std::vector<ScanRow> cmd_scan(const ScanConfig& cfg, const std::filesystem::path& out_dir,
                              int threads = 1);

struct OracleReport {
    double e_exact = 0.0;          // model units
    bool free_fermion_route = false;
    std::size_t rows_checked = 0;
    std::size_t rows_mismatched = 0;
    std::string text;
};

// Exact reference energy for the configured model; when a scan CSV is given,
// re-derives dE for every row and flags mismatches.
OracleReport cmd_oracle(const ScanConfig& cfg,
                        const std::optional<std::filesystem::path>& scan_csv);

// One OpenQASM file per grid point (state preparation + compiled evolution +
// terminal measurement) plus a resources.json manifest.
void cmd_compile(const ScanConfig& cfg, const std::filesystem::path& out_dir);

// Equal-budget comparison of the two measurement routes on the guiding state
// of the first grid point; writes compare_methods.json.
MethodComparison cmd_compare_methods(const ScanConfig& cfg, const std::filesystem::path& out_dir);

// Weight table of the interpolated operator expansion at the given order;
// printed, and written as CSV when out_csv is set.
std::string cmd_weights(int order, const std::optional<std::filesystem::path>& out_csv);

}  // namespace dsqe
