#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dsqe/scan.hpp"

namespace {

// 0 ok, 2 config/usage, 3 capacity, 4 solver, 1 anything else.
int run(int argc, char** argv) {
    CLI::App app{"diabatic subspace quantum eigensolver toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_dir, seeds_csv, scan_csv;
    int threads = 1;
    int order = 3;

    auto* scan = app.add_subcommand("scan", "sweep the schedule grid and write CSV/JSONL");
    scan->add_option("--config", config_path, "JSON config file")->required();
    scan->add_option("--out", out_dir, "output directory")->capture_default_str();
    scan->add_option("--seeds", seeds_csv, "comma-separated seed override");
    scan->add_option("--threads", threads, "worker threads")->capture_default_str();

    auto* oracle = app.add_subcommand("oracle", "print the exact reference energy");
    oracle->add_option("--config", config_path, "JSON config file")->required();
    oracle->add_option("--scan", scan_csv, "scan.csv to re-check against the oracle");

    auto* compile = app.add_subcommand("compile", "emit OpenQASM circuits for the grid");
    compile->add_option("--config", config_path, "JSON config file")->required();
    compile->add_option("--out", out_dir, "output directory")->capture_default_str();

    auto* methods = app.add_subcommand("compare-methods",
                                       "compare the two measurement-basis routes");
    methods->add_option("--config", config_path, "JSON config file")->required();
    methods->add_option("--out", out_dir, "output directory")->capture_default_str();

    auto* weights = app.add_subcommand("weights", "print interpolated expansion weights");
    weights->add_option("--order", order, "expansion order")->required();
    weights->add_option("--out", out_dir, "optional CSV output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (scan->parsed()) {
            auto cfg = dsqe::load_config(config_path);
            if (!seeds_csv.empty()) {
                cfg.seeds.clear();
                std::stringstream ss(seeds_csv);
                std::string tok;
                while (std::getline(ss, tok, ','))
                    cfg.seeds.push_back(std::stoull(tok));
                if (cfg.seeds.empty())
                    throw dsqe::ConfigError("--seeds override parsed to an empty list");
            }
            const std::string dir = out_dir.empty() ? "out_scan" : out_dir;
            const auto rows = dsqe::cmd_scan(cfg, dir, threads);
            std::cout << "wrote " << rows.size() << " rows to " << dir
                      << "/scan.csv (hash " << dsqe::config_hash(cfg) << ")\n";
        } else if (oracle->parsed()) {
            const auto cfg = dsqe::load_config(config_path);
            std::optional<std::filesystem::path> csv;
            if (!scan_csv.empty()) csv = scan_csv;
            const auto rep = dsqe::cmd_oracle(cfg, csv);
            std::cout << rep.text;
            if (rep.rows_mismatched > 0) return 1;
        } else if (compile->parsed()) {
            const auto cfg = dsqe::load_config(config_path);
            const std::string dir = out_dir.empty() ? "out_circuits" : out_dir;
            dsqe::cmd_compile(cfg, dir);
            std::cout << "wrote circuits and resources.json to " << dir << "\n";
        } else if (methods->parsed()) {
            const auto cfg = dsqe::load_config(config_path);
            const std::string dir = out_dir.empty() ? "out_methods" : out_dir;
            const auto cmp = dsqe::cmd_compare_methods(cfg, dir);
            std::cout << cmp.verdict << "\n";
        } else if (weights->parsed()) {
            std::optional<std::filesystem::path> csv;
            if (!out_dir.empty()) csv = out_dir;
            std::cout << dsqe::cmd_weights(order, csv);
        }
    } catch (const dsqe::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const dsqe::CapacityError& e) {
        std::cerr << "capacity error: " << e.what() << "\n";
        return 3;
    } catch (const dsqe::SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "argument error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
