#include "dsqe/scan.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <mutex>
#include <sstream>
#include <thread>

#include "dsqe/circuit.hpp"
#include "dsqe/series.hpp"

namespace dsqe {

namespace {

using nlohmann::json;

json require_field(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key))
        throw ConfigError("config is missing required field '" + where + key + "'");
    return j.at(key);
}

template <typename T>
T typed_field(const json& j, const std::string& key, const std::string& where) {
    const json v = require_field(j, key, where);
    try {
        return v.get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config field '" + where + key + "' has the wrong type");
    }
}

template <typename T>
T typed_field_or(const json& j, const std::string& key, const std::string& where, T fallback) {
    if (!j.contains(key)) return fallback;
    return typed_field<T>(j, key, where);
}

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

Selection parse_selection(const json& j) {
    const auto rule = typed_field<std::string>(j, "rule", "selection.");
    if (rule == "all") return Selection::all();
    const auto param = typed_field<std::uint64_t>(j, "param", "selection.");
    if (rule == "top_k") {
        if (param == 0) throw ConfigError("selection.param must be >= 1 for top_k");
        return Selection::top_k(param);
    }
    if (rule == "min_count") {
        if (param == 0) throw ConfigError("selection.param must be >= 1 for min_count");
        return Selection::min_count(param);
    }
    throw ConfigError("selection.rule must be one of all, top_k, min_count; got '" + rule + "'");
}

// Exact reference strategy for the configured model: full diagonalization
// where the sector is small enough, the one-body route when V = 0, NaN
// otherwise.
double exact_reference(const ModelConfig& m) {
    if (sector_size(m.Q, m.Ne) <= 2e5) {
        const auto H = build_model_hamiltonian(m.Q, m.dmu, m.t, m.V);
        return exact_ground_energy_ed(H, m.Ne);
    }
    if (m.V == 0.0) return free_fermion_energy(m.Q, m.dmu, m.t, m.Ne);
    return std::nan("");
}

json canonical_config_json(const ScanConfig& cfg) {
    json j;
    j["schema_version"] = cfg.schema_version;
    j["model"] = {{"Q", cfg.model.Q},   {"Ne", cfg.model.Ne}, {"dmu", cfg.model.dmu},
                  {"t", cfg.model.t},   {"V", cfg.model.V}};
    j["schedule"] = {{"ntau", cfg.ntau_list}, {"dtau_tau0", cfg.dtau_list}};
    j["sampling"] = {{"shots", cfg.shots}, {"seeds", cfg.seeds}};
    json sel;
    sel["rule"] = cfg.selection.kind == SelectionKind::All
                      ? "all"
                      : (cfg.selection.kind == SelectionKind::TopK ? "top_k" : "min_count");
    if (cfg.selection.kind != SelectionKind::All) sel["param"] = cfg.selection.param;
    j["selection"] = sel;
    j["expansion_rounds"] = cfg.expansion_rounds;
    j["convergence"] = {{"tol_rel", cfg.stop.tol_rel}, {"patience", cfg.stop.patience}};
    if (cfg.t_ha) j["units"] = {{"t_ha", *cfg.t_ha}};
    j["methods"] = {{"epsilon", cfg.epsilon},
                    {"epsilon_mode",
                     cfg.epsilon_mode == EpsilonMode::Frequency ? "frequency" : "amplitude"},
                    {"budget", cfg.method_budget}};
    return j;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

CsvTable parse_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open CSV file " + path.string());
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (first) {
            table.header = std::move(cells);
            first = false;
        } else {
            table.rows.push_back(std::move(cells));
        }
    }
    return table;
}

}  // namespace

ScanConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
    }

    ScanConfig cfg;
    cfg.schema_version = typed_field<int>(j, "schema_version", "");
    if (cfg.schema_version != 1)
        throw ConfigError("unsupported schema_version " + std::to_string(cfg.schema_version) +
                          "; this build reads version 1");

    const json jm = require_field(j, "model", "");
    cfg.model.Q = typed_field<int>(jm, "Q", "model.");
    cfg.model.Ne = typed_field<int>(jm, "Ne", "model.");
    cfg.model.dmu = typed_field<double>(jm, "dmu", "model.");
    cfg.model.t = typed_field_or<double>(jm, "t", "model.", 1.0);
    cfg.model.V = typed_field<double>(jm, "V", "model.");
    if (cfg.model.Q < 1 || cfg.model.Q > 63)
        throw ConfigError("model.Q must be in [1, 63], got " + std::to_string(cfg.model.Q));
    if (cfg.model.Ne < 0 || cfg.model.Ne > cfg.model.Q)
        throw ConfigError("model.Ne must be in [0, Q], got " + std::to_string(cfg.model.Ne));

    const json js = require_field(j, "schedule", "");
    cfg.ntau_list = typed_field<std::vector<int>>(js, "ntau", "schedule.");
    cfg.dtau_list = typed_field<std::vector<double>>(js, "dtau_tau0", "schedule.");
    if (cfg.ntau_list.empty()) throw ConfigError("schedule.ntau must not be empty");
    if (cfg.dtau_list.empty()) throw ConfigError("schedule.dtau_tau0 must not be empty");
    for (const int n : cfg.ntau_list)
        if (n < 0) throw ConfigError("schedule.ntau entries must be >= 0");
    for (const double d : cfg.dtau_list)
        if (!(d >= 0.0)) throw ConfigError("schedule.dtau_tau0 entries must be >= 0");

    const json jp = require_field(j, "sampling", "");
    cfg.shots = typed_field<std::uint64_t>(jp, "shots", "sampling.");
    if (cfg.shots < 1) throw ConfigError("sampling.shots must be >= 1");
    cfg.seeds = typed_field<std::vector<std::uint64_t>>(jp, "seeds", "sampling.");
    if (cfg.seeds.empty()) throw ConfigError("sampling.seeds must not be empty");

    cfg.selection = parse_selection(require_field(j, "selection", ""));
    cfg.expansion_rounds = typed_field_or<int>(j, "expansion_rounds", "", 1);
    if (cfg.expansion_rounds < 0) throw ConfigError("expansion_rounds must be >= 0");

    if (j.contains("convergence")) {
        const json jc = j.at("convergence");
        cfg.stop.tol_rel = typed_field_or<double>(jc, "tol_rel", "convergence.", 1e-6);
        cfg.stop.patience = typed_field_or<int>(jc, "patience", "convergence.", 3);
        if (cfg.stop.tol_rel <= 0) throw ConfigError("convergence.tol_rel must be > 0");
        if (cfg.stop.patience < 1) throw ConfigError("convergence.patience must be >= 1");
    }
    if (j.contains("units")) {
        const double t_ha = typed_field<double>(j.at("units"), "t_ha", "units.");
        if (!(t_ha > 0)) throw ConfigError("units.t_ha must be > 0");
        cfg.t_ha = t_ha;
    }
    if (j.contains("methods")) {
        const json jx = j.at("methods");
        cfg.epsilon = typed_field_or<double>(jx, "epsilon", "methods.", 1e-3);
        if (!(cfg.epsilon >= 0)) throw ConfigError("methods.epsilon must be >= 0");
        const auto mode =
            typed_field_or<std::string>(jx, "epsilon_mode", "methods.", "frequency");
        if (mode == "frequency")
            cfg.epsilon_mode = EpsilonMode::Frequency;
        else if (mode == "amplitude")
            cfg.epsilon_mode = EpsilonMode::Amplitude;
        else
            throw ConfigError("methods.epsilon_mode must be 'frequency' or 'amplitude'");
        cfg.method_budget = typed_field_or<std::uint64_t>(jx, "budget", "methods.", 65536ull);
    }
    return cfg;
}

std::string config_hash(const ScanConfig& cfg) {
    const std::string dump = canonical_config_json(cfg).dump();
    std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a 64
    for (const unsigned char c : dump) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<ScanRow> cmd_scan(const ScanConfig& cfg, const std::filesystem::path& out_dir,
                              int threads) {
    if (threads < 1) throw InvalidArgument("threads must be >= 1");
    std::filesystem::create_directories(out_dir);
    const std::string hash = config_hash(cfg);
    const double e_exact = exact_reference(cfg.model);

    struct Task {
        int ntau;
        double dtau;
        std::uint64_t seed;
    };
    std::vector<Task> tasks;
    for (const double d : cfg.dtau_list)
        for (const int n : cfg.ntau_list)
            for (const auto s : cfg.seeds) tasks.push_back({n, d, s});

    std::vector<ScanRow> rows(tasks.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::string error_text;
    std::mutex error_mutex;
    auto worker = [&]() {
        while (!failed.load()) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            try {
                const auto& task = tasks[i];
                const EvolutionSchedule sched{task.ntau, task.dtau};
                const auto r = run_pipeline(cfg.model, sched, cfg.shots, task.seed,
                                            cfg.selection, cfg.expansion_rounds);
                ScanRow row;
                row.ntau = task.ntau;
                row.dtau = task.dtau;
                row.seed = task.seed;
                row.e_guiding = r.e_guiding;
                row.e_b = r.solve.e_b;
                row.b0_size = r.solve.b0_size;
                row.b_size = r.solve.b_size;
                row.e_exact = e_exact;
                row.de = r.solve.e_b - e_exact;
                rows[i] = row;
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                error_text = e.what();
                failed.store(true);
            }
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int k = 0; k < threads; ++k) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failed.load()) throw Error("scan worker failed: " + error_text);

    const std::string sel_text = to_string(cfg.selection);

    std::ofstream csv(out_dir / "scan.csv");
    if (!csv) throw Error("cannot write " + (out_dir / "scan.csv").string());
    csv << "ntau,dtau_tau0,seed,selection,shots,E_guiding,E_B,B0_size,B_size,E_exact,dE,"
           "config_hash\n";
    for (const auto& r : rows) {
        csv << r.ntau << ',' << fmt17(r.dtau) << ',' << r.seed << ',' << sel_text << ','
            << cfg.shots << ',' << fmt17(r.e_guiding) << ',' << fmt17(r.e_b) << ',' << r.b0_size
            << ',' << r.b_size << ',' << fmt17(r.e_exact) << ',' << fmt17(r.de) << ',' << hash
            << '\n';
    }
    csv.close();

    // Aggregate across seeds per grid point, same grid order.
    std::ofstream agg(out_dir / "scan_aggregate.csv");
    if (!agg) throw Error("cannot write " + (out_dir / "scan_aggregate.csv").string());
    agg << "ntau,dtau_tau0,selection,shots,n_seeds,E_guiding_mean,E_B_mean,E_B_std,E_B_min,"
           "E_exact,dE_min,config_hash\n";
    const std::size_t per_point = cfg.seeds.size();
    for (std::size_t base = 0; base < rows.size(); base += per_point) {
        double gsum = 0.0, bsum = 0.0, bmin = rows[base].e_b;
        for (std::size_t k = 0; k < per_point; ++k) {
            gsum += rows[base + k].e_guiding;
            bsum += rows[base + k].e_b;
            bmin = std::min(bmin, rows[base + k].e_b);
        }
        const double bmean = bsum / per_point;
        double bvar = 0.0;
        for (std::size_t k = 0; k < per_point; ++k) {
            const double d = rows[base + k].e_b - bmean;
            bvar += d * d;
        }
        const double bstd = per_point > 1 ? std::sqrt(bvar / (per_point - 1)) : 0.0;
        agg << rows[base].ntau << ',' << fmt17(rows[base].dtau) << ',' << sel_text << ','
            << cfg.shots << ',' << per_point << ',' << fmt17(gsum / per_point) << ','
            << fmt17(bmean) << ',' << fmt17(bstd) << ',' << fmt17(bmin) << ','
            << fmt17(rows[base].e_exact) << ',' << fmt17(bmin - rows[base].e_exact) << ','
            << hash << '\n';
    }
    agg.close();

    std::ofstream jsonl(out_dir / "records.jsonl");
    if (!jsonl) throw Error("cannot write " + (out_dir / "records.jsonl").string());
    for (const auto& r : rows) {
        json rec;
        rec["ntau"] = r.ntau;
        rec["dtau_tau0"] = r.dtau;
        rec["seed"] = r.seed;
        rec["selection"] = sel_text;
        rec["shots"] = cfg.shots;
        rec["e_guiding"] = r.e_guiding;
        rec["e_b"] = r.e_b;
        rec["b0_size"] = r.b0_size;
        rec["b_size"] = r.b_size;
        if (std::isfinite(r.e_exact)) {
            rec["e_exact"] = r.e_exact;
            rec["de"] = r.de;
        }
        if (cfg.t_ha) {
            rec["e_b_ha"] = r.e_b * *cfg.t_ha;
            if (std::isfinite(r.e_exact)) rec["de_ha"] = r.de * *cfg.t_ha;
        }
        rec["config_hash"] = hash;
        jsonl << rec.dump() << '\n';
    }
    return rows;
}

OracleReport cmd_oracle(const ScanConfig& cfg,
                        const std::optional<std::filesystem::path>& scan_csv) {
    OracleReport rep;
    const auto& m = cfg.model;
    if (sector_size(m.Q, m.Ne) <= 2e5) {
        const auto H = build_model_hamiltonian(m.Q, m.dmu, m.t, m.V);
        rep.e_exact = exact_ground_energy_ed(H, m.Ne);
    } else if (m.V == 0.0) {
        rep.e_exact = free_fermion_energy(m.Q, m.dmu, m.t, m.Ne);
        rep.free_fermion_route = true;
    } else {
        throw ConfigError("no tractable exact reference: sector exceeds the diagonalization "
                          "guard and V != 0");
    }

    std::ostringstream out;
    out << "exact ground energy (model units): " << fmt17(rep.e_exact) << "\n";
    out << "route: " << (rep.free_fermion_route ? "one-body orbital filling (V = 0)"
                                                : "sector diagonalization")
        << "\n";
    if (cfg.t_ha)
        out << "exact ground energy (Ha, t_ha = " << fmt17(*cfg.t_ha)
            << "): " << fmt17(rep.e_exact * *cfg.t_ha) << "\n";

    if (scan_csv) {
        const auto table = parse_csv(*scan_csv);
        const auto col = [&](const std::string& name) {
            const auto it = std::find(table.header.begin(), table.header.end(), name);
            if (it == table.header.end())
                throw ConfigError("scan CSV lacks required column '" + name + "'");
            return static_cast<std::size_t>(it - table.header.begin());
        };
        const std::size_t c_eb = col("E_B"), c_eexact = col("E_exact"), c_de = col("dE");
        for (const auto& cells : table.rows) {
            ++rep.rows_checked;
            const double e_b = std::stod(cells.at(c_eb));
            const double e_exact_row = std::stod(cells.at(c_eexact));
            const double de_row = std::stod(cells.at(c_de));
            const bool bad = std::abs(e_exact_row - rep.e_exact) > 1e-9 ||
                             std::abs(de_row - (e_b - rep.e_exact)) > 1e-9;
            if (bad) {
                ++rep.rows_mismatched;
                out << "row " << rep.rows_checked << ": stored reference disagrees ("
                    << fmt17(e_exact_row) << " vs " << fmt17(rep.e_exact) << ")\n";
            }
        }
        out << "rows checked: " << rep.rows_checked
            << ", mismatched: " << rep.rows_mismatched << "\n";
    }
    rep.text = out.str();
    return rep;
}

void cmd_compile(const ScanConfig& cfg, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    const auto Hf = build_model_hamiltonian(cfg.model.Q, cfg.model.dmu, cfg.model.t, cfg.model.V);
    const auto H0f = build_initial_hamiltonian(cfg.model.Q, cfg.model.dmu);
    const auto H = jordan_wigner(Hf);
    const auto H0 = jordan_wigner(H0f);
    const auto prep = prep_circuit(cfg.model.Q, initial_state(cfg.model.Q, cfg.model.Ne));

    json manifest = json::array();
    std::size_t d_index = 0;
    for (const double dtau : cfg.dtau_list) {
        for (const int ntau : cfg.ntau_list) {
            const auto evo = compile_evolution(H0, H, EvolutionSchedule{ntau, dtau});
            Circuit full = prep;
            full.gates.insert(full.gates.end(), evo.circuit.gates.begin(),
                              evo.circuit.gates.end());
            const auto res = summarize(full, ntau, evo.resources.identity_terms_dropped);
            const std::string name =
                "circuit_n" + std::to_string(ntau) + "_d" + std::to_string(d_index) + ".qasm";
            std::ofstream qasm(out_dir / name);
            if (!qasm) throw Error("cannot write " + (out_dir / name).string());
            qasm << emit_qasm(full);
            manifest.push_back({{"file", name},
                                {"ntau", ntau},
                                {"dtau_tau0", dtau},
                                {"gate_count", res.gate_count},
                                {"cnot_count", res.cnot_count},
                                {"depth", res.depth},
                                {"n_steps", res.n_steps},
                                {"identity_terms_dropped", res.identity_terms_dropped}});
        }
        ++d_index;
    }
    std::ofstream mf(out_dir / "resources.json");
    if (!mf) throw Error("cannot write " + (out_dir / "resources.json").string());
    mf << manifest.dump(2) << '\n';
}

MethodComparison cmd_compare_methods(const ScanConfig& cfg,
                                     const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    const auto Hf = build_model_hamiltonian(cfg.model.Q, cfg.model.dmu, cfg.model.t, cfg.model.V);
    const auto H0f = build_initial_hamiltonian(cfg.model.Q, cfg.model.dmu);
    const auto H = jordan_wigner(Hf);
    const auto H0 = jordan_wigner(H0f);
    const auto phi0 = basis_state_vector(cfg.model.Q, initial_state(cfg.model.Q, cfg.model.Ne));
    const EvolutionSchedule sched{cfg.ntau_list.front(), cfg.dtau_list.front()};
    const auto guide = diabatic_evolve(phi0, H0, H, sched);

    const auto cmp = compare_methods(guide, H, cfg.method_budget, cfg.epsilon, cfg.seeds.front(),
                                     cfg.epsilon_mode);

    json per_term = json::array();
    for (const auto& stat : cmp.m1.per_term)
        per_term.push_back({{"string", stat.label},
                            {"chi", stat.chi},
                            {"N_r", stat.n_r},
                            {"shots", stat.shots},
                            {"kept", stat.kept}});
    json rep;
    rep["model"] = {{"Q", cfg.model.Q},   {"Ne", cfg.model.Ne}, {"dmu", cfg.model.dmu},
                    {"t", cfg.model.t},   {"V", cfg.model.V}};
    rep["grid_point"] = {{"ntau", sched.n_steps}, {"dtau_tau0", sched.dt}};
    rep["budget"] = cfg.method_budget;
    rep["epsilon"] = cfg.epsilon;
    rep["epsilon_mode"] =
        cfg.epsilon_mode == EpsilonMode::Frequency ? "frequency" : "amplitude";
    rep["L"] = cmp.m1.per_term.size();
    rep["per_term"] = per_term;
    rep["E_B_m1"] = cmp.m1.e_b;
    rep["E_B_m2"] = cmp.m2.e_b;
    rep["E_B_m2_16x"] = cmp.m2_boost.e_b;
    rep["basis_size_m1"] = cmp.m1.basis_size;
    rep["basis_size_m2"] = cmp.m2.basis_size;
    rep["overlap_jaccard"] = cmp.jaccard;
    rep["circuit_ratio"] = cmp.circuit_ratio;
    rep["verdict"] = cmp.verdict;
    const double e_exact = exact_reference(cfg.model);
    if (std::isfinite(e_exact)) rep["E_exact"] = e_exact;
    rep["config_hash"] = config_hash(cfg);

    std::ofstream out(out_dir / "compare_methods.json");
    if (!out) throw Error("cannot write " + (out_dir / "compare_methods.json").string());
    out << rep.dump(2) << '\n';
    return cmp;
}

namespace {

std::string rational_text(const Rational& r) {
    std::string s = std::to_string(r.numerator());
    if (r.denominator() != 1) s += "/" + std::to_string(r.denominator());
    return s;
}

}  // namespace

std::string cmd_weights(int order, const std::optional<std::filesystem::path>& out_csv) {
    const auto entries = enumerate_order(order);
    std::ostringstream out;
    out << "pattern weights at order " << order << " (" << entries.size() << " entries)\n";
    out << "pattern  w  wbar  tau_power\n";
    for (const auto& e : entries)
        out << to_string(e.pattern) << "  " << rational_text(e.w) << "  "
            << rational_text(e.wbar) << "  " << e.tau_power << "\n";
    if (out_csv) {
        std::ofstream csv(*out_csv);
        if (!csv) throw Error("cannot write " + out_csv->string());
        csv << "pattern,w,wbar,tau_power\n";
        for (const auto& e : entries)
            csv << to_string(e.pattern) << ',' << rational_text(e.w) << ','
                << rational_text(e.wbar) << ',' << e.tau_power << '\n';
    }
    return out.str();
}

}  // namespace dsqe
