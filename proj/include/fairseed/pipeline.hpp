#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "ga.hpp"
#include "generator.hpp"
#include "graph.hpp"
#include "heuristics.hpp"
#include "icm.hpp"
#include "metrics.hpp"
#include "rng.hpp"
#include "run_config.hpp"

namespace fairseed {

// Output directory with atomic file creation (write to a temp name, then
// rename) and a manifest listing every file the command emitted.
class OutputDir {
public:
    explicit OutputDir(const std::filesystem::path& dir) : dir_(dir) {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec) throw DataError("cannot create output directory: " + dir_.string());
    }

    const std::filesystem::path& path() const { return dir_; }

    void write_stream(const std::string& name,
                      const std::function<void(std::ostream&)>& fill) {
        const auto final_path = dir_ / name;
        const auto tmp_path = dir_ / (name + ".tmp");
        {
            std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
            if (!out) throw DataError("cannot write file: " + final_path.string());
            fill(out);
            if (!out) throw DataError("write failed: " + final_path.string());
        }
        std::filesystem::rename(tmp_path, final_path);
        files_.push_back(name);
    }

    void write_text(const std::string& name, const std::string& content) {
        write_stream(name, [&](std::ostream& out) { out << content; });
    }

    void write_json(const std::string& name, const nlohmann::json& j) {
        write_stream(name, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
    }

    // Written last; lists every emitted file (itself included).
    void finalize_manifest(const std::string& command, const RunConfig& cfg) {
        nlohmann::json manifest;
        manifest["command"] = command;
        std::ostringstream cfg_text;
        cfg.serialize(cfg_text);
        manifest["config"] = cfg_text.str();
        auto files = files_;
        files.push_back("manifest.json");
        manifest["files"] = files;
        write_json("manifest.json", manifest);
    }

    const std::vector<std::string>& files() const { return files_; }

private:
    std::filesystem::path dir_;
    std::vector<std::string> files_;
};

namespace detail {

struct GraphProvenance {
    LoadReport report;
    nlohmann::json to_json(const Graph& g) const {
        NodeId min_deg = g.node_count() ? g.degree(0) : 0;
        NodeId max_deg = 0;
        std::int64_t isolated = 0;
        for (NodeId v = 0; v < g.node_count(); ++v) {
            min_deg = std::min(min_deg, g.degree(v));
            max_deg = std::max(max_deg, g.degree(v));
            isolated += g.degree(v) == 0;
        }
        nlohmann::json j;
        j["nodes"] = g.node_count();
        j["edges"] = g.edge_count();
        j["mean_degree"] = g.mean_degree();
        j["min_degree"] = min_deg;
        j["max_degree"] = max_deg;
        j["isolated_nodes"] = isolated;
        j["dropped_duplicate_edges"] = report.duplicate_edges;
        j["dropped_self_loops"] = report.self_loops;
        return j;
    }
};

inline Graph resolve_graph(const RunConfig& cfg, GraphProvenance* prov = nullptr) {
    LoadReport report;
    Graph g = [&] {
        if (cfg.use_generator) return generate(cfg.gen, &report);
        std::ifstream in(cfg.graph_path);
        if (!in) throw DataError("cannot open graph file: " + cfg.graph_path);
        return Graph::load_edge_list(in, &report);
    }();
    if (prov) prov->report = report;
    if (cfg.giant_component) g = largest_component(g);
    return g;
}

inline std::uint64_t command_seed(const RunConfig& cfg, std::uint64_t command_tag) {
    return child_seed(cfg.master_seed, command_tag);
}

// Explicit p, or the susceptibility arg-max on the configured grid.
inline double resolve_p(const RunConfig& cfg, const Graph& g, std::uint64_t command_tag,
                        CriticalEstimate* estimate = nullptr) {
    if (!cfg.auto_p) return cfg.p;
    const auto grid = default_p_grid(g, cfg.pc_grid_points, cfg.pc_lo_factor, cfg.pc_hi_factor);
    auto est = estimate_critical_p(g, grid, cfg.pc_runs_per_point,
                                   child_seed(command_seed(cfg, command_tag), stream::critical),
                                   cfg.threads);
    const double pc = est.pc;
    if (estimate) *estimate = std::move(est);
    return pc;
}

inline void write_susceptibility_csv(std::ostream& out, const CriticalEstimate& est) {
    out << "p,chi,mean_size\n";
    for (const auto& pt : est.curve)
        out << pt.p << ',' << pt.chi << ',' << pt.mean_size << '\n';
}

}  // namespace detail

namespace cmd_tag {
inline constexpr std::uint64_t generate = 21;
inline constexpr std::uint64_t critical_p = 22;
inline constexpr std::uint64_t vulnerability = 23;
inline constexpr std::uint64_t optimize = 24;
inline constexpr std::uint64_t seed_report = 25;
}  // namespace cmd_tag

struct GenerateResult {
    std::filesystem::path edge_list;
    nlohmann::json provenance;
};

inline GenerateResult cmd_generate(const RunConfig& cfg) {
    if (!cfg.use_generator) throw ConfigError("generate: requires generator parameters");
    cfg.validate();
    detail::GraphProvenance prov;
    LoadReport report;
    Graph g = generate(cfg.gen, &report);
    prov.report = report;
    OutputDir out(cfg.out_dir);
    out.write_stream("edges.txt", [&](std::ostream& os) { write_edge_list(g, os); });
    out.write_stream("labels.csv", [&](std::ostream& os) { write_label_map_csv(g, os); });
    nlohmann::json provenance;
    provenance["model"] = to_string(cfg.gen.model);
    provenance["requested_nodes"] = cfg.gen.node_count;
    provenance["gamma"] = cfg.gen.gamma;
    provenance["mean_degree"] = cfg.gen.mean_degree;
    provenance["degree_stddev"] = cfg.gen.degree_stddev;
    provenance["min_degree"] = cfg.gen.min_degree;
    provenance["rng_seed"] = cfg.gen.rng_seed;
    provenance["realized"] = prov.to_json(g);
    out.write_json("provenance.json", provenance);
    out.finalize_manifest("generate", cfg);
    return {out.path() / "edges.txt", provenance};
}

struct CriticalPResult {
    double pc = 0.0;
    CriticalEstimate estimate;
    double molloy_reed = 0.0;  // 0 when undefined for the degree sequence
};

inline CriticalPResult cmd_critical_p(const RunConfig& cfg) {
    cfg.validate();
    Graph g = detail::resolve_graph(cfg);
    const auto grid = default_p_grid(g, cfg.pc_grid_points, cfg.pc_lo_factor, cfg.pc_hi_factor);
    CriticalPResult result;
    result.estimate = estimate_critical_p(
        g, grid, cfg.pc_runs_per_point,
        child_seed(detail::command_seed(cfg, cmd_tag::critical_p), stream::critical),
        cfg.threads);
    result.pc = result.estimate.pc;
    try {
        result.molloy_reed = molloy_reed_pc(g);
    } catch (const DataError&) {
        result.molloy_reed = 0.0;
    }
    OutputDir out(cfg.out_dir);
    out.write_stream("susceptibility.csv",
                     [&](std::ostream& os) { detail::write_susceptibility_csv(os, result.estimate); });
    nlohmann::json j;
    j["pc"] = result.pc;
    j["molloy_reed_estimate"] = result.molloy_reed;
    j["grid_points"] = grid.size();
    j["runs_per_point"] = cfg.pc_runs_per_point;
    out.write_json("critical_p.json", j);
    out.finalize_manifest("critical-p", cfg);
    return result;
}

struct MethodOutcome {
    SeedSet seeds;
    NodeInformationStats stats;
    EffectiveStats effective;
    double vulnerable_fraction_nu = 0.0;
    double vulnerable_fraction_tau = 0.0;
};

struct VulnerabilityResult {
    double p_used = 0.0;
    std::vector<std::pair<std::string, MethodOutcome>> methods;  // in config order
    NodeInformationStats benchmark;
    WorseOffHistogram histogram;
    std::vector<std::string> files;
};

// Fig-style vulnerability pipeline: one ensemble per method plus the random
// benchmark, per-node nu/tau and effective ratios, CDFs, and the
// worse-off-in-n histogram, all under one master seed.
inline VulnerabilityResult cmd_vulnerability(const RunConfig& cfg) {
    cfg.validate();
    Graph g = detail::resolve_graph(cfg);
    const std::uint64_t cseed = detail::command_seed(cfg, cmd_tag::vulnerability);
    VulnerabilityResult result;
    CriticalEstimate estimate;
    result.p_used = detail::resolve_p(cfg, g, cmd_tag::vulnerability,
                                      cfg.auto_p ? &estimate : nullptr);
    const NodeId k = cfg.budget_nodes(g.node_count());
    const std::int64_t m = cfg.realizations_for(g.node_count());

    SimulationConfig sim;
    sim.p = result.p_used;
    sim.realizations = m;
    sim.threads = cfg.threads;

    // benchmark: the random-seeding process (or one fixed random set)
    sim.rng_seed = child_seed(cseed, stream::benchmark);
    CascadeStats bench_acc = [&] {
        if (cfg.benchmark_fixed) {
            const auto fixed = select_random(g, k, child_seed(cseed, stream::benchmark, 1));
            return simulate_ensemble(g, fixed.nodes, sim);
        }
        return simulate_random_process(g, k, sim);
    }();
    result.benchmark = compute_stats(bench_acc);

    // the methods under test
    std::vector<std::pair<std::string, SeedSet>> seed_sets;
    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
        const auto method = cfg.methods[mi];
        const std::uint64_t tie = child_seed(cseed, stream::heuristic, mi);
        switch (method) {
            case SeedMethod::HD: seed_sets.emplace_back("HD", select_hd(g, k, tie)); break;
            case SeedMethod::KC: seed_sets.emplace_back("KC", select_kc(g, k, tie)); break;
            case SeedMethod::DD:
                seed_sets.emplace_back(
                    "DD", select_dd(g, k, cfg.dd_p >= 0.0 ? cfg.dd_p : result.p_used, tie));
                break;
            case SeedMethod::CHD: seed_sets.emplace_back("CHD", select_chd(g, k, tie)); break;
            case SeedMethod::RANDOM:
                seed_sets.emplace_back("RANDOM", select_random(g, k, tie));
                break;
            case SeedMethod::GA: break;  // rejected by validate()
        }
    }
    if (!cfg.seeds_json.empty()) {
        std::ifstream in(cfg.seeds_json);
        if (!in) throw DataError("cannot open seed set file: " + cfg.seeds_json);
        nlohmann::json j;
        in >> j;
        SeedSet imported = seed_set_from_json(g, j);
        seed_sets.emplace_back(std::string("IMPORT_") + to_string(imported.method),
                               std::move(imported));
    }

    OutputDir out(cfg.out_dir);
    std::vector<EffectiveStats> effectives;
    for (std::size_t mi = 0; mi < seed_sets.size(); ++mi) {
        const auto& [name, seeds] = seed_sets[mi];
        sim.rng_seed = child_seed(cseed, stream::simulate, mi);
        const CascadeStats acc = simulate_ensemble(g, seeds.nodes, sim);
        MethodOutcome outcome;
        outcome.seeds = seeds;
        outcome.stats = compute_stats(acc);
        outcome.effective = compute_effective(outcome.stats, result.benchmark);
        const auto n = static_cast<double>(g.node_count());
        outcome.vulnerable_fraction_nu =
            static_cast<double>(outcome.effective.count_vulnerable_nu()) / n;
        outcome.vulnerable_fraction_tau =
            static_cast<double>(outcome.effective.count_vulnerable_tau()) / n;
        out.write_stream("stats_" + name + ".csv", [&](std::ostream& os) {
            write_node_stats_csv(os, g, outcome.stats, outcome.effective);
        });
        out.write_stream("cdf_" + name + ".csv", [&](std::ostream& os) {
            std::vector<std::pair<std::string, std::vector<double>>> series;
            series.emplace_back("nu", outcome.stats.nu);
            series.emplace_back("tau", outcome.stats.tau);
            std::vector<double> eff_nu, eff_tau;
            for (std::size_t i = 0; i < outcome.effective.eff_nu.size(); ++i) {
                if (!outcome.effective.undefined_nu[i])
                    eff_nu.push_back(outcome.effective.eff_nu[i]);
                if (!outcome.effective.undefined_tau[i])
                    eff_tau.push_back(outcome.effective.eff_tau[i]);
            }
            if (!eff_nu.empty()) series.emplace_back("eff_nu", std::move(eff_nu));
            if (!eff_tau.empty()) series.emplace_back("eff_tau", std::move(eff_tau));
            write_cdf_csv(os, series);
        });
        effectives.push_back(outcome.effective);
        result.methods.emplace_back(name, std::move(outcome));
        if (!cfg.trace_dump.empty() && mi == 0) {
            SimulationConfig trace_sim = sim;
            trace_sim.rng_seed = child_seed(cseed, stream::trace_dump);
            const auto traces = simulate_traces(g, seeds.nodes, trace_sim);
            out.write_stream(cfg.trace_dump,
                             [&](std::ostream& os) { write_trace_csv(os, traces); });
        }
    }
    result.histogram = worse_off_in_n(effectives);
    out.write_stream("histogram.csv",
                     [&](std::ostream& os) { write_histogram_csv(os, result.histogram); });
    out.write_stream("benchmark.csv", [&](std::ostream& os) {
        os << "label,nu,tau\n";
        for (NodeId v = 0; v < g.node_count(); ++v)
            os << g.label(v) << ',' << result.benchmark.nu[static_cast<std::size_t>(v)] << ','
               << result.benchmark.tau[static_cast<std::size_t>(v)] << '\n';
    });
    if (cfg.auto_p) {
        out.write_stream("susceptibility.csv", [&](std::ostream& os) {
            detail::write_susceptibility_csv(os, estimate);
        });
    }
    nlohmann::json summary;
    summary["p"] = result.p_used;
    summary["budget_nodes"] = k;
    summary["realizations"] = m;
    for (const auto& [name, outcome] : result.methods) {
        summary["methods"][name]["vulnerable_fraction_nu"] = outcome.vulnerable_fraction_nu;
        summary["methods"][name]["vulnerable_fraction_tau"] = outcome.vulnerable_fraction_tau;
        summary["methods"][name]["undefined_nu"] = outcome.effective.count_undefined_nu();
        summary["methods"][name]["undefined_tau"] = outcome.effective.count_undefined_tau();
    }
    out.write_json("summary.json", summary);
    out.finalize_manifest("vulnerability", cfg);
    result.files = out.files();
    return result;
}

struct OptimizeCmdResult {
    double p_used = 0.0;
    ParetoFront front;
    std::vector<CandidateEvaluation> front_eval;
    std::vector<std::pair<std::string, CandidateEvaluation>> heuristic_eval;
    std::vector<std::string> files;
};

// GA pipeline: high-M benchmark, optimize, numerical re-evaluation of the
// front, and the same evaluation for the HD/DD/CHD comparison sets.
inline OptimizeCmdResult cmd_optimize(const RunConfig& cfg) {
    cfg.validate();
    Graph g = detail::resolve_graph(cfg);
    const std::uint64_t cseed = detail::command_seed(cfg, cmd_tag::optimize);
    OptimizeCmdResult result;
    result.p_used = detail::resolve_p(cfg, g, cmd_tag::optimize);
    const NodeId k = cfg.budget_nodes(g.node_count());
    const std::int64_t m = cfg.realizations_for(g.node_count());

    SimulationConfig sim;
    sim.p = result.p_used;
    sim.realizations = m;
    sim.threads = cfg.threads;
    sim.rng_seed = child_seed(cseed, stream::benchmark);
    const NodeInformationStats benchmark = compute_stats(
        cfg.benchmark_fixed
            ? simulate_ensemble(
                  g, select_random(g, k, child_seed(cseed, stream::benchmark, 1)).nodes, sim)
            : simulate_random_process(g, k, sim));

    GAConfig ga = cfg.ga;
    ga.rng_seed = child_seed(cseed, stream::ga_vary);
    ga.threads = cfg.threads;
    ga.fairness = cfg.fairness;
    result.front = optimize(g, result.p_used, k, ga, benchmark);

    result.front_eval = evaluate_front_numerically(
        g, result.front.candidates, result.p_used, m, benchmark,
        child_seed(cseed, stream::numeric_eval), 10, cfg.fairness, cfg.threads);

    const auto heuristics = heuristic_seed_sets(g, k, result.p_used, ga.rng_seed);
    std::vector<ParetoCandidate> comparison;
    for (const auto& h : heuristics) {
        if (h.method == SeedMethod::KC) continue;  // far off the front; still reported by
                                                   // cmd_vulnerability
        ParetoCandidate c;
        c.seeds = detail::sorted_copy(h.nodes);
        comparison.push_back(std::move(c));
    }
    const auto heuristic_rows = evaluate_front_numerically(
        g, comparison, result.p_used, m, benchmark,
        child_seed(cseed, stream::numeric_eval, 1), 10, cfg.fairness, cfg.threads);
    std::size_t row = 0;
    for (const auto& h : heuristics) {
        if (h.method == SeedMethod::KC) continue;
        result.heuristic_eval.emplace_back(to_string(h.method), heuristic_rows[row++]);
    }

    OutputDir out(cfg.out_dir);
    out.write_json("front.json", front_to_json(g, result.front_eval, result.front.candidates));
    auto eval_csv = [](std::ostream& os, const std::string& id,
                       const CandidateEvaluation& ev) {
        os << id << ',' << ev.spread_mean << ',' << ev.spread_sd << ',' << ev.fair_mean << ','
           << ev.fair_sd << ',' << ev.realizations << ',' << ev.ensembles << '\n';
    };
    out.write_stream("front_eval.csv", [&](std::ostream& os) {
        os << "candidate,spread_mean,spread_sd,fair_mean,fair_sd,realizations,ensembles\n";
        for (std::size_t i = 0; i < result.front_eval.size(); ++i)
            eval_csv(os, std::to_string(i), result.front_eval[i]);
    });
    out.write_stream("heuristic_eval.csv", [&](std::ostream& os) {
        os << "method,spread_mean,spread_sd,fair_mean,fair_sd,realizations,ensembles\n";
        for (const auto& [name, ev] : result.heuristic_eval) eval_csv(os, name, ev);
    });
    nlohmann::json summary;
    summary["p"] = result.p_used;
    summary["budget_nodes"] = k;
    summary["front_size"] = result.front.candidates.size();
    out.write_json("summary.json", summary);
    out.finalize_manifest("optimize", cfg);
    result.files = out.files();
    return result;
}

struct SeedReportResult {
    std::vector<std::pair<std::string, SeedSet>> seed_sets;
    std::vector<std::pair<std::string, DispersionStats>> dispersion;
    std::vector<std::string> files;
};

// Seed sets for every configured method plus their dispersion statistic
// (mean BFS distance from the seed set to the rest of the network).
inline SeedReportResult cmd_seed_report(const RunConfig& cfg) {
    cfg.validate();
    Graph g = detail::resolve_graph(cfg);
    const std::uint64_t cseed = detail::command_seed(cfg, cmd_tag::seed_report);
    double p = cfg.dd_p;
    const bool needs_p =
        std::count(cfg.methods.begin(), cfg.methods.end(), SeedMethod::DD) > 0 && cfg.dd_p < 0.0;
    if (needs_p) p = detail::resolve_p(cfg, g, cmd_tag::seed_report);
    const NodeId k = cfg.budget_nodes(g.node_count());

    SeedReportResult result;
    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
        const auto method = cfg.methods[mi];
        const std::uint64_t tie = child_seed(cseed, stream::heuristic, mi);
        SeedSet s;
        switch (method) {
            case SeedMethod::HD: s = select_hd(g, k, tie); break;
            case SeedMethod::KC: s = select_kc(g, k, tie); break;
            case SeedMethod::DD: s = select_dd(g, k, p, tie); break;
            case SeedMethod::CHD: s = select_chd(g, k, tie); break;
            case SeedMethod::RANDOM: s = select_random(g, k, tie); break;
            case SeedMethod::GA: break;
        }
        result.seed_sets.emplace_back(to_string(method), std::move(s));
    }
    if (!cfg.seeds_json.empty()) {
        std::ifstream in(cfg.seeds_json);
        if (!in) throw DataError("cannot open seed set file: " + cfg.seeds_json);
        nlohmann::json j;
        in >> j;
        SeedSet imported = seed_set_from_json(g, j);
        result.seed_sets.emplace_back(std::string("IMPORT_") + to_string(imported.method),
                                      std::move(imported));
    }

    OutputDir out(cfg.out_dir);
    for (const auto& [name, seeds] : result.seed_sets) {
        result.dispersion.emplace_back(name, seed_dispersion(g, seeds));
        out.write_json("seeds_" + name + ".json", seed_set_to_json(g, seeds));
    }
    out.write_stream("dispersion.csv", [&](std::ostream& os) {
        os << "method,mean_distance,reachable,unreachable\n";
        for (const auto& [name, d] : result.dispersion)
            os << name << ',' << d.mean_distance << ',' << d.reachable << ',' << d.unreachable
               << '\n';
    });
    out.finalize_manifest("seed-report", cfg);
    result.files = out.files();
    return result;
}

}  // namespace fairseed
