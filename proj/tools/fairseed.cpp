// fairseed: influence-cascade simulation and fair seed-set optimization on
// undirected networks. Subcommands: generate, critical-p, vulnerability,
// optimize, seed-report. Exit codes: 0 ok, 1 config error, 2 data error,
// 3 runtime failure.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fairseed/pipeline.hpp"

namespace {

using namespace fairseed;

struct CliState {
    RunConfig cfg;
    std::string config_file;
};

void add_common_options(CLI::App* cmd, CliState& st) {
    cmd->add_option("--config", st.config_file, "key=value run-config file; flags override it");
    cmd->add_option("--graph", st.cfg.graph_path, "edge-list file (two labels per line)");
    cmd->add_flag("--generate-graph", st.cfg.use_generator,
                  "use the synthetic generator as the graph source");
    cmd->add_option("--gen-model", [&st](const std::vector<std::string>& v) {
        st.cfg.gen.model = degree_model_from_string(v.back());
        return true;
    }, "scale_free | normal_degree");
    cmd->add_option("--gen-nodes", st.cfg.gen.node_count, "generator: node count");
    cmd->add_option("--gen-gamma", st.cfg.gen.gamma, "generator: power-law exponent");
    cmd->add_option("--gen-mean-degree", st.cfg.gen.mean_degree, "generator: mean degree");
    cmd->add_option("--gen-degree-stddev", st.cfg.gen.degree_stddev,
                    "generator: degree std deviation");
    cmd->add_option("--gen-min-degree", st.cfg.gen.min_degree, "generator: minimum degree");
    cmd->add_option("--gen-seed", st.cfg.gen.rng_seed, "generator: RNG seed");
    auto* p_opt = cmd->add_option("--p", st.cfg.p, "activation probability");
    cmd->add_flag("--auto-p", "locate p at the susceptibility maximum");
    p_opt->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--budget", st.cfg.budget_fraction, "seed budget as a fraction of N");
    cmd->add_option("--realizations", st.cfg.realizations, "ensemble size M (0 = 10N)");
    cmd->add_option("--methods", [&st](const std::vector<std::string>& v) {
        st.cfg.methods.clear();
        std::stringstream ss(v.back());
        std::string tok;
        while (std::getline(ss, tok, ','))
            if (!tok.empty()) st.cfg.methods.push_back(seed_method_from_string(tok));
        return true;
    }, "comma-separated methods from HD,KC,DD,CHD,RANDOM");
    cmd->add_option("--out", st.cfg.out_dir, "output directory");
    cmd->add_option("--seed", st.cfg.master_seed, "master RNG seed");
    cmd->add_flag("--giant-component", st.cfg.giant_component,
                  "restrict to the largest connected component");
    cmd->add_flag("--benchmark-fixed", st.cfg.benchmark_fixed,
                  "benchmark with one fixed random seed set instead of per-run redraws");
    cmd->add_option("--dd-p", st.cfg.dd_p, "internal p for degree discount (<0: simulation p)");
    cmd->add_option("--fairness", [&st](const std::vector<std::string>& v) {
        st.cfg.fairness = fairness_mode_from_string(v.back());
        return true;
    }, "frequency | recency | conjunction");
    cmd->add_option("--pc-points", st.cfg.pc_grid_points, "susceptibility grid points");
    cmd->add_option("--pc-runs", st.cfg.pc_runs_per_point, "cascades per grid point");
    cmd->add_option("--pc-lo", st.cfg.pc_lo_factor, "grid low bound (x Molloy-Reed)");
    cmd->add_option("--pc-hi", st.cfg.pc_hi_factor, "grid high bound (x Molloy-Reed)");
    cmd->add_option("--threads", st.cfg.threads, "worker threads (0 = hardware)");
    cmd->add_option("--seeds-json", st.cfg.seeds_json, "additionally evaluate this seed-set JSON");
    cmd->add_option("--dump-traces", st.cfg.trace_dump,
                    "write per-realization cascade traces of the first method to this CSV");
    cmd->add_option("--ga-population", st.cfg.ga.population_size, "GA: population size");
    cmd->add_option("--ga-generations", st.cfg.ga.generations, "GA: generations");
    cmd->add_option("--ga-crossover", st.cfg.ga.crossover_prob, "GA: crossover probability");
    cmd->add_option("--ga-mutation", st.cfg.ga.mutation_prob, "GA: mutation probability");
    cmd->add_option("--ga-tabu-freq", st.cfg.ga.tabu_mutation_freq,
                    "GA: tabu-like share of mutations");
    cmd->add_option("--ga-replace-frac", st.cfg.ga.random_mutation_replace_frac,
                    "GA: fraction of seeds replaced by random mutation");
    cmd->add_option("--ga-neighborhood", st.cfg.ga.tabu_neighborhood_frac,
                    "GA: tabu neighborhood as a fraction of N");
    cmd->add_option("--ga-fitness-samples", st.cfg.ga.fitness_samples,
                    "GA: ICM realizations per fitness estimate");
    cmd->add_option("--ga-tabu-samples", st.cfg.ga.tabu_samples,
                    "GA: realizations per tabu screening estimate");
    cmd->add_option("--ga-final-samples", st.cfg.ga.final_samples,
                    "GA: realizations for the final front re-evaluation");
    cmd->add_flag("--ga-frozen-eval", st.cfg.ga.frozen_eval,
                  "GA: deterministic per-individual evaluation streams");
}

// Re-parse so that --config is applied first and explicit flags override it.
void apply_config_file(CLI::App* cmd, CliState& st) {
    if (st.config_file.empty()) return;
    std::ifstream in(st.config_file);
    if (!in) throw ConfigError("cannot open config file: " + st.config_file);
    RunConfig base = RunConfig::parse(in);
    // flags that were not given on the command line fall back to the file
    CliState fresh;
    fresh.cfg = base;
    auto keep = [&](const std::string& name) { return cmd->count(name) > 0; };
    if (!keep("--graph")) st.cfg.graph_path = base.graph_path;
    if (!keep("--generate-graph")) st.cfg.use_generator = base.use_generator;
    if (!keep("--gen-model")) st.cfg.gen.model = base.gen.model;
    if (!keep("--gen-nodes")) st.cfg.gen.node_count = base.gen.node_count;
    if (!keep("--gen-gamma")) st.cfg.gen.gamma = base.gen.gamma;
    if (!keep("--gen-mean-degree")) st.cfg.gen.mean_degree = base.gen.mean_degree;
    if (!keep("--gen-degree-stddev")) st.cfg.gen.degree_stddev = base.gen.degree_stddev;
    if (!keep("--gen-min-degree")) st.cfg.gen.min_degree = base.gen.min_degree;
    if (!keep("--gen-seed")) st.cfg.gen.rng_seed = base.gen.rng_seed;
    if (!keep("--p")) st.cfg.p = base.p;
    if (!keep("--auto-p") && !keep("--p")) st.cfg.auto_p = base.auto_p;
    if (!keep("--budget")) st.cfg.budget_fraction = base.budget_fraction;
    if (!keep("--realizations")) st.cfg.realizations = base.realizations;
    if (!keep("--methods")) st.cfg.methods = base.methods;
    if (!keep("--out")) st.cfg.out_dir = base.out_dir;
    if (!keep("--seed")) st.cfg.master_seed = base.master_seed;
    if (!keep("--giant-component")) st.cfg.giant_component = base.giant_component;
    if (!keep("--benchmark-fixed")) st.cfg.benchmark_fixed = base.benchmark_fixed;
    if (!keep("--dd-p")) st.cfg.dd_p = base.dd_p;
    if (!keep("--fairness")) st.cfg.fairness = base.fairness;
    if (!keep("--pc-points")) st.cfg.pc_grid_points = base.pc_grid_points;
    if (!keep("--pc-runs")) st.cfg.pc_runs_per_point = base.pc_runs_per_point;
    if (!keep("--pc-lo")) st.cfg.pc_lo_factor = base.pc_lo_factor;
    if (!keep("--pc-hi")) st.cfg.pc_hi_factor = base.pc_hi_factor;
    if (!keep("--threads")) st.cfg.threads = base.threads;
    if (!keep("--seeds-json")) st.cfg.seeds_json = base.seeds_json;
    if (!keep("--dump-traces")) st.cfg.trace_dump = base.trace_dump;
    if (!keep("--ga-population")) st.cfg.ga.population_size = base.ga.population_size;
    if (!keep("--ga-generations")) st.cfg.ga.generations = base.ga.generations;
    if (!keep("--ga-crossover")) st.cfg.ga.crossover_prob = base.ga.crossover_prob;
    if (!keep("--ga-mutation")) st.cfg.ga.mutation_prob = base.ga.mutation_prob;
    if (!keep("--ga-tabu-freq")) st.cfg.ga.tabu_mutation_freq = base.ga.tabu_mutation_freq;
    if (!keep("--ga-replace-frac"))
        st.cfg.ga.random_mutation_replace_frac = base.ga.random_mutation_replace_frac;
    if (!keep("--ga-neighborhood"))
        st.cfg.ga.tabu_neighborhood_frac = base.ga.tabu_neighborhood_frac;
    if (!keep("--ga-fitness-samples")) st.cfg.ga.fitness_samples = base.ga.fitness_samples;
    if (!keep("--ga-tabu-samples")) st.cfg.ga.tabu_samples = base.ga.tabu_samples;
    if (!keep("--ga-final-samples")) st.cfg.ga.final_samples = base.ga.final_samples;
    if (!keep("--ga-frozen-eval")) st.cfg.ga.frozen_eval = base.ga.frozen_eval;
}

void finish_config(CLI::App* cmd, CliState& st) {
    apply_config_file(cmd, st);
    if (cmd->count("--p") > 0) st.cfg.auto_p = false;
    if (cmd->count("--auto-p") > 0) st.cfg.auto_p = true;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"influence cascades, informational vulnerability, and fair seed optimization"};
    app.require_subcommand(1);
    CliState st;

    auto* gen = app.add_subcommand("generate", "write a synthetic network as an edge list");
    auto* crit = app.add_subcommand("critical-p", "locate the critical activation probability");
    auto* vuln = app.add_subcommand(
        "vulnerability", "per-node information stats and effective ratios per method");
    auto* opt = app.add_subcommand("optimize", "multi-objective (spread, fairness) seed search");
    auto* rep = app.add_subcommand("seed-report", "seed sets and their dispersion statistics");
    for (auto* cmd : {gen, crit, vuln, opt, rep}) add_common_options(cmd, st);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (gen->parsed()) {
            finish_config(gen, st);
            st.cfg.use_generator = true;  // generate always uses the generator
            st.cfg.graph_path.clear();
            const auto result = cmd_generate(st.cfg);
            std::cout << "wrote " << result.edge_list.string() << " ("
                      << result.provenance["realized"]["nodes"] << " nodes, "
                      << result.provenance["realized"]["edges"] << " edges)\n";
        } else if (crit->parsed()) {
            finish_config(crit, st);
            const auto result = cmd_critical_p(st.cfg);
            std::cout << "p_c = " << result.pc;
            if (result.molloy_reed > 0.0)
                std::cout << " (Molloy-Reed estimate " << result.molloy_reed << ")";
            std::cout << '\n';
        } else if (vuln->parsed()) {
            finish_config(vuln, st);
            const auto result = cmd_vulnerability(st.cfg);
            std::cout << "p = " << result.p_used << '\n';
            for (const auto& [name, outcome] : result.methods) {
                std::cout << name << ": vulnerable fraction nu=" << outcome.vulnerable_fraction_nu
                          << " tau=" << outcome.vulnerable_fraction_tau << '\n';
            }
        } else if (opt->parsed()) {
            finish_config(opt, st);
            const auto result = cmd_optimize(st.cfg);
            std::cout << "p = " << result.p_used << ", front size "
                      << result.front.candidates.size() << '\n';
            for (const auto& [name, ev] : result.heuristic_eval)
                std::cout << name << ": spread " << ev.spread_mean << ", non-vulnerable "
                          << ev.fair_mean << '\n';
        } else if (rep->parsed()) {
            finish_config(rep, st);
            const auto result = cmd_seed_report(st.cfg);
            for (const auto& [name, d] : result.dispersion)
                std::cout << name << ": mean seed distance " << d.mean_distance << " ("
                          << d.unreachable << " unreachable)\n";
        }
    } catch (const fairseed::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const fairseed::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
