#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "ga.hpp"
#include "generator.hpp"
#include "heuristics.hpp"
#include "metrics.hpp"

namespace fairseed {

// One experiment description shared by all subcommands: a single graph source
// (edge-list file or generator), the activation probability (explicit or
// located at the susceptibility maximum), seeding budget, ensemble size, and
// the GA settings. Serializes to a flat key=value file; parse(serialize(c))
// reproduces c exactly.
struct RunConfig {
    std::string graph_path;       // edge-list file; empty when generating
    bool use_generator = false;
    GeneratorConfig gen;

    bool auto_p = true;           // locate p at the susceptibility maximum
    double p = 0.1;               // used when auto_p is false
    double budget_fraction = 0.01;
    std::int64_t realizations = 0;  // 0 -> 10 * N
    std::vector<SeedMethod> methods = {SeedMethod::HD, SeedMethod::KC, SeedMethod::DD,
                                       SeedMethod::CHD};
    std::string out_dir = "out";
    std::uint64_t master_seed = 1;
    bool giant_component = false;   // restrict to the largest component
    bool benchmark_fixed = false;   // one fixed random seed set instead of redraws
    double dd_p = -1.0;             // DD's internal p; <0 -> simulation p
    FairnessMode fairness = FairnessMode::frequency;

    int pc_grid_points = 40;
    std::int64_t pc_runs_per_point = 2000;
    double pc_lo_factor = 0.2;      // grid bounds as multiples of the
    double pc_hi_factor = 5.0;      // Molloy-Reed estimate

    int threads = 0;
    GAConfig ga;
    std::string seeds_json;         // optional imported seed set (vulnerability)
    std::string trace_dump;         // optional cascade trace CSV (vulnerability)

    void validate() const {
        if (use_generator == !graph_path.empty())
            throw ConfigError("exactly one graph source required: --graph or generator");
        if (!auto_p && (p < 0.0 || p > 1.0)) throw ConfigError("p must lie in [0,1]");
        if (budget_fraction <= 0.0 || budget_fraction > 1.0)
            throw ConfigError("budget must lie in (0,1]");
        if (realizations < 0) throw ConfigError("realizations must be >= 0");
        if (methods.empty()) throw ConfigError("at least one method required");
        for (auto m : methods)
            if (m == SeedMethod::GA)
                throw ConfigError("GA is produced by the optimize command, not a selector");
        if (pc_grid_points < 3) throw ConfigError("pc.points must be >= 3");
        if (pc_runs_per_point < 1) throw ConfigError("pc.runs must be >= 1");
        if (pc_lo_factor <= 0.0 || pc_hi_factor <= pc_lo_factor)
            throw ConfigError("pc grid factors must satisfy 0 < lo < hi");
        if (dd_p > 1.0) throw ConfigError("dd_p must lie in [0,1] (or negative for default)");
        if (use_generator) gen.validate();
        ga.validate();
    }

    NodeId budget_nodes(NodeId n) const {
        const auto k = static_cast<NodeId>(std::llround(budget_fraction * double(n)));
        return std::max<NodeId>(1, std::min(n, k));
    }

    std::int64_t realizations_for(NodeId n) const {
        return realizations > 0 ? realizations : 10 * static_cast<std::int64_t>(n);
    }

    std::string methods_string() const {
        std::string s;
        for (const auto m : methods) {
            if (!s.empty()) s += ',';
            s += to_string(m);
        }
        return s;
    }

    bool operator==(const RunConfig& o) const {
        return graph_path == o.graph_path && use_generator == o.use_generator &&
               gen.model == o.gen.model && gen.node_count == o.gen.node_count &&
               gen.gamma == o.gen.gamma && gen.mean_degree == o.gen.mean_degree &&
               gen.degree_stddev == o.gen.degree_stddev && gen.min_degree == o.gen.min_degree &&
               gen.rng_seed == o.gen.rng_seed && auto_p == o.auto_p && p == o.p &&
               budget_fraction == o.budget_fraction && realizations == o.realizations &&
               methods == o.methods && out_dir == o.out_dir && master_seed == o.master_seed &&
               giant_component == o.giant_component && benchmark_fixed == o.benchmark_fixed &&
               dd_p == o.dd_p && fairness == o.fairness && pc_grid_points == o.pc_grid_points &&
               pc_runs_per_point == o.pc_runs_per_point && pc_lo_factor == o.pc_lo_factor &&
               pc_hi_factor == o.pc_hi_factor && threads == o.threads &&
               ga.population_size == o.ga.population_size &&
               ga.generations == o.ga.generations && ga.crossover_prob == o.ga.crossover_prob &&
               ga.mutation_prob == o.ga.mutation_prob &&
               ga.tabu_mutation_freq == o.ga.tabu_mutation_freq &&
               ga.random_mutation_replace_frac == o.ga.random_mutation_replace_frac &&
               ga.tabu_neighborhood_frac == o.ga.tabu_neighborhood_frac &&
               ga.fitness_samples == o.ga.fitness_samples &&
               ga.tabu_samples == o.ga.tabu_samples && ga.final_samples == o.ga.final_samples &&
               ga.frozen_eval == o.ga.frozen_eval && seeds_json == o.seeds_json &&
               trace_dump == o.trace_dump;
    }

    void serialize(std::ostream& out) const;
    static RunConfig parse(std::istream& in);
};

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("config key '" + key + "': expected true/false, got '" + v + "'");
}

inline double parse_double(const std::string& v, const std::string& key) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected a number, got '" + v + "'");
    }
}

inline std::int64_t parse_int(const std::string& v, const std::string& key) {
    try {
        std::size_t used = 0;
        const std::int64_t x = std::stoll(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected an integer, got '" + v + "'");
    }
}

inline std::uint64_t parse_uint(const std::string& v, const std::string& key) {
    try {
        std::size_t used = 0;
        const std::uint64_t x = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected an integer, got '" + v + "'");
    }
}

}  // namespace detail

inline void RunConfig::serialize(std::ostream& out) const {
    using detail::format_double;
    out << "graph = " << graph_path << '\n';
    out << "use_generator = " << (use_generator ? "true" : "false") << '\n';
    out << "gen.model = " << to_string(gen.model) << '\n';
    out << "gen.nodes = " << gen.node_count << '\n';
    out << "gen.gamma = " << format_double(gen.gamma) << '\n';
    out << "gen.mean_degree = " << format_double(gen.mean_degree) << '\n';
    out << "gen.degree_stddev = " << format_double(gen.degree_stddev) << '\n';
    out << "gen.min_degree = " << gen.min_degree << '\n';
    out << "gen.seed = " << gen.rng_seed << '\n';
    out << "auto_p = " << (auto_p ? "true" : "false") << '\n';
    out << "p = " << format_double(p) << '\n';
    out << "budget = " << format_double(budget_fraction) << '\n';
    out << "realizations = " << realizations << '\n';
    out << "methods = " << methods_string() << '\n';
    out << "out = " << out_dir << '\n';
    out << "seed = " << master_seed << '\n';
    out << "giant_component = " << (giant_component ? "true" : "false") << '\n';
    out << "benchmark_fixed = " << (benchmark_fixed ? "true" : "false") << '\n';
    out << "dd_p = " << format_double(dd_p) << '\n';
    out << "fairness = " << to_string(fairness) << '\n';
    out << "pc.points = " << pc_grid_points << '\n';
    out << "pc.runs = " << pc_runs_per_point << '\n';
    out << "pc.lo = " << format_double(pc_lo_factor) << '\n';
    out << "pc.hi = " << format_double(pc_hi_factor) << '\n';
    out << "threads = " << threads << '\n';
    out << "ga.population = " << ga.population_size << '\n';
    out << "ga.generations = " << ga.generations << '\n';
    out << "ga.crossover_prob = " << format_double(ga.crossover_prob) << '\n';
    out << "ga.mutation_prob = " << format_double(ga.mutation_prob) << '\n';
    out << "ga.tabu_freq = " << format_double(ga.tabu_mutation_freq) << '\n';
    out << "ga.replace_frac = " << format_double(ga.random_mutation_replace_frac) << '\n';
    out << "ga.neighborhood_frac = " << format_double(ga.tabu_neighborhood_frac) << '\n';
    out << "ga.fitness_samples = " << ga.fitness_samples << '\n';
    out << "ga.tabu_samples = " << ga.tabu_samples << '\n';
    out << "ga.final_samples = " << ga.final_samples << '\n';
    out << "ga.frozen_eval = " << (ga.frozen_eval ? "true" : "false") << '\n';
    out << "seeds_json = " << seeds_json << '\n';
    out << "trace_dump = " << trace_dump << '\n';
}

inline RunConfig RunConfig::parse(std::istream& in) {
    using namespace detail;
    RunConfig cfg;
    std::string line;
    std::int64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string trimmed = trim(line);
        if (trimmed.empty() || trimmed[0] == '#') continue;
        const auto eq = trimmed.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(trimmed.substr(0, eq));
        const std::string value = trim(trimmed.substr(eq + 1));
        if (key == "graph") cfg.graph_path = value;
        else if (key == "use_generator") cfg.use_generator = parse_bool(value, key);
        else if (key == "gen.model") cfg.gen.model = degree_model_from_string(value);
        else if (key == "gen.nodes") cfg.gen.node_count = static_cast<NodeId>(parse_int(value, key));
        else if (key == "gen.gamma") cfg.gen.gamma = parse_double(value, key);
        else if (key == "gen.mean_degree") cfg.gen.mean_degree = parse_double(value, key);
        else if (key == "gen.degree_stddev") cfg.gen.degree_stddev = parse_double(value, key);
        else if (key == "gen.min_degree") cfg.gen.min_degree = static_cast<NodeId>(parse_int(value, key));
        else if (key == "gen.seed") cfg.gen.rng_seed = parse_uint(value, key);
        else if (key == "auto_p") cfg.auto_p = parse_bool(value, key);
        else if (key == "p") cfg.p = parse_double(value, key);
        else if (key == "budget") cfg.budget_fraction = parse_double(value, key);
        else if (key == "realizations") cfg.realizations = parse_int(value, key);
        else if (key == "methods") {
            cfg.methods.clear();
            std::stringstream ss(value);
            std::string tok;
            while (std::getline(ss, tok, ',')) {
                tok = trim(tok);
                if (!tok.empty()) cfg.methods.push_back(seed_method_from_string(tok));
            }
        } else if (key == "out") cfg.out_dir = value;
        else if (key == "seed") cfg.master_seed = parse_uint(value, key);
        else if (key == "giant_component") cfg.giant_component = parse_bool(value, key);
        else if (key == "benchmark_fixed") cfg.benchmark_fixed = parse_bool(value, key);
        else if (key == "dd_p") cfg.dd_p = parse_double(value, key);
        else if (key == "fairness") cfg.fairness = fairness_mode_from_string(value);
        else if (key == "pc.points") cfg.pc_grid_points = static_cast<int>(parse_int(value, key));
        else if (key == "pc.runs") cfg.pc_runs_per_point = parse_int(value, key);
        else if (key == "pc.lo") cfg.pc_lo_factor = parse_double(value, key);
        else if (key == "pc.hi") cfg.pc_hi_factor = parse_double(value, key);
        else if (key == "threads") cfg.threads = static_cast<int>(parse_int(value, key));
        else if (key == "ga.population") cfg.ga.population_size = static_cast<int>(parse_int(value, key));
        else if (key == "ga.generations") cfg.ga.generations = static_cast<int>(parse_int(value, key));
        else if (key == "ga.crossover_prob") cfg.ga.crossover_prob = parse_double(value, key);
        else if (key == "ga.mutation_prob") cfg.ga.mutation_prob = parse_double(value, key);
        else if (key == "ga.tabu_freq") cfg.ga.tabu_mutation_freq = parse_double(value, key);
        else if (key == "ga.replace_frac") cfg.ga.random_mutation_replace_frac = parse_double(value, key);
        else if (key == "ga.neighborhood_frac") cfg.ga.tabu_neighborhood_frac = parse_double(value, key);
        else if (key == "ga.fitness_samples") cfg.ga.fitness_samples = parse_int(value, key);
        else if (key == "ga.tabu_samples") cfg.ga.tabu_samples = parse_int(value, key);
        else if (key == "ga.final_samples") cfg.ga.final_samples = parse_int(value, key);
        else if (key == "ga.frozen_eval") cfg.ga.frozen_eval = parse_bool(value, key);
        else if (key == "seeds_json") cfg.seeds_json = value;
        else if (key == "trace_dump") cfg.trace_dump = value;
        else throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    return cfg;
}

}  // namespace fairseed
