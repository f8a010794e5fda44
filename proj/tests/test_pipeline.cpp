#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <sys/wait.h>

#include "fairseed/pipeline.hpp"

using namespace fairseed;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "fairseed_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunConfig small_generated(const std::string& out, std::uint64_t seed = 7) {
    RunConfig cfg;
    cfg.use_generator = true;
    cfg.gen.node_count = 250;
    cfg.gen.rng_seed = 13;
    cfg.auto_p = false;
    cfg.p = 0.1;
    cfg.realizations = 1500;
    cfg.budget_fraction = 0.02;
    cfg.out_dir = out;
    cfg.master_seed = seed;
    cfg.threads = 2;
    return cfg;
}

void check_manifest(const fs::path& dir) {
    const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
    std::set<std::string> listed;
    for (const auto& f : manifest.at("files")) {
        listed.insert(f.get<std::string>());
        REQUIRE(fs::exists(dir / f.get<std::string>()));
    }
    for (const auto& entry : fs::directory_iterator(dir))
        REQUIRE(listed.count(entry.path().filename().string()) == 1);
    // the embedded config must itself round-trip
    std::istringstream cfg_in(manifest.at("config").get<std::string>());
    REQUIRE_NOTHROW(RunConfig::parse(cfg_in));
}

}  // namespace

TEST_CASE("run config round-trips through serialize/parse", "[pipeline]") {
    RunConfig cfg;
    cfg.graph_path = "nets/village.txt";
    cfg.use_generator = false;
    cfg.gen.gamma = 2.7231234567890123;
    cfg.auto_p = false;
    cfg.p = 0.0691234567891234;
    cfg.budget_fraction = 0.013;
    cfg.realizations = 12345;
    cfg.methods = {SeedMethod::DD, SeedMethod::RANDOM};
    cfg.out_dir = "results/run1";
    cfg.master_seed = 987654321;
    cfg.giant_component = true;
    cfg.benchmark_fixed = true;
    cfg.dd_p = 0.05;
    cfg.fairness = FairnessMode::recency;
    cfg.pc_grid_points = 17;
    cfg.pc_runs_per_point = 333;
    cfg.pc_lo_factor = 0.37;
    cfg.pc_hi_factor = 4.2;
    cfg.threads = 3;
    cfg.ga.population_size = 24;
    cfg.ga.generations = 11;
    cfg.ga.crossover_prob = 0.77;
    cfg.ga.tabu_mutation_freq = 0.41;
    cfg.ga.random_mutation_replace_frac = 0.13;
    cfg.ga.tabu_neighborhood_frac = 0.19;
    cfg.ga.fitness_samples = 111;
    cfg.ga.tabu_samples = 17;
    cfg.ga.final_samples = 222;
    cfg.ga.frozen_eval = true;
    cfg.seeds_json = "seeds.json";
    cfg.trace_dump = "traces.csv";

    std::ostringstream out;
    cfg.serialize(out);
    std::istringstream in(out.str());
    const RunConfig back = RunConfig::parse(in);
    REQUIRE(back == cfg);
}

TEST_CASE("config parser rejects unknown keys and bad values", "[pipeline]") {
    std::istringstream unknown("bogus_key = 1\n");
    REQUIRE_THROWS_AS(RunConfig::parse(unknown), ConfigError);
    std::istringstream bad_value("p = not_a_number\n");
    REQUIRE_THROWS_AS(RunConfig::parse(bad_value), ConfigError);
    std::istringstream no_eq("p 0.5\n");
    REQUIRE_THROWS_AS(RunConfig::parse(no_eq), ConfigError);
    std::istringstream comments("# fine\n\np = 0.25\n");
    REQUIRE(RunConfig::parse(comments).p == 0.25);
}

TEST_CASE("config validation catches contradictions", "[pipeline]") {
    RunConfig cfg;  // no source selected
    REQUIRE_THROWS_AS(cfg.validate(), ConfigError);
    cfg.use_generator = true;
    cfg.graph_path = "x.txt";  // two sources
    REQUIRE_THROWS_AS(cfg.validate(), ConfigError);
    cfg.graph_path.clear();
    REQUIRE_NOTHROW(cfg.validate());
    cfg.budget_fraction = 0.0;
    REQUIRE_THROWS_AS(cfg.validate(), ConfigError);
    cfg.budget_fraction = 0.01;
    cfg.methods = {SeedMethod::GA};
    REQUIRE_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("generate writes reproducible edge lists with provenance", "[pipeline]") {
    const auto dir_a = fresh_dir("gen_a");
    RunConfig cfg;
    cfg.use_generator = true;
    cfg.gen.node_count = 1000;
    cfg.gen.gamma = 2.5;
    cfg.gen.rng_seed = 5;
    cfg.out_dir = dir_a.string();
    const auto result = cmd_generate(cfg);
    REQUIRE(fs::exists(result.edge_list));
    REQUIRE(result.provenance["realized"]["nodes"] == 1000);
    check_manifest(dir_a);

    std::ifstream in(result.edge_list);
    const Graph g = Graph::load_edge_list(in);
    REQUIRE(g.node_count() == 1000);
    REQUIRE(g.edge_count() == result.provenance["realized"]["edges"].get<std::int64_t>());

    const auto dir_b = fresh_dir("gen_b");
    cfg.out_dir = dir_b.string();
    cmd_generate(cfg);
    REQUIRE(slurp(dir_a / "edges.txt") == slurp(dir_b / "edges.txt"));

    cfg.gen.gamma = 0.5;
    REQUIRE_THROWS_AS(cmd_generate(cfg), ConfigError);
}

TEST_CASE("critical-p emits one curve row per grid point", "[pipeline]") {
    const auto dir = fresh_dir("critp");
    RunConfig cfg;
    cfg.use_generator = true;
    cfg.gen.node_count = 300;
    cfg.gen.rng_seed = 3;
    cfg.pc_grid_points = 10;
    cfg.pc_runs_per_point = 200;
    cfg.out_dir = dir.string();
    cfg.threads = 2;
    const auto result = cmd_critical_p(cfg);
    REQUIRE(result.estimate.curve.size() == 10);
    REQUIRE(result.pc >= result.estimate.curve.front().p);
    REQUIRE(result.pc <= result.estimate.curve.back().p);

    std::istringstream csv(slurp(dir / "susceptibility.csv"));
    std::string line;
    std::getline(csv, line);
    REQUIRE(line == "p,chi,mean_size");
    int rows = 0;
    while (std::getline(csv, line)) ++rows;
    REQUIRE(rows == 10);
    check_manifest(dir);
}

TEST_CASE("vulnerability pipeline emits consistent per-method outputs", "[pipeline]") {
    const auto dir = fresh_dir("vuln");
    RunConfig cfg = small_generated(dir.string());
    const auto result = cmd_vulnerability(cfg);
    REQUIRE(result.methods.size() == 4);
    check_manifest(dir);

    // seed nodes score eff_nu >= 1 in their own method
    for (const auto& [name, outcome] : result.methods) {
        for (NodeId seed : outcome.seeds.nodes) {
            const auto i = static_cast<std::size_t>(seed);
            REQUIRE(outcome.stats.nu[i] == 1.0);
            if (!outcome.effective.undefined_nu[i])
                REQUIRE(outcome.effective.eff_nu[i] >= 1.0);
        }
    }

    // histogram fractions sum to one
    double total = 0.0;
    for (double f : result.histogram.frac_nu) total += f;
    REQUIRE(total == Catch::Approx(1.0));
    REQUIRE(result.histogram.frac_nu.size() == 5);

    // per-method stats files exist with one row per node
    for (const auto& name : {"HD", "KC", "DD", "CHD"}) {
        std::istringstream csv(slurp(dir / (std::string("stats_") + name + ".csv")));
        std::string line;
        std::getline(csv, line);
        int rows = 0;
        while (std::getline(csv, line)) ++rows;
        REQUIRE(rows == 250);
    }
}

TEST_CASE("vulnerability reruns byte-identically under one master seed", "[pipeline]") {
    const auto dir_a = fresh_dir("repro_a");
    const auto dir_b = fresh_dir("repro_b");
    RunConfig cfg = small_generated(dir_a.string());
    cfg.realizations = 800;
    cmd_vulnerability(cfg);
    cfg.out_dir = dir_b.string();
    cmd_vulnerability(cfg);
    for (const auto& entry : fs::directory_iterator(dir_a)) {
        const auto name = entry.path().filename().string();
        if (name == "manifest.json") continue;  // embeds the out dir path
        REQUIRE(slurp(entry.path()) == slurp(dir_b / name));
    }
}

TEST_CASE("imported seed sets join the vulnerability run", "[pipeline]") {
    const auto seeds_dir = fresh_dir("import_seeds");
    RunConfig cfg = small_generated(seeds_dir.string());

    // build the graph once to export a custom seed set
    const Graph g = generate(cfg.gen);
    const SeedSet custom = select_random(g, 5, 99);
    const auto json = seed_set_to_json(g, custom);
    const auto seeds_file = seeds_dir / "custom.json";
    std::ofstream(seeds_file) << json.dump();

    const auto dir = fresh_dir("import_run");
    cfg.out_dir = dir.string();
    cfg.seeds_json = seeds_file.string();
    cfg.methods = {SeedMethod::HD};
    const auto result = cmd_vulnerability(cfg);
    REQUIRE(result.methods.size() == 2);
    REQUIRE(result.methods[1].first == "IMPORT_RANDOM");
    REQUIRE(result.methods[1].second.seeds.nodes == custom.nodes);
    check_manifest(dir);
}

TEST_CASE("optimize pipeline reports a non-dominated front and comparisons", "[pipeline]") {
    const auto dir = fresh_dir("opt");
    RunConfig cfg = small_generated(dir.string());
    cfg.realizations = 800;
    cfg.ga.population_size = 10;
    cfg.ga.generations = 3;
    cfg.ga.fitness_samples = 30;
    cfg.ga.tabu_samples = 8;
    cfg.ga.tabu_neighborhood_frac = 0.04;
    cfg.ga.final_samples = 60;
    const auto result = cmd_optimize(cfg);
    REQUIRE_FALSE(result.front.candidates.empty());
    for (std::size_t i = 0; i < result.front.candidates.size(); ++i)
        for (std::size_t j = 0; j < result.front.candidates.size(); ++j)
            if (i != j)
                REQUIRE_FALSE(
                    dominates(result.front.candidates[i], result.front.candidates[j]));
    REQUIRE(result.front_eval.size() == result.front.candidates.size());
    REQUIRE(result.heuristic_eval.size() == 3);  // HD, DD, CHD
    REQUIRE(result.heuristic_eval[0].first == "HD");
    check_manifest(dir);

    const auto front_json = nlohmann::json::parse(slurp(dir / "front.json"));
    REQUIRE(front_json.is_array());
    REQUIRE(front_json.size() == result.front.candidates.size());
    for (const auto& row : front_json) {
        REQUIRE(row.contains("nodes"));
        REQUIRE(row.contains("spread_mean"));
        REQUIRE(row.contains("fair_sd"));
        REQUIRE(row.contains("eval_samples"));
    }

    std::istringstream csv(slurp(dir / "heuristic_eval.csv"));
    std::string line;
    std::getline(csv, line);
    REQUIRE(line == "method,spread_mean,spread_sd,fair_mean,fair_sd,realizations,ensembles");
    int rows = 0;
    while (std::getline(csv, line)) ++rows;
    REQUIRE(rows == 3);
}

TEST_CASE("seed report covers dispersion statistics", "[pipeline]") {
    const auto dir = fresh_dir("rep");
    RunConfig cfg = small_generated(dir.string());
    cfg.budget_fraction = 1.0;  // all nodes -> dispersion 0
    cfg.methods = {SeedMethod::RANDOM};
    const auto result = cmd_seed_report(cfg);
    REQUIRE(result.dispersion.size() == 1);
    REQUIRE(result.dispersion[0].second.mean_distance == 0.0);
    check_manifest(dir);

    const auto dir2 = fresh_dir("rep2");
    cfg = small_generated(dir2.string());
    cfg.methods = {SeedMethod::HD, SeedMethod::CHD};
    const auto report = cmd_seed_report(cfg);
    REQUIRE(report.seed_sets.size() == 2);
    for (const auto& [name, d] : report.dispersion) REQUIRE(d.mean_distance > 0.0);
    REQUIRE(fs::exists(dir2 / "seeds_HD.json"));
    REQUIRE(fs::exists(dir2 / "seeds_CHD.json"));
    REQUIRE(fs::exists(dir2 / "dispersion.csv"));
}

TEST_CASE("cli binary maps error classes to exit codes", "[pipeline]") {
    const char* bin = std::getenv("FAIRSEED_BIN");
    if (bin == nullptr) {
        SUCCEED("FAIRSEED_BIN not set; smoke-tested via ctest cli_smoke instead");
        return;
    }
    const auto dir = fresh_dir("cli");
    const std::string base = std::string(bin);
    auto run = [&](const std::string& args) {
        const std::string cmd = base + " " + args + " > /dev/null 2>&1";
        const int status = std::system(cmd.c_str());
        return WEXITSTATUS(status);
    };
    REQUIRE(run("generate --gen-nodes 200 --gen-seed 1 --out " + (dir / "g").string()) == 0);
    REQUIRE(run("vulnerability --graph " + (dir / "g" / "edges.txt").string() +
                " --p 0.1 --realizations 300 --budget 0.02 --out " + (dir / "v").string()) == 0);
    // config error: no graph source
    REQUIRE(run("vulnerability --p 0.1 --out " + (dir / "x").string()) == 1);
    // data error: missing file
    REQUIRE(run("vulnerability --graph /nonexistent.txt --p 0.1 --out " +
                (dir / "y").string()) == 2);
    // config error: invalid generator exponent
    REQUIRE(run("generate --gen-nodes 10 --gen-gamma 0.2 --out " + (dir / "z").string()) == 1);
}
