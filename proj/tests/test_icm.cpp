#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "fairseed/generator.hpp"
#include "fairseed/graph.hpp"
#include "fairseed/icm.hpp"
#include "oracles.hpp"

using namespace fairseed;

namespace {

Graph path4() { return Graph(4, {{0, 1}, {1, 2}, {2, 3}}); }

Graph random_small(Engine& rng, NodeId max_nodes = 8, int max_edges = 12) {
    const NodeId n =
        static_cast<NodeId>(std::uniform_int_distribution<int>(4, max_nodes)(rng));
    std::vector<std::pair<NodeId, NodeId>> all;
    for (NodeId i = 0; i < n; ++i)
        for (NodeId j = i + 1; j < n; ++j) all.emplace_back(i, j);
    std::shuffle(all.begin(), all.end(), rng);
    const int e = std::uniform_int_distribution<int>(1, std::min<int>(max_edges, all.size()))(rng);
    all.resize(static_cast<std::size_t>(e));
    return Graph(n, std::move(all));
}

}  // namespace

TEST_CASE("p=0 activates exactly the seed set", "[icm]") {
    const Graph g = path4();
    Engine rng = make_engine(1);
    const NodeId seeds[] = {1, 3};
    const CascadeTrace trace = run_cascade(g, seeds, 0.0, rng);
    REQUIRE(trace.cascade_size == 2);
    REQUIRE(trace.activated == std::vector<std::uint8_t>{0, 1, 0, 1});
    REQUIRE(trace.activation_time[1] == 0);
    REQUIRE(trace.activation_time[3] == 0);
    REQUIRE(trace.activation_time[0] == kUnreached);
}

TEST_CASE("p=1 reaches seed components at BFS distance", "[icm]") {
    const Graph g(6, {{0, 1}, {1, 2}, {2, 3}, {4, 5}});
    Engine rng = make_engine(2);
    const NodeId seeds[] = {0};
    const CascadeTrace trace = run_cascade(g, seeds, 1.0, rng);
    const auto dist = bfs_distances(g, seeds);
    for (NodeId v = 0; v < g.node_count(); ++v) {
        if (dist[v] == kUnreached) {
            REQUIRE_FALSE(trace.activated[v]);
        } else {
            REQUIRE(trace.activated[v]);
            REQUIRE(trace.activation_time[v] == dist[v]);
        }
    }
    REQUIRE(trace.cascade_size == 4);
}

TEST_CASE("path expected size matches the enumeration value 1.75", "[icm]") {
    const Graph g(3, {{0, 1}, {1, 2}});
    const NodeId seeds[] = {0};
    const auto exact = oracle::enumerate_icm(g, seeds, 0.5);
    REQUIRE(exact.expected_size == Catch::Approx(1.75).margin(1e-12));

    SimulationConfig cfg;
    cfg.p = 0.5;
    cfg.realizations = 100000;
    cfg.rng_seed = 404;
    const CascadeStats stats = simulate_ensemble(g, seeds, cfg);
    const double mean = stats.mean_size();
    const double var =
        stats.size_sq_sum / double(cfg.realizations) - mean * mean;
    const double se = std::sqrt(var / double(cfg.realizations));
    REQUIRE(std::abs(mean - 1.75) <= 3.0 * se);
}

TEST_CASE("monte carlo agrees with the edge-outcome enumeration", "[icm]") {
    Engine gen = make_engine(90);
    for (int trial = 0; trial < 3; ++trial) {
        const Graph g = random_small(gen);
        const auto seeds = sample_distinct(g.node_count(), 2, gen);
        for (const double p : {0.3, 0.7}) {
            const auto exact = oracle::enumerate_icm(g, seeds, p);
            SimulationConfig cfg;
            cfg.p = p;
            cfg.realizations = 40000;
            cfg.rng_seed = child_seed(55, trial);
            const CascadeStats stats = simulate_ensemble(g, seeds, cfg);
            const double mean = stats.mean_size();
            const double var = stats.size_sq_sum / double(cfg.realizations) - mean * mean;
            const double se = std::sqrt(std::max(var, 1e-12) / double(cfg.realizations));
            REQUIRE(std::abs(mean - exact.expected_size) <= 3.5 * se + 1e-9);
        }
    }
}

TEST_CASE("traces satisfy the causality invariant", "[icm]") {
    Engine gen = make_engine(8);
    const Graph g = random_small(gen, 8, 12);
    SimulationConfig cfg;
    cfg.p = 0.5;
    cfg.realizations = 200;
    cfg.rng_seed = 77;
    const auto seeds = sample_distinct(g.node_count(), 2, gen);
    for (const auto& trace : simulate_traces(g, seeds, cfg)) {
        for (NodeId v = 0; v < g.node_count(); ++v) {
            if (!trace.activated[v]) {
                REQUIRE(trace.activation_time[v] == kUnreached);
                continue;
            }
            const auto t = trace.activation_time[v];
            if (t == 0) continue;  // seed
            bool has_earlier_neighbor = false;
            for (NodeId u : g.neighbors(v))
                has_earlier_neighbor |=
                    trace.activated[u] && trace.activation_time[u] == t - 1;
            REQUIRE(has_earlier_neighbor);
        }
    }
}

TEST_CASE("single realization equals run_cascade on the same child stream", "[icm]") {
    const Graph g = path4();
    const NodeId seeds[] = {0};
    SimulationConfig cfg;
    cfg.p = 0.5;
    cfg.realizations = 1;
    cfg.rng_seed = 31;
    const auto traces = simulate_traces(g, seeds, cfg);
    Engine rng = make_engine(child_seed(cfg.rng_seed, stream::simulate, 0));
    const CascadeTrace direct = run_cascade(g, seeds, cfg.p, rng);
    REQUIRE(traces.size() == 1);
    REQUIRE(traces[0].activated == direct.activated);
    REQUIRE(traces[0].activation_time == direct.activation_time);
}

TEST_CASE("p=1 makes all traces identical", "[icm]") {
    const Graph g = path4();
    const NodeId seeds[] = {1};
    SimulationConfig cfg;
    cfg.p = 1.0;
    cfg.realizations = 20;
    cfg.rng_seed = 5;
    const auto traces = simulate_traces(g, seeds, cfg);
    for (const auto& trace : traces) {
        REQUIRE(trace.activated == traces.front().activated);
        REQUIRE(trace.activation_time == traces.front().activation_time);
    }
}

TEST_CASE("aggregates are identical for any worker count", "[icm]") {
    GeneratorConfig gen_cfg;
    gen_cfg.node_count = 300;
    gen_cfg.rng_seed = 6;
    const Graph g = generate(gen_cfg);
    Engine seed_rng = make_engine(4);
    const auto seeds = sample_distinct(g.node_count(), 5, seed_rng);
    SimulationConfig cfg;
    cfg.p = 0.15;
    cfg.realizations = 4000;
    cfg.rng_seed = 2024;
    std::vector<CascadeStats> runs;
    for (int threads : {1, 2, 4}) {
        cfg.threads = threads;
        runs.push_back(simulate_ensemble(g, seeds, cfg));
    }
    for (const auto& stats : runs) {
        REQUIRE(stats.hits == runs.front().hits);
        REQUIRE(stats.inv_time_sum == runs.front().inv_time_sum);
        REQUIRE(stats.size_sum == runs.front().size_sum);
        REQUIRE(stats.size_sq_sum == runs.front().size_sq_sum);
    }
}

TEST_CASE("mean cascade size is monotone in p", "[icm]") {
    const Graph g(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 2}});
    const NodeId seeds[] = {0};
    SimulationConfig cfg;
    cfg.realizations = 20000;
    cfg.rng_seed = 9;
    double prev_mean = 0.0, prev_se = 0.0;
    for (const double p : {0.2, 0.4, 0.6, 0.8}) {
        cfg.p = p;
        const CascadeStats stats = simulate_ensemble(g, seeds, cfg);
        const double mean = stats.mean_size();
        const double var = stats.size_sq_sum / double(cfg.realizations) - mean * mean;
        const double se = std::sqrt(std::max(var, 0.0) / double(cfg.realizations));
        REQUIRE(mean + 3.0 * (se + prev_se) >= prev_mean);
        prev_mean = mean;
        prev_se = se;
    }
}

TEST_CASE("random benchmark process draws fresh seeds per realization", "[icm]") {
    const Graph g(4, {{0, 1}, {2, 3}});
    SimulationConfig cfg;
    cfg.p = 0.0;
    cfg.realizations = 20000;
    cfg.rng_seed = 12;
    const CascadeStats stats = simulate_random_process(g, 1, cfg);
    // with p=0 and k=1 every node is hit exactly when it is drawn: ~uniform
    for (NodeId v = 0; v < g.node_count(); ++v) {
        const double freq = double(stats.hits[v]) / double(cfg.realizations);
        REQUIRE(freq == Catch::Approx(0.25).margin(0.02));
    }
    REQUIRE(stats.size_sum == double(cfg.realizations));
}

TEST_CASE("susceptibility estimation brackets the percolation threshold", "[icm]") {
    const Graph k4(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
    REQUIRE(molloy_reed_pc(k4) == Catch::Approx(0.5));

    GeneratorConfig gen_cfg;
    gen_cfg.model = DegreeModel::normal_degree;
    gen_cfg.node_count = 600;
    gen_cfg.mean_degree = 4.0;
    gen_cfg.degree_stddev = 2.0;
    gen_cfg.min_degree = 1;
    gen_cfg.rng_seed = 21;
    const Graph g = generate(gen_cfg);
    const auto grid = default_p_grid(g, 12, 0.3, 3.0);
    const auto est = estimate_critical_p(g, grid, 400, 3);
    REQUIRE(est.curve.size() == grid.size());
    for (const auto& pt : est.curve) {
        REQUIRE(std::isfinite(pt.chi));
        REQUIRE(pt.chi > 0.0);
        REQUIRE(pt.mean_size >= 1.0);
    }
    REQUIRE(est.pc >= grid.front());
    REQUIRE(est.pc <= grid.back());
}

TEST_CASE("critical-p estimation rejects bad inputs", "[icm]") {
    const Graph g(4, {{0, 1}, {1, 2}, {2, 3}});
    const double two[] = {0.1, 0.2};
    REQUIRE_THROWS_AS(estimate_critical_p(g, two, 10, 0), ConfigError);
    const double unsorted[] = {0.3, 0.2, 0.4};
    REQUIRE_THROWS_AS(estimate_critical_p(g, unsorted, 10, 0), ConfigError);
    const double ok[] = {0.1, 0.2, 0.3};
    const Graph degenerate(1, {});
    REQUIRE_THROWS_AS(estimate_critical_p(degenerate, ok, 10, 0), DataError);
    REQUIRE_THROWS_AS(estimate_critical_p(g, {}, 10, 0), ConfigError);
}

TEST_CASE("trace csv has one row per (realization, node)", "[icm]") {
    const Graph g = path4();
    const NodeId seeds[] = {0};
    SimulationConfig cfg;
    cfg.p = 0.5;
    cfg.realizations = 3;
    cfg.rng_seed = 77;
    const auto traces = simulate_traces(g, seeds, cfg);
    std::ostringstream out;
    write_trace_csv(out, traces);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    REQUIRE(line == "realization,node,activated,activation_time");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    REQUIRE(rows == 3 * 4);
}
