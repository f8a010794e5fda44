#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>
#include <sstream>

#include "fairseed/generator.hpp"
#include "fairseed/graph.hpp"
#include "fairseed/rng.hpp"

using namespace fairseed;

namespace {

Graph from_text(const std::string& text, LoadReport* report = nullptr) {
    std::istringstream in(text);
    return Graph::load_edge_list(in, report);
}

// full adjacency scan: symmetry, no self-loops, no duplicates, edge count
void check_invariants(const Graph& g) {
    std::int64_t half_edges = 0;
    for (NodeId v = 0; v < g.node_count(); ++v) {
        const auto nbrs = g.neighbors(v);
        half_edges += static_cast<std::int64_t>(nbrs.size());
        for (std::size_t i = 0; i < nbrs.size(); ++i) {
            REQUIRE(nbrs[i] != v);
            if (i > 0) REQUIRE(nbrs[i] > nbrs[i - 1]);  // sorted implies no duplicates
            const auto back = g.neighbors(nbrs[i]);
            REQUIRE(std::binary_search(back.begin(), back.end(), v));
        }
    }
    REQUIRE(half_edges == 2 * g.edge_count());
}

Graph random_graph(NodeId n, double edge_prob, Engine& rng) {
    std::vector<std::pair<NodeId, NodeId>> edges;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (NodeId i = 0; i < n; ++i)
        for (NodeId j = i + 1; j < n; ++j)
            if (unit(rng) < edge_prob) edges.emplace_back(i, j);
    return Graph(n, std::move(edges));
}

}  // namespace

TEST_CASE("edge list loading maps labels in first-appearance order", "[graph]") {
    const Graph g = from_text("0 1\n1 2\n");
    REQUIRE(g.node_count() == 3);
    REQUIRE(g.edge_count() == 2);
    REQUIRE(g.degree(1) == 2);
    REQUIRE(g.label(0) == "0");
    REQUIRE(g.id_of("2") == NodeId{2});
    check_invariants(g);

    const Graph h = from_text("x y\ny z\n");
    REQUIRE(h.label(0) == "x");
    REQUIRE(h.label(1) == "y");
    REQUIRE(h.label(2) == "z");
}

TEST_CASE("duplicate edges and self-loops are dropped and counted", "[graph]") {
    LoadReport report;
    const Graph g = from_text("a b\nb a\na a\n", &report);
    REQUIRE(g.node_count() == 2);
    REQUIRE(g.edge_count() == 1);
    REQUIRE(report.duplicate_edges == 1);
    REQUIRE(report.self_loops == 1);
    REQUIRE(report.lines == 3);
    check_invariants(g);
}

TEST_CASE("comments and blank lines are skipped", "[graph]") {
    const Graph g = from_text("# header\n\na b\n  \nb c\n");
    REQUIRE(g.node_count() == 3);
    REQUIRE(g.edge_count() == 2);
}

TEST_CASE("malformed lines raise parse errors with the line number", "[graph]") {
    REQUIRE_THROWS_MATCHES(from_text("0 1\n2\n"), DataError,
                           Catch::Matchers::MessageMatches(
                               Catch::Matchers::ContainsSubstring("line 2")));
    REQUIRE_THROWS_AS(from_text("a b c\n"), DataError);
    REQUIRE_THROWS_AS(from_text(""), DataError);
    REQUIRE_THROWS_AS(from_text("# only comments\n"), DataError);
}

TEST_CASE("degree basics", "[graph]") {
    const Graph path = from_text("0 1\n1 2\n");
    REQUIRE(path.degree(1) == 2);
    REQUIRE(path.degree(0) == 1);

    const Graph with_isolated(3, {{0, 1}});
    REQUIRE(with_isolated.degree(2) == 0);

    std::vector<std::pair<NodeId, NodeId>> star_edges;
    for (NodeId leaf = 1; leaf <= 7; ++leaf) star_edges.emplace_back(0, leaf);
    const Graph star(8, std::move(star_edges));
    REQUIRE(star.degree(0) == 7);
}

TEST_CASE("core decomposition on canonical shapes", "[graph]") {
    const Graph triangle = from_text("0 1\n1 2\n2 0\n");
    for (NodeId v = 0; v < 3; ++v) REQUIRE(core_decomposition(triangle)[v] == 2);

    const Graph star = from_text("c a\nc b\nc d\n");
    const auto star_core = core_decomposition(star);
    for (NodeId v = 0; v < star.node_count(); ++v) REQUIRE(star_core[v] == 1);

    // K5 on 0..4 plus pendant node 5
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId i = 0; i < 5; ++i)
        for (NodeId j = i + 1; j < 5; ++j) edges.emplace_back(i, j);
    edges.emplace_back(0, 5);
    const Graph clique(6, std::move(edges));
    const auto core = core_decomposition(clique);
    for (NodeId v = 0; v < 5; ++v) REQUIRE(core[v] == 4);
    REQUIRE(core[5] == 1);
}

TEST_CASE("core numbers are invariant under node relabeling", "[graph]") {
    Engine rng = make_engine(42);
    for (int trial = 0; trial < 20; ++trial) {
        const NodeId n = 12;
        const Graph g = random_graph(n, 0.3, rng);
        std::vector<NodeId> perm(static_cast<std::size_t>(n));
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<std::pair<NodeId, NodeId>> edges;
        for (NodeId v = 0; v < n; ++v)
            for (NodeId u : g.neighbors(v))
                if (v < u)
                    edges.emplace_back(perm[static_cast<std::size_t>(v)],
                                       perm[static_cast<std::size_t>(u)]);
        const Graph h(n, std::move(edges));
        const auto core_g = core_decomposition(g);
        const auto core_h = core_decomposition(h);
        for (NodeId v = 0; v < n; ++v)
            REQUIRE(core_g[static_cast<std::size_t>(v)] ==
                    core_h[static_cast<std::size_t>(perm[static_cast<std::size_t>(v)])]);
    }
}

TEST_CASE("bfs distances from single and multiple sources", "[graph]") {
    const Graph path = from_text("0 1\n1 2\n2 3\n");
    const NodeId one[] = {0};
    REQUIRE(bfs_distances(path, one) == std::vector<std::int32_t>{0, 1, 2, 3});
    const NodeId both[] = {0, 3};
    REQUIRE(bfs_distances(path, both) == std::vector<std::int32_t>{0, 1, 1, 0});

    const Graph split(4, {{0, 1}, {2, 3}});
    const auto dist = bfs_distances(split, one);
    REQUIRE(dist[1] == 1);
    REQUIRE(dist[2] == kUnreached);
    REQUIRE(dist[3] == kUnreached);

    REQUIRE_THROWS_AS(bfs_distances(path, std::span<const NodeId>{}), std::invalid_argument);
}

TEST_CASE("bfs satisfies the triangle step property", "[graph]") {
    Engine rng = make_engine(7);
    for (int trial = 0; trial < 10; ++trial) {
        const Graph g = random_graph(30, 0.1, rng);
        const auto sources = sample_distinct(g.node_count(), 3, rng);
        const auto dist = bfs_distances(g, sources);
        for (NodeId v = 0; v < g.node_count(); ++v) {
            const auto d = dist[static_cast<std::size_t>(v)];
            if (d <= 0) continue;
            bool has_closer = false;
            for (NodeId u : g.neighbors(v))
                has_closer |= dist[static_cast<std::size_t>(u)] == d - 1;
            REQUIRE(has_closer);
        }
    }
}

TEST_CASE("largest component extraction keeps labels", "[graph]") {
    const Graph g = from_text("a b\nb c\nx y\n");
    const Graph giant = largest_component(g);
    REQUIRE(giant.node_count() == 3);
    REQUIRE(giant.edge_count() == 2);
    REQUIRE(giant.id_of("a").has_value());
    REQUIRE_FALSE(giant.id_of("x").has_value());
    check_invariants(giant);
}

TEST_CASE("edge list write/reload round-trips structure", "[graph]") {
    Engine rng = make_engine(3);
    const Graph g = random_graph(25, 0.15, rng);
    std::ostringstream out;
    write_edge_list(g, out);
    const Graph h = from_text(out.str());
    REQUIRE(h.edge_count() == g.edge_count());
    // isolated nodes cannot appear in an edge list
    NodeId non_isolated = 0;
    for (NodeId v = 0; v < g.node_count(); ++v) non_isolated += g.degree(v) > 0;
    REQUIRE(h.node_count() == non_isolated);
    for (NodeId v = 0; v < g.node_count(); ++v) {
        for (NodeId u : g.neighbors(v)) {
            const auto hv = h.id_of(g.label(v));
            const auto hu = h.id_of(g.label(u));
            REQUIRE(hv.has_value());
            const auto nbrs = h.neighbors(*hv);
            REQUIRE(std::binary_search(nbrs.begin(), nbrs.end(), *hu));
        }
    }
}

TEST_CASE("label map csv lists every node", "[graph]") {
    const Graph g = from_text("a b\nb c\n");
    std::ostringstream out;
    write_label_map_csv(g, out);
    REQUIRE(out.str() == "label,id\na,0\nb,1\nc,2\n");
}

TEST_CASE("invariants hold after generation", "[graph]") {
    GeneratorConfig cfg;
    cfg.node_count = 400;
    cfg.rng_seed = 11;
    check_invariants(generate(cfg));
    cfg.model = DegreeModel::normal_degree;
    cfg.mean_degree = 6;
    cfg.degree_stddev = 2;
    cfg.min_degree = 1;
    check_invariants(generate(cfg));
}
