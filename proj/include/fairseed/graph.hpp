#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace fairseed {

using NodeId = std::int32_t;

// Hop distance marker for nodes no BFS can reach.
inline constexpr std::int32_t kUnreached = -1;

struct LoadReport {
    std::int64_t lines = 0;            // non-comment, non-blank edge lines
    std::int64_t duplicate_edges = 0;  // dropped repeats (either orientation)
    std::int64_t self_loops = 0;       // dropped u-u entries
};

// Immutable undirected simple graph in CSR adjacency form. Node ids are dense
// integers 0..N-1; every node carries a textual label (decimal id unless the
// graph came from a labelled edge list). Duplicate edges and self-loops are
// dropped at construction and reported, so the invariants (symmetry, no
// self-loops, no parallel edges) hold for every instance.
class Graph {
public:
    Graph(NodeId node_count, std::vector<std::pair<NodeId, NodeId>> edges,
          std::vector<std::string> labels = {}, LoadReport* report = nullptr) {
        if (node_count <= 0) throw DataError("graph must have at least one node");
        build(node_count, std::move(edges), std::move(labels), report);
    }

    // One edge per line, two whitespace-separated labels; '#' starts a comment
    // line; blank lines are skipped. Labels become ids in first-appearance order.
    static Graph load_edge_list(std::istream& in, LoadReport* report = nullptr) {
        std::unordered_map<std::string, NodeId> ids;
        std::vector<std::string> labels;
        std::vector<std::pair<NodeId, NodeId>> edges;
        auto intern = [&](const std::string& label) {
            auto [it, inserted] = ids.try_emplace(label, static_cast<NodeId>(labels.size()));
            if (inserted) labels.push_back(label);
            return it->second;
        };
        std::string line;
        std::int64_t line_no = 0;
        std::int64_t edge_lines = 0;
        while (std::getline(in, line)) {
            ++line_no;
            std::istringstream ls(line);
            std::string a, b, extra;
            if (!(ls >> a)) continue;  // blank
            if (a[0] == '#') continue;
            if (!(ls >> b) || (ls >> extra)) {
                throw DataError("line " + std::to_string(line_no) +
                                ": expected two whitespace-separated labels");
            }
            ++edge_lines;
            const NodeId ia = intern(a);  // keep first-appearance order: a before b
            const NodeId ib = intern(b);
            edges.emplace_back(ia, ib);
        }
        if (labels.empty()) throw DataError("empty graph: no edges found");
        const auto n = static_cast<NodeId>(labels.size());
        LoadReport local;
        Graph g(n, std::move(edges), std::move(labels), &local);
        local.lines = edge_lines;
        if (report) *report = local;
        return g;
    }

    NodeId node_count() const { return static_cast<NodeId>(offsets_.size() - 1); }
    std::int64_t edge_count() const { return edge_count_; }

    NodeId degree(NodeId i) const {
        return static_cast<NodeId>(offsets_[static_cast<std::size_t>(i) + 1] -
                                   offsets_[static_cast<std::size_t>(i)]);
    }

    std::span<const NodeId> neighbors(NodeId i) const {
        const auto lo = offsets_[static_cast<std::size_t>(i)];
        const auto hi = offsets_[static_cast<std::size_t>(i) + 1];
        return {targets_.data() + lo, static_cast<std::size_t>(hi - lo)};
    }

    const std::string& label(NodeId i) const { return labels_[static_cast<std::size_t>(i)]; }

    std::optional<NodeId> id_of(const std::string& label) const {
        auto it = label_ids_.find(label);
        if (it == label_ids_.end()) return std::nullopt;
        return it->second;
    }

    double mean_degree() const {
        return 2.0 * static_cast<double>(edge_count_) / static_cast<double>(node_count());
    }

    bool contains(NodeId i) const { return i >= 0 && i < node_count(); }

private:
    void build(NodeId n, std::vector<std::pair<NodeId, NodeId>> edges,
               std::vector<std::string> labels, LoadReport* report) {
        std::vector<std::uint64_t> keys;
        keys.reserve(edges.size());
        std::int64_t self_loops = 0;
        for (auto [u, v] : edges) {
            if (u < 0 || u >= n || v < 0 || v >= n)
                throw DataError("edge endpoint out of range");
            if (u == v) {
                ++self_loops;
                continue;
            }
            if (u > v) std::swap(u, v);
            keys.push_back((static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint32_t>(v));
        }
        std::sort(keys.begin(), keys.end());
        const auto unique_end = std::unique(keys.begin(), keys.end());
        if (report) {
            report->self_loops = self_loops;
            report->duplicate_edges =
                static_cast<std::int64_t>(keys.end() - unique_end);
        }
        keys.erase(unique_end, keys.end());
        edge_count_ = static_cast<std::int64_t>(keys.size());

        std::vector<std::int64_t> deg(static_cast<std::size_t>(n), 0);
        for (auto key : keys) {
            ++deg[key >> 32];
            ++deg[key & 0xFFFFFFFFu];
        }
        offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
        for (NodeId i = 0; i < n; ++i)
            offsets_[static_cast<std::size_t>(i) + 1] =
                offsets_[static_cast<std::size_t>(i)] + deg[static_cast<std::size_t>(i)];
        targets_.resize(static_cast<std::size_t>(offsets_.back()));
        std::vector<std::int64_t> cursor(offsets_.begin(), offsets_.end() - 1);
        // Keys are sorted, so each adjacency list comes out in ascending order.
        for (auto key : keys) {
            const auto u = static_cast<NodeId>(key >> 32);
            const auto v = static_cast<NodeId>(key & 0xFFFFFFFFu);
            targets_[static_cast<std::size_t>(cursor[static_cast<std::size_t>(u)]++)] = v;
            targets_[static_cast<std::size_t>(cursor[static_cast<std::size_t>(v)]++)] = u;
        }

        if (labels.empty()) {
            labels.reserve(static_cast<std::size_t>(n));
            for (NodeId i = 0; i < n; ++i) labels.push_back(std::to_string(i));
        } else if (static_cast<NodeId>(labels.size()) != n) {
            throw DataError("label count does not match node count");
        }
        labels_ = std::move(labels);
        label_ids_.reserve(labels_.size());
        for (NodeId i = 0; i < n; ++i) label_ids_.emplace(labels_[static_cast<std::size_t>(i)], i);
    }

    std::vector<std::int64_t> offsets_;
    std::vector<NodeId> targets_;
    std::vector<std::string> labels_;
    std::unordered_map<std::string, NodeId> label_ids_;
    std::int64_t edge_count_ = 0;
};

// Core numbers by iterative minimum-degree peeling (bucket variant, O(E)).
// The result is independent of the order ties are peeled in.
inline std::vector<NodeId> core_decomposition(const Graph& g) {
    const NodeId n = g.node_count();
    std::vector<NodeId> deg(static_cast<std::size_t>(n));
    NodeId max_deg = 0;
    for (NodeId v = 0; v < n; ++v) {
        deg[static_cast<std::size_t>(v)] = g.degree(v);
        max_deg = std::max(max_deg, deg[static_cast<std::size_t>(v)]);
    }
    std::vector<std::vector<NodeId>> bins(static_cast<std::size_t>(max_deg) + 1);
    std::vector<std::int32_t> pos(static_cast<std::size_t>(n));
    for (NodeId v = 0; v < n; ++v) {
        auto& bin = bins[static_cast<std::size_t>(deg[static_cast<std::size_t>(v)])];
        pos[static_cast<std::size_t>(v)] = static_cast<std::int32_t>(bin.size());
        bin.push_back(v);
    }
    std::vector<NodeId> core(static_cast<std::size_t>(n), 0);
    for (NodeId k = 0; k <= max_deg; ++k) {
        auto& bin = bins[static_cast<std::size_t>(k)];
        while (!bin.empty()) {
            const NodeId v = bin.back();
            bin.pop_back();
            core[static_cast<std::size_t>(v)] = k;
            for (NodeId u : g.neighbors(v)) {
                auto& du = deg[static_cast<std::size_t>(u)];
                if (du > deg[static_cast<std::size_t>(v)]) {
                    // move u one bucket down, swapping it with that bucket's tail
                    auto& from = bins[static_cast<std::size_t>(du)];
                    const NodeId w = from.back();
                    from[static_cast<std::size_t>(pos[static_cast<std::size_t>(u)])] = w;
                    pos[static_cast<std::size_t>(w)] = pos[static_cast<std::size_t>(u)];
                    from.pop_back();
                    auto& to = bins[static_cast<std::size_t>(du) - 1];
                    pos[static_cast<std::size_t>(u)] = static_cast<std::int32_t>(to.size());
                    to.push_back(u);
                    --du;
                }
            }
        }
    }
    return core;
}

// Multi-source BFS hop distances; kUnreached where no source can reach.
inline std::vector<std::int32_t> bfs_distances(const Graph& g, std::span<const NodeId> sources) {
    if (sources.empty()) throw std::invalid_argument("bfs_distances: no sources");
    std::vector<std::int32_t> dist(static_cast<std::size_t>(g.node_count()), kUnreached);
    std::vector<NodeId> queue;
    queue.reserve(static_cast<std::size_t>(g.node_count()));
    for (NodeId s : sources) {
        if (!g.contains(s)) throw std::invalid_argument("bfs_distances: source out of range");
        if (dist[static_cast<std::size_t>(s)] != 0) {
            dist[static_cast<std::size_t>(s)] = 0;
            queue.push_back(s);
        }
    }
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const NodeId u = queue[head];
        const std::int32_t d = dist[static_cast<std::size_t>(u)];
        for (NodeId v : g.neighbors(u)) {
            if (dist[static_cast<std::size_t>(v)] == kUnreached) {
                dist[static_cast<std::size_t>(v)] = d + 1;
                queue.push_back(v);
            }
        }
    }
    return dist;
}

// Subgraph induced by the largest connected component (ties broken by the
// smallest contained node id). Labels carry over, so node identity survives.
inline Graph largest_component(const Graph& g) {
    const NodeId n = g.node_count();
    std::vector<std::int32_t> comp(static_cast<std::size_t>(n), -1);
    std::vector<std::int64_t> comp_size;
    std::vector<NodeId> queue;
    for (NodeId v = 0; v < n; ++v) {
        if (comp[static_cast<std::size_t>(v)] >= 0) continue;
        const auto c = static_cast<std::int32_t>(comp_size.size());
        comp[static_cast<std::size_t>(v)] = c;
        queue.assign(1, v);
        std::int64_t size = 0;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            ++size;
            for (NodeId u : g.neighbors(queue[head])) {
                if (comp[static_cast<std::size_t>(u)] < 0) {
                    comp[static_cast<std::size_t>(u)] = c;
                    queue.push_back(u);
                }
            }
        }
        comp_size.push_back(size);
    }
    const auto best = static_cast<std::int32_t>(
        std::max_element(comp_size.begin(), comp_size.end()) - comp_size.begin());
    std::vector<NodeId> remap(static_cast<std::size_t>(n), -1);
    std::vector<std::string> labels;
    NodeId next = 0;
    for (NodeId v = 0; v < n; ++v) {
        if (comp[static_cast<std::size_t>(v)] == best) {
            remap[static_cast<std::size_t>(v)] = next++;
            labels.push_back(g.label(v));
        }
    }
    std::vector<std::pair<NodeId, NodeId>> edges;
    edges.reserve(static_cast<std::size_t>(g.edge_count()));
    for (NodeId v = 0; v < n; ++v) {
        if (comp[static_cast<std::size_t>(v)] != best) continue;
        for (NodeId u : g.neighbors(v)) {
            if (v < u) edges.emplace_back(remap[static_cast<std::size_t>(v)],
                                          remap[static_cast<std::size_t>(u)]);
        }
    }
    return Graph(next, std::move(edges), std::move(labels));
}

inline void write_edge_list(const Graph& g, std::ostream& out) {
    for (NodeId v = 0; v < g.node_count(); ++v) {
        for (NodeId u : g.neighbors(v)) {
            if (v < u) out << g.label(v) << ' ' << g.label(u) << '\n';
        }
    }
}

inline void write_label_map_csv(const Graph& g, std::ostream& out) {
    out << "label,id\n";
    for (NodeId v = 0; v < g.node_count(); ++v) out << g.label(v) << ',' << v << '\n';
}

}  // namespace fairseed
