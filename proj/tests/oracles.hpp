#pragma once

// Test-only exact oracles for tiny graphs, independent of the simulation
// code. A cascade with activation probability p activates exactly the nodes
// reachable from the seeds through edges whose independent coin landed
// "live", and the activation step equals the BFS distance over live edges;
// enumerating all 2^E coin outcomes therefore gives exact expectations.

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "fairseed/graph.hpp"

namespace oracle {

struct Expectations {
    double expected_size = 0.0;
    std::vector<double> activation_prob;    // per node
    std::vector<double> expected_inv_time;  // E[1/(t+1)], 0 when unreached
};

inline Expectations enumerate_icm(const fairseed::Graph& g,
                                  std::span<const fairseed::NodeId> seeds, double p) {
    using fairseed::NodeId;
    const NodeId n = g.node_count();
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId v = 0; v < n; ++v)
        for (NodeId u : g.neighbors(v))
            if (v < u) edges.emplace_back(v, u);
    const auto e = edges.size();
    if (e > 20) throw std::invalid_argument("oracle: too many edges to enumerate");

    Expectations out;
    out.activation_prob.assign(static_cast<std::size_t>(n), 0.0);
    out.expected_inv_time.assign(static_cast<std::size_t>(n), 0.0);
    std::vector<std::vector<NodeId>> live_adj(static_cast<std::size_t>(n));
    std::vector<std::int32_t> dist(static_cast<std::size_t>(n));
    std::vector<NodeId> queue;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << e); ++mask) {
        double prob = 1.0;
        for (auto& adj : live_adj) adj.clear();
        for (std::size_t i = 0; i < e; ++i) {
            if (mask & (std::uint64_t{1} << i)) {
                prob *= p;
                live_adj[static_cast<std::size_t>(edges[i].first)].push_back(edges[i].second);
                live_adj[static_cast<std::size_t>(edges[i].second)].push_back(edges[i].first);
            } else {
                prob *= 1.0 - p;
            }
        }
        if (prob == 0.0) continue;
        std::fill(dist.begin(), dist.end(), -1);
        queue.clear();
        for (NodeId s : seeds) {
            if (dist[static_cast<std::size_t>(s)] != 0) {
                dist[static_cast<std::size_t>(s)] = 0;
                queue.push_back(s);
            }
        }
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const NodeId v = queue[head];
            for (NodeId u : live_adj[static_cast<std::size_t>(v)]) {
                if (dist[static_cast<std::size_t>(u)] < 0) {
                    dist[static_cast<std::size_t>(u)] = dist[static_cast<std::size_t>(v)] + 1;
                    queue.push_back(u);
                }
            }
        }
        out.expected_size += prob * static_cast<double>(queue.size());
        for (NodeId v = 0; v < n; ++v) {
            if (dist[static_cast<std::size_t>(v)] >= 0) {
                out.activation_prob[static_cast<std::size_t>(v)] += prob;
                out.expected_inv_time[static_cast<std::size_t>(v)] +=
                    prob / (double(dist[static_cast<std::size_t>(v)]) + 1.0);
            }
        }
    }
    return out;
}

}  // namespace oracle
