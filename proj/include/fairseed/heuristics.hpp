#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "graph.hpp"
#include "rng.hpp"

namespace fairseed {

enum class SeedMethod { HD, KC, DD, CHD, RANDOM, GA };

inline const char* to_string(SeedMethod m) {
    switch (m) {
        case SeedMethod::HD: return "HD";
        case SeedMethod::KC: return "KC";
        case SeedMethod::DD: return "DD";
        case SeedMethod::CHD: return "CHD";
        case SeedMethod::RANDOM: return "RANDOM";
        case SeedMethod::GA: return "GA";
    }
    return "?";
}

inline SeedMethod seed_method_from_string(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
    if (s == "HD") return SeedMethod::HD;
    if (s == "KC") return SeedMethod::KC;
    if (s == "DD") return SeedMethod::DD;
    if (s == "CHD") return SeedMethod::CHD;
    if (s == "RANDOM") return SeedMethod::RANDOM;
    if (s == "GA") return SeedMethod::GA;
    throw ConfigError("unknown seed method: " + s);
}

struct SeedSet {
    SeedMethod method = SeedMethod::RANDOM;
    std::vector<NodeId> nodes;  // distinct, in selection order
    double budget_fraction = 0.0;
};

namespace detail {

inline void check_budget(const Graph& g, NodeId k) {
    if (k < 1 || k > g.node_count())
        throw std::invalid_argument("seed budget out of range: k=" + std::to_string(k));
}

// Random per-node priorities used for every tie-break; lower wins.
inline std::vector<std::uint32_t> tie_priorities(NodeId n, Engine& rng) {
    std::vector<std::uint32_t> pri(static_cast<std::size_t>(n));
    std::iota(pri.begin(), pri.end(), 0u);
    std::shuffle(pri.begin(), pri.end(), rng);
    return pri;
}

// Selects the k best nodes under (score desc, priority asc) without mutating scores.
template <class Score>
std::vector<NodeId> top_k_by(const Graph& g, NodeId k, std::span<const std::uint32_t> pri,
                             Score score) {
    std::vector<NodeId> order(static_cast<std::size_t>(g.node_count()));
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](NodeId a, NodeId b) {
        const auto sa = score(a), sb = score(b);
        if (sa != sb) return sa > sb;
        return pri[static_cast<std::size_t>(a)] < pri[static_cast<std::size_t>(b)];
    });
    order.resize(static_cast<std::size_t>(k));
    return order;
}

}  // namespace detail

// Highest degree: the k nodes of largest degree, ties uniform at random.
inline SeedSet select_hd(const Graph& g, NodeId k, std::uint64_t tie_seed) {
    detail::check_budget(g, k);
    Engine rng = make_engine(tie_seed);
    const auto pri = detail::tie_priorities(g.node_count(), rng);
    SeedSet s{SeedMethod::HD, detail::top_k_by(g, k, pri, [&](NodeId v) { return g.degree(v); }),
              double(k) / double(g.node_count())};
    return s;
}

// k-core: order by core number, then degree, then seeded random.
inline SeedSet select_kc(const Graph& g, NodeId k, std::uint64_t tie_seed) {
    detail::check_budget(g, k);
    Engine rng = make_engine(tie_seed);
    const auto pri = detail::tie_priorities(g.node_count(), rng);
    const auto core = core_decomposition(g);
    auto score = [&](NodeId v) {
        return (static_cast<std::int64_t>(core[static_cast<std::size_t>(v)]) << 32) +
               g.degree(v);
    };
    return {SeedMethod::KC, detail::top_k_by(g, k, pri, score),
            double(k) / double(g.node_count())};
}

// Degree discount: greedily pick the node maximizing
// d_v - 2*t_v - (d_v - t_v)*t_v*p, where t_v counts already-selected neighbors.
inline SeedSet select_dd(const Graph& g, NodeId k, double p, std::uint64_t tie_seed) {
    detail::check_budget(g, k);
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("select_dd: p must lie in [0,1]");
    Engine rng = make_engine(tie_seed);
    const auto pri = detail::tie_priorities(g.node_count(), rng);
    const NodeId n = g.node_count();
    std::vector<std::int32_t> selected_neighbors(static_cast<std::size_t>(n), 0);
    std::vector<std::uint8_t> picked(static_cast<std::size_t>(n), 0);
    std::vector<NodeId> nodes;
    nodes.reserve(static_cast<std::size_t>(k));
    for (NodeId step = 0; step < k; ++step) {
        NodeId best = -1;
        double best_score = 0.0;
        for (NodeId v = 0; v < n; ++v) {
            if (picked[static_cast<std::size_t>(v)]) continue;
            const double d = g.degree(v);
            const double t = selected_neighbors[static_cast<std::size_t>(v)];
            const double score = d - 2.0 * t - (d - t) * t * p;
            if (best < 0 || score > best_score ||
                (score == best_score && pri[static_cast<std::size_t>(v)] <
                                            pri[static_cast<std::size_t>(best)])) {
                best = v;
                best_score = score;
            }
        }
        picked[static_cast<std::size_t>(best)] = 1;
        nodes.push_back(best);
        for (NodeId u : g.neighbors(best)) ++selected_neighbors[static_cast<std::size_t>(u)];
    }
    return {SeedMethod::DD, std::move(nodes), double(k) / double(n)};
}

// CoreHD: repeatedly remove (and select) the highest-degree node of the
// current 2-core, peeling the 2-core incrementally after each removal. Once
// the 2-core is empty the remaining slots are filled by highest degree in the
// residual forest, ranked by the degrees at that moment.
inline SeedSet select_chd(const Graph& g, NodeId k, std::uint64_t tie_seed) {
    detail::check_budget(g, k);
    Engine rng = make_engine(tie_seed);
    const auto pri = detail::tie_priorities(g.node_count(), rng);
    const NodeId n = g.node_count();
    std::vector<std::uint8_t> alive(static_cast<std::size_t>(n), 1);   // not selected
    std::vector<std::uint8_t> in_core(static_cast<std::size_t>(n), 1);
    std::vector<std::int32_t> deg(static_cast<std::size_t>(n));        // degree among alive
    std::vector<std::int32_t> core_deg(static_cast<std::size_t>(n));   // degree within 2-core
    for (NodeId v = 0; v < n; ++v) deg[static_cast<std::size_t>(v)] = g.degree(v);
    core_deg = deg;

    std::vector<NodeId> peel;
    auto peel_from = [&](NodeId start) {
        peel.assign(1, start);
        while (!peel.empty()) {
            const NodeId v = peel.back();
            peel.pop_back();
            if (!in_core[static_cast<std::size_t>(v)]) continue;
            in_core[static_cast<std::size_t>(v)] = 0;
            for (NodeId u : g.neighbors(v)) {
                if (in_core[static_cast<std::size_t>(u)] &&
                    --core_deg[static_cast<std::size_t>(u)] < 2)
                    peel.push_back(u);
            }
        }
    };
    for (NodeId v = 0; v < n; ++v)
        if (in_core[static_cast<std::size_t>(v)] && core_deg[static_cast<std::size_t>(v)] < 2)
            peel_from(v);

    std::vector<NodeId> nodes;
    nodes.reserve(static_cast<std::size_t>(k));
    while (static_cast<NodeId>(nodes.size()) < k) {
        NodeId best = -1;
        for (NodeId v = 0; v < n; ++v) {
            if (!alive[static_cast<std::size_t>(v)] || !in_core[static_cast<std::size_t>(v)])
                continue;
            if (best < 0 ||
                core_deg[static_cast<std::size_t>(v)] > core_deg[static_cast<std::size_t>(best)] ||
                (core_deg[static_cast<std::size_t>(v)] == core_deg[static_cast<std::size_t>(best)] &&
                 pri[static_cast<std::size_t>(v)] < pri[static_cast<std::size_t>(best)]))
                best = v;
        }
        if (best < 0) break;  // 2-core exhausted
        alive[static_cast<std::size_t>(best)] = 0;
        in_core[static_cast<std::size_t>(best)] = 0;
        nodes.push_back(best);
        for (NodeId u : g.neighbors(best)) {
            if (alive[static_cast<std::size_t>(u)]) {
                --deg[static_cast<std::size_t>(u)];
                if (in_core[static_cast<std::size_t>(u)] &&
                    --core_deg[static_cast<std::size_t>(u)] < 2)
                    peel_from(u);
            }
        }
    }
    if (static_cast<NodeId>(nodes.size()) < k) {
        // residual forest fallback: rank by the degree snapshot, like HD
        const NodeId missing = k - static_cast<NodeId>(nodes.size());
        std::vector<NodeId> order;
        order.reserve(static_cast<std::size_t>(n));
        for (NodeId v = 0; v < n; ++v)
            if (alive[static_cast<std::size_t>(v)]) order.push_back(v);
        std::partial_sort(order.begin(), order.begin() + missing, order.end(),
                          [&](NodeId a, NodeId b) {
                              if (deg[static_cast<std::size_t>(a)] != deg[static_cast<std::size_t>(b)])
                                  return deg[static_cast<std::size_t>(a)] >
                                         deg[static_cast<std::size_t>(b)];
                              return pri[static_cast<std::size_t>(a)] <
                                     pri[static_cast<std::size_t>(b)];
                          });
        nodes.insert(nodes.end(), order.begin(), order.begin() + missing);
    }
    return {SeedMethod::CHD, std::move(nodes), double(k) / double(n)};
}

// Uniform benchmark selection: k distinct nodes without replacement.
inline SeedSet select_random(const Graph& g, NodeId k, std::uint64_t rng_seed) {
    detail::check_budget(g, k);
    Engine rng = make_engine(rng_seed);
    auto nodes = sample_distinct(g.node_count(), k, rng);
    std::sort(nodes.begin(), nodes.end());
    return {SeedMethod::RANDOM, std::move(nodes), double(k) / double(g.node_count())};
}

struct DispersionStats {
    double mean_distance = 0.0;   // over nodes the seeds can reach, seeds included
    std::int64_t reachable = 0;
    std::int64_t unreachable = 0;
};

inline DispersionStats seed_dispersion(const Graph& g, const SeedSet& s) {
    const auto dist = bfs_distances(g, s.nodes);
    DispersionStats out;
    double sum = 0.0;
    for (auto d : dist) {
        if (d == kUnreached) {
            ++out.unreachable;
        } else {
            ++out.reachable;
            sum += d;
        }
    }
    out.mean_distance = sum / static_cast<double>(out.reachable);
    return out;
}

inline nlohmann::json seed_set_to_json(const Graph& g, const SeedSet& s) {
    nlohmann::json j;
    j["method"] = to_string(s.method);
    j["budget_fraction"] = s.budget_fraction;
    auto& nodes = j["nodes"] = nlohmann::json::array();
    for (NodeId v : s.nodes) nodes.push_back(g.label(v));
    return j;
}

inline SeedSet seed_set_from_json(const Graph& g, const nlohmann::json& j) {
    SeedSet s;
    s.method = seed_method_from_string(j.at("method").get<std::string>());
    s.budget_fraction = j.at("budget_fraction").get<double>();
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(g.node_count()), 0);
    for (const auto& entry : j.at("nodes")) {
        const std::string label =
            entry.is_string() ? entry.get<std::string>() : entry.dump();
        const auto id = g.id_of(label);
        if (!id) throw DataError("seed set refers to unknown node label: " + label);
        if (seen[static_cast<std::size_t>(*id)])
            throw DataError("seed set contains duplicate node: " + label);
        seen[static_cast<std::size_t>(*id)] = 1;
        s.nodes.push_back(*id);
    }
    if (s.nodes.empty()) throw DataError("seed set is empty");
    return s;
}

}  // namespace fairseed
