#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"
#include "rng.hpp"

namespace fairseed {

enum class DegreeModel { scale_free, normal_degree };

inline const char* to_string(DegreeModel m) {
    return m == DegreeModel::scale_free ? "scale_free" : "normal_degree";
}

inline DegreeModel degree_model_from_string(const std::string& s) {
    if (s == "scale_free") return DegreeModel::scale_free;
    if (s == "normal_degree") return DegreeModel::normal_degree;
    throw ConfigError("unknown degree model: " + s);
}

struct GeneratorConfig {
    DegreeModel model = DegreeModel::scale_free;
    NodeId node_count = 10000;
    double gamma = 2.5;          // scale-free exponent
    double mean_degree = 10.0;   // normal model
    double degree_stddev = 2.0;  // normal model
    NodeId min_degree = 2;
    std::uint64_t rng_seed = 0;

    void validate() const {
        if (node_count < 2) throw ConfigError("generator: node_count must be >= 2");
        if (min_degree < 1) throw ConfigError("generator: min_degree must be >= 1");
        if (model == DegreeModel::scale_free && gamma <= 1.0)
            throw ConfigError("generator: gamma must be > 1 for scale_free");
        if (model == DegreeModel::normal_degree && mean_degree < min_degree)
            throw ConfigError("generator: mean_degree must be >= min_degree");
        if (model == DegreeModel::normal_degree && degree_stddev < 0.0)
            throw ConfigError("generator: degree_stddev must be >= 0");
    }
};

namespace detail {

// Draws node degrees for either model. Degrees are capped at the structural
// cutoff sqrt(N) (scale-free) and at N-1, so stub matching stays close to
// uncorrelated.
class DegreeSampler {
public:
    explicit DegreeSampler(const GeneratorConfig& cfg) : cfg_(cfg) {
        if (cfg.model == DegreeModel::scale_free) {
            const NodeId cutoff = std::max<NodeId>(
                cfg.min_degree,
                std::min<NodeId>(cfg.node_count - 1,
                                 static_cast<NodeId>(std::floor(std::sqrt(double(cfg.node_count))))));
            std::vector<double> weights;
            weights.reserve(static_cast<std::size_t>(cutoff - cfg.min_degree + 1));
            for (NodeId k = cfg.min_degree; k <= cutoff; ++k)
                weights.push_back(std::pow(double(k), -cfg.gamma));
            power_law_ = std::discrete_distribution<NodeId>(weights.begin(), weights.end());
        } else {
            normal_ = std::normal_distribution<double>(cfg.mean_degree, cfg.degree_stddev);
        }
    }

    NodeId operator()(Engine& rng) {
        if (cfg_.model == DegreeModel::scale_free) return cfg_.min_degree + power_law_(rng);
        const double hi = static_cast<double>(cfg_.node_count - 1);
        return static_cast<NodeId>(
            std::clamp(std::round(normal_(rng)), double(cfg_.min_degree), hi));
    }

private:
    const GeneratorConfig& cfg_;
    std::discrete_distribution<NodeId> power_law_;
    std::normal_distribution<double> normal_;
};

}  // namespace detail

// Configuration-model generator: sample a degree sequence, fix parity by
// redrawing single entries, match stubs uniformly at random, then erase
// self-loops and multi-edges. Fixed rng_seed gives a bit-identical edge set.
inline Graph generate(const GeneratorConfig& cfg, LoadReport* report = nullptr) {
    cfg.validate();
    Engine rng = make_engine(child_seed(cfg.rng_seed, stream::generator));
    detail::DegreeSampler sample_degree(cfg);

    std::vector<NodeId> deg(static_cast<std::size_t>(cfg.node_count));
    std::int64_t total = 0;
    for (auto& d : deg) {
        d = sample_degree(rng);
        total += d;
    }
    std::uniform_int_distribution<NodeId> node_pick(0, cfg.node_count - 1);
    int attempts = 0;
    while (total % 2 != 0) {
        if (++attempts > 256)
            throw std::runtime_error("generator: could not realize an even degree sequence");
        auto& d = deg[static_cast<std::size_t>(node_pick(rng))];
        const NodeId fresh = sample_degree(rng);
        total += fresh - d;
        d = fresh;
    }

    std::vector<NodeId> stubs;
    stubs.reserve(static_cast<std::size_t>(total));
    for (NodeId v = 0; v < cfg.node_count; ++v)
        stubs.insert(stubs.end(), static_cast<std::size_t>(deg[static_cast<std::size_t>(v)]), v);
    std::shuffle(stubs.begin(), stubs.end(), rng);

    std::vector<std::pair<NodeId, NodeId>> edges;
    edges.reserve(stubs.size() / 2);
    for (std::size_t i = 0; i + 1 < stubs.size(); i += 2)
        edges.emplace_back(stubs[i], stubs[i + 1]);
    // Graph construction drops self-loops/multi-edges and reports the counts.
    return Graph(cfg.node_count, std::move(edges), {}, report);
}

}  // namespace fairseed
