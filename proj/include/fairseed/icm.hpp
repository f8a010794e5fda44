#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <memory>
#include <ostream>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"
#include "rng.hpp"

namespace fairseed {

struct SimulationConfig {
    double p = 0.1;                  // per-contact activation probability
    std::int64_t realizations = 1;   // M
    std::uint64_t rng_seed = 0;
    bool record_times = true;
    int threads = 0;                 // 0 = hardware concurrency

    void validate() const {
        if (p < 0.0 || p > 1.0) throw ConfigError("simulation: p must lie in [0,1]");
        if (realizations < 1) throw ConfigError("simulation: realizations must be >= 1");
    }
};

struct CascadeTrace {
    std::vector<std::uint8_t> activated;
    std::vector<std::int32_t> activation_time;  // kUnreached where inactive
    std::int64_t cascade_size = 0;
};

// One cascade under synchronous-round semantics: every node activated at step
// t contacts each not-yet-activated neighbor exactly once, each contact
// succeeding independently with probability p; contacted nodes activate at
// step t+1 and the node then goes quiet. Scratch buffers are reused across
// runs, so keep one simulator per thread.
class CascadeSimulator {
public:
    explicit CascadeSimulator(const Graph& g)
        : g_(&g), active_(static_cast<std::size_t>(g.node_count()), 0) {}

    // on_activate(node, step) fires for every activation, seeds at step 0.
    template <class OnActivate>
    std::int64_t run(std::span<const NodeId> seeds, double p, Engine& rng, OnActivate&& on_activate) {
        frontier_.clear();
        next_.clear();
        touched_.clear();
        for (NodeId s : seeds) {
            if (!g_->contains(s)) throw std::invalid_argument("cascade: seed out of range");
            if (!active_[static_cast<std::size_t>(s)]) {
                active_[static_cast<std::size_t>(s)] = 1;
                touched_.push_back(s);
                frontier_.push_back(s);
                on_activate(s, 0);
            }
        }
        const Coin coin(p);
        std::int64_t size = static_cast<std::int64_t>(frontier_.size());
        std::int32_t step = 0;
        while (!frontier_.empty() && p > 0.0) {
            ++step;
            next_.clear();
            for (NodeId u : frontier_) {
                for (NodeId v : g_->neighbors(u)) {
                    if (!active_[static_cast<std::size_t>(v)] && coin.flip(rng)) {
                        active_[static_cast<std::size_t>(v)] = 1;
                        touched_.push_back(v);
                        next_.push_back(v);
                        on_activate(v, step);
                        ++size;
                    }
                }
            }
            frontier_.swap(next_);
        }
        for (NodeId v : touched_) active_[static_cast<std::size_t>(v)] = 0;
        return size;
    }

    CascadeTrace run_trace(std::span<const NodeId> seeds, double p, Engine& rng,
                           bool record_times = true) {
        CascadeTrace trace;
        trace.activated.assign(static_cast<std::size_t>(g_->node_count()), 0);
        trace.activation_time.assign(static_cast<std::size_t>(g_->node_count()), kUnreached);
        trace.cascade_size = run(seeds, p, rng, [&](NodeId v, std::int32_t t) {
            trace.activated[static_cast<std::size_t>(v)] = 1;
            if (record_times) trace.activation_time[static_cast<std::size_t>(v)] = t;
        });
        return trace;
    }

private:
    const Graph* g_;
    std::vector<std::uint8_t> active_;
    std::vector<NodeId> frontier_, next_, touched_;
};

inline CascadeTrace run_cascade(const Graph& g, std::span<const NodeId> seeds, double p,
                                Engine& rng) {
    if (seeds.empty()) throw std::invalid_argument("cascade: seed set is empty");
    return CascadeSimulator(g).run_trace(seeds, p, rng);
}

// Mergeable per-node accumulator over a cascade ensemble: activation counts,
// summed inverse activation times (1/(t+1), zero contribution when a
// realization never reaches the node), and outbreak-size moments.
struct CascadeStats {
    std::vector<std::int64_t> hits;
    std::vector<double> inv_time_sum;
    std::int64_t realizations = 0;
    double size_sum = 0.0;
    double size_sq_sum = 0.0;

    explicit CascadeStats(NodeId n)
        : hits(static_cast<std::size_t>(n), 0), inv_time_sum(static_cast<std::size_t>(n), 0.0) {}

    void merge(const CascadeStats& other) {
        for (std::size_t i = 0; i < hits.size(); ++i) {
            hits[i] += other.hits[i];
            inv_time_sum[i] += other.inv_time_sum[i];
        }
        realizations += other.realizations;
        size_sum += other.size_sum;
        size_sq_sum += other.size_sq_sum;
    }

    double mean_size() const { return size_sum / static_cast<double>(realizations); }
};

namespace detail {

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

// Deterministic parallel reduction over realizations. Work is split into
// fixed-size chunks; per-chunk partials accumulate their realizations in
// index order and are merged in chunk order afterwards, so the floating-point
// result is bit-identical for any thread count (each realization draws from
// its own child RNG stream).
template <class Partial, class MakePartial, class MakeScratch, class Body>
Partial chunked_reduce(std::int64_t count, int threads, MakePartial make_partial,
                       MakeScratch make_scratch, Body body) {
    constexpr std::int64_t kChunk = 256;
    const int n_threads = resolve_threads(threads);
    const std::int64_t n_chunks = (count + kChunk - 1) / kChunk;
    std::vector<std::unique_ptr<Partial>> parts(static_cast<std::size_t>(n_chunks));
    std::atomic<std::int64_t> next_chunk{0};
    auto worker = [&]() {
        auto scratch = make_scratch();
        for (;;) {
            const std::int64_t c = next_chunk.fetch_add(1);
            if (c >= n_chunks) break;
            auto part = std::make_unique<Partial>(make_partial());
            const std::int64_t lo = c * kChunk;
            const std::int64_t hi = std::min(count, lo + kChunk);
            for (std::int64_t i = lo; i < hi; ++i) body(*part, scratch, i);
            parts[static_cast<std::size_t>(c)] = std::move(part);
        }
    };
    if (n_threads <= 1 || n_chunks <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    Partial acc = make_partial();
    for (auto& part : parts)
        if (part) acc.merge(*part);
    return acc;
}

}  // namespace detail

// M independent realizations from a fixed seed set, reduced to CascadeStats.
// Realization r draws from child stream (rng_seed, r); aggregates are
// reproducible for any worker count.
inline CascadeStats simulate_ensemble(const Graph& g, std::span<const NodeId> seeds,
                                      const SimulationConfig& cfg) {
    cfg.validate();
    if (seeds.empty()) throw std::invalid_argument("simulate_ensemble: seed set is empty");
    return detail::chunked_reduce<CascadeStats>(
        cfg.realizations, cfg.threads, [&] { return CascadeStats(g.node_count()); },
        [&] { return CascadeSimulator(g); },
        [&](CascadeStats& acc, CascadeSimulator& sim, std::int64_t r) {
            Engine rng = make_engine(child_seed(cfg.rng_seed, stream::simulate, r));
            const std::int64_t size = sim.run(seeds, cfg.p, rng, [&](NodeId v, std::int32_t t) {
                ++acc.hits[static_cast<std::size_t>(v)];
                acc.inv_time_sum[static_cast<std::size_t>(v)] += 1.0 / (double(t) + 1.0);
            });
            ++acc.realizations;
            acc.size_sum += static_cast<double>(size);
            acc.size_sq_sum += static_cast<double>(size) * static_cast<double>(size);
        });
}

// Random-seeding benchmark process: every realization redraws a fresh uniform
// k-subset of nodes as seeds from its own child stream.
inline CascadeStats simulate_random_process(const Graph& g, NodeId seeds_per_run,
                                            const SimulationConfig& cfg) {
    cfg.validate();
    if (seeds_per_run < 1 || seeds_per_run > g.node_count())
        throw std::invalid_argument("simulate_random_process: seed count out of range");
    return detail::chunked_reduce<CascadeStats>(
        cfg.realizations, cfg.threads, [&] { return CascadeStats(g.node_count()); },
        [&] { return CascadeSimulator(g); },
        [&](CascadeStats& acc, CascadeSimulator& sim, std::int64_t r) {
            Engine rng = make_engine(child_seed(cfg.rng_seed, stream::benchmark, r));
            const auto seeds = sample_distinct(g.node_count(), seeds_per_run, rng);
            const std::int64_t size = sim.run(seeds, cfg.p, rng, [&](NodeId v, std::int32_t t) {
                ++acc.hits[static_cast<std::size_t>(v)];
                acc.inv_time_sum[static_cast<std::size_t>(v)] += 1.0 / (double(t) + 1.0);
            });
            ++acc.realizations;
            acc.size_sum += static_cast<double>(size);
            acc.size_sq_sum += static_cast<double>(size) * static_cast<double>(size);
        });
}

// Trace-collecting variant for dumps and tests; same child streams as
// simulate_ensemble, so trace r matches the aggregate path exactly.
inline std::vector<CascadeTrace> simulate_traces(const Graph& g, std::span<const NodeId> seeds,
                                                 const SimulationConfig& cfg) {
    cfg.validate();
    if (seeds.empty()) throw std::invalid_argument("simulate_traces: seed set is empty");
    std::vector<CascadeTrace> traces(static_cast<std::size_t>(cfg.realizations));
    CascadeSimulator sim(g);
    for (std::int64_t r = 0; r < cfg.realizations; ++r) {
        Engine rng = make_engine(child_seed(cfg.rng_seed, stream::simulate, r));
        traces[static_cast<std::size_t>(r)] = sim.run_trace(seeds, cfg.p, rng, cfg.record_times);
    }
    return traces;
}

inline void write_trace_csv(std::ostream& out, std::span<const CascadeTrace> traces) {
    out << "realization,node,activated,activation_time\n";
    for (std::size_t r = 0; r < traces.size(); ++r) {
        const auto& trace = traces[r];
        for (std::size_t v = 0; v < trace.activated.size(); ++v) {
            out << r << ',' << v << ',' << int(trace.activated[v]) << ','
                << trace.activation_time[v] << '\n';
        }
    }
}

// Bond-percolation threshold <k>/(<k^2>-<k>) from the realized degrees.
inline double molloy_reed_pc(const Graph& g) {
    double k1 = 0.0, k2 = 0.0;
    const auto n = static_cast<double>(g.node_count());
    for (NodeId v = 0; v < g.node_count(); ++v) {
        const auto d = static_cast<double>(g.degree(v));
        k1 += d;
        k2 += d * d;
    }
    k1 /= n;
    k2 /= n;
    if (k2 - k1 <= 0.0)
        throw DataError("molloy_reed_pc: degree sequence admits no percolation transition");
    return std::min(1.0, k1 / (k2 - k1));
}

// Log-spaced grid bracketing the Molloy-Reed estimate, clamped to (0,1].
inline std::vector<double> default_p_grid(const Graph& g, int points = 40,
                                          double lo_factor = 0.2, double hi_factor = 5.0) {
    if (points < 3) throw ConfigError("p grid needs at least 3 points");
    double lo, hi;
    try {
        const double pc = molloy_reed_pc(g);
        lo = std::max(1e-6, lo_factor * pc);
        hi = std::min(1.0, hi_factor * pc);
    } catch (const DataError&) {
        lo = 0.01;
        hi = 1.0;
    }
    if (lo >= hi) lo = hi / 100.0;
    std::vector<double> grid(static_cast<std::size_t>(points));
    const double step = (std::log(hi) - std::log(lo)) / double(points - 1);
    for (int i = 0; i < points; ++i)
        grid[static_cast<std::size_t>(i)] = std::exp(std::log(lo) + step * i);
    grid.back() = hi;
    return grid;
}

struct SusceptibilityPoint {
    double p = 0.0;
    double chi = 0.0;        // <s^2>/<s>^2 over single-spreader outbreaks
    double mean_size = 0.0;
};

struct CriticalEstimate {
    double pc = 0.0;
    std::vector<SusceptibilityPoint> curve;
};

// Critical probability as the grid arg-max of the susceptibility
// <s^2>/<s>^2, each point averaged over single-spreader cascades started at
// uniformly random nodes. No interpolation: grid resolution is the caller's
// tolerance knob.
inline CriticalEstimate estimate_critical_p(const Graph& g, std::span<const double> p_grid,
                                            std::int64_t runs_per_p, std::uint64_t rng_seed,
                                            int threads = 0) {
    if (p_grid.empty()) throw ConfigError("estimate_critical_p: empty grid");
    if (p_grid.size() < 3) throw ConfigError("estimate_critical_p: grid needs at least 3 points");
    if (runs_per_p < 1) throw ConfigError("estimate_critical_p: runs_per_p must be >= 1");
    if (g.node_count() < 2) throw DataError("estimate_critical_p: degenerate graph (N < 2)");
    for (std::size_t i = 1; i < p_grid.size(); ++i)
        if (!(p_grid[i] > p_grid[i - 1]))
            throw ConfigError("estimate_critical_p: grid must be sorted ascending");

    struct Moments {
        double s = 0.0, s2 = 0.0;
        void merge(const Moments& o) {
            s += o.s;
            s2 += o.s2;
        }
    };

    CriticalEstimate result;
    result.curve.reserve(p_grid.size());
    std::size_t best = 0;
    for (std::size_t gi = 0; gi < p_grid.size(); ++gi) {
        const double p = p_grid[gi];
        const Moments m = detail::chunked_reduce<Moments>(
            runs_per_p, threads, [] { return Moments{}; }, [&] { return CascadeSimulator(g); },
            [&](Moments& acc, CascadeSimulator& sim, std::int64_t r) {
                Engine rng = make_engine(child_seed(rng_seed, stream::critical, gi, r));
                const NodeId seed = static_cast<NodeId>(
                    std::uniform_int_distribution<std::int64_t>(0, g.node_count() - 1)(rng));
                const NodeId seeds[1] = {seed};
                const auto size = static_cast<double>(sim.run(seeds, p, rng, [](NodeId, std::int32_t) {}));
                acc.s += size;
                acc.s2 += size * size;
            });
        const double mean_s = m.s / double(runs_per_p);
        const double chi = (m.s2 / double(runs_per_p)) / (mean_s * mean_s);
        result.curve.push_back({p, chi, mean_s});
        if (chi > result.curve[best].chi) best = gi;
    }
    result.pc = result.curve[best].p;
    return result;
}

}  // namespace fairseed
