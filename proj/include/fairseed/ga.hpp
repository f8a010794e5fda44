#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "graph.hpp"
#include "heuristics.hpp"
#include "icm.hpp"
#include "metrics.hpp"
#include "rng.hpp"

namespace fairseed {

// Candidate influencer set with its two-objective fitness: expected cascade
// size and the number of non-vulnerable nodes.
struct ParetoCandidate {
    std::vector<NodeId> seeds;  // sorted ascending
    double fitness_spread = 0.0;
    double fitness_fair = 0.0;
    std::int64_t eval_samples = 0;
};

struct GAConfig {
    int population_size = 100;
    int generations = 100;
    double crossover_prob = 0.8;
    double mutation_prob = 1.0;
    double tabu_mutation_freq = 0.4;        // tabu-like vs random mutation split
    double random_mutation_replace_frac = 0.1;
    double tabu_neighborhood_frac = 0.2;    // of N, candidates inspected per tabu move
    std::int64_t fitness_samples = 100;     // ICM realizations per fitness estimate
    std::int64_t tabu_samples = 20;         // cheap screening inside tabu moves
    std::int64_t final_samples = 1000;      // re-evaluation of the emitted front
    bool frozen_eval = false;               // per-individual deterministic eval streams
    FairnessMode fairness = FairnessMode::frequency;
    std::uint64_t rng_seed = 0;
    int threads = 0;

    void validate() const {
        if (population_size < 2) throw ConfigError("ga: population_size must be >= 2");
        if (generations < 0) throw ConfigError("ga: generations must be >= 0");
        for (double prob : {crossover_prob, mutation_prob, tabu_mutation_freq,
                            random_mutation_replace_frac, tabu_neighborhood_frac})
            if (prob < 0.0 || prob > 1.0)
                throw ConfigError("ga: probabilities and fractions must lie in [0,1]");
        if (fitness_samples < 1 || tabu_samples < 1 || final_samples < 1)
            throw ConfigError("ga: sample counts must be >= 1");
    }
};

struct ParetoFront {
    std::vector<ParetoCandidate> candidates;  // mutually non-dominated, spread-descending
};

// a dominates b: no worse on both objectives, strictly better on at least one.
inline bool dominates(const ParetoCandidate& a, const ParetoCandidate& b) {
    return a.fitness_spread >= b.fitness_spread && a.fitness_fair >= b.fitness_fair &&
           (a.fitness_spread > b.fitness_spread || a.fitness_fair > b.fitness_fair);
}

// Fast non-dominated sorting into fronts F1, F2, ... of population indices.
inline std::vector<std::vector<int>> non_dominated_sort(std::span<const ParetoCandidate> pop) {
    const int n = static_cast<int>(pop.size());
    std::vector<std::vector<int>> dominated(static_cast<std::size_t>(n));
    std::vector<int> remaining(static_cast<std::size_t>(n), 0);  // unprocessed dominators
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (dominates(pop[i], pop[j])) {
                dominated[static_cast<std::size_t>(i)].push_back(j);
                ++remaining[static_cast<std::size_t>(j)];
            } else if (dominates(pop[j], pop[i])) {
                dominated[static_cast<std::size_t>(j)].push_back(i);
                ++remaining[static_cast<std::size_t>(i)];
            }
        }
    }
    std::vector<std::vector<int>> fronts;
    std::vector<int> current;
    for (int i = 0; i < n; ++i)
        if (remaining[static_cast<std::size_t>(i)] == 0) current.push_back(i);
    while (!current.empty()) {
        std::vector<int> next;
        for (int i : current) {
            for (int j : dominated[static_cast<std::size_t>(i)]) {
                if (--remaining[static_cast<std::size_t>(j)] == 0) next.push_back(j);
            }
        }
        std::sort(next.begin(), next.end());
        fronts.push_back(std::move(current));
        current = std::move(next);
    }
    return fronts;
}

// NSGA-II crowding distance for the members of one front, aligned with the
// order of `front`.
inline std::vector<double> crowding_distances(std::span<const ParetoCandidate> pop,
                                              std::span<const int> front) {
    const std::size_t m = front.size();
    std::vector<double> crowd(m, 0.0);
    if (m <= 2) {
        std::fill(crowd.begin(), crowd.end(), std::numeric_limits<double>::infinity());
        return crowd;
    }
    std::vector<std::size_t> order(m);
    auto by_objective = [&](auto objective) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const double va = objective(pop[front[a]]);
            const double vb = objective(pop[front[b]]);
            if (va != vb) return va < vb;
            return front[a] < front[b];
        });
        const double lo = objective(pop[front[order.front()]]);
        const double hi = objective(pop[front[order.back()]]);
        crowd[order.front()] = std::numeric_limits<double>::infinity();
        crowd[order.back()] = std::numeric_limits<double>::infinity();
        if (hi <= lo) return;
        for (std::size_t i = 1; i + 1 < m; ++i) {
            crowd[order[i]] += (objective(pop[front[order[i + 1]]]) -
                                objective(pop[front[order[i - 1]]])) /
                               (hi - lo);
        }
    };
    by_objective([](const ParetoCandidate& c) { return c.fitness_spread; });
    by_objective([](const ParetoCandidate& c) { return c.fitness_fair; });
    return crowd;
}

// Dominated-area indicator with reference point (0,0), both objectives
// maximized; used for the elitism diagnostic.
inline double hypervolume(std::span<const ParetoCandidate> front) {
    std::vector<std::pair<double, double>> pts;
    pts.reserve(front.size());
    for (const auto& c : front)
        pts.emplace_back(std::max(0.0, c.fitness_spread), std::max(0.0, c.fitness_fair));
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second > b.second;
    });
    double hv = 0.0;
    double best_fair = 0.0;
    for (const auto& [spread, fair] : pts) {
        if (fair > best_fair) {
            hv += spread * (fair - best_fair);
            best_fair = fair;
        }
    }
    return hv;
}

struct FitnessValue {
    double spread = 0.0;
    double fair = 0.0;
};

// Monte-Carlo fitness estimate bound to one (graph, p, benchmark, mode);
// holds reusable simulation scratch, so keep one instance per thread.
class FitnessEvaluator {
public:
    FitnessEvaluator(const Graph& g, double p, const NodeInformationStats& benchmark,
                     FairnessMode mode = FairnessMode::frequency)
        : g_(&g), benchmark_(&benchmark), mode_(mode), p_(p), sim_(g),
          hits_(static_cast<std::size_t>(g.node_count()), 0),
          inv_time_(static_cast<std::size_t>(g.node_count()), 0.0) {
        if (benchmark.nu.size() != static_cast<std::size_t>(g.node_count()))
            throw std::invalid_argument("fitness: benchmark node count mismatch");
    }

    FitnessValue evaluate(std::span<const NodeId> seeds, std::int64_t samples, Engine& rng) {
        if (samples < 1) throw std::invalid_argument("fitness: samples must be >= 1");
        std::fill(hits_.begin(), hits_.end(), 0);
        std::fill(inv_time_.begin(), inv_time_.end(), 0.0);
        double size_sum = 0.0;
        for (std::int64_t s = 0; s < samples; ++s) {
            size_sum += static_cast<double>(
                sim_.run(seeds, p_, rng, [&](NodeId v, std::int32_t t) {
                    ++hits_[static_cast<std::size_t>(v)];
                    inv_time_[static_cast<std::size_t>(v)] += 1.0 / (double(t) + 1.0);
                }));
        }
        FitnessValue fit;
        fit.spread = size_sum / static_cast<double>(samples);
        const auto m = static_cast<double>(samples);
        std::int64_t fair = 0;
        for (std::size_t i = 0; i < hits_.size(); ++i) {
            const bool nu_ok = benchmark_->nu[i] > 0.0 &&
                               static_cast<double>(hits_[i]) >= benchmark_->nu[i] * m;
            const bool tau_ok =
                benchmark_->tau[i] > 0.0 && inv_time_[i] >= benchmark_->tau[i] * m;
            switch (mode_) {
                case FairnessMode::frequency: fair += nu_ok; break;
                case FairnessMode::recency: fair += tau_ok; break;
                case FairnessMode::conjunction: fair += nu_ok && tau_ok; break;
            }
        }
        fit.fair = static_cast<double>(fair);
        return fit;
    }

private:
    const Graph* g_;
    const NodeInformationStats* benchmark_;
    FairnessMode mode_;
    double p_;
    CascadeSimulator sim_;
    std::vector<std::int64_t> hits_;
    std::vector<double> inv_time_;
};

inline FitnessValue evaluate_fitness(const Graph& g, const SeedSet& seeds, double p,
                                     const NodeInformationStats& benchmark,
                                     std::int64_t samples, Engine& rng,
                                     FairnessMode mode = FairnessMode::frequency) {
    FitnessEvaluator eval(g, p, benchmark, mode);
    return eval.evaluate(seeds.nodes, samples, rng);
}

namespace detail {

inline std::uint64_t seed_set_hash(std::span<const NodeId> sorted_seeds) {
    std::uint64_t h = 0x6a5d39eae116586dULL;
    for (NodeId v : sorted_seeds) h = mix_seed(h, static_cast<std::uint64_t>(v) + 1);
    return h;
}

inline std::vector<NodeId> sorted_copy(std::span<const NodeId> nodes) {
    std::vector<NodeId> out(nodes.begin(), nodes.end());
    std::sort(out.begin(), out.end());
    return out;
}

// k distinct picks from `pool` by partial Fisher-Yates; mutates the pool.
inline std::vector<NodeId> pick_k(std::vector<NodeId>& pool, std::size_t k, Engine& rng) {
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j =
            i + std::uniform_int_distribution<std::size_t>(0, pool.size() - 1 - i)(rng);
        std::swap(pool[i], pool[j]);
    }
    return {pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k)};
}

}  // namespace detail

// Union crossover: each child is a uniform k-subset of parent_a ∪ parent_b,
// drawn independently. Identical parents reproduce themselves.
inline std::pair<SeedSet, SeedSet> crossover(const SeedSet& parent_a, const SeedSet& parent_b,
                                             Engine& rng) {
    if (parent_a.nodes.size() != parent_b.nodes.size())
        throw std::invalid_argument("crossover: parents must have equal size");
    const std::size_t k = parent_a.nodes.size();
    auto pool = detail::sorted_copy(parent_a.nodes);
    for (NodeId v : parent_b.nodes) pool.push_back(v);
    std::sort(pool.begin(), pool.end());
    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
    auto draw = [&]() {
        auto child = detail::pick_k(pool, k, rng);
        std::sort(child.begin(), child.end());
        std::sort(pool.begin(), pool.end());
        return child;
    };
    SeedSet child_a{SeedMethod::GA, draw(), parent_a.budget_fraction};
    SeedSet child_b{SeedMethod::GA, draw(), parent_a.budget_fraction};
    return {std::move(child_a), std::move(child_b)};
}

// Random mutation: remove round(replace_frac*k) members and replace them with
// uniformly random nodes from outside the original set.
inline SeedSet mutate_random(const SeedSet& s, double replace_frac, const Graph& g, Engine& rng) {
    const auto k = static_cast<std::int64_t>(s.nodes.size());
    std::int64_t r = std::llround(replace_frac * static_cast<double>(k));
    r = std::min(r, static_cast<std::int64_t>(g.node_count()) - k);
    if (r <= 0) return s;
    std::vector<NodeId> nodes = s.nodes;
    for (std::int64_t i = 0; i < r; ++i) {
        const auto j = static_cast<std::size_t>(
            i + std::uniform_int_distribution<std::int64_t>(0, k - 1 - i)(rng));
        std::swap(nodes[static_cast<std::size_t>(i)], nodes[j]);
    }
    std::vector<std::uint8_t> member(static_cast<std::size_t>(g.node_count()), 0);
    for (NodeId v : s.nodes) member[static_cast<std::size_t>(v)] = 1;
    std::uniform_int_distribution<std::int64_t> any(0, g.node_count() - 1);
    for (std::int64_t i = 0; i < r; ++i) {
        NodeId v;
        do {
            v = static_cast<NodeId>(any(rng));
        } while (member[static_cast<std::size_t>(v)]);
        member[static_cast<std::size_t>(v)] = 1;
        nodes[static_cast<std::size_t>(i)] = v;
    }
    std::sort(nodes.begin(), nodes.end());
    return {s.method, std::move(nodes), s.budget_fraction};
}

namespace detail {

inline SeedSet mutate_tabu_impl(const SeedSet& s, double neighborhood_frac, const Graph& g,
                                std::int64_t samples, Engine& rng, FitnessEvaluator& eval) {
    const auto k = static_cast<std::int64_t>(s.nodes.size());
    const auto n = static_cast<std::int64_t>(g.node_count());
    std::vector<NodeId> base = s.nodes;
    const auto drop =
        static_cast<std::size_t>(std::uniform_int_distribution<std::int64_t>(0, k - 1)(rng));
    std::swap(base[drop], base.back());
    base.pop_back();

    std::vector<std::uint8_t> member(static_cast<std::size_t>(n), 0);
    for (NodeId v : base) member[static_cast<std::size_t>(v)] = 1;
    std::vector<NodeId> pool;
    pool.reserve(static_cast<std::size_t>(n - k + 1));
    for (NodeId v = 0; v < g.node_count(); ++v)
        if (!member[static_cast<std::size_t>(v)]) pool.push_back(v);
    std::int64_t want = std::llround(neighborhood_frac * static_cast<double>(n));
    want = std::clamp<std::int64_t>(want, 1, static_cast<std::int64_t>(pool.size()));
    const auto candidates = pick_k(pool, static_cast<std::size_t>(want), rng);

    std::vector<NodeId> trial = base;
    trial.push_back(0);
    double best_fair = -1.0;
    std::vector<NodeId> best;
    for (NodeId candidate : candidates) {
        trial.back() = candidate;
        const FitnessValue fit = eval.evaluate(trial, samples, rng);
        if (fit.fair > best_fair) {
            best_fair = fit.fair;
            best.assign(1, candidate);
        } else if (fit.fair == best_fair) {
            best.push_back(candidate);
        }
    }
    const NodeId chosen = best[static_cast<std::size_t>(
        std::uniform_int_distribution<std::size_t>(0, best.size() - 1)(rng))];
    base.push_back(chosen);
    std::sort(base.begin(), base.end());
    return {s.method, std::move(base), s.budget_fraction};
}

}  // namespace detail

// Tabu-like mutation: drop one random seed, inspect a random sample of
// non-member candidates with a cheap fitness estimate, and keep the candidate
// whose set leaves the fewest vulnerable nodes (ties broken at random).
inline SeedSet mutate_tabu(const SeedSet& s, double neighborhood_frac, const Graph& g, double p,
                           const NodeInformationStats& benchmark, std::int64_t samples,
                           Engine& rng, FairnessMode mode = FairnessMode::frequency) {
    FitnessEvaluator eval(g, p, benchmark, mode);
    return detail::mutate_tabu_impl(s, neighborhood_frac, g, samples, rng, eval);
}

// Per-generation diagnostics; entry 0 covers the evaluated initial population.
struct OptimizeLog {
    std::vector<double> archive_hypervolume;
};

namespace detail {

// Pareto archive over everything evaluated so far. Members leave only when
// strictly dominated, so the final archive weakly dominates every candidate
// that ever entered it (dominance is transitive).
class ParetoArchive {
public:
    void update(const ParetoCandidate& cand) {
        for (auto& existing : members_) {
            if (existing.seeds == cand.seeds) {
                if (dominates(cand, existing)) existing = cand;
                return;
            }
        }
        for (const auto& existing : members_)
            if (dominates(existing, cand)) return;
        std::erase_if(members_, [&](const ParetoCandidate& m) { return dominates(cand, m); });
        members_.push_back(cand);
    }

    const std::vector<ParetoCandidate>& members() const { return members_; }

private:
    std::vector<ParetoCandidate> members_;
};

// Runs body(slot_index, thread_scratch&) for every slot, spreading slots over
// a small pool; results must be written into slot-indexed storage.
template <class MakeScratch, class Body>
void parallel_slots(int slots, int threads, MakeScratch make_scratch, Body body) {
    const int n_threads = std::min(resolve_threads(threads), slots);
    if (n_threads <= 1) {
        auto scratch = make_scratch();
        for (int i = 0; i < slots; ++i) body(i, scratch);
        return;
    }
    std::atomic<int> next{0};
    auto worker = [&]() {
        auto scratch = make_scratch();
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= slots) break;
            body(i, scratch);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

}  // namespace detail

// The heuristic seed sets the GA is initialized with; also used to compare
// the optimized front against the classic selectors under identical streams.
inline std::vector<SeedSet> heuristic_seed_sets(const Graph& g, NodeId budget, double p,
                                                std::uint64_t master_seed) {
    return {select_hd(g, budget, child_seed(master_seed, stream::ga_init, 0)),
            select_kc(g, budget, child_seed(master_seed, stream::ga_init, 1)),
            select_dd(g, budget, p, child_seed(master_seed, stream::ga_init, 2)),
            select_chd(g, budget, child_seed(master_seed, stream::ga_init, 3))};
}

// NSGA-II style loop over seed sets: heuristic + random initialization,
// binary tournament on (rank, crowding), union crossover, random/tabu-like
// mutation, and (mu+lambda) environmental selection by non-dominated sorting
// with crowding truncation. The returned front is the Pareto archive of the
// whole run, re-evaluated at final_samples and pruned to the non-dominated
// subset. All randomness derives from per-slot child streams of
// cfg.rng_seed, so results do not depend on the thread count.
inline ParetoFront optimize(const Graph& g, double p, NodeId budget, const GAConfig& cfg,
                            const NodeInformationStats& benchmark, OptimizeLog* log = nullptr) {
    cfg.validate();
    detail::check_budget(g, budget);
    if (p < 0.0 || p > 1.0) throw ConfigError("ga: p must lie in [0,1]");
    const std::uint64_t master = cfg.rng_seed;
    const int mu = cfg.population_size;
    const double budget_fraction = double(budget) / double(g.node_count());

    // Frozen mode keys the evaluation stream on the seed set itself, so a set
    // always receives the same fitness estimate at a given sample count.
    auto eval_engine = [&](std::span<const NodeId> sorted_seeds, std::uint64_t gen,
                           std::uint64_t slot) {
        if (cfg.frozen_eval)
            return make_engine(
                child_seed(master, stream::ga_eval, detail::seed_set_hash(sorted_seeds)));
        return make_engine(child_seed(master, stream::ga_eval, gen, slot));
    };

    // initial population: one set per heuristic, the rest uniform random
    std::vector<ParetoCandidate> population;
    population.reserve(static_cast<std::size_t>(mu));
    for (auto& s : heuristic_seed_sets(g, budget, p, master)) {
        if (static_cast<int>(population.size()) == mu) break;
        population.push_back({detail::sorted_copy(s.nodes), 0.0, 0.0, cfg.fitness_samples});
    }
    while (static_cast<int>(population.size()) < mu) {
        const auto s = select_random(
            g, budget, child_seed(master, stream::ga_init, 4 + population.size()));
        population.push_back({detail::sorted_copy(s.nodes), 0.0, 0.0, cfg.fitness_samples});
    }
    detail::parallel_slots(
        mu, cfg.threads,
        [&] { return FitnessEvaluator(g, p, benchmark, cfg.fairness); },
        [&](int slot, FitnessEvaluator& eval) {
            auto& cand = population[static_cast<std::size_t>(slot)];
            Engine rng = eval_engine(cand.seeds, 0, static_cast<std::uint64_t>(slot));
            const FitnessValue fit = eval.evaluate(cand.seeds, cfg.fitness_samples, rng);
            cand.fitness_spread = fit.spread;
            cand.fitness_fair = fit.fair;
        });

    detail::ParetoArchive archive;
    auto absorb_first_front = [&](std::span<const ParetoCandidate> pool) {
        const auto fronts = non_dominated_sort(pool);
        if (!fronts.empty())
            for (int i : fronts.front()) archive.update(pool[static_cast<std::size_t>(i)]);
        if (log) log->archive_hypervolume.push_back(hypervolume(archive.members()));
    };
    absorb_first_front(population);

    for (int gen = 1; gen <= cfg.generations; ++gen) {
        // ranks and crowding of the surviving population
        const auto fronts = non_dominated_sort(population);
        std::vector<int> rank(population.size(), 0);
        std::vector<double> crowd(population.size(), 0.0);
        for (std::size_t f = 0; f < fronts.size(); ++f) {
            const auto distances = crowding_distances(population, fronts[f]);
            for (std::size_t i = 0; i < fronts[f].size(); ++i) {
                rank[static_cast<std::size_t>(fronts[f][i])] = static_cast<int>(f);
                crowd[static_cast<std::size_t>(fronts[f][i])] = distances[i];
            }
        }
        Engine select_rng = make_engine(child_seed(master, stream::ga_select, gen));
        std::uniform_int_distribution<int> pick(0, mu - 1);
        auto tournament = [&]() {
            const int a = pick(select_rng);
            const int b = pick(select_rng);
            const auto ia = static_cast<std::size_t>(a), ib = static_cast<std::size_t>(b);
            if (rank[ia] != rank[ib]) return rank[ia] < rank[ib] ? a : b;
            if (crowd[ia] != crowd[ib]) return crowd[ia] > crowd[ib] ? a : b;
            return a;
        };
        const int n_pairs = (mu + 1) / 2;
        std::vector<std::pair<int, int>> parents(static_cast<std::size_t>(n_pairs));
        for (auto& pr : parents) pr = {tournament(), tournament()};

        std::vector<ParetoCandidate> offspring(static_cast<std::size_t>(mu));
        detail::parallel_slots(
            n_pairs, cfg.threads,
            [&] { return FitnessEvaluator(g, p, benchmark, cfg.fairness); },
            [&](int pair_idx, FitnessEvaluator& eval) {
                Engine vary = make_engine(child_seed(master, stream::ga_vary,
                                                     static_cast<std::uint64_t>(gen),
                                                     static_cast<std::uint64_t>(pair_idx)));
                std::uniform_real_distribution<double> unit(0.0, 1.0);
                const auto& pa = population[static_cast<std::size_t>(parents[pair_idx].first)];
                const auto& pb = population[static_cast<std::size_t>(parents[pair_idx].second)];
                SeedSet a{SeedMethod::GA, pa.seeds, budget_fraction};
                SeedSet b{SeedMethod::GA, pb.seeds, budget_fraction};
                if (unit(vary) < cfg.crossover_prob) std::tie(a, b) = crossover(a, b, vary);
                for (SeedSet* child : {&a, &b}) {
                    if (unit(vary) < cfg.mutation_prob) {
                        if (unit(vary) < cfg.tabu_mutation_freq) {
                            *child = detail::mutate_tabu_impl(*child, cfg.tabu_neighborhood_frac,
                                                              g, cfg.tabu_samples, vary, eval);
                        } else {
                            *child = mutate_random(*child, cfg.random_mutation_replace_frac, g,
                                                   vary);
                        }
                    }
                }
                const int slots[2] = {2 * pair_idx, 2 * pair_idx + 1};
                const SeedSet* children[2] = {&a, &b};
                for (int c = 0; c < 2; ++c) {
                    if (slots[c] >= mu) break;
                    ParetoCandidate cand{children[c]->nodes, 0.0, 0.0, cfg.fitness_samples};
                    Engine rng = eval_engine(cand.seeds, static_cast<std::uint64_t>(gen),
                                             static_cast<std::uint64_t>(slots[c]));
                    const FitnessValue fit = eval.evaluate(cand.seeds, cfg.fitness_samples, rng);
                    cand.fitness_spread = fit.spread;
                    cand.fitness_fair = fit.fair;
                    offspring[static_cast<std::size_t>(slots[c])] = std::move(cand);
                }
            });

        // (mu+lambda) environmental selection
        std::vector<ParetoCandidate> combined = population;
        combined.insert(combined.end(), offspring.begin(), offspring.end());
        const auto combined_fronts = non_dominated_sort(combined);
        std::vector<ParetoCandidate> next_pop;
        next_pop.reserve(static_cast<std::size_t>(mu));
        for (const auto& front : combined_fronts) {
            if (next_pop.size() + front.size() <= static_cast<std::size_t>(mu)) {
                for (int i : front) next_pop.push_back(combined[static_cast<std::size_t>(i)]);
            } else {
                const auto distances = crowding_distances(combined, front);
                std::vector<std::size_t> order(front.size());
                std::iota(order.begin(), order.end(), std::size_t{0});
                std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
                    if (distances[x] != distances[y]) return distances[x] > distances[y];
                    return front[x] < front[y];
                });
                for (std::size_t i = 0; next_pop.size() < static_cast<std::size_t>(mu); ++i)
                    next_pop.push_back(combined[static_cast<std::size_t>(front[order[i]])]);
            }
            if (next_pop.size() == static_cast<std::size_t>(mu)) break;
        }
        population = std::move(next_pop);
        absorb_first_front(combined);
    }

    // final front: re-evaluate the archive, then keep the non-dominated subset
    std::vector<ParetoCandidate> finalists = archive.members();
    detail::parallel_slots(
        static_cast<int>(finalists.size()), cfg.threads,
        [&] { return FitnessEvaluator(g, p, benchmark, cfg.fairness); },
        [&](int slot, FitnessEvaluator& eval) {
            auto& cand = finalists[static_cast<std::size_t>(slot)];
            Engine rng = cfg.frozen_eval
                             ? make_engine(child_seed(master, stream::ga_eval,
                                                      detail::seed_set_hash(cand.seeds)))
                             : make_engine(child_seed(master, stream::ga_final,
                                                      static_cast<std::uint64_t>(slot)));
            const FitnessValue fit = eval.evaluate(cand.seeds, cfg.final_samples, rng);
            cand.fitness_spread = fit.spread;
            cand.fitness_fair = fit.fair;
            cand.eval_samples = cfg.final_samples;
        });
    const auto final_fronts = non_dominated_sort(finalists);
    ParetoFront front;
    if (!final_fronts.empty())
        for (int i : final_fronts.front())
            front.candidates.push_back(finalists[static_cast<std::size_t>(i)]);
    std::sort(front.candidates.begin(), front.candidates.end(),
              [](const ParetoCandidate& a, const ParetoCandidate& b) {
                  if (a.fitness_spread != b.fitness_spread)
                      return a.fitness_spread > b.fitness_spread;
                  if (a.fitness_fair != b.fitness_fair) return a.fitness_fair > b.fitness_fair;
                  return a.seeds < b.seeds;
              });
    front.candidates.erase(std::unique(front.candidates.begin(), front.candidates.end(),
                                       [](const ParetoCandidate& a, const ParetoCandidate& b) {
                                           return a.seeds == b.seeds;
                                       }),
                           front.candidates.end());
    return front;
}

// Independent numerical check of front candidates: `ensembles` ensembles of
// `realizations` ICM runs each; reports mean and standard deviation of both
// objectives per candidate.
struct CandidateEvaluation {
    std::vector<NodeId> seeds;
    double spread_mean = 0.0, spread_sd = 0.0;
    double fair_mean = 0.0, fair_sd = 0.0;
    std::int64_t realizations = 0;
    int ensembles = 0;
};

inline std::vector<CandidateEvaluation> evaluate_front_numerically(
    const Graph& g, std::span<const ParetoCandidate> front, double p, std::int64_t realizations,
    const NodeInformationStats& benchmark, std::uint64_t rng_seed, int ensembles = 10,
    FairnessMode mode = FairnessMode::frequency, int threads = 0) {
    if (ensembles < 1) throw ConfigError("evaluate_front_numerically: ensembles must be >= 1");
    std::vector<CandidateEvaluation> result;
    result.reserve(front.size());
    for (std::size_t c = 0; c < front.size(); ++c) {
        CandidateEvaluation ev;
        ev.seeds = front[c].seeds;
        ev.realizations = realizations;
        ev.ensembles = ensembles;
        std::vector<double> spreads, fairs;
        for (int e = 0; e < ensembles; ++e) {
            SimulationConfig cfg;
            cfg.p = p;
            cfg.realizations = realizations;
            cfg.rng_seed = child_seed(rng_seed, stream::numeric_eval, c, e);
            cfg.threads = threads;
            const CascadeStats stats = simulate_ensemble(g, front[c].seeds, cfg);
            spreads.push_back(stats.mean_size());
            fairs.push_back(static_cast<double>(count_non_vulnerable(stats, benchmark, mode)));
        }
        auto mean_sd = [](const std::vector<double>& xs) {
            const double mean =
                std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
            if (xs.size() < 2) return std::pair{mean, 0.0};
            double ss = 0.0;
            for (double x : xs) ss += (x - mean) * (x - mean);
            return std::pair{mean, std::sqrt(ss / static_cast<double>(xs.size() - 1))};
        };
        std::tie(ev.spread_mean, ev.spread_sd) = mean_sd(spreads);
        std::tie(ev.fair_mean, ev.fair_sd) = mean_sd(fairs);
        result.push_back(std::move(ev));
    }
    return result;
}

inline nlohmann::json front_to_json(const Graph& g,
                                    std::span<const CandidateEvaluation> evaluations,
                                    std::span<const ParetoCandidate> front) {
    nlohmann::json j = nlohmann::json::array();
    for (std::size_t i = 0; i < evaluations.size(); ++i) {
        const auto& ev = evaluations[i];
        nlohmann::json row;
        auto& nodes = row["nodes"] = nlohmann::json::array();
        for (NodeId v : ev.seeds) nodes.push_back(g.label(v));
        row["spread_mean"] = ev.spread_mean;
        row["spread_sd"] = ev.spread_sd;
        row["fair_mean"] = ev.fair_mean;
        row["fair_sd"] = ev.fair_sd;
        row["eval_samples"] = ev.realizations * ev.ensembles;
        if (i < front.size()) {
            row["fitness_spread"] = front[i].fitness_spread;
            row["fitness_fair"] = front[i].fitness_fair;
        }
        j.push_back(std::move(row));
    }
    return j;
}

}  // namespace fairseed
