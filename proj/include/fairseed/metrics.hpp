#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "graph.hpp"
#include "icm.hpp"

namespace fairseed {

// Which effective ratio decides whether a node counts as non-vulnerable.
enum class FairnessMode { frequency, recency, conjunction };

inline const char* to_string(FairnessMode m) {
    switch (m) {
        case FairnessMode::frequency: return "frequency";
        case FairnessMode::recency: return "recency";
        case FairnessMode::conjunction: return "conjunction";
    }
    return "?";
}

inline FairnessMode fairness_mode_from_string(const std::string& s) {
    if (s == "frequency") return FairnessMode::frequency;
    if (s == "recency") return FairnessMode::recency;
    if (s == "conjunction") return FairnessMode::conjunction;
    throw ConfigError("unknown fairness mode: " + s);
}

// Per-node information frequency nu (fraction of realizations that reached
// the node) and recency tau (mean of 1/(t+1), zero contribution from
// realizations that never reach it).
struct NodeInformationStats {
    std::vector<double> nu;
    std::vector<double> tau;
    std::int64_t realizations = 0;
};

inline NodeInformationStats compute_stats(const CascadeStats& acc) {
    if (acc.realizations < 1) throw std::invalid_argument("compute_stats: empty ensemble");
    NodeInformationStats out;
    const auto m = static_cast<double>(acc.realizations);
    out.realizations = acc.realizations;
    out.nu.resize(acc.hits.size());
    out.tau.resize(acc.hits.size());
    for (std::size_t i = 0; i < acc.hits.size(); ++i) {
        out.nu[i] = static_cast<double>(acc.hits[i]) / m;
        out.tau[i] = acc.inv_time_sum[i] / m;
    }
    return out;
}

inline NodeInformationStats compute_stats(std::span<const CascadeTrace> traces) {
    if (traces.empty()) throw std::invalid_argument("compute_stats: empty ensemble");
    const auto n = traces.front().activated.size();
    CascadeStats acc(static_cast<NodeId>(n));
    for (const auto& trace : traces) {
        for (std::size_t i = 0; i < n; ++i) {
            if (trace.activated[i]) {
                ++acc.hits[i];
                acc.inv_time_sum[i] += 1.0 / (double(trace.activation_time[i]) + 1.0);
            }
        }
        ++acc.realizations;
    }
    return compute_stats(acc);
}

// Ratios against the random benchmark. A node is vulnerable when its ratio is
// below one; nodes whose benchmark value is zero get an explicit undefined
// marker instead and never count as vulnerable.
struct EffectiveStats {
    std::vector<double> eff_nu, eff_tau;  // NaN where undefined
    std::vector<std::uint8_t> vulnerable_nu, vulnerable_tau;
    std::vector<std::uint8_t> undefined_nu, undefined_tau;

    std::int64_t count_vulnerable_nu() const { return count(vulnerable_nu); }
    std::int64_t count_vulnerable_tau() const { return count(vulnerable_tau); }
    std::int64_t count_undefined_nu() const { return count(undefined_nu); }
    std::int64_t count_undefined_tau() const { return count(undefined_tau); }

private:
    static std::int64_t count(const std::vector<std::uint8_t>& flags) {
        std::int64_t c = 0;
        for (auto f : flags) c += f;
        return c;
    }
};

inline EffectiveStats compute_effective(const NodeInformationStats& method,
                                        const NodeInformationStats& benchmark) {
    if (method.nu.size() != benchmark.nu.size())
        throw std::invalid_argument("compute_effective: node count mismatch");
    const std::size_t n = method.nu.size();
    EffectiveStats out;
    out.eff_nu.resize(n);
    out.eff_tau.resize(n);
    out.vulnerable_nu.assign(n, 0);
    out.vulnerable_tau.assign(n, 0);
    out.undefined_nu.assign(n, 0);
    out.undefined_tau.assign(n, 0);
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < n; ++i) {
        if (benchmark.nu[i] > 0.0) {
            out.eff_nu[i] = method.nu[i] / benchmark.nu[i];
            out.vulnerable_nu[i] = out.eff_nu[i] < 1.0;
        } else {
            out.eff_nu[i] = nan;
            out.undefined_nu[i] = 1;
        }
        if (benchmark.tau[i] > 0.0) {
            out.eff_tau[i] = method.tau[i] / benchmark.tau[i];
            out.vulnerable_tau[i] = out.eff_tau[i] < 1.0;
        } else {
            out.eff_tau[i] = nan;
            out.undefined_tau[i] = 1;
        }
    }
    return out;
}

// Fraction of nodes that are vulnerable in exactly n of the given methods,
// separately for frequency and recency; index n runs 0..#methods.
struct WorseOffHistogram {
    std::vector<double> frac_nu;
    std::vector<double> frac_tau;
};

inline WorseOffHistogram worse_off_in_n(std::span<const EffectiveStats> methods) {
    if (methods.empty()) throw std::invalid_argument("worse_off_in_n: no methods");
    const std::size_t n = methods.front().vulnerable_nu.size();
    for (const auto& m : methods)
        if (m.vulnerable_nu.size() != n)
            throw std::invalid_argument("worse_off_in_n: node count mismatch");
    WorseOffHistogram hist;
    hist.frac_nu.assign(methods.size() + 1, 0.0);
    hist.frac_tau.assign(methods.size() + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t worse_nu = 0, worse_tau = 0;
        for (const auto& m : methods) {
            worse_nu += m.vulnerable_nu[i];
            worse_tau += m.vulnerable_tau[i];
        }
        hist.frac_nu[worse_nu] += 1.0;
        hist.frac_tau[worse_tau] += 1.0;
    }
    for (auto& f : hist.frac_nu) f /= static_cast<double>(n);
    for (auto& f : hist.frac_tau) f /= static_cast<double>(n);
    return hist;
}

// Empirical CDF: one (x, P(v <= x)) pair per distinct value, ascending.
inline std::vector<std::pair<double, double>> cumulative_distribution(
    std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("cumulative_distribution: no values");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::pair<double, double>> cdf;
    const auto n = static_cast<double>(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (i + 1 == sorted.size() || sorted[i + 1] != sorted[i])
            cdf.emplace_back(sorted[i], static_cast<double>(i + 1) / n);
    }
    return cdf;
}

// Fairness objective: nodes whose estimated ratio is >= 1; undefined-benchmark
// nodes are excluded from the count.
inline std::int64_t count_non_vulnerable(const CascadeStats& acc,
                                         const NodeInformationStats& benchmark,
                                         FairnessMode mode = FairnessMode::frequency) {
    if (acc.hits.size() != benchmark.nu.size())
        throw std::invalid_argument("count_non_vulnerable: node count mismatch");
    const auto m = static_cast<double>(acc.realizations);
    std::int64_t count = 0;
    for (std::size_t i = 0; i < acc.hits.size(); ++i) {
        const bool nu_ok = benchmark.nu[i] > 0.0 &&
                           static_cast<double>(acc.hits[i]) >= benchmark.nu[i] * m;
        const bool tau_ok =
            benchmark.tau[i] > 0.0 && acc.inv_time_sum[i] >= benchmark.tau[i] * m;
        switch (mode) {
            case FairnessMode::frequency: count += nu_ok; break;
            case FairnessMode::recency: count += tau_ok; break;
            case FairnessMode::conjunction: count += nu_ok && tau_ok; break;
        }
    }
    return count;
}

inline void write_node_stats_csv(std::ostream& out, const Graph& g,
                                 const NodeInformationStats& stats, const EffectiveStats& eff) {
    out << "label,nu,tau,eff_nu,eff_tau,vulnerable_nu,vulnerable_tau\n";
    for (NodeId v = 0; v < g.node_count(); ++v) {
        const auto i = static_cast<std::size_t>(v);
        out << g.label(v) << ',' << stats.nu[i] << ',' << stats.tau[i] << ',' << eff.eff_nu[i]
            << ',' << eff.eff_tau[i] << ',' << int(eff.vulnerable_nu[i]) << ','
            << int(eff.vulnerable_tau[i]) << '\n';
    }
}

inline void write_cdf_csv(std::ostream& out,
                          std::span<const std::pair<std::string, std::vector<double>>> series) {
    out << "statistic,x,cum_prob\n";
    for (const auto& [name, values] : series) {
        for (const auto& [x, p] : cumulative_distribution(values))
            out << name << ',' << x << ',' << p << '\n';
    }
}

inline void write_histogram_csv(std::ostream& out, const WorseOffHistogram& hist) {
    out << "n_methods,frac_nu,frac_tau\n";
    for (std::size_t n = 0; n < hist.frac_nu.size(); ++n)
        out << n << ',' << hist.frac_nu[n] << ',' << hist.frac_tau[n] << '\n';
}

}  // namespace fairseed
