#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "vomcts/episode.hpp"
#include "vomcts/rng.hpp"

namespace vomcts {

struct MetricsRow {
    std::string planner;
    int m = 0;
    long n = 0;
    double mean_rho = 0.0;
    double std_rho = 0.0;
    double eta = 0.0;           // collision rate
    double success_rate = 0.0;  // goal reached
    double timeout_rate = 0.0;
    double oob_rate = 0.0;
    double mean_tplan = 0.0;
    double std_tplan = 0.0;
    double rho_ci_lo = 0.0;  // bootstrap 95% CI on mean rho
    double rho_ci_hi = 0.0;
};

struct MetricsSummary {
    std::vector<MetricsRow> rows;
};

namespace detail {

inline double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

/// Sample standard deviation; 0 for fewer than two samples.
inline double std_of(const std::vector<double>& v, double mean) {
    if (v.size() < 2) return 0.0;
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace detail

/// Percentile bootstrap CI for the mean of `values`.
inline std::pair<double, double> bootstrap_mean_ci(const std::vector<double>& values,
                                                   std::uint64_t seed, int n_resamples = 10000,
                                                   double coverage = 0.95) {
    if (values.empty()) return {0.0, 0.0};
    Rng rng(seed);
    std::vector<double> means;
    means.reserve(static_cast<std::size_t>(n_resamples));
    for (int b = 0; b < n_resamples; ++b) {
        double s = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) s += values[rng.pick(values.size())];
        means.push_back(s / static_cast<double>(values.size()));
    }
    std::sort(means.begin(), means.end());
    const double q = (1.0 - coverage) / 2.0;
    const auto at = [&](double p) {
        const auto idx = static_cast<std::size_t>(p * (means.size() - 1));
        return means[idx];
    };
    return {at(q), at(1.0 - q)};
}

/// Groups records by (planner, m) in first-appearance order and reduces each
/// group to means, rates and bootstrap CIs. Planning-time statistics pool the
/// per-step times of every episode in the group.
inline MetricsSummary aggregate(const std::vector<EpisodeRecord>& records,
                                std::uint64_t bootstrap_seed = 0, int n_resamples = 10000) {
    if (records.empty()) throw std::invalid_argument("aggregate: empty record set");
    MetricsSummary summary;
    std::vector<std::pair<std::string, int>> keys;
    for (const EpisodeRecord& r : records) {
        const std::pair<std::string, int> key{r.planner, r.m};
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
    }
    for (std::size_t g = 0; g < keys.size(); ++g) {
        const auto& [planner, m] = keys[g];
        MetricsRow row;
        row.planner = planner;
        row.m = m;
        std::vector<double> rhos;
        std::vector<double> tplans;
        long collisions = 0, successes = 0, timeouts = 0, oob = 0;
        for (const EpisodeRecord& r : records) {
            if (r.planner != planner || r.m != m) continue;
            ++row.n;
            rhos.push_back(r.rho);
            for (const StepLog& s : r.step_log) tplans.push_back(s.t_plan);
            switch (r.outcome) {
                case Cause::Collision: ++collisions; break;
                case Cause::GoalReached: ++successes; break;
                case Cause::StepLimit: ++timeouts; break;
                case Cause::OutOfBounds: ++oob; break;
                case Cause::None: break;
            }
        }
        row.mean_rho = detail::mean_of(rhos);
        row.std_rho = detail::std_of(rhos, row.mean_rho);
        row.eta = static_cast<double>(collisions) / static_cast<double>(row.n);
        row.success_rate = static_cast<double>(successes) / static_cast<double>(row.n);
        row.timeout_rate = static_cast<double>(timeouts) / static_cast<double>(row.n);
        row.oob_rate = static_cast<double>(oob) / static_cast<double>(row.n);
        row.mean_tplan = detail::mean_of(tplans);
        row.std_tplan = detail::std_of(tplans, row.mean_tplan);
        const auto [lo, hi] = bootstrap_mean_ci(
            rhos, derive_seed({bootstrap_seed, static_cast<std::uint64_t>(g)}), n_resamples);
        row.rho_ci_lo = lo;
        row.rho_ci_hi = hi;
        summary.rows.push_back(std::move(row));
    }
    return summary;
}

namespace detail {

inline void emit_double(std::ostream& out, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    out << buf;
}

}  // namespace detail

/// Fixed-header summary table consumed by downstream tooling; the header line
/// is part of the interface and must not change.
inline void write_summary_csv(const MetricsSummary& summary, std::ostream& out) {
    out << "planner,m,mean_rho,std_rho,eta,success_rate,mean_tplan,std_tplan,n\n";
    for (const MetricsRow& r : summary.rows) {
        out << r.planner << "," << r.m << ",";
        detail::emit_double(out, r.mean_rho);
        out << ",";
        detail::emit_double(out, r.std_rho);
        out << ",";
        detail::emit_double(out, r.eta);
        out << ",";
        detail::emit_double(out, r.success_rate);
        out << ",";
        detail::emit_double(out, r.mean_tplan);
        out << ",";
        detail::emit_double(out, r.std_tplan);
        out << "," << r.n << "\n";
    }
}

/// Per-metric plot tables keyed by (planner, m), one file per figure axis.
inline void write_plot_csv_rho(const MetricsSummary& s, std::ostream& out) {
    out << "planner,m,mean_rho,std_rho,ci_lo,ci_hi\n";
    for (const MetricsRow& r : s.rows) {
        out << r.planner << "," << r.m << ",";
        detail::emit_double(out, r.mean_rho);
        out << ",";
        detail::emit_double(out, r.std_rho);
        out << ",";
        detail::emit_double(out, r.rho_ci_lo);
        out << ",";
        detail::emit_double(out, r.rho_ci_hi);
        out << "\n";
    }
}

inline void write_plot_csv_eta(const MetricsSummary& s, std::ostream& out) {
    out << "planner,m,eta\n";
    for (const MetricsRow& r : s.rows) {
        out << r.planner << "," << r.m << ",";
        detail::emit_double(out, r.eta);
        out << "\n";
    }
}

inline void write_plot_csv_success(const MetricsSummary& s, std::ostream& out) {
    out << "planner,m,success_rate\n";
    for (const MetricsRow& r : s.rows) {
        out << r.planner << "," << r.m << ",";
        detail::emit_double(out, r.success_rate);
        out << "\n";
    }
}

inline void write_plot_csv_tplan(const MetricsSummary& s, std::ostream& out) {
    out << "planner,m,mean_tplan,std_tplan\n";
    for (const MetricsRow& r : s.rows) {
        out << r.planner << "," << r.m << ",";
        detail::emit_double(out, r.mean_tplan);
        out << ",";
        detail::emit_double(out, r.std_tplan);
        out << "\n";
    }
}

}  // namespace vomcts
