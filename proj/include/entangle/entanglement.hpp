#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "entangle/centrality.hpp"
#include "entangle/csv.hpp"
#include "entangle/common.hpp"
#include "entangle/interaction_metrics.hpp"
#include "entangle/temporal_graph.hpp"

namespace entangle {

enum class SeriesMetric { activity, betweenness_normalized, group_betweenness_centralization };

/// Subject id used for network-level series such as centralization.
inline constexpr const char* kNetworkSubject = "<network>";

/// One value per window for one subject.
struct MetricSeries {
    std::string subject;
    SeriesMetric metric = SeriesMetric::activity;
    std::vector<double> values;
    Window period;
};

/// sqrt of the summed squared per-window gaps; |x - y| for a single window.
inline double euclid_distance(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw std::invalid_argument("series length mismatch: " + std::to_string(x.size()) +
                                    " vs " + std::to_string(y.size()));
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

inline double euclid_distance(const MetricSeries& x, const MetricSeries& y) {
    return euclid_distance(std::span<const double>(x.values), std::span<const double>(y.values));
}

/// Which normalization constant divides an actor's raw directed betweenness.
enum class NormConvention { directed, undirected };

struct EntanglementOptions {
    double epsilon = 1e-9; // floor for the distance denominator
    bool weighted_betweenness = false;
    NormConvention betweenness_norm = NormConvention::directed;
    bool operator==(const EntanglementOptions&) const = default;
};

namespace detail {

inline double betweenness_norm_denominator(int g, NormConvention convention) {
    if (g < 3) return 0.0;
    const double d = static_cast<double>(g - 1) * static_cast<double>(g - 2);
    return convention == NormConvention::directed ? d : d / 2.0;
}

} // namespace detail

/// Core entanglement form: degree product over the floored series distance.
/// A zero degree annihilates the pair regardless of distance.
inline double entanglement_value(double degree_x, double degree_y, double distance, double eps) {
    if (eps <= 0.0) throw std::invalid_argument("epsilon must be positive");
    if (degree_x == 0.0 || degree_y == 0.0) return 0.0;
    return degree_x * degree_y / std::max(distance, eps);
}

/// Per-window sent-message counts for one actor.
inline MetricSeries activity_series(const EventLog& log, const WindowSeries& series,
                                    std::string_view actor) {
    MetricSeries ms{std::string(actor), SeriesMetric::activity, {}, series.period};
    ms.values.reserve(series.windows.size());
    for (const Window& w : series.windows)
        ms.values.push_back(static_cast<double>(activity(log, actor, w)));
    return ms;
}

/// Per-window normalized directed betweenness for one actor; absent actors
/// score zero in that window.
inline MetricSeries betweenness_series(const WindowSeries& series, std::string_view actor,
                                       bool weighted = false,
                                       NormConvention convention = NormConvention::directed) {
    MetricSeries ms{std::string(actor), SeriesMetric::betweenness_normalized, {}, series.period};
    ms.values.reserve(series.windows.size());
    for (const InteractionGraph& g : series.graphs) {
        const auto idx = g.index_of(actor);
        if (!idx) {
            ms.values.push_back(0.0);
            continue;
        }
        const std::vector<double> raw = betweenness_raw_values(g, weighted);
        const double denom = detail::betweenness_norm_denominator(g.node_count(), convention);
        ms.values.push_back(denom > 0.0 ? raw[static_cast<std::size_t>(*idx)] / denom : 0.0);
    }
    return ms;
}

/// Per-window group betweenness centralization of the whole network.
inline MetricSeries centralization_series(const WindowSeries& series) {
    MetricSeries ms{kNetworkSubject, SeriesMetric::group_betweenness_centralization, {}, series.period};
    ms.values.reserve(series.windows.size());
    for (const InteractionGraph& g : series.graphs)
        ms.values.push_back(group_betweenness_centralization(g));
    return ms;
}

namespace detail {

inline double aggregate_degree(const WindowSeries& series, std::string_view actor) {
    const auto idx = series.aggregate.index_of(actor);
    if (!idx) return 0.0;
    return static_cast<double>(series.aggregate.neighbors(*idx).size());
}

inline void require_pair(const WindowSeries& series, std::string_view x, std::string_view y) {
    if (x == y) throw std::invalid_argument("entanglement of an actor with itself is undefined");
    if (!series.universe_index(x))
        throw std::invalid_argument("unknown actor: " + std::string(x));
    if (!series.universe_index(y))
        throw std::invalid_argument("unknown actor: " + std::string(y));
}

} // namespace detail

/// Degree product over the Euclidean distance of the two actors' activity
/// series; degrees come from the period-aggregate graph.
inline double activity_entanglement(const EventLog& log, std::string_view x, std::string_view y,
                                    const WindowSeries& series, double eps = 1e-9) {
    detail::require_pair(series, x, y);
    const double dx = detail::aggregate_degree(series, x);
    const double dy = detail::aggregate_degree(series, y);
    const double dist = euclid_distance(activity_series(log, series, x),
                                        activity_series(log, series, y));
    return entanglement_value(dx, dy, dist, eps);
}

/// Same form with the distance taken over per-window normalized betweenness.
inline double betweenness_entanglement(std::string_view x, std::string_view y,
                                       const WindowSeries& series, bool weighted = false,
                                       double eps = 1e-9,
                                       NormConvention convention = NormConvention::directed) {
    detail::require_pair(series, x, y);
    const double dx = detail::aggregate_degree(series, x);
    const double dy = detail::aggregate_degree(series, y);
    const double dist = euclid_distance(betweenness_series(series, x, weighted, convention),
                                        betweenness_series(series, y, weighted, convention));
    return entanglement_value(dx, dy, dist, eps);
}

/// How closely an actor's betweenness trajectory tracks the network's
/// centralization trajectory: mean centralization over the floored distance
/// between the two series. Zero when centralization is zero throughout.
inline double group_betweenness_entanglement(std::string_view x, const WindowSeries& series,
                                             double eps = 1e-9, bool weighted = false,
                                             NormConvention convention = NormConvention::directed) {
    if (eps <= 0.0) throw std::invalid_argument("epsilon must be positive");
    if (!series.universe_index(x))
        throw std::invalid_argument("unknown actor: " + std::string(x));
    if (series.windows.empty()) throw std::invalid_argument("empty window series");
    const MetricSeries cgb = centralization_series(series);
    double mean = 0.0;
    for (double v : cgb.values) mean += v;
    mean /= static_cast<double>(cgb.values.size());
    if (mean == 0.0) return 0.0;
    const double dist = euclid_distance(cgb, betweenness_series(series, x, weighted, convention));
    return mean / std::max(dist, eps);
}

enum class EntanglementMetric { E_A, E_B };

inline const char* to_string(EntanglementMetric m) {
    return m == EntanglementMetric::E_A ? "E_A" : "E_B";
}

/// Symmetric actor-by-actor matrix of one entanglement metric over a
/// period. The diagonal is undefined and excluded from every summary.
struct EntanglementMatrix {
    EntanglementMetric metric = EntanglementMetric::E_A;
    std::vector<Actor> actors; // sorted
    std::vector<double> values; // n*n, row-major, diagonal = NaN
    Window period;
    double epsilon = 1e-9;

    std::size_t size() const { return actors.size(); }

    double at(std::size_t i, std::size_t j) const { return values[i * actors.size() + j]; }

    std::size_t index_of(std::string_view actor) const {
        auto it = std::lower_bound(actors.begin(), actors.end(), actor);
        if (it == actors.end() || *it != actor)
            throw std::invalid_argument("actor not in matrix: " + std::string(actor));
        return static_cast<std::size_t>(it - actors.begin());
    }

    /// The actor's row without the diagonal entry, in actor order.
    std::vector<double> row_off_diagonal(std::size_t i) const {
        std::vector<double> row;
        row.reserve(actors.size() - 1);
        for (std::size_t j = 0; j < actors.size(); ++j)
            if (j != i) row.push_back(at(i, j));
        return row;
    }
};

/// Fill the full pairwise matrix for E_A or E_B. Series and aggregate
/// degrees are evaluated once per actor, then combined per pair.
inline EntanglementMatrix pairwise_matrix(EntanglementMetric metric, const EventLog& log,
                                          const WindowSeries& series,
                                          const EntanglementOptions& options = {}) {
    const std::size_t n = series.actor_universe.size();
    if (n < 2) throw std::invalid_argument("pairwise matrix needs at least 2 actors");
    if (options.epsilon <= 0.0) throw std::invalid_argument("epsilon must be positive");

    EntanglementMatrix m;
    m.metric = metric;
    m.actors = series.actor_universe;
    m.period = series.period;
    m.epsilon = options.epsilon;
    m.values.assign(n * n, std::numeric_limits<double>::quiet_NaN());

    // Per-actor inputs, one pass.
    std::vector<double> degrees(n);
    for (std::size_t i = 0; i < n; ++i)
        degrees[i] = detail::aggregate_degree(series, m.actors[i]);

    const std::size_t wcount = series.windows.size();
    std::vector<std::vector<double>> table(n, std::vector<double>(wcount, 0.0));
    if (metric == EntanglementMetric::E_A) {
        // Single chronological tally instead of per-actor rescans.
        for (std::size_t w = 0; w < wcount; ++w) {
            const auto [lo, hi] = log.range(series.windows[w].start, series.windows[w].end);
            for (std::size_t i = lo; i < hi; ++i) {
                const auto idx = series.universe_index(log[i].sender);
                if (idx) table[static_cast<std::size_t>(*idx)][w] += 1.0;
            }
        }
    } else {
        for (std::size_t w = 0; w < wcount; ++w) {
            const InteractionGraph& g = series.graphs[w];
            const std::vector<double> raw = betweenness_raw_values(g, options.weighted_betweenness);
            const double denom =
                detail::betweenness_norm_denominator(g.node_count(), options.betweenness_norm);
            for (int v = 0; v < g.node_count(); ++v) {
                const auto idx = series.universe_index(g.nodes()[static_cast<std::size_t>(v)]);
                if (idx && denom > 0.0)
                    table[static_cast<std::size_t>(*idx)][w] = raw[static_cast<std::size_t>(v)] / denom;
            }
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dist = euclid_distance(std::span<const double>(table[i]),
                                                std::span<const double>(table[j]));
            const double value = entanglement_value(degrees[i], degrees[j], dist, options.epsilon);
            m.values[i * n + j] = value;
            m.values[j * n + i] = value;
        }
    }
    return m;
}

/// Exact double-sum Gini: sum of |x_i - x_j| over all ordered pairs divided
/// by 2 n^2 mean, computed via the sorted O(n log n) identity. Undefined
/// for an all-zero vector; negative entries are a domain error.
inline std::optional<double> gini(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n == 0) throw std::invalid_argument("gini of an empty vector");
    std::vector<double> sorted(values.begin(), values.end());
    double total = 0.0;
    for (double v : sorted) {
        if (v < 0.0) throw std::invalid_argument("gini requires nonnegative values");
        total += v;
    }
    if (total == 0.0) return std::nullopt;
    std::sort(sorted.begin(), sorted.end());
    double weighted = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        weighted += (2.0 * static_cast<double>(i) - static_cast<double>(n) + 1.0) * sorted[i];
    return weighted / (static_cast<double>(n) * total);
}

/// Mean and Gini over one actor's off-diagonal row.
struct EgoEntanglementSummary {
    Actor actor;
    double mean = 0.0;
    std::optional<double> gini; // undefined when the row is all zeros
};

inline EgoEntanglementSummary ego_summary(const EntanglementMatrix& matrix, std::string_view actor) {
    const std::size_t i = matrix.index_of(actor);
    const std::vector<double> row = matrix.row_off_diagonal(i);
    EgoEntanglementSummary summary;
    summary.actor = std::string(actor);
    double sum = 0.0;
    for (double v : row) sum += v;
    summary.mean = sum / static_cast<double>(row.size());
    summary.gini = gini(std::span<const double>(row));
    return summary;
}

/// Matrix CSV `metric,actor_x,actor_y,value`, one row per unordered pair.
inline void write_matrix_csv(std::ostream& out, const EntanglementMatrix& matrix) {
    out << "metric,actor_x,actor_y,value\n";
    for (std::size_t i = 0; i < matrix.size(); ++i)
        for (std::size_t j = i + 1; j < matrix.size(); ++j)
            out << to_string(matrix.metric) << ',' << csv_escape(matrix.actors[i]) << ','
                << csv_escape(matrix.actors[j]) << ',' << format_sig12(matrix.at(i, j)) << '\n';
}

/// Ego CSV `actor,mean,gini`; the gini field is empty when undefined.
inline void write_ego_csv(std::ostream& out, const EntanglementMatrix& matrix) {
    out << "actor,mean,gini\n";
    for (const Actor& actor : matrix.actors) {
        const EgoEntanglementSummary s = ego_summary(matrix, actor);
        out << csv_escape(actor) << ',' << format_sig12(s.mean) << ','
            << (s.gini ? format_sig12(*s.gini) : std::string()) << '\n';
    }
}

/// Aggregate of one value per team member: mean, population standard
/// deviation, Gini. Singleton teams are flagged degenerate.
struct TeamReport {
    std::string team;
    std::vector<Actor> members;
    std::vector<double> member_values;
    double mean = 0.0;
    double stddev = 0.0; // population denominator
    std::optional<double> gini;
    bool degenerate = false;
};

inline TeamReport team_report(const std::string& team, std::vector<Actor> members,
                              std::vector<double> member_values) {
    if (member_values.empty()) throw std::invalid_argument("team report needs at least one member");
    if (members.size() != member_values.size())
        throw std::invalid_argument("member/value size mismatch");
    TeamReport report;
    report.team = team;
    report.members = std::move(members);
    report.member_values = std::move(member_values);
    report.degenerate = report.member_values.size() < 2;
    const double n = static_cast<double>(report.member_values.size());
    double sum = 0.0;
    for (double v : report.member_values) sum += v;
    report.mean = sum / n;
    double ss = 0.0;
    for (double v : report.member_values) ss += (v - report.mean) * (v - report.mean);
    report.stddev = std::sqrt(ss / n);
    report.gini = gini(std::span<const double>(report.member_values));
    return report;
}

} // namespace entangle
