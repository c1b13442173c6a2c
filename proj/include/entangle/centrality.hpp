#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "entangle/common.hpp"
#include "entangle/temporal_graph.hpp"

namespace entangle {

enum class CentralityMetric { degree, betweenness_raw, betweenness_normalized, reach2 };

inline const char* to_string(CentralityMetric m) {
    switch (m) {
        case CentralityMetric::degree: return "degree";
        case CentralityMetric::betweenness_raw: return "betweenness_raw";
        case CentralityMetric::betweenness_normalized: return "betweenness_normalized";
        case CentralityMetric::reach2: return "reach2";
    }
    return "?";
}

/// One metric evaluated for every node of a graph. Values are aligned with
/// the sorted actor list.
struct CentralityVector {
    CentralityMetric metric = CentralityMetric::degree;
    bool weighted = false;
    int graph_size = 0;
    std::vector<Actor> actors;
    std::vector<double> values;

    double at(std::string_view actor) const {
        auto it = std::lower_bound(actors.begin(), actors.end(), actor);
        if (it == actors.end() || *it != actor)
            throw std::invalid_argument("unknown actor: " + std::string(actor));
        return values[static_cast<std::size_t>(it - actors.begin())];
    }
};

/// Number of distinct alters adjacent in either direction; a reciprocal
/// pair counts once.
inline int degree(const InteractionGraph& g, std::string_view actor) {
    const auto idx = g.index_of(actor);
    if (!idx) throw std::invalid_argument("unknown actor: " + std::string(actor));
    return static_cast<int>(g.neighbors(*idx).size());
}

/// Distinct nodes reachable within two hops over the undirected view,
/// excluding the actor itself.
inline int reach2(const InteractionGraph& g, std::string_view actor) {
    const auto idx = g.index_of(actor);
    if (!idx) throw std::invalid_argument("unknown actor: " + std::string(actor));
    std::vector<char> seen(static_cast<std::size_t>(g.node_count()), 0);
    seen[static_cast<std::size_t>(*idx)] = 1;
    int count = 0;
    for (int n1 : g.neighbors(*idx)) {
        if (!seen[static_cast<std::size_t>(n1)]) {
            seen[static_cast<std::size_t>(n1)] = 1;
            ++count;
        }
        for (int n2 : g.neighbors(n1)) {
            if (!seen[static_cast<std::size_t>(n2)]) {
                seen[static_cast<std::size_t>(n2)] = 1;
                ++count;
            }
        }
    }
    return count;
}

namespace detail {

// Relative tolerance for treating two weighted path lengths as equal.
// Lengths are sums of inverse integer weights, so genuinely distinct
// values sit far above this.
inline constexpr double kPathTieRel = 1e-12;

inline bool path_lengths_equal(double a, double b) {
    if (std::isinf(a) || std::isinf(b)) return false;
    return std::abs(a - b) <= kPathTieRel * std::max({1.0, std::abs(a), std::abs(b)});
}

/// Brandes accumulation over directed shortest paths from every source.
/// Unweighted mode uses BFS; weighted mode runs Dijkstra with arc length
/// 1/weight and tolerance-based tie detection for path counting.
template <typename Adjacency>
std::vector<double> brandes(int n, const Adjacency& out_arcs, bool weighted) {
    std::vector<double> cb(static_cast<std::size_t>(n), 0.0);
    if (n < 3) return cb;

    std::vector<double> dist(static_cast<std::size_t>(n));
    std::vector<double> sigma(static_cast<std::size_t>(n));
    std::vector<double> delta(static_cast<std::size_t>(n));
    std::vector<std::vector<int>> pred(static_cast<std::size_t>(n));
    std::vector<int> order;
    order.reserve(static_cast<std::size_t>(n));
    std::vector<char> settled(static_cast<std::size_t>(n));

    for (int s = 0; s < n; ++s) {
        if (out_arcs(s).empty()) continue;
        std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
        std::fill(sigma.begin(), sigma.end(), 0.0);
        std::fill(delta.begin(), delta.end(), 0.0);
        for (auto& p : pred) p.clear();
        order.clear();
        dist[static_cast<std::size_t>(s)] = 0.0;
        sigma[static_cast<std::size_t>(s)] = 1.0;

        if (!weighted) {
            std::queue<int> q;
            q.push(s);
            while (!q.empty()) {
                const int v = q.front();
                q.pop();
                order.push_back(v);
                const double dv = dist[static_cast<std::size_t>(v)];
                for (const auto& arc : out_arcs(v)) {
                    const int w = arc.to;
                    auto& dw = dist[static_cast<std::size_t>(w)];
                    if (std::isinf(dw)) {
                        dw = dv + 1.0;
                        q.push(w);
                    }
                    if (dw == dv + 1.0) {
                        sigma[static_cast<std::size_t>(w)] += sigma[static_cast<std::size_t>(v)];
                        pred[static_cast<std::size_t>(w)].push_back(v);
                    }
                }
            }
        } else {
            std::fill(settled.begin(), settled.end(), 0);
            using Entry = std::pair<double, int>;
            std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap;
            heap.emplace(0.0, s);
            while (!heap.empty()) {
                const auto [d, v] = heap.top();
                heap.pop();
                if (settled[static_cast<std::size_t>(v)]) continue;
                settled[static_cast<std::size_t>(v)] = 1;
                order.push_back(v);
                for (const auto& arc : out_arcs(v)) {
                    const int w = arc.to;
                    const double cand = dist[static_cast<std::size_t>(v)] + 1.0 / static_cast<double>(arc.weight);
                    auto& dw = dist[static_cast<std::size_t>(w)];
                    if (cand < dw && !path_lengths_equal(cand, dw)) {
                        dw = cand;
                        sigma[static_cast<std::size_t>(w)] = sigma[static_cast<std::size_t>(v)];
                        pred[static_cast<std::size_t>(w)].assign(1, v);
                        heap.emplace(cand, w);
                    } else if (path_lengths_equal(cand, dw)) {
                        sigma[static_cast<std::size_t>(w)] += sigma[static_cast<std::size_t>(v)];
                        pred[static_cast<std::size_t>(w)].push_back(v);
                    }
                }
            }
        }

        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const int w = *it;
            for (int v : pred[static_cast<std::size_t>(w)]) {
                delta[static_cast<std::size_t>(v)] += sigma[static_cast<std::size_t>(v)] /
                                                      sigma[static_cast<std::size_t>(w)] *
                                                      (1.0 + delta[static_cast<std::size_t>(w)]);
            }
            if (w != s) cb[static_cast<std::size_t>(w)] += delta[static_cast<std::size_t>(w)];
        }
    }
    return cb;
}

} // namespace detail

/// Raw directed betweenness: for each v the sum over ordered reachable
/// pairs (s, t) of the fraction of shortest s-t paths through v. Weighted
/// mode measures arc length as 1/weight.
inline std::vector<double> betweenness_raw_values(const InteractionGraph& g, bool weighted = false) {
    return detail::brandes(g.node_count(), [&g](int v) -> const auto& { return g.out(v); }, weighted);
}

struct BetweennessScores {
    CentralityVector raw;
    CentralityVector normalized;
};

/// Raw and normalized directed betweenness. Normalization divides by
/// (G-1)(G-2); graphs with fewer than three nodes normalize to zero.
inline BetweennessScores betweenness(const InteractionGraph& g, bool weighted = false) {
    std::vector<double> raw = betweenness_raw_values(g, weighted);
    const int n = g.node_count();
    const double denom = n >= 3 ? static_cast<double>(n - 1) * static_cast<double>(n - 2) : 0.0;
    std::vector<double> norm(raw.size(), 0.0);
    if (denom > 0.0)
        for (std::size_t i = 0; i < raw.size(); ++i) norm[i] = raw[i] / denom;
    BetweennessScores scores;
    scores.raw = CentralityVector{CentralityMetric::betweenness_raw, weighted, n, g.nodes(), std::move(raw)};
    scores.normalized =
        CentralityVector{CentralityMetric::betweenness_normalized, weighted, n, g.nodes(), std::move(norm)};
    return scores;
}

/// Classic unordered-pair betweenness on the undirected view: symmetrize
/// the arcs, run the directed accumulation, halve.
inline std::vector<double> undirected_betweenness_values(const InteractionGraph& g) {
    struct Arc {
        int to;
        long long weight;
    };
    const int n = g.node_count();
    std::vector<std::vector<Arc>> adj(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v)
        for (int u : g.neighbors(v)) adj[static_cast<std::size_t>(v)].push_back(Arc{u, 1});
    std::vector<double> cb =
        detail::brandes(n, [&adj](int v) -> const auto& { return adj[static_cast<std::size_t>(v)]; }, false);
    for (double& v : cb) v *= 0.5;
    return cb;
}

/// Freeman group betweenness centralization in [0, 1]: the summed gaps to
/// the most central node, scaled by the star maximum (G-1)^2(G-2)/2.
/// Betweenness here follows the classic undirected unordered-pair
/// convention, which makes the symmetric star attain exactly 1.
/// Graphs with fewer than three nodes are degenerate and score 0.
inline double group_betweenness_centralization(const InteractionGraph& g) {
    const int n = g.node_count();
    if (n < 3) return 0.0;
    const std::vector<double> cb = undirected_betweenness_values(g);
    const double best = *std::max_element(cb.begin(), cb.end());
    double gaps = 0.0;
    for (double v : cb) gaps += best - v;
    const double gm1 = static_cast<double>(n - 1);
    const double gm2 = static_cast<double>(n - 2);
    return 2.0 * gaps / (gm1 * gm1 * gm2);
}

inline CentralityVector degree_vector(const InteractionGraph& g) {
    std::vector<double> values(static_cast<std::size_t>(g.node_count()));
    for (int v = 0; v < g.node_count(); ++v)
        values[static_cast<std::size_t>(v)] = static_cast<double>(g.neighbors(v).size());
    return CentralityVector{CentralityMetric::degree, false, g.node_count(), g.nodes(), std::move(values)};
}

inline CentralityVector reach2_vector(const InteractionGraph& g) {
    std::vector<double> values(static_cast<std::size_t>(g.node_count()));
    for (int v = 0; v < g.node_count(); ++v)
        values[static_cast<std::size_t>(v)] = static_cast<double>(reach2(g, g.nodes()[static_cast<std::size_t>(v)]));
    return CentralityVector{CentralityMetric::reach2, false, g.node_count(), g.nodes(), std::move(values)};
}

/// CSV export `window_index,actor,metric,value` for the standard per-window
/// centrality metrics.
inline void write_centrality_csv(std::ostream& out, const WindowSeries& series,
                                 bool weighted_betweenness = false) {
    out << "window_index,actor,metric,value\n";
    for (std::size_t w = 0; w < series.graphs.size(); ++w) {
        const InteractionGraph& g = series.graphs[w];
        const CentralityVector deg = degree_vector(g);
        const CentralityVector r2 = reach2_vector(g);
        const BetweennessScores b = betweenness(g, weighted_betweenness);
        for (int v = 0; v < g.node_count(); ++v) {
            const std::size_t i = static_cast<std::size_t>(v);
            const std::string& actor = g.nodes()[i];
            out << series.windows[w].index << ',' << csv_escape(actor) << ",degree,"
                << format_sig12(deg.values[i]) << '\n';
            out << series.windows[w].index << ',' << csv_escape(actor) << ",betweenness_raw,"
                << format_sig12(b.raw.values[i]) << '\n';
            out << series.windows[w].index << ',' << csv_escape(actor) << ",betweenness_normalized,"
                << format_sig12(b.normalized.values[i]) << '\n';
            out << series.windows[w].index << ',' << csv_escape(actor) << ",reach2,"
                << format_sig12(r2.values[i]) << '\n';
        }
    }
}

} // namespace entangle
