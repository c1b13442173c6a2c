#pragma once

#include <algorithm>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "entangle/common.hpp"
#include "entangle/event_log.hpp"
#include "entangle/time.hpp"

namespace entangle {

/// Half-open time slice [start, end).
struct Window {
    Instant start = 0;
    Instant end = 0;
    int index = 0;

    bool contains(Instant t) const { return t >= start && t < end; }
    DurationMs length() const { return end - start; }
};

/// Slice [span_start, span_end) into windows of window_len every step.
/// Only windows that fit entirely are emitted unless allow_partial, which
/// appends at most one truncated final window.
inline std::vector<Window> make_windows(Instant span_start, Instant span_end,
                                        DurationMs window_len, DurationMs step,
                                        bool allow_partial = false) {
    if (window_len <= 0) throw ConfigError("window length must be positive");
    if (step <= 0) throw ConfigError("window step must be positive");
    if (span_start > span_end) throw std::invalid_argument("span start after span end");
    std::vector<Window> windows;
    Instant start = span_start;
    int index = 0;
    while (start + window_len <= span_end) {
        windows.push_back(Window{start, start + window_len, index});
        start += step;
        ++index;
    }
    if (allow_partial && start < span_end)
        windows.push_back(Window{start, span_end, index});
    return windows;
}

/// Directed interaction graph: arc (s, r) weighted by the number of
/// messages s sent to r. Nodes are kept sorted so every traversal is
/// deterministic.
class InteractionGraph {
public:
    struct OutArc {
        int to = 0;
        long long weight = 0;
    };

    InteractionGraph() = default;

    /// Build from arc counts keyed by actor names, plus extra nodes to force
    /// into the node set (isolated unless they carry arcs).
    static InteractionGraph build(const std::map<std::pair<Actor, Actor>, long long>& arc_counts,
                                  std::span<const Actor> extra_nodes = {}) {
        InteractionGraph g;
        std::vector<Actor> names(extra_nodes.begin(), extra_nodes.end());
        for (const auto& [key, w] : arc_counts) {
            if (w <= 0) throw std::invalid_argument("arc weight must be positive");
            if (key.first == key.second) throw std::invalid_argument("self-arc not allowed");
            names.push_back(key.first);
            names.push_back(key.second);
        }
        std::sort(names.begin(), names.end());
        names.erase(std::unique(names.begin(), names.end()), names.end());
        g.nodes_ = std::move(names);
        g.out_.assign(g.nodes_.size(), {});
        g.undirected_.assign(g.nodes_.size(), {});
        for (const auto& [key, w] : arc_counts) {
            const int s = *g.index_of(key.first);
            const int t = *g.index_of(key.second);
            g.out_[s].push_back(OutArc{t, w});
            g.undirected_[s].push_back(t);
            g.undirected_[t].push_back(s);
            g.total_weight_ += w;
            ++g.arc_count_;
        }
        for (auto& adj : g.out_)
            std::sort(adj.begin(), adj.end(), [](const OutArc& a, const OutArc& b) { return a.to < b.to; });
        for (auto& adj : g.undirected_) {
            std::sort(adj.begin(), adj.end());
            adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
        }
        return g;
    }

    int node_count() const { return static_cast<int>(nodes_.size()); }
    const std::vector<Actor>& nodes() const { return nodes_; }

    std::optional<int> index_of(std::string_view actor) const {
        auto it = std::lower_bound(nodes_.begin(), nodes_.end(), actor);
        if (it == nodes_.end() || *it != actor) return std::nullopt;
        return static_cast<int>(it - nodes_.begin());
    }

    const std::vector<OutArc>& out(int v) const { return out_[static_cast<std::size_t>(v)]; }

    /// Distinct neighbors in either direction, sorted.
    const std::vector<int>& neighbors(int v) const { return undirected_[static_cast<std::size_t>(v)]; }

    long long arc_weight(int s, int t) const {
        const auto& adj = out_[static_cast<std::size_t>(s)];
        auto it = std::lower_bound(adj.begin(), adj.end(), t,
                                   [](const OutArc& a, int to) { return a.to < to; });
        if (it == adj.end() || it->to != t) return 0;
        return it->weight;
    }

    long long total_weight() const { return total_weight_; }
    int arc_count() const { return arc_count_; }

private:
    std::vector<Actor> nodes_;
    std::vector<std::vector<OutArc>> out_;
    std::vector<std::vector<int>> undirected_;
    long long total_weight_ = 0;
    int arc_count_ = 0;
};

/// Interaction graph of one window. An event with k recipients contributes
/// k arcs of weight 1 (accumulated). Roster actors are forced into the node
/// set even when absent from the window.
inline InteractionGraph build_window_graph(const EventLog& log, const Window& window,
                                           std::span<const Actor> roster = {}) {
    std::map<std::pair<Actor, Actor>, long long> counts;
    const auto [lo, hi] = log.range(window.start, window.end);
    for (std::size_t i = lo; i < hi; ++i) {
        const CommEvent& e = log[i];
        for (const Actor& r : e.recipients) ++counts[{e.sender, r}];
    }
    return InteractionGraph::build(counts, roster);
}

/// Same construction over a whole period; equals the arc-wise sum of
/// per-window graphs when the windows tile the period exactly.
inline InteractionGraph build_aggregate_graph(const EventLog& log, const Window& period,
                                              std::span<const Actor> roster = {}) {
    return build_window_graph(log, period, roster);
}

/// Windows, one graph per window, their actor universe, and the
/// period-aggregate graph over the covered span.
struct WindowSeries {
    std::vector<Window> windows;
    std::vector<InteractionGraph> graphs;
    std::vector<Actor> actor_universe; // sorted union of per-window node sets
    InteractionGraph aggregate;        // over [windows.front().start, windows.back().end)
    Window period;

    std::size_t window_count() const { return windows.size(); }

    std::optional<int> universe_index(std::string_view actor) const {
        auto it = std::lower_bound(actor_universe.begin(), actor_universe.end(), actor);
        if (it == actor_universe.end() || *it != actor) return std::nullopt;
        return static_cast<int>(it - actor_universe.begin());
    }
};

/// Build the window series over [span_start, span_end). With roster_mode,
/// every window graph carries the full actor universe so per-actor metric
/// series are defined (possibly zero) in every window.
inline WindowSeries make_window_series(const EventLog& log, Instant span_start, Instant span_end,
                                       DurationMs window_len, DurationMs step,
                                       bool allow_partial = false, bool roster_mode = true) {
    WindowSeries series;
    series.windows = make_windows(span_start, span_end, window_len, step, allow_partial);
    if (series.windows.empty()) return series;

    // Universe: actors incident to at least one event inside some window.
    std::vector<Actor> universe;
    for (const Window& w : series.windows) {
        const auto [lo, hi] = log.range(w.start, w.end);
        for (std::size_t i = lo; i < hi; ++i) {
            universe.push_back(log[i].sender);
            universe.insert(universe.end(), log[i].recipients.begin(), log[i].recipients.end());
        }
    }
    std::sort(universe.begin(), universe.end());
    universe.erase(std::unique(universe.begin(), universe.end()), universe.end());
    series.actor_universe = std::move(universe);

    const std::span<const Actor> roster =
        roster_mode ? std::span<const Actor>(series.actor_universe) : std::span<const Actor>();
    series.graphs.reserve(series.windows.size());
    for (const Window& w : series.windows)
        series.graphs.push_back(build_window_graph(log, w, roster));
    series.period = Window{series.windows.front().start, series.windows.back().end, 0};
    series.aggregate = build_aggregate_graph(log, series.period, roster);
    return series;
}

/// Convenience: series spanning the data, windows anchored at the first event.
inline WindowSeries make_window_series(const EventLog& log, DurationMs window_len, DurationMs step,
                                       bool allow_partial = false, bool roster_mode = true) {
    if (log.empty()) return WindowSeries{};
    const Instant start = log.events().front().timestamp;
    const Instant end = log.events().back().timestamp + 1; // include the last event
    return make_window_series(log, start, end, window_len, step, allow_partial, roster_mode);
}

/// CSV export `window_index,source,target,weight`, one row per arc.
inline void write_window_graphs_csv(std::ostream& out, const WindowSeries& series) {
    out << "window_index,source,target,weight\n";
    for (std::size_t w = 0; w < series.graphs.size(); ++w) {
        const InteractionGraph& g = series.graphs[w];
        for (int v = 0; v < g.node_count(); ++v) {
            for (const auto& arc : g.out(v)) {
                out << series.windows[w].index << ',' << csv_escape(g.nodes()[v]) << ','
                    << csv_escape(g.nodes()[arc.to]) << ',' << arc.weight << '\n';
            }
        }
    }
}

} // namespace entangle
