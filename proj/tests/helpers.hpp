#pragma once

// Shared fixtures and independent oracles for the test suites. The oracles
// intentionally avoid the library's algorithmic paths: betweenness is
// checked against exhaustive simple-path enumeration, Gini against the
// direct double sum.

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "entangle/entangle.hpp"

namespace helpers {

using entangle::Actor;
using entangle::CommEvent;
using entangle::EventLog;
using entangle::Instant;
using entangle::InteractionGraph;
using entangle::kMsPerDay;
using entangle::kMsPerHour;

struct ArcSpec {
    Actor from;
    Actor to;
    long long weight = 1;
};

inline InteractionGraph make_graph(const std::vector<ArcSpec>& arcs,
                                   const std::vector<Actor>& extra_nodes = {}) {
    std::map<std::pair<Actor, Actor>, long long> counts;
    for (const ArcSpec& a : arcs) counts[{a.from, a.to}] += a.weight;
    return InteractionGraph::build(counts, extra_nodes);
}

/// Symmetric star: center exchanges weight-1 arcs with each leaf.
inline InteractionGraph star_graph(int leaves) {
    std::vector<ArcSpec> arcs;
    for (int i = 0; i < leaves; ++i) {
        const Actor leaf = "l" + std::to_string(i);
        arcs.push_back({"c", leaf, 1});
        arcs.push_back({leaf, "c", 1});
    }
    return make_graph(arcs);
}

inline InteractionGraph path_graph(int n, bool symmetric) {
    std::vector<ArcSpec> arcs;
    for (int i = 0; i + 1 < n; ++i) {
        const Actor a = "p" + std::to_string(i);
        const Actor b = "p" + std::to_string(i + 1);
        arcs.push_back({a, b, 1});
        if (symmetric) arcs.push_back({b, a, 1});
    }
    return make_graph(arcs);
}

inline InteractionGraph cycle_graph(int n, bool symmetric) {
    std::vector<ArcSpec> arcs;
    for (int i = 0; i < n; ++i) {
        const Actor a = "p" + std::to_string(i);
        const Actor b = "p" + std::to_string((i + 1) % n);
        arcs.push_back({a, b, 1});
        if (symmetric) arcs.push_back({b, a, 1});
    }
    return make_graph(arcs);
}

/// Exhaustive-betweenness oracle: enumerate every simple path per ordered
/// pair, keep those tied (within tolerance) with the shortest, and credit
/// interior nodes fractionally.
inline std::vector<double> brute_force_betweenness(const InteractionGraph& g, bool weighted) {
    const int n = g.node_count();
    std::vector<double> cb(static_cast<std::size_t>(n), 0.0);
    for (int s = 0; s < n; ++s) {
        for (int t = 0; t < n; ++t) {
            if (s == t) continue;
            std::vector<std::pair<double, std::vector<int>>> paths;
            std::vector<int> stack{s};
            std::vector<char> on_path(static_cast<std::size_t>(n), 0);
            on_path[static_cast<std::size_t>(s)] = 1;
            std::function<void(int, double)> dfs = [&](int v, double len) {
                if (v == t) {
                    paths.emplace_back(len, std::vector<int>(stack.begin() + 1, stack.end() - 1));
                    return;
                }
                for (const auto& arc : g.out(v)) {
                    if (on_path[static_cast<std::size_t>(arc.to)]) continue;
                    on_path[static_cast<std::size_t>(arc.to)] = 1;
                    stack.push_back(arc.to);
                    dfs(arc.to, len + (weighted ? 1.0 / static_cast<double>(arc.weight) : 1.0));
                    stack.pop_back();
                    on_path[static_cast<std::size_t>(arc.to)] = 0;
                }
            };
            dfs(s, 0.0);
            if (paths.empty()) continue;
            double best = paths.front().first;
            for (const auto& [len, interior] : paths) best = std::min(best, len);
            const double tol = 1e-12 * std::max(1.0, best);
            double sigma = 0.0;
            std::vector<double> sigma_v(static_cast<std::size_t>(n), 0.0);
            for (const auto& [len, interior] : paths) {
                if (len > best + tol) continue;
                sigma += 1.0;
                for (int v : interior) sigma_v[static_cast<std::size_t>(v)] += 1.0;
            }
            for (int v = 0; v < n; ++v)
                if (v != s && v != t)
                    cb[static_cast<std::size_t>(v)] += sigma_v[static_cast<std::size_t>(v)] / sigma;
        }
    }
    return cb;
}

/// Direct double-sum Gini straight from the definition.
inline std::optional<double> gini_double_sum(std::span<const double> values) {
    const std::size_t n = values.size();
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    if (mean == 0.0) return std::nullopt;
    double sum = 0.0;
    for (double a : values)
        for (double b : values) sum += std::abs(a - b);
    return sum / (2.0 * static_cast<double>(n) * static_cast<double>(n) * mean);
}

/// Seeded random digraph over n nodes: each ordered pair carries an arc
/// with the given probability, weights uniform in {1..5}.
inline InteractionGraph random_digraph(entangle::Xoshiro256ss& rng, int n, double arc_prob = 0.4) {
    std::vector<ArcSpec> arcs;
    std::vector<Actor> nodes;
    for (int i = 0; i < n; ++i) nodes.push_back("v" + std::to_string(i));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            if (rng.uniform() < arc_prob)
                arcs.push_back({nodes[static_cast<std::size_t>(i)], nodes[static_cast<std::size_t>(j)],
                                static_cast<long long>(1 + rng.below(5))});
        }
    }
    return make_graph(arcs, nodes);
}

inline constexpr Instant kEpoch2014 = 1398902400000; // 2014-05-01T00:00:00Z

inline CommEvent make_event(std::string id, Instant ts, Actor sender, std::vector<Actor> recipients,
                            std::string reply_to = "") {
    CommEvent e;
    e.msg_id = std::move(id);
    e.timestamp = ts;
    e.sender = std::move(sender);
    e.recipients = std::move(recipients);
    e.reply_to = std::move(reply_to);
    return e;
}

/// Seeded random log: uniform event times over window_count windows,
/// random sender, one or two distinct other recipients.
inline EventLog random_log(std::uint64_t seed, int actor_count, int window_count,
                           int events_per_window = 6, Instant start = kEpoch2014,
                           entangle::DurationMs window_len = 7 * kMsPerDay) {
    entangle::Xoshiro256ss rng(seed);
    std::vector<Actor> actors;
    for (int i = 0; i < actor_count; ++i) actors.push_back("p" + std::to_string(i));
    std::vector<CommEvent> events;
    const long long total =
        static_cast<long long>(window_count) * static_cast<long long>(events_per_window);
    const entangle::DurationMs span = static_cast<entangle::DurationMs>(window_count) * window_len;
    for (long long k = 0; k < total; ++k) {
        const Instant ts = start + static_cast<Instant>(rng.uniform() * static_cast<double>(span));
        const std::size_t sender = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(actor_count)));
        std::vector<Actor> recipients;
        const int want = actor_count > 2 && rng.uniform() < 0.3 ? 2 : 1;
        while (static_cast<int>(recipients.size()) < want) {
            const std::size_t r = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(actor_count)));
            if (r == sender) continue;
            if (std::find(recipients.begin(), recipients.end(), actors[r]) != recipients.end()) continue;
            recipients.push_back(actors[r]);
        }
        events.push_back(make_event("m" + std::to_string(1000 + k), ts, actors[sender], recipients));
    }
    return EventLog::from_events(std::move(events));
}

} // namespace helpers
