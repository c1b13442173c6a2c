#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "entangle/common.hpp"
#include "entangle/event_log.hpp"
#include "entangle/temporal_graph.hpp"

namespace entangle {

enum class Perspective { ego, alter };

/// Pooled averages one mean over all run observations; per_pair averages
/// the per-counterpart means.
enum class NudgePooling { pooled, per_pair };

/// Messages sent by the actor within the window; an event counts once
/// regardless of its recipient count.
inline long long activity(const EventLog& log, std::string_view actor, const Window& window) {
    const auto [lo, hi] = log.range(window.start, window.end);
    long long count = 0;
    for (std::size_t i = lo; i < hi; ++i)
        if (log[i].sender == actor) ++count;
    return count;
}

/// (sent - received) / (sent + received) over the period; +1 is a pure
/// sender, -1 a pure receiver. Undefined (not zero) when the actor neither
/// sent nor received.
inline std::optional<double> contribution_index(const EventLog& log, std::string_view actor,
                                                const Window& period) {
    const auto [lo, hi] = log.range(period.start, period.end);
    long long sent = 0, received = 0;
    for (std::size_t i = lo; i < hi; ++i) {
        const CommEvent& e = log[i];
        if (e.sender == actor) ++sent;
        for (const Actor& r : e.recipients)
            if (r == actor) ++received;
    }
    if (sent + received == 0) return std::nullopt;
    return static_cast<double>(sent - received) / static_cast<double>(sent + received);
}

namespace detail {

/// Run-length observations per ordered (pinger, responder) pair within a
/// window: each maximal streak of pinger-to-responder messages that the
/// responder eventually answers (any message back) contributes its length.
/// Trailing unanswered streaks are excluded.
inline std::map<std::pair<Actor, Actor>, std::vector<long long>> nudge_observations(
    const EventLog& log, const Window& window) {
    std::map<std::pair<Actor, Actor>, std::vector<long long>> obs;
    std::map<std::pair<Actor, Actor>, long long> open_run;
    const auto [lo, hi] = log.range(window.start, window.end);
    for (std::size_t i = lo; i < hi; ++i) {
        const CommEvent& e = log[i];
        for (const Actor& r : e.recipients) {
            ++open_run[{e.sender, r}];
            // This message answers any open streak from r to the sender.
            auto it = open_run.find({r, e.sender});
            if (it != open_run.end() && it->second > 0) {
                obs[{r, e.sender}].push_back(it->second);
                it->second = 0;
            }
        }
    }
    return obs;
}

inline std::optional<double> mean_of(const std::vector<double>& xs) {
    if (xs.empty()) return std::nullopt;
    double sum = 0.0;
    for (double x : xs) sum += x;
    return sum / static_cast<double>(xs.size());
}

} // namespace detail

/// Average pings a sender needs before the counterpart responds. Ego
/// averages the actor's own streaks as pinger; alter averages streaks the
/// actor answered. Undefined when no qualifying streaks exist.
inline std::optional<double> nudges(const EventLog& log, std::string_view actor, const Window& period,
                                    Perspective perspective,
                                    NudgePooling pooling = NudgePooling::pooled) {
    const auto obs = detail::nudge_observations(log, period);
    std::vector<double> pooled;
    std::vector<double> pair_means;
    for (const auto& [pair, lengths] : obs) {
        const Actor& subject = perspective == Perspective::ego ? pair.first : pair.second;
        if (subject != actor) continue;
        double sum = 0.0;
        for (long long len : lengths) {
            pooled.push_back(static_cast<double>(len));
            sum += static_cast<double>(len);
        }
        pair_means.push_back(sum / static_cast<double>(lengths.size()));
    }
    return pooling == NudgePooling::pooled ? detail::mean_of(pooled) : detail::mean_of(pair_means);
}

/// Mean reply latency in hours. Ego averages the replies the actor sent;
/// alter averages the replies the actor's messages received. A link is
/// attributed to the window containing its reply event.
inline std::optional<double> response_times(const EventLog& log, const std::vector<ReplyLink>& links,
                                            std::string_view actor, const Window& period,
                                            Perspective perspective) {
    std::vector<double> latencies;
    for (const ReplyLink& link : links) {
        const auto reply_idx = log.find(link.reply_event);
        const auto answered_idx = log.find(link.answered_event);
        if (!reply_idx || !answered_idx) continue;
        if (!period.contains(log[*reply_idx].timestamp)) continue;
        const Actor& subject =
            perspective == Perspective::ego ? log[*reply_idx].sender : log[*answered_idx].sender;
        if (subject == actor) latencies.push_back(link.latency_hours);
    }
    return detail::mean_of(latencies);
}

/// Per-actor, per-window interaction metrics.
struct ActorWindowStats {
    Actor actor;
    int window_index = 0;
    long long sent = 0;
    long long received = 0;
    long long activity = 0; // == sent
    std::optional<double> contribution_index;
    std::optional<double> ego_nudges;
    std::optional<double> alter_nudges;
    std::optional<double> ego_art_hours;
    std::optional<double> alter_art_hours;
};

/// Batch evaluation for every universe actor in every window.
inline std::vector<ActorWindowStats> window_stats(const EventLog& log,
                                                  const std::vector<ReplyLink>& links,
                                                  const WindowSeries& series,
                                                  NudgePooling pooling = NudgePooling::pooled) {
    const std::vector<Actor>& actors = series.actor_universe;
    auto actor_pos = [&actors](const Actor& a) -> std::ptrdiff_t {
        auto it = std::lower_bound(actors.begin(), actors.end(), a);
        if (it == actors.end() || *it != a) return -1; // outside the covered span
        return it - actors.begin();
    };

    // Reply links resolved once; they are already ordered by reply event.
    struct LinkRef {
        Instant reply_ts;
        std::ptrdiff_t ego;   // reply sender, -1 when outside the universe
        std::ptrdiff_t alter; // answered sender, -1 when outside the universe
        double latency;
    };
    std::vector<LinkRef> refs;
    refs.reserve(links.size());
    for (const ReplyLink& link : links) {
        const auto reply_idx = log.find(link.reply_event);
        const auto answered_idx = log.find(link.answered_event);
        if (!reply_idx || !answered_idx) continue;
        refs.push_back(LinkRef{log[*reply_idx].timestamp, actor_pos(log[*reply_idx].sender),
                               actor_pos(log[*answered_idx].sender), link.latency_hours});
    }

    std::vector<ActorWindowStats> rows;
    rows.reserve(actors.size() * series.windows.size());
    for (std::size_t w = 0; w < series.windows.size(); ++w) {
        const Window& window = series.windows[w];
        std::vector<ActorWindowStats> per_actor(actors.size());
        for (std::size_t a = 0; a < actors.size(); ++a) {
            per_actor[a].actor = actors[a];
            per_actor[a].window_index = window.index;
        }

        const auto [lo, hi] = log.range(window.start, window.end);
        for (std::size_t i = lo; i < hi; ++i) {
            const CommEvent& e = log[i];
            per_actor[static_cast<std::size_t>(actor_pos(e.sender))].sent += 1;
            for (const Actor& r : e.recipients)
                per_actor[static_cast<std::size_t>(actor_pos(r))].received += 1;
        }

        const auto obs = detail::nudge_observations(log, window);
        std::vector<std::vector<double>> ego_pool(actors.size()), alter_pool(actors.size());
        for (const auto& [pair, lengths] : obs) {
            const std::size_t ei = static_cast<std::size_t>(actor_pos(pair.first));
            const std::size_t ai = static_cast<std::size_t>(actor_pos(pair.second));
            if (pooling == NudgePooling::pooled) {
                for (long long len : lengths) {
                    ego_pool[ei].push_back(static_cast<double>(len));
                    alter_pool[ai].push_back(static_cast<double>(len));
                }
            } else {
                double sum = 0.0;
                for (long long len : lengths) sum += static_cast<double>(len);
                const double mean = sum / static_cast<double>(lengths.size());
                ego_pool[ei].push_back(mean);
                alter_pool[ai].push_back(mean);
            }
        }

        std::vector<std::vector<double>> ego_art(actors.size()), alter_art(actors.size());
        for (const LinkRef& ref : refs) {
            if (!window.contains(ref.reply_ts)) continue;
            if (ref.ego >= 0) ego_art[static_cast<std::size_t>(ref.ego)].push_back(ref.latency);
            if (ref.alter >= 0) alter_art[static_cast<std::size_t>(ref.alter)].push_back(ref.latency);
        }

        for (std::size_t a = 0; a < actors.size(); ++a) {
            ActorWindowStats& st = per_actor[a];
            st.activity = st.sent;
            if (st.sent + st.received > 0)
                st.contribution_index = static_cast<double>(st.sent - st.received) /
                                        static_cast<double>(st.sent + st.received);
            st.ego_nudges = detail::mean_of(ego_pool[a]);
            st.alter_nudges = detail::mean_of(alter_pool[a]);
            st.ego_art_hours = detail::mean_of(ego_art[a]);
            st.alter_art_hours = detail::mean_of(alter_art[a]);
            rows.push_back(std::move(st));
        }
    }
    return rows;
}

/// CSV export with empty fields for undefined values, never zeros.
inline void write_window_metrics_csv(std::ostream& out, const std::vector<ActorWindowStats>& stats) {
    out << "window_index,actor,sent,received,activity,ci,ego_nudges,alter_nudges,ego_art_h,alter_art_h\n";
    auto opt = [](const std::optional<double>& v) {
        return v ? format_sig12(*v) : std::string();
    };
    for (const ActorWindowStats& st : stats) {
        out << st.window_index << ',' << csv_escape(st.actor) << ',' << st.sent << ',' << st.received
            << ',' << st.activity << ',' << opt(st.contribution_index) << ',' << opt(st.ego_nudges)
            << ',' << opt(st.alter_nudges) << ',' << opt(st.ego_art_hours) << ','
            << opt(st.alter_art_hours) << '\n';
    }
}

} // namespace entangle
