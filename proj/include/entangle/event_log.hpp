#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "entangle/common.hpp"
#include "entangle/csv.hpp"
#include "entangle/time.hpp"

namespace entangle {

/// One logged message occurrence.
struct CommEvent {
    std::string msg_id;
    Instant timestamp = 0;       // UTC once normalized; provisional for naive rows
    bool naive = false;          // true until normalize_timezones resolves it
    Actor sender;
    std::vector<Actor> recipients; // nonempty, deduplicated, sender removed
    std::string reply_to;          // empty means none
};

/// Canonical in-memory log: events sorted by (timestamp, msg_id), unique ids.
class EventLog {
public:
    EventLog() = default;

    /// Sorts, deduplicates nothing, and enforces the log invariants.
    /// Throws std::invalid_argument on violations; construction paths that
    /// take untrusted input (parse_event_log) clean rows before calling this.
    static EventLog from_events(std::vector<CommEvent> events) {
        EventLog log;
        log.events_ = std::move(events);
        for (const CommEvent& e : log.events_) {
            if (e.msg_id.empty()) throw std::invalid_argument("event with empty msg_id");
            if (e.sender.empty()) throw std::invalid_argument("event with empty sender: " + e.msg_id);
            if (e.recipients.empty()) throw std::invalid_argument("event with no recipients: " + e.msg_id);
            std::vector<Actor> rs = e.recipients;
            std::sort(rs.begin(), rs.end());
            if (std::adjacent_find(rs.begin(), rs.end()) != rs.end())
                throw std::invalid_argument("duplicate recipients in event: " + e.msg_id);
            if (std::binary_search(rs.begin(), rs.end(), e.sender))
                throw std::invalid_argument("self-addressed recipient in event: " + e.msg_id);
        }
        log.finalize();
        return log;
    }

    const std::vector<CommEvent>& events() const { return events_; }
    std::size_t size() const { return events_.size(); }
    bool empty() const { return events_.empty(); }
    const CommEvent& operator[](std::size_t i) const { return events_[i]; }

    /// All actor ids appearing as sender or recipient, sorted.
    const std::vector<Actor>& actors() const { return actors_; }

    std::optional<std::size_t> find(std::string_view msg_id) const {
        auto it = std::lower_bound(id_index_.begin(), id_index_.end(), msg_id,
                                   [](const auto& p, std::string_view id) { return p.first < id; });
        if (it == id_index_.end() || it->first != msg_id) return std::nullopt;
        return it->second;
    }

    bool any_naive() const {
        return std::any_of(events_.begin(), events_.end(), [](const CommEvent& e) { return e.naive; });
    }

    /// Index range [first, last) of events with timestamp in [begin, end).
    std::pair<std::size_t, std::size_t> range(Instant begin, Instant end) const {
        auto lo = std::lower_bound(events_.begin(), events_.end(), begin,
                                   [](const CommEvent& e, Instant t) { return e.timestamp < t; });
        auto hi = std::lower_bound(lo, events_.end(), end,
                                   [](const CommEvent& e, Instant t) { return e.timestamp < t; });
        return {static_cast<std::size_t>(lo - events_.begin()),
                static_cast<std::size_t>(hi - events_.begin())};
    }

private:
    void finalize() {
        std::sort(events_.begin(), events_.end(), [](const CommEvent& a, const CommEvent& b) {
            if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
            return a.msg_id < b.msg_id;
        });
        id_index_.clear();
        id_index_.reserve(events_.size());
        for (std::size_t i = 0; i < events_.size(); ++i) id_index_.emplace_back(events_[i].msg_id, i);
        std::sort(id_index_.begin(), id_index_.end());
        for (std::size_t i = 1; i < id_index_.size(); ++i) {
            if (id_index_[i].first == id_index_[i - 1].first)
                throw std::invalid_argument("duplicate msg_id in log: " + id_index_[i].first);
        }
        std::vector<Actor> acc;
        for (const CommEvent& e : events_) {
            acc.push_back(e.sender);
            acc.insert(acc.end(), e.recipients.begin(), e.recipients.end());
        }
        std::sort(acc.begin(), acc.end());
        acc.erase(std::unique(acc.begin(), acc.end()), acc.end());
        actors_ = std::move(acc);
    }

    std::vector<CommEvent> events_;
    std::vector<Actor> actors_;
    std::vector<std::pair<std::string, std::size_t>> id_index_;
};

struct IngestConfig {
    Instant epoch_floor = 0; // rows timestamped before this are rejected
    bool strict = false;     // escalate row rejects to InputError
};

struct RowReject {
    std::int64_t line = 0;
    std::string reason;
};

struct IngestReport {
    std::int64_t rows_total = 0;
    std::int64_t rows_accepted = 0;
    std::int64_t rows_dropped_self_only = 0;
    std::int64_t duplicate_msg_ids = 0;
    std::vector<RowReject> rejects;

    std::int64_t rows_rejected() const { return static_cast<std::int64_t>(rejects.size()); }
};

struct ParseResult {
    EventLog log;
    IngestReport report;
};

inline void write_rejects_csv(std::ostream& out, const IngestReport& report) {
    out << "line,reason\n";
    for (const RowReject& r : report.rejects)
        out << r.line << ',' << csv_escape(r.reason) << '\n';
}

/// Parse the canonical CSV schema `msg_id,timestamp,sender,recipients,reply_to`
/// (recipients semicolon-separated, RFC 3339 timestamps).
///
/// Hard errors (InputError): missing/wrong header, malformed timestamp.
/// Soft rejects (collected, or thrown when strict): bad field count, empty
/// msg_id/sender/recipients, duplicate msg_id, timestamp before the epoch
/// floor. Self-only messages are dropped and counted, not rejected.
inline ParseResult parse_event_log(std::istream& in, const IngestConfig& config = {}) {
    static constexpr std::string_view kHeader = "msg_id,timestamp,sender,recipients,reply_to";
    ParseResult result;
    std::string line;
    if (!std::getline(in, line)) throw InputError("event log is empty (missing header)");
    if (strip_cr(line) != kHeader)
        throw InputError("unexpected event log header: '" + std::string(strip_cr(line)) + "'");

    std::vector<CommEvent> events;
    std::unordered_map<std::string, std::int64_t> first_line_of_id;
    std::int64_t lineno = 1;

    auto reject = [&](std::int64_t ln, std::string reason) {
        if (config.strict)
            throw InputError("line " + std::to_string(ln) + ": " + reason);
        result.report.rejects.push_back(RowReject{ln, std::move(reason)});
    };

    while (std::getline(in, line)) {
        ++lineno;
        std::string_view row = strip_cr(line);
        if (row.empty()) continue; // tolerate blank lines, typically a trailing newline
        ++result.report.rows_total;

        auto fields = split_csv_line(row);
        if (!fields) {
            reject(lineno, "unbalanced quoting");
            continue;
        }
        if (fields->size() != 5) {
            reject(lineno, "expected 5 fields, got " + std::to_string(fields->size()));
            continue;
        }
        CommEvent e;
        e.msg_id = (*fields)[0];
        if (e.msg_id.empty()) {
            reject(lineno, "empty msg_id");
            continue;
        }
        const auto ts = parse_rfc3339((*fields)[1]);
        if (!ts)
            throw InputError("line " + std::to_string(lineno) + ": malformed timestamp '" +
                             (*fields)[1] + "'");
        e.timestamp = ts->utc_ms;
        e.naive = !ts->has_offset;
        if (e.timestamp < config.epoch_floor) {
            reject(lineno, "timestamp before epoch floor");
            continue;
        }
        e.sender = (*fields)[2];
        if (e.sender.empty()) {
            reject(lineno, "empty sender");
            continue;
        }

        // Semicolon-separated recipients; deduplicate preserving first
        // occurrence, then drop the self edge if other recipients remain.
        const std::string& rcpt_field = (*fields)[3];
        std::vector<Actor> recipients;
        std::size_t start = 0;
        bool any_token = false;
        while (start <= rcpt_field.size()) {
            std::size_t semi = rcpt_field.find(';', start);
            if (semi == std::string::npos) semi = rcpt_field.size();
            std::string tok = rcpt_field.substr(start, semi - start);
            if (!tok.empty()) {
                any_token = true;
                if (std::find(recipients.begin(), recipients.end(), tok) == recipients.end())
                    recipients.push_back(std::move(tok));
            }
            if (semi == rcpt_field.size()) break;
            start = semi + 1;
        }
        if (!any_token) {
            reject(lineno, "empty recipient field");
            continue;
        }
        if (recipients.size() == 1 && recipients[0] == e.sender) {
            ++result.report.rows_dropped_self_only;
            continue;
        }
        recipients.erase(std::remove(recipients.begin(), recipients.end(), e.sender),
                         recipients.end());
        e.recipients = std::move(recipients);
        e.reply_to = (*fields)[4];

        auto [it, inserted] = first_line_of_id.emplace(e.msg_id, lineno);
        if (!inserted) {
            ++result.report.duplicate_msg_ids;
            reject(lineno, "duplicate msg_id '" + e.msg_id + "' (first seen at line " +
                               std::to_string(it->second) + ")");
            continue;
        }
        events.push_back(std::move(e));
        ++result.report.rows_accepted;
    }

    result.log = EventLog::from_events(std::move(events));
    return result;
}

inline ParseResult parse_event_log_string(const std::string& text, const IngestConfig& config = {}) {
    std::istringstream in(text);
    return parse_event_log(in, config);
}

/// Canonical serialization: header plus rows in log order. Parsing the
/// output reproduces the log exactly.
inline std::string serialize_event_log(const EventLog& log) {
    std::string out = "msg_id,timestamp,sender,recipients,reply_to\n";
    for (const CommEvent& e : log.events()) {
        out += csv_escape(e.msg_id);
        out += ',';
        out += format_rfc3339_utc(e.timestamp);
        out += ',';
        out += csv_escape(e.sender);
        out += ',';
        std::string joined;
        for (std::size_t i = 0; i < e.recipients.size(); ++i) {
            if (i) joined += ';';
            joined += e.recipients[i];
        }
        out += csv_escape(joined);
        out += ',';
        out += csv_escape(e.reply_to);
        out += '\n';
    }
    return out;
}

/// Express every timestamp in UTC. Naive timestamps are interpreted at
/// default_offset_min minutes east of UTC; ordering is re-established.
/// Applying this twice equals applying it once.
inline EventLog normalize_timezones(const EventLog& log,
                                    std::optional<int> default_offset_min = std::nullopt) {
    std::vector<CommEvent> events = log.events();
    for (CommEvent& e : events) {
        if (!e.naive) continue;
        if (!default_offset_min)
            throw InputError("naive timestamp with no default offset configured (msg_id '" +
                             e.msg_id + "')");
        e.timestamp -= static_cast<Instant>(*default_offset_min) * kMsPerMinute;
        e.naive = false;
    }
    return EventLog::from_events(std::move(events));
}

enum class LinkSource { explicit_reply, heuristic };

/// A reply pairing: reply_event answers answered_event.
struct ReplyLink {
    std::string reply_event;
    std::string answered_event;
    double latency_hours = 0.0;
    LinkSource source = LinkSource::explicit_reply;
};

struct ReplyPolicy {
    bool heuristic = true;
    double horizon_hours = 14.0 * 24.0; // heuristic pairing horizon
};

struct LinkIssue {
    std::string msg_id; // the replying event
    std::string reason;
};

struct ReplyReport {
    std::vector<ReplyLink> links; // in log order of the replying event
    std::vector<LinkIssue> issues;
    std::int64_t explicit_count = 0;
    std::int64_t heuristic_count = 0;
};

namespace detail {

inline bool reciprocal_pair(const CommEvent& reply, const CommEvent& answered) {
    const bool a = std::find(reply.recipients.begin(), reply.recipients.end(), answered.sender) !=
                   reply.recipients.end();
    const bool b = std::find(answered.recipients.begin(), answered.recipients.end(), reply.sender) !=
                   answered.recipients.end();
    return a || b;
}

struct PairKeyHash {
    std::size_t operator()(const std::pair<std::string, std::string>& p) const {
        std::hash<std::string> h;
        return h(p.first) * 1000003u ^ h(p.second);
    }
};

} // namespace detail

/// Pair replies with the messages they answer.
///
/// Events carrying reply_to yield explicit links when the target exists,
/// is earlier, is unclaimed, and the pair is reciprocal; failures are
/// recorded, never fatal. With heuristic linking on, an event from B to A
/// answers the most recent unanswered A-to-B message within the horizon.
/// Every answered event is claimed at most once.
inline ReplyReport link_replies(const EventLog& log, const ReplyPolicy& policy = {}) {
    if (log.any_naive())
        throw std::invalid_argument("link_replies requires a timezone-normalized log");
    ReplyReport report;
    const auto& events = log.events();
    std::vector<char> claimed(events.size(), 0);
    // Per ordered (sender, recipient) pair: indices of that sender's
    // messages to that recipient, ascending, candidates for being answered.
    std::unordered_map<std::pair<std::string, std::string>, std::deque<std::size_t>,
                       detail::PairKeyHash>
        pending;
    const DurationMs horizon_ms = hours_to_ms(policy.horizon_hours);

    auto emit = [&](std::size_t reply_idx, std::size_t answered_idx, LinkSource source) {
        const DurationMs delta = events[reply_idx].timestamp - events[answered_idx].timestamp;
        report.links.push_back(ReplyLink{events[reply_idx].msg_id, events[answered_idx].msg_id,
                                         ms_to_hours(delta), source});
        claimed[answered_idx] = 1;
        if (source == LinkSource::explicit_reply)
            ++report.explicit_count;
        else
            ++report.heuristic_count;
    };

    for (std::size_t i = 0; i < events.size(); ++i) {
        const CommEvent& e = events[i];
        if (!e.reply_to.empty()) {
            const auto target = log.find(e.reply_to);
            if (!target) {
                report.issues.push_back({e.msg_id, "dangling reply_to '" + e.reply_to + "'"});
            } else if (*target >= i) {
                report.issues.push_back({e.msg_id, "reply_to '" + e.reply_to + "' is not earlier"});
            } else if (claimed[*target]) {
                report.issues.push_back({e.msg_id, "reply_to '" + e.reply_to + "' already answered"});
            } else if (!detail::reciprocal_pair(e, events[*target])) {
                report.issues.push_back({e.msg_id, "reply_to '" + e.reply_to + "' is not reciprocal"});
            } else {
                emit(i, *target, LinkSource::explicit_reply);
            }
        } else if (policy.heuristic) {
            // As a response: for each counterpart, claim their latest
            // unanswered message to us within the horizon.
            for (const Actor& counterpart : e.recipients) {
                auto it = pending.find({counterpart, e.sender});
                if (it == pending.end()) continue;
                auto& queue = it->second;
                while (!queue.empty()) {
                    const std::size_t cand = queue.back();
                    if (claimed[cand]) {
                        queue.pop_back();
                        continue;
                    }
                    if (events[cand].timestamp + horizon_ms < e.timestamp) break; // too old
                    emit(i, cand, LinkSource::heuristic);
                    queue.pop_back();
                    break;
                }
            }
        }
        for (const Actor& r : e.recipients) pending[{e.sender, r}].push_back(i);
    }
    return report;
}

struct ActorTotals {
    Actor actor;
    std::int64_t sent = 0;
    std::int64_t received = 0;
};

struct ValidationReport {
    std::int64_t event_count = 0;
    std::int64_t actor_count = 0;
    std::optional<Instant> span_start; // unset on an empty log
    std::optional<Instant> span_end;   // timestamp of the last event
    std::int64_t rows_total = 0;
    std::int64_t rows_rejected = 0;
    std::int64_t rows_dropped_self_only = 0;
    std::int64_t duplicate_msg_ids = 0;
    std::int64_t dangling_replies = 0; // reply_to values not present in the log
    std::int64_t explicit_links = 0;
    std::int64_t heuristic_links = 0;
    std::int64_t link_issues = 0;
    std::vector<ActorTotals> per_actor; // sorted by actor
};

/// Pure summary of a log, optionally folding in ingest and reply-linking
/// reports when the caller has them.
inline ValidationReport validate_log(const EventLog& log, const IngestReport* ingest = nullptr,
                                     const ReplyReport* replies = nullptr) {
    ValidationReport report;
    report.event_count = static_cast<std::int64_t>(log.size());
    report.actor_count = static_cast<std::int64_t>(log.actors().size());
    if (!log.empty()) {
        report.span_start = log.events().front().timestamp;
        report.span_end = log.events().back().timestamp;
    }
    std::unordered_map<std::string, std::size_t> pos;
    pos.reserve(log.actors().size());
    report.per_actor.reserve(log.actors().size());
    for (const Actor& a : log.actors()) {
        pos.emplace(a, report.per_actor.size());
        report.per_actor.push_back(ActorTotals{a, 0, 0});
    }
    for (const CommEvent& e : log.events()) {
        report.per_actor[pos[e.sender]].sent += 1;
        for (const Actor& r : e.recipients) report.per_actor[pos[r]].received += 1;
        if (!e.reply_to.empty() && !log.find(e.reply_to)) ++report.dangling_replies;
    }
    if (ingest) {
        report.rows_total = ingest->rows_total;
        report.rows_rejected = ingest->rows_rejected();
        report.rows_dropped_self_only = ingest->rows_dropped_self_only;
        report.duplicate_msg_ids = ingest->duplicate_msg_ids;
    } else {
        report.rows_total = report.event_count;
    }
    if (replies) {
        report.explicit_links = replies->explicit_count;
        report.heuristic_links = replies->heuristic_count;
        report.link_issues = static_cast<std::int64_t>(replies->issues.size());
    }
    return report;
}

} // namespace entangle
