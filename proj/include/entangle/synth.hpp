#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "entangle/common.hpp"
#include "entangle/event_log.hpp"
#include "entangle/time.hpp"

namespace entangle {

/// splitmix64, used to expand a user seed into generator state.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

/// xoshiro256**: the toolkit's reproducible generator. The algorithm is
/// fully pinned so identical seeds give identical logs everywhere.
class Xoshiro256ss {
public:
    explicit Xoshiro256ss(std::uint64_t seed) {
        SplitMix64 sm(seed);
        for (auto& word : state_) word = sm.next();
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform in [0, 1) from the top 53 bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound) {
        return std::min<std::uint64_t>(static_cast<std::uint64_t>(uniform() * static_cast<double>(bound)),
                                       bound - 1);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t state_[4];
};

/// Synthetic-log configuration: teams partition the actors; sync groups
/// share one rate-modulation signal; everyone else gets an independent one.
struct SynthConfig {
    int actor_count = 12;
    std::vector<std::vector<Actor>> teams;       // empty: one team of everyone
    double base_rate = 8.0;                      // expected messages per actor per window
    std::vector<std::vector<Actor>> sync_groups; // disjoint actor sets
    double modulation_depth = 0.6;               // in [0, 1]
    int window_count = 12;
    DurationMs window_len = 7 * kMsPerDay;
    Instant start = 1398902400000; // 2014-05-01T00:00:00Z
    std::uint64_t seed = 1;
};

namespace detail {

inline std::string synth_actor_name(int i, int actor_count) {
    std::size_t width = 3;
    for (int v = actor_count - 1; v >= 1000; v /= 10) ++width;
    const std::string digits = std::to_string(i);
    std::string name = "a";
    if (width > digits.size()) name.append(width - digits.size(), '0');
    name += digits;
    return name;
}

/// Bounded waveform in [-1, 1]: two sinusoids over the window index with
/// independently seeded phases.
struct Waveform {
    double phase1 = 0.0;
    double phase2 = 0.0;

    double value(int window) const {
        constexpr double kPeriod1 = 6.0;
        constexpr double kPeriod2 = 2.5;
        const double w = static_cast<double>(window);
        const double two_pi = 2.0 * std::numbers::pi;
        return 0.5 * (std::sin(two_pi * w / kPeriod1 + phase1) +
                      std::sin(two_pi * w / kPeriod2 + phase2));
    }
};

} // namespace detail

/// Validate the partition/sync structure. Throws ConfigError.
inline void validate_synth_config(const SynthConfig& config) {
    if (config.actor_count < 2) throw ConfigError("synth needs at least 2 actors");
    if (config.base_rate <= 0.0) throw ConfigError("base_rate must be positive");
    if (config.modulation_depth < 0.0 || config.modulation_depth > 1.0)
        throw ConfigError("modulation_depth must lie in [0, 1]");
    if (config.window_count < 1) throw ConfigError("window_count must be positive");
    if (config.window_len <= 0) throw ConfigError("window_len must be positive");

    std::vector<Actor> names;
    names.reserve(static_cast<std::size_t>(config.actor_count));
    for (int i = 0; i < config.actor_count; ++i)
        names.push_back(detail::synth_actor_name(i, config.actor_count));

    auto known = [&names](const Actor& a) {
        return std::binary_search(names.begin(), names.end(), a);
    };

    if (!config.teams.empty()) {
        std::vector<Actor> seen;
        for (const auto& team : config.teams) {
            if (team.empty()) throw ConfigError("empty team in partition");
            for (const Actor& a : team) {
                if (!known(a)) throw ConfigError("team member '" + a + "' is not a generated actor");
                seen.push_back(a);
            }
        }
        std::sort(seen.begin(), seen.end());
        if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
            throw ConfigError("teams must partition the actors (duplicate member)");
        if (seen.size() != names.size())
            throw ConfigError("teams must partition the actors (missing member)");
    }
    std::vector<Actor> synced;
    for (const auto& group : config.sync_groups) {
        for (const Actor& a : group) {
            if (!known(a)) throw ConfigError("sync member '" + a + "' is not a generated actor");
            synced.push_back(a);
        }
    }
    std::sort(synced.begin(), synced.end());
    if (std::adjacent_find(synced.begin(), synced.end()) != synced.end())
        throw ConfigError("sync groups must be disjoint");
}

/// Generate a deterministic event log. Per window, each actor's send count
/// is a 4096-tick Bernoulli process with success probability rate/4096, so
/// the expected count equals rate = base_rate * (1 + depth * signal).
/// Recipients are drawn uniformly from teammates.
inline EventLog generate(const SynthConfig& config) {
    validate_synth_config(config);
    constexpr int kTicks = 4096;

    const int n = config.actor_count;
    std::vector<Actor> names;
    names.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) names.push_back(detail::synth_actor_name(i, n));

    // Teammates (candidate recipients) per actor; everyone else when the
    // actor's team is a singleton.
    std::vector<std::vector<int>> teammates(static_cast<std::size_t>(n));
    std::unordered_map<std::string, int> index;
    for (int i = 0; i < n; ++i) index.emplace(names[static_cast<std::size_t>(i)], i);
    std::vector<std::vector<Actor>> teams = config.teams;
    if (teams.empty()) teams.push_back(names);
    for (const auto& team : teams) {
        for (const Actor& a : team) {
            auto& mine = teammates[static_cast<std::size_t>(index[a])];
            for (const Actor& b : team)
                if (b != a) mine.push_back(index[b]);
            std::sort(mine.begin(), mine.end());
        }
    }
    for (int i = 0; i < n; ++i) {
        if (!teammates[static_cast<std::size_t>(i)].empty()) continue;
        for (int j = 0; j < n; ++j)
            if (j != i) teammates[static_cast<std::size_t>(i)].push_back(j);
    }

    Xoshiro256ss rng(config.seed);

    // Fixed draw order: sync-group phases first (config order), then
    // per-actor phases for everyone outside a sync group (index order).
    std::vector<detail::Waveform> signal(static_cast<std::size_t>(n));
    std::vector<char> in_group(static_cast<std::size_t>(n), 0);
    const double two_pi = 2.0 * std::numbers::pi;
    for (const auto& group : config.sync_groups) {
        detail::Waveform wave{two_pi * rng.uniform(), two_pi * rng.uniform()};
        for (const Actor& a : group) {
            signal[static_cast<std::size_t>(index[a])] = wave;
            in_group[static_cast<std::size_t>(index[a])] = 1;
        }
    }
    for (int i = 0; i < n; ++i) {
        if (in_group[static_cast<std::size_t>(i)]) continue;
        signal[static_cast<std::size_t>(i)] =
            detail::Waveform{two_pi * rng.uniform(), two_pi * rng.uniform()};
    }

    std::vector<CommEvent> events;
    events.reserve(static_cast<std::size_t>(config.window_count) * static_cast<std::size_t>(n) *
                   static_cast<std::size_t>(config.base_rate + 1.0));
    long long serial = 0;
    for (int w = 0; w < config.window_count; ++w) {
        const Instant window_start = config.start + static_cast<Instant>(w) * config.window_len;
        for (int a = 0; a < n; ++a) {
            const double s = signal[static_cast<std::size_t>(a)].value(w);
            const double rate =
                std::max(0.0, config.base_rate * (1.0 + config.modulation_depth * s));
            const double p = std::min(rate / static_cast<double>(kTicks), 1.0);
            const auto& candidates = teammates[static_cast<std::size_t>(a)];
            for (int tick = 0; tick < kTicks; ++tick) {
                if (rng.uniform() >= p) continue;
                CommEvent e;
                char buf[24];
                std::snprintf(buf, sizeof buf, "s%08lld", serial++);
                e.msg_id = buf;
                e.timestamp = window_start + static_cast<Instant>(tick) * config.window_len /
                                                 static_cast<Instant>(kTicks);
                e.sender = names[static_cast<std::size_t>(a)];
                const std::size_t pick =
                    static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(candidates.size())));
                e.recipients.push_back(names[static_cast<std::size_t>(candidates[pick])]);
                events.push_back(std::move(e));
            }
        }
    }
    return EventLog::from_events(std::move(events));
}

/// JSON schema mirrors the SynthConfig field names; omitted fields keep
/// their defaults.
inline SynthConfig synth_config_from_json(const nlohmann::json& j) {
    SynthConfig config;
    try {
        if (j.contains("actors")) config.actor_count = j.at("actors").get<int>();
        if (j.contains("teams")) config.teams = j.at("teams").get<std::vector<std::vector<Actor>>>();
        if (j.contains("base_rate")) config.base_rate = j.at("base_rate").get<double>();
        if (j.contains("sync_groups"))
            config.sync_groups = j.at("sync_groups").get<std::vector<std::vector<Actor>>>();
        if (j.contains("modulation_depth"))
            config.modulation_depth = j.at("modulation_depth").get<double>();
        if (j.contains("windows")) config.window_count = j.at("windows").get<int>();
        if (j.contains("window_len_days"))
            config.window_len = days_to_ms(j.at("window_len_days").get<double>());
        if (j.contains("start")) {
            const auto ts = parse_rfc3339(j.at("start").get<std::string>());
            if (!ts || !ts->has_offset)
                throw ConfigError("synth start must be an RFC 3339 timestamp with offset");
            config.start = ts->utc_ms;
        }
        if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid synth config: ") + e.what());
    }
    return config;
}

} // namespace entangle
