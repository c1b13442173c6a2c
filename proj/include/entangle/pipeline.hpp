#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "entangle/centrality.hpp"
#include "entangle/common.hpp"
#include "entangle/entanglement.hpp"
#include "entangle/event_log.hpp"
#include "entangle/interaction_metrics.hpp"
#include "entangle/stats.hpp"
#include "entangle/temporal_graph.hpp"

namespace entangle {

using OrderedJson = nlohmann::ordered_json;

/// Everything a full run needs. Precedence is defaults, then the config
/// file, then command-line flags.
struct RunConfig {
    double window_days = 7.0;
    double step_days = 7.0;
    bool allow_partial = false;
    double epsilon = 1e-9;
    bool weighted_betweenness = false;
    bool roster_mode = true;
    double reply_horizon_days = 14.0;
    bool heuristic_replies = true;
    std::optional<int> default_tz_offset_minutes;
    bool export_graphs = false;
    bool export_centrality = false;

    void validate() const {
        if (window_days <= 0.0) throw ConfigError("window_days must be positive");
        if (step_days <= 0.0) throw ConfigError("step_days must be positive");
        if (epsilon <= 0.0) throw ConfigError("epsilon must be positive");
        if (reply_horizon_days <= 0.0) throw ConfigError("reply_horizon_days must be positive");
    }
};

inline RunConfig run_config_from_json(const nlohmann::json& j) {
    RunConfig config;
    try {
        if (j.contains("window_days")) config.window_days = j.at("window_days").get<double>();
        if (j.contains("step_days")) config.step_days = j.at("step_days").get<double>();
        if (j.contains("allow_partial")) config.allow_partial = j.at("allow_partial").get<bool>();
        if (j.contains("epsilon")) config.epsilon = j.at("epsilon").get<double>();
        if (j.contains("weighted_betweenness"))
            config.weighted_betweenness = j.at("weighted_betweenness").get<bool>();
        if (j.contains("roster_mode")) config.roster_mode = j.at("roster_mode").get<bool>();
        if (j.contains("reply_horizon_days"))
            config.reply_horizon_days = j.at("reply_horizon_days").get<double>();
        if (j.contains("heuristic_replies"))
            config.heuristic_replies = j.at("heuristic_replies").get<bool>();
        if (j.contains("default_tz_offset_minutes") && !j.at("default_tz_offset_minutes").is_null())
            config.default_tz_offset_minutes = j.at("default_tz_offset_minutes").get<int>();
        if (j.contains("export_graphs")) config.export_graphs = j.at("export_graphs").get<bool>();
        if (j.contains("export_centrality"))
            config.export_centrality = j.at("export_centrality").get<bool>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid run config: ") + e.what());
    }
    return config;
}

inline OrderedJson run_config_to_json(const RunConfig& config) {
    OrderedJson j;
    j["window_days"] = round_sig12(config.window_days);
    j["step_days"] = round_sig12(config.step_days);
    j["allow_partial"] = config.allow_partial;
    j["epsilon"] = round_sig12(config.epsilon);
    j["weighted_betweenness"] = config.weighted_betweenness;
    j["roster_mode"] = config.roster_mode;
    j["reply_horizon_days"] = round_sig12(config.reply_horizon_days);
    j["heuristic_replies"] = config.heuristic_replies;
    if (config.default_tz_offset_minutes)
        j["default_tz_offset_minutes"] = *config.default_tz_offset_minutes;
    else
        j["default_tz_offset_minutes"] = nullptr;
    j["export_graphs"] = config.export_graphs;
    j["export_centrality"] = config.export_centrality;
    return j;
}

/// Teams file: CSV `actor,team`. Returns team -> sorted members.
inline std::map<std::string, std::vector<Actor>> parse_teams_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw InputError("teams file is empty (missing header)");
    if (strip_cr(line) != "actor,team")
        throw InputError("unexpected teams header: '" + std::string(strip_cr(line)) + "'");
    std::map<std::string, std::vector<Actor>> teams;
    std::map<Actor, std::string> assignment;
    std::int64_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view row = strip_cr(line);
        if (row.empty()) continue;
        auto fields = split_csv_line(row);
        if (!fields || fields->size() != 2)
            throw InputError("teams line " + std::to_string(lineno) + ": expected `actor,team`");
        const Actor& actor = (*fields)[0];
        const std::string& team = (*fields)[1];
        if (actor.empty() || team.empty())
            throw InputError("teams line " + std::to_string(lineno) + ": empty actor or team");
        auto [it, inserted] = assignment.emplace(actor, team);
        if (!inserted) {
            if (it->second != team)
                throw InputError("teams line " + std::to_string(lineno) + ": actor '" + actor +
                                 "' assigned to two teams");
            continue;
        }
        teams[team].push_back(actor);
    }
    for (auto& [_, members] : teams) std::sort(members.begin(), members.end());
    return teams;
}

namespace detail {

inline OrderedJson validation_to_json(const ValidationReport& report) {
    OrderedJson j;
    j["event_count"] = report.event_count;
    j["actor_count"] = report.actor_count;
    if (report.span_start) {
        j["span"] = OrderedJson{{"start", format_rfc3339_utc(*report.span_start)},
                                {"end", format_rfc3339_utc(*report.span_end)}};
    } else {
        j["span"] = nullptr; // empty log: span undefined
    }
    j["rows_total"] = report.rows_total;
    j["rows_rejected"] = report.rows_rejected;
    j["rows_dropped_self_only"] = report.rows_dropped_self_only;
    j["duplicate_msg_ids"] = report.duplicate_msg_ids;
    j["dangling_replies"] = report.dangling_replies;
    j["reply_links"] = OrderedJson{{"explicit", report.explicit_links},
                                   {"heuristic", report.heuristic_links},
                                   {"issues", report.link_issues}};
    OrderedJson actors = OrderedJson::array();
    for (const ActorTotals& t : report.per_actor)
        actors.push_back(OrderedJson{{"actor", t.actor}, {"sent", t.sent}, {"received", t.received}});
    j["per_actor"] = actors;
    return j;
}

inline void write_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    out << contents;
    if (!out) throw InputError("failed writing " + path.string());
}

inline std::string dump_json(const OrderedJson& j) { return j.dump(2) + "\n"; }

inline OrderedJson distribution_summary(const std::vector<double>& values) {
    OrderedJson j;
    j["n"] = values.size();
    if (values.empty()) {
        j["mean"] = nullptr;
        j["std"] = nullptr;
        j["gini"] = nullptr;
        return j;
    }
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(values.size()));
    j["mean"] = round_sig12(mean);
    j["std"] = round_sig12(sd);
    const auto g = gini(std::span<const double>(values));
    if (g)
        j["gini"] = round_sig12(*g);
    else
        j["gini"] = nullptr;
    return j;
}

} // namespace detail

/// What run_pipeline produced, for callers that want to inspect in memory.
struct PipelineResult {
    ValidationReport validation;
    std::vector<std::filesystem::path> artifacts;
};

/// End-to-end run: parse, normalize, link, window, compute, write. All
/// outputs are deterministic byte-for-byte given identical inputs.
///
/// Artifacts: validation.json, window_metrics.csv, entanglement_matrices.csv
/// (E_A and E_B, upper triangle), group_entanglement.csv, ego_summaries.csv,
/// team_reports.json (with a teams file), stats.json; plus
/// effective_config.json, and rejects.csv when rows were rejected.
inline PipelineResult run_pipeline(const std::filesystem::path& log_path,
                                   const std::optional<std::filesystem::path>& teams_path,
                                   const RunConfig& config, const std::filesystem::path& out_dir) {
    config.validate();
    std::ifstream in(log_path, std::ios::binary);
    if (!in) throw InputError("cannot read event log: " + log_path.string());
    ParseResult parsed = parse_event_log(in);
    EventLog log = normalize_timezones(parsed.log, config.default_tz_offset_minutes);
    if (log.empty()) throw InputError("event log has no usable events: " + log_path.string());

    std::map<std::string, std::vector<Actor>> teams;
    if (teams_path) {
        std::ifstream teams_in(*teams_path, std::ios::binary);
        if (!teams_in) throw InputError("cannot read teams file: " + teams_path->string());
        teams = parse_teams_csv(teams_in);
    }

    const ReplyPolicy policy{config.heuristic_replies, config.reply_horizon_days * 24.0};
    const ReplyReport replies = link_replies(log, policy);

    const WindowSeries series = make_window_series(log, days_to_ms(config.window_days),
                                                   days_to_ms(config.step_days),
                                                   config.allow_partial, config.roster_mode);
    if (series.windows.empty())
        throw InputError("empty window series: data span is shorter than one window");
    if (series.actor_universe.size() < 2)
        throw InputError("fewer than 2 actors inside the covered span");

    std::filesystem::create_directories(out_dir);
    PipelineResult result;
    auto emit = [&](const std::string& name, const std::string& contents) {
        const auto path = out_dir / name;
        detail::write_file(path, contents);
        result.artifacts.push_back(path);
    };

    // validation.json
    result.validation = validate_log(log, &parsed.report, &replies);
    emit("validation.json", detail::dump_json(detail::validation_to_json(result.validation)));
    if (!parsed.report.rejects.empty()) {
        std::ostringstream rejects;
        write_rejects_csv(rejects, parsed.report);
        emit("rejects.csv", rejects.str());
    }

    // window_metrics.csv
    {
        std::ostringstream out;
        write_window_metrics_csv(out, window_stats(log, replies.links, series));
        emit("window_metrics.csv", out.str());
    }

    // entanglement matrices, upper triangle rows
    EntanglementOptions options;
    options.epsilon = config.epsilon;
    options.weighted_betweenness = config.weighted_betweenness;
    const EntanglementMatrix ea = pairwise_matrix(EntanglementMetric::E_A, log, series, options);
    const EntanglementMatrix eb = pairwise_matrix(EntanglementMetric::E_B, log, series, options);
    {
        std::ostringstream out;
        out << "metric,actor_x,actor_y,value\n";
        for (const EntanglementMatrix* m : {&ea, &eb}) {
            for (std::size_t i = 0; i < m->size(); ++i)
                for (std::size_t j = i + 1; j < m->size(); ++j)
                    out << to_string(m->metric) << ',' << csv_escape(m->actors[i]) << ','
                        << csv_escape(m->actors[j]) << ',' << format_sig12(m->at(i, j)) << '\n';
        }
        emit("entanglement_matrices.csv", out.str());
    }

    // group_entanglement.csv
    std::vector<double> egb_values;
    egb_values.reserve(series.actor_universe.size());
    {
        std::ostringstream out;
        out << "actor,e_gb\n";
        for (const Actor& actor : series.actor_universe) {
            const double v = group_betweenness_entanglement(actor, series, config.epsilon,
                                                            config.weighted_betweenness);
            egb_values.push_back(v);
            out << csv_escape(actor) << ',' << format_sig12(v) << '\n';
        }
        emit("group_entanglement.csv", out.str());
    }

    // ego_summaries.csv
    std::map<std::string, std::map<Actor, double>> ego_means; // metric -> actor -> mean
    {
        std::ostringstream out;
        out << "metric,actor,mean,gini\n";
        for (const EntanglementMatrix* m : {&ea, &eb}) {
            for (const Actor& actor : m->actors) {
                const EgoEntanglementSummary s = ego_summary(*m, actor);
                ego_means[to_string(m->metric)][actor] = s.mean;
                out << to_string(m->metric) << ',' << csv_escape(actor) << ','
                    << format_sig12(s.mean) << ',' << (s.gini ? format_sig12(*s.gini) : std::string())
                    << '\n';
            }
        }
        emit("ego_summaries.csv", out.str());
    }

    // team_reports.json
    if (teams_path) {
        OrderedJson reports = OrderedJson::array();
        auto append_team = [&reports](const std::string& team, const std::string& metric,
                                      const std::vector<Actor>& members,
                                      const std::vector<double>& values) {
            if (values.empty()) {
                reports.push_back(OrderedJson{{"team", team},
                                              {"metric", metric},
                                              {"n", 0},
                                              {"mean", nullptr},
                                              {"std", nullptr},
                                              {"gini", nullptr},
                                              {"degenerate", true}});
                return;
            }
            const TeamReport r = team_report(team, members, values);
            reports.push_back(OrderedJson{{"team", r.team},
                                          {"metric", metric},
                                          {"n", r.member_values.size()},
                                          {"mean", round_sig12(r.mean)},
                                          {"std", round_sig12(r.stddev)},
                                          {"gini", r.gini ? OrderedJson(round_sig12(*r.gini))
                                                          : OrderedJson(nullptr)},
                                          {"degenerate", r.degenerate}});
        };
        for (const auto& [team, members] : teams) {
            // E_A workflow: per-member ego means of activity entanglement.
            std::vector<Actor> present;
            std::vector<double> values;
            for (const Actor& member : members) {
                auto it = ego_means["E_A"].find(member);
                if (it == ego_means["E_A"].end()) continue;
                present.push_back(member);
                values.push_back(it->second);
            }
            append_team(team, "E_A_ego_mean", present, values);

            // E_GB workflow: per-member group betweenness entanglement.
            std::vector<Actor> present_gb;
            std::vector<double> values_gb;
            for (const Actor& member : members) {
                const auto idx = series.universe_index(member);
                if (!idx) continue;
                present_gb.push_back(member);
                values_gb.push_back(egb_values[static_cast<std::size_t>(*idx)]);
            }
            append_team(team, "E_GB", present_gb, values_gb);
        }
        emit("team_reports.json", detail::dump_json(reports));
    }

    // stats.json: descriptive summaries of the entanglement distributions.
    {
        OrderedJson stats;
        stats["events"] = log.size();
        stats["actors"] = series.actor_universe.size();
        stats["windows"] = series.windows.size();
        for (const EntanglementMatrix* m : {&ea, &eb}) {
            std::vector<double> means;
            std::vector<double> all_entries;
            means.reserve(m->size());
            for (const Actor& actor : m->actors)
                means.push_back(ego_means[to_string(m->metric)][actor]);
            for (std::size_t i = 0; i < m->size(); ++i)
                for (std::size_t j = i + 1; j < m->size(); ++j) all_entries.push_back(m->at(i, j));
            stats[std::string("ego_mean_") + to_string(m->metric)] =
                detail::distribution_summary(means);
            const auto global = gini(std::span<const double>(all_entries));
            stats[std::string("network_gini_") + to_string(m->metric)] =
                global ? OrderedJson(round_sig12(*global)) : OrderedJson(nullptr);
        }
        stats["e_gb"] = detail::distribution_summary(egb_values);
        emit("stats.json", detail::dump_json(stats));
    }

    // Optional per-window exports.
    if (config.export_graphs) {
        std::ostringstream out;
        write_window_graphs_csv(out, series);
        emit("window_graphs.csv", out.str());
    }
    if (config.export_centrality) {
        std::ostringstream out;
        write_centrality_csv(out, series, config.weighted_betweenness);
        emit("centrality.csv", out.str());
    }

    // Effective-config echo: re-running from this file reproduces the run.
    emit("effective_config.json", detail::dump_json(run_config_to_json(config)));
    return result;
}

} // namespace entangle
