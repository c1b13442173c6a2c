// Command-line front end: validate logs, compute entanglement matrices,
// aggregate team reports, generate synthetic corpora, or run the whole
// pipeline. Exit codes: 0 success, 1 input error, 2 config error,
// 3 internal error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "entangle/entangle.hpp"

namespace fs = std::filesystem;
using entangle::RunConfig;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInternal = 3;

RunConfig load_run_config(const std::optional<std::string>& config_path) {
    if (!config_path) return RunConfig{};
    std::ifstream in(*config_path, std::ios::binary);
    if (!in) throw entangle::ConfigError("cannot read config file: " + *config_path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw entangle::ConfigError("config file is not valid JSON: " + std::string(e.what()));
    }
    return entangle::run_config_from_json(j);
}

struct ConfigFlags {
    std::optional<std::string> config_path;
    double window_days = 7.0;
    double step_days = 7.0;
    bool allow_partial = false;
    double epsilon = 1e-9;
    bool weighted = false;
    bool no_roster = false;
    double reply_horizon_days = 14.0;
    bool no_heuristic = false;
    int tz_offset_min = 0;
    bool export_graphs = false;
    bool export_centrality = false;
};

void add_config_flags(CLI::App& cmd, ConfigFlags& flags) {
    cmd.add_option("--config", flags.config_path, "JSON config file (flags win over it)");
    cmd.add_option("--window-days", flags.window_days, "Window length in days");
    cmd.add_option("--step-days", flags.step_days, "Window step in days");
    cmd.add_flag("--allow-partial", flags.allow_partial, "Append a final truncated window");
    cmd.add_option("--epsilon", flags.epsilon, "Zero-distance floor for entanglement");
    cmd.add_flag("--weighted-betweenness", flags.weighted, "Use inverse arc weights for paths");
    cmd.add_flag("--no-roster", flags.no_roster, "Per-window node sets instead of the full roster");
    cmd.add_option("--reply-horizon-days", flags.reply_horizon_days, "Heuristic reply horizon");
    cmd.add_flag("--no-heuristic-replies", flags.no_heuristic, "Only explicit reply_to links");
    cmd.add_option("--tz-offset-min", flags.tz_offset_min,
                   "Offset (minutes east of UTC) for naive timestamps");
    cmd.add_flag("--export-graphs", flags.export_graphs, "Also write per-window graph CSV");
    cmd.add_flag("--export-centrality", flags.export_centrality, "Also write per-window centrality CSV");
}

/// Defaults, then config file, then explicitly passed flags.
RunConfig merge_config(const CLI::App& cmd, const ConfigFlags& flags) {
    RunConfig config = load_run_config(flags.config_path);
    if (cmd.count("--window-days")) config.window_days = flags.window_days;
    if (cmd.count("--step-days")) config.step_days = flags.step_days;
    if (cmd.count("--allow-partial")) config.allow_partial = true;
    if (cmd.count("--epsilon")) config.epsilon = flags.epsilon;
    if (cmd.count("--weighted-betweenness")) config.weighted_betweenness = true;
    if (cmd.count("--no-roster")) config.roster_mode = false;
    if (cmd.count("--reply-horizon-days")) config.reply_horizon_days = flags.reply_horizon_days;
    if (cmd.count("--no-heuristic-replies")) config.heuristic_replies = false;
    if (cmd.count("--tz-offset-min")) config.default_tz_offset_minutes = flags.tz_offset_min;
    if (cmd.count("--export-graphs")) config.export_graphs = true;
    if (cmd.count("--export-centrality")) config.export_centrality = true;
    config.validate();
    return config;
}

entangle::ParseResult read_log(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw entangle::InputError("cannot read event log: " + path);
    return entangle::parse_event_log(in);
}

void write_text(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw entangle::InputError("cannot write " + path);
    out << contents;
}

int cmd_validate(const std::string& log_path, const std::optional<std::string>& rejects_path,
                 const CLI::App& cmd, const ConfigFlags& flags) {
    const RunConfig config = merge_config(cmd, flags);
    entangle::ParseResult parsed = read_log(log_path);
    const entangle::EventLog log =
        entangle::normalize_timezones(parsed.log, config.default_tz_offset_minutes);
    const entangle::ReplyPolicy policy{config.heuristic_replies, config.reply_horizon_days * 24.0};
    const entangle::ReplyReport replies = entangle::link_replies(log, policy);
    const entangle::ValidationReport report = entangle::validate_log(log, &parsed.report, &replies);
    std::cout << entangle::detail::validation_to_json(report).dump(2) << "\n";
    if (rejects_path) {
        std::ostringstream out;
        entangle::write_rejects_csv(out, parsed.report);
        write_text(*rejects_path, out.str());
    }
    return kExitOk;
}

int cmd_entangle(const std::string& log_path, const std::string& metric, const std::string& out_path,
                 const CLI::App& cmd, const ConfigFlags& flags) {
    const RunConfig config = merge_config(cmd, flags);
    entangle::ParseResult parsed = read_log(log_path);
    const entangle::EventLog log =
        entangle::normalize_timezones(parsed.log, config.default_tz_offset_minutes);
    const entangle::WindowSeries series = entangle::make_window_series(
        log, entangle::days_to_ms(config.window_days), entangle::days_to_ms(config.step_days),
        config.allow_partial, config.roster_mode);
    if (series.windows.empty())
        throw entangle::InputError("empty window series: data span is shorter than one window");

    std::ostringstream out;
    if (metric == "group-betweenness") {
        out << "actor,e_gb\n";
        for (const entangle::Actor& actor : series.actor_universe) {
            const double v = entangle::group_betweenness_entanglement(
                actor, series, config.epsilon, config.weighted_betweenness);
            out << entangle::csv_escape(actor) << ',' << entangle::format_sig12(v) << '\n';
        }
    } else {
        const auto which = metric == "activity" ? entangle::EntanglementMetric::E_A
                                                : entangle::EntanglementMetric::E_B;
        entangle::EntanglementOptions options;
        options.epsilon = config.epsilon;
        options.weighted_betweenness = config.weighted_betweenness;
        const entangle::EntanglementMatrix m =
            entangle::pairwise_matrix(which, log, series, options);
        entangle::write_matrix_csv(out, m);
    }
    write_text(out_path, out.str());
    return kExitOk;
}

int cmd_report(const std::string& log_path, const std::string& teams_path, const std::string& metric,
               const std::string& out_path, const CLI::App& cmd, const ConfigFlags& flags) {
    const RunConfig config = merge_config(cmd, flags);
    entangle::ParseResult parsed = read_log(log_path);
    const entangle::EventLog log =
        entangle::normalize_timezones(parsed.log, config.default_tz_offset_minutes);
    std::ifstream teams_in(teams_path, std::ios::binary);
    if (!teams_in) throw entangle::InputError("cannot read teams file: " + teams_path);
    const auto teams = entangle::parse_teams_csv(teams_in);
    const entangle::WindowSeries series = entangle::make_window_series(
        log, entangle::days_to_ms(config.window_days), entangle::days_to_ms(config.step_days),
        config.allow_partial, config.roster_mode);
    if (series.windows.empty())
        throw entangle::InputError("empty window series: data span is shorter than one window");

    // Per-member values under the chosen metric.
    std::map<entangle::Actor, double> value_of;
    if (metric == "group-betweenness") {
        for (const entangle::Actor& actor : series.actor_universe)
            value_of[actor] = entangle::group_betweenness_entanglement(
                actor, series, config.epsilon, config.weighted_betweenness);
    } else {
        const auto which = metric == "activity" ? entangle::EntanglementMetric::E_A
                                                : entangle::EntanglementMetric::E_B;
        entangle::EntanglementOptions options;
        options.epsilon = config.epsilon;
        options.weighted_betweenness = config.weighted_betweenness;
        const entangle::EntanglementMatrix m =
            entangle::pairwise_matrix(which, log, series, options);
        for (const entangle::Actor& actor : m.actors)
            value_of[actor] = entangle::ego_summary(m, actor).mean;
    }

    entangle::OrderedJson reports = entangle::OrderedJson::array();
    for (const auto& [team, members] : teams) {
        std::vector<entangle::Actor> present;
        std::vector<double> values;
        for (const entangle::Actor& member : members) {
            auto it = value_of.find(member);
            if (it == value_of.end()) continue;
            present.push_back(member);
            values.push_back(it->second);
        }
        if (values.empty()) {
            reports.push_back(entangle::OrderedJson{{"team", team},
                                                    {"metric", metric},
                                                    {"n", 0},
                                                    {"mean", nullptr},
                                                    {"std", nullptr},
                                                    {"gini", nullptr},
                                                    {"degenerate", true}});
            continue;
        }
        const entangle::TeamReport r = entangle::team_report(team, present, values);
        reports.push_back(entangle::OrderedJson{
            {"team", r.team},
            {"metric", metric},
            {"n", r.member_values.size()},
            {"mean", entangle::round_sig12(r.mean)},
            {"std", entangle::round_sig12(r.stddev)},
            {"gini", r.gini ? entangle::OrderedJson(entangle::round_sig12(*r.gini))
                            : entangle::OrderedJson(nullptr)},
            {"degenerate", r.degenerate}});
    }
    write_text(out_path, reports.dump(2) + "\n");
    return kExitOk;
}

int cmd_synth(const std::optional<std::string>& config_path, const CLI::App& cmd,
              std::uint64_t seed, int actors, int windows, double base_rate, double depth,
              const std::string& out_path) {
    entangle::SynthConfig config;
    if (config_path) {
        std::ifstream in(*config_path, std::ios::binary);
        if (!in) throw entangle::ConfigError("cannot read synth config: " + *config_path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw entangle::ConfigError("synth config is not valid JSON: " + std::string(e.what()));
        }
        config = entangle::synth_config_from_json(j);
    }
    if (cmd.count("--seed")) config.seed = seed;
    if (cmd.count("--actors")) config.actor_count = actors;
    if (cmd.count("--windows")) config.window_count = windows;
    if (cmd.count("--base-rate")) config.base_rate = base_rate;
    if (cmd.count("--depth")) config.modulation_depth = depth;
    const entangle::EventLog log = entangle::generate(config);
    write_text(out_path, entangle::serialize_event_log(log));
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Temporal communication-network synchronization metrics"};
    app.require_subcommand(1);

    // validate
    auto* validate = app.add_subcommand("validate", "Summarize and sanity-check an event log");
    std::string v_log;
    std::optional<std::string> v_rejects;
    ConfigFlags v_flags;
    validate->add_option("log", v_log, "Event log CSV")->required();
    validate->add_option("--rejects", v_rejects, "Write the rejects report CSV here");
    add_config_flags(*validate, v_flags);

    // entangle
    auto* entangle_cmd = app.add_subcommand("entangle", "Compute one entanglement metric");
    std::string e_log, e_metric = "activity", e_out = "entanglement.csv";
    ConfigFlags e_flags;
    entangle_cmd->add_option("log", e_log, "Event log CSV")->required();
    entangle_cmd->add_option("--metric", e_metric, "activity | betweenness | group-betweenness")
        ->check(CLI::IsMember({"activity", "betweenness", "group-betweenness"}));
    entangle_cmd->add_option("--out", e_out, "Output CSV path");
    add_config_flags(*entangle_cmd, e_flags);

    // report
    auto* report = app.add_subcommand("report", "Aggregate entanglement per team");
    std::string r_log, r_teams, r_metric = "activity", r_out = "team_reports.json";
    ConfigFlags r_flags;
    report->add_option("log", r_log, "Event log CSV")->required();
    report->add_option("--teams", r_teams, "Teams CSV `actor,team`")->required();
    report->add_option("--metric", r_metric, "activity | betweenness | group-betweenness")
        ->check(CLI::IsMember({"activity", "betweenness", "group-betweenness"}));
    report->add_option("--out", r_out, "Output JSON path");
    add_config_flags(*report, r_flags);

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a deterministic synthetic log");
    std::optional<std::string> s_config;
    std::string s_out = "synth_log.csv";
    std::uint64_t s_seed = 1;
    int s_actors = 12, s_windows = 12;
    double s_rate = 8.0, s_depth = 0.6;
    synth->add_option("--config", s_config, "Synth config JSON");
    synth->add_option("--seed", s_seed, "Generator seed");
    synth->add_option("--actors", s_actors, "Actor count");
    synth->add_option("--windows", s_windows, "Window count");
    synth->add_option("--base-rate", s_rate, "Messages per actor per window");
    synth->add_option("--depth", s_depth, "Modulation depth in [0, 1]");
    synth->add_option("--out", s_out, "Output log CSV path");

    // run
    auto* run = app.add_subcommand("run", "Run the full pipeline into a directory");
    std::string run_log, run_out;
    std::optional<std::string> run_teams;
    ConfigFlags run_flags;
    run->add_option("log", run_log, "Event log CSV")->required();
    run->add_option("--teams", run_teams, "Teams CSV `actor,team`");
    run->add_option("--out", run_out, "Output directory")->required();
    add_config_flags(*run, run_flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (validate->parsed()) return cmd_validate(v_log, v_rejects, *validate, v_flags);
        if (entangle_cmd->parsed())
            return cmd_entangle(e_log, e_metric, e_out, *entangle_cmd, e_flags);
        if (report->parsed()) return cmd_report(r_log, r_teams, r_metric, r_out, *report, r_flags);
        if (synth->parsed())
            return cmd_synth(s_config, *synth, s_seed, s_actors, s_windows, s_rate, s_depth, s_out);
        if (run->parsed()) {
            const RunConfig config = merge_config(*run, run_flags);
            std::optional<std::filesystem::path> teams;
            if (run_teams) teams = *run_teams;
            entangle::run_pipeline(run_log, teams, config, run_out);
            return kExitOk;
        }
    } catch (const entangle::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const entangle::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitInternal;
}
