// Acceptance suite: one line per criterion, [PASS]/[FAIL], nonzero exit on
// any failure. Tolerances and thresholds are pinned in code.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "entangle/entangle.hpp"
#include "helpers.hpp"

using namespace entangle;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void criterion(int number, const std::string& name, const std::function<bool(std::string&)>& body) {
    std::string detail;
    const auto start = std::chrono::steady_clock::now();
    bool ok = false;
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] criterion %d: %s (%.2fs)%s%s\n", ok ? "PASS" : "FAIL", number, name.c_str(),
                seconds, detail.empty() ? "" : " - ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

bool t_statistic_reconstruction(std::string& detail) {
    const TestResult first = t_from_summary(0.457, 0.070, 55, 0.488, 0.059, 58, TTestMode::pooled);
    const TestResult second = t_from_summary(0.508, 0.061, 66, 0.469, 0.028, 15, TTestMode::pooled);
    std::ostringstream msg;
    msg << "t1=" << format_sig12(first.statistic) << " df1=" << first.df
        << " t2=" << format_sig12(second.statistic) << " df2=" << second.df;
    detail = msg.str();
    return first.df == 111.0 && first.statistic >= -2.65 && first.statistic <= -2.40 &&
           second.df == 79.0 && second.statistic >= 2.30 && second.statistic <= 2.55;
}

bool betweenness_oracle_equivalence(std::string& detail) {
    long long checked = 0;
    double worst = 0.0;
    auto compare = [&](const InteractionGraph& g) {
        for (bool weighted : {false, true}) {
            const std::vector<double> got = betweenness_raw_values(g, weighted);
            const std::vector<double> want = helpers::brute_force_betweenness(g, weighted);
            for (std::size_t i = 0; i < got.size(); ++i) {
                worst = std::max(worst, std::abs(got[i] - want[i]));
                if (std::abs(got[i] - want[i]) > 1e-9) return false;
            }
            ++checked;
        }
        return true;
    };
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        Xoshiro256ss rng(9000 + seed);
        const int n = 2 + static_cast<int>(rng.below(5));
        if (!compare(helpers::random_digraph(rng, n))) {
            detail = "random digraph seed " + std::to_string(seed) + " diverged";
            return false;
        }
    }
    for (int size = 2; size <= 5; ++size) {
        if (!compare(helpers::star_graph(size))) {
            detail = "star family diverged";
            return false;
        }
    }
    for (int n = 2; n <= 6; ++n) {
        for (bool symmetric : {false, true}) {
            if (!compare(helpers::path_graph(n, symmetric))) {
                detail = "path family diverged";
                return false;
            }
        }
    }
    for (int n = 3; n <= 6; ++n) {
        for (bool symmetric : {false, true}) {
            if (!compare(helpers::cycle_graph(n, symmetric))) {
                detail = "cycle family diverged";
                return false;
            }
        }
    }
    detail = std::to_string(checked) + " graph/mode pairs, max |err| = " + format_sig12(worst);
    return true;
}

bool centralization_anchors(std::string& detail) {
    const double star = group_betweenness_centralization(helpers::star_graph(4));     // G = 5
    const double cycle = group_betweenness_centralization(helpers::cycle_graph(5, true));
    const double path = group_betweenness_centralization(helpers::path_graph(3, false));
    std::ostringstream msg;
    msg << "star5=" << star << " cycle5=" << cycle << " path3=" << path;
    detail = msg.str();
    return star == 1.0 && cycle == 0.0 && path == 1.0;
}

bool gini_oracle_equivalence(std::string& detail) {
    const std::vector<double> a{5, 5, 5}, b{0, 1}, c{1, 2, 3};
    if (std::abs(*gini(std::span<const double>(a))) > 1e-15) return false;
    if (std::abs(*gini(std::span<const double>(b)) - 0.5) > 1e-15) return false;
    if (std::abs(*gini(std::span<const double>(c)) - 2.0 / 9.0) > 1e-15) return false;
    Xoshiro256ss rng(77);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + rng.below(50);
        std::vector<double> v(n);
        for (double& x : v) x = rng.uniform() < 0.1 ? 0.0 : rng.uniform() * 50.0;
        const auto fast = gini(std::span<const double>(v));
        const auto slow = helpers::gini_double_sum(std::span<const double>(v));
        if (fast.has_value() != slow.has_value()) {
            detail = "definedness diverged at trial " + std::to_string(trial);
            return false;
        }
        if (!fast) continue;
        worst = std::max(worst, std::abs(*fast - *slow));
        if (std::abs(*fast - *slow) > 1e-12) {
            detail = "trial " + std::to_string(trial) + " |err| = " + format_sig12(worst);
            return false;
        }
    }
    detail = "1000 vectors, max |err| = " + format_sig12(worst);
    return true;
}

bool entanglement_invariants(std::string& detail) {
    Xoshiro256ss kernel_rng(555);
    for (int trial = 0; trial < 200; ++trial) {
        const double dx = 1.0 + kernel_rng.below(6);
        const double dy = 1.0 + kernel_rng.below(6);
        const double d1 = 1e-6 + kernel_rng.uniform() * 3.0;
        const double d2 = d1 + 1e-6 + kernel_rng.uniform() * 3.0;
        if (!(entanglement_value(dx, dy, d1, 1e-9) > entanglement_value(dx, dy, d2, 1e-9))) {
            detail = "monotonicity violated";
            return false;
        }
    }
    int logs_checked = 0;
    for (std::uint64_t seed = 1; seed <= 110; ++seed) {
        Xoshiro256ss rng(seed * 31);
        const int actors = 2 + static_cast<int>(rng.below(5));   // <= 6
        const int windows = 1 + static_cast<int>(rng.below(4));  // <= 4
        const EventLog log = helpers::random_log(seed, actors, windows, 6);
        const WindowSeries series =
            make_window_series(log, helpers::kEpoch2014,
                               helpers::kEpoch2014 + windows * 7 * kMsPerDay, 7 * kMsPerDay,
                               7 * kMsPerDay);
        if (series.actor_universe.size() < 2 || series.windows.empty()) continue;
        ++logs_checked;
        const EntanglementMatrix ea = pairwise_matrix(EntanglementMetric::E_A, log, series);
        const EntanglementMatrix eb = pairwise_matrix(EntanglementMetric::E_B, log, series);
        for (std::size_t i = 0; i < ea.size(); ++i) {
            for (std::size_t j = i + 1; j < ea.size(); ++j) {
                if (ea.at(i, j) != ea.at(j, i) || eb.at(i, j) != eb.at(j, i)) {
                    detail = "symmetry violated at seed " + std::to_string(seed);
                    return false;
                }
                const double sa = activity_entanglement(log, ea.actors[i], ea.actors[j], series);
                const double sb = betweenness_entanglement(eb.actors[i], eb.actors[j], series);
                if (std::abs(ea.at(i, j) - sa) > 1e-9 || std::abs(eb.at(i, j) - sb) > 1e-9) {
                    detail = "matrix/scalar divergence at seed " + std::to_string(seed);
                    return false;
                }
            }
        }
        // Annihilation: an isolated actor appended to the universe zeroes
        // every pair it joins.
        WindowSeries extended = series;
        extended.actor_universe.push_back("zzz_isolated");
        std::sort(extended.actor_universe.begin(), extended.actor_universe.end());
        if (activity_entanglement(log, extended.actor_universe.front() == "zzz_isolated"
                                           ? extended.actor_universe.back()
                                           : extended.actor_universe.front(),
                                  "zzz_isolated", extended) != 0.0) {
            detail = "zero-degree annihilation violated at seed " + std::to_string(seed);
            return false;
        }
    }
    detail = std::to_string(logs_checked) + " random logs checked";
    return logs_checked >= 100;
}

int discrimination_successes(double depth, std::string& detail) {
    int successes = 0;
    for (int k = 0; k < 100; ++k) {
        SynthConfig config;
        config.actor_count = 4;
        config.sync_groups = {{"a000", "a001"}};
        config.modulation_depth = depth;
        config.base_rate = 10.0;
        config.window_count = 12;
        config.seed = 42000 + static_cast<std::uint64_t>(k);
        const EventLog log = generate(config);
        const WindowSeries series = make_window_series(
            log, config.start, config.start + config.window_count * config.window_len,
            config.window_len, config.window_len);
        if (series.actor_universe.size() != 4) continue;
        const EntanglementMatrix ea = pairwise_matrix(EntanglementMetric::E_A, log, series);
        const std::size_t s0 = ea.index_of("a000"), s1 = ea.index_of("a001");
        const double sync_value = ea.at(s0, s1);
        std::vector<double> others;
        for (std::size_t i = 0; i < ea.size(); ++i)
            for (std::size_t j = i + 1; j < ea.size(); ++j)
                if (!(i == s0 && j == s1) && !(i == s1 && j == s0)) others.push_back(ea.at(i, j));
        std::sort(others.begin(), others.end());
        const double median = others[others.size() / 2];
        if (sync_value > median) ++successes;
    }
    detail += "depth " + format_sig12(depth) + ": " + std::to_string(successes) + "/100 ";
    return successes;
}

bool synthetic_discrimination(std::string& detail) {
    const int high = discrimination_successes(0.9, detail);
    const int null_rate = discrimination_successes(0.0, detail);
    return high >= 95 && null_rate >= 35 && null_rate <= 65;
}

bool pipeline_determinism(std::string& detail) {
    const fs::path dir =
        fs::temp_directory_path() / ("entangle_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    {
        std::ofstream log(dir / "log.csv", std::ios::binary);
        log << "msg_id,timestamp,sender,recipients,reply_to\n"
               "m01,2014-05-01T09:00:00Z,a,b,\n"
               "m02,2014-05-01T11:00:00Z,b,a,m01\n"
               "m03,2014-05-02T09:00:00Z,a,b;c,\n"
               "m04,2014-05-05T10:00:00Z,c,a,\n"
               "m05,2014-05-08T09:00:00Z,b,c,\n"
               "m06,2014-05-09T09:00:00Z,c,b,\n"
               "m07,2014-05-12T12:00:00Z,a,b,\n"
               "m08,2014-05-15T09:00:00Z,a,c,\n"
               "m09,2014-05-16T09:00:00Z,c,a,\n"
               "m10,2014-05-22T09:00:00Z,b,a,\n";
        std::ofstream teams(dir / "teams.csv", std::ios::binary);
        teams << "actor,team\na,alpha\nb,alpha\nc,beta\n";
    }
    RunConfig config;
    run_pipeline(dir / "log.csv", dir / "teams.csv", config, dir / "out1");
    run_pipeline(dir / "log.csv", dir / "teams.csv", config, dir / "out2");
    int files = 0;
    for (const auto& entry : fs::directory_iterator(dir / "out1")) {
        const auto other = dir / "out2" / entry.path().filename();
        if (!fs::exists(other) || read_file(entry.path()) != read_file(other)) {
            detail = "mismatch in " + entry.path().filename().string();
            return false;
        }
        ++files;
    }
    fs::remove_all(dir);
    detail = std::to_string(files) + " artifact files byte-identical";
    return files >= 8;
}

bool student_cdf_correctness(std::string& detail) {
    const double q10 = student_cdf(1.812, 10);
    const double q1 = student_cdf(1.0, 1);
    std::ostringstream msg;
    msg << "P(T10<=1.812)=" << format_sig12(q10) << " P(T1<=1.0)=" << format_sig12(q1);
    detail = msg.str();
    return std::abs(q10 - 0.95) <= 1e-3 && std::abs(q1 - 0.75) <= 1e-3;
}

bool desk_scale_throughput(std::string& detail) {
    const fs::path dir =
        fs::temp_directory_path() / ("entangle_throughput_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);

    SynthConfig synth;
    synth.actor_count = 200;
    synth.window_count = 52;
    synth.base_rate = 10.0; // 200 * 52 * 10 = 104k expected events
    synth.modulation_depth = 0.5;
    synth.teams.clear();
    for (int t = 0; t < 10; ++t) synth.teams.emplace_back();
    for (int i = 0; i < synth.actor_count; ++i)
        synth.teams[static_cast<std::size_t>(i % 10)].push_back(
            entangle::detail::synth_actor_name(i, synth.actor_count));
    synth.sync_groups = {{"a000", "a020", "a040"}, {"a001", "a021"}};
    synth.seed = 4242;
    const EventLog log = generate(synth);
    {
        std::ofstream out(dir / "log.csv", std::ios::binary);
        out << serialize_event_log(log);
        std::ofstream teams(dir / "teams.csv", std::ios::binary);
        teams << "actor,team\n";
        for (int i = 0; i < synth.actor_count; ++i)
            teams << entangle::detail::synth_actor_name(i, synth.actor_count) << ",team"
                  << (i % 10) << "\n";
    }
    if (log.size() < 100000) {
        detail = "corpus only has " + std::to_string(log.size()) + " events";
        fs::remove_all(dir);
        return false;
    }

    const auto start = std::chrono::steady_clock::now();
    RunConfig config;
    run_pipeline(dir / "log.csv", dir / "teams.csv", config, dir / "out");
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    fs::remove_all(dir);
    std::ostringstream msg;
    msg << log.size() << " events, " << synth.actor_count << " actors, 52 windows in "
        << format_sig12(seconds) << "s";
    detail = msg.str();
    return seconds < 60.0;
}

} // namespace

int main() {
    criterion(1, "t-statistic reconstruction from group summaries", t_statistic_reconstruction);
    criterion(2, "betweenness matches the exhaustive oracle", betweenness_oracle_equivalence);
    criterion(3, "centralization anchors are exact", centralization_anchors);
    criterion(4, "gini matches the double-sum oracle", gini_oracle_equivalence);
    criterion(5, "entanglement invariant suite", entanglement_invariants);
    criterion(6, "synthetic discrimination", synthetic_discrimination);
    criterion(7, "pipeline determinism", pipeline_determinism);
    criterion(8, "student cdf correctness", student_cdf_correctness);
    criterion(9, "desk-scale throughput", desk_scale_throughput);
    if (g_failures == 0) {
        std::printf("all acceptance criteria passed\n");
    } else {
        std::printf("%d acceptance criteria failed\n", g_failures);
    }
    return g_failures;
}
