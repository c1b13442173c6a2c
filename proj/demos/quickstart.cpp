// Minimal end-to-end walk-through: generate a small synthetic corpus with
// one synchronized pair, window it, and print the activity-entanglement
// matrix plus each actor's ego summary.

#include <algorithm>
#include <iostream>
#include <vector>

#include "entangle/entangle.hpp"

int main() {
    using namespace entangle;

    SynthConfig synth;
    synth.actor_count = 4;
    synth.sync_groups = {{"a000", "a001"}};
    synth.modulation_depth = 0.9;
    synth.base_rate = 10.0;
    synth.window_count = 12;
    synth.seed = 7;
    const EventLog log = generate(synth);
    std::cout << "generated " << log.size() << " events for " << log.actors().size()
              << " actors\n\n";

    const WindowSeries series =
        make_window_series(log, synth.start, synth.start + synth.window_count * synth.window_len,
                           synth.window_len, synth.window_len);

    const EntanglementMatrix ea = pairwise_matrix(EntanglementMetric::E_A, log, series);
    std::cout << "activity entanglement (upper triangle):\n";
    for (std::size_t i = 0; i < ea.size(); ++i)
        for (std::size_t j = i + 1; j < ea.size(); ++j)
            std::cout << "  " << ea.actors[i] << " ~ " << ea.actors[j] << "  "
                      << format_sig12(ea.at(i, j)) << "\n";

    std::cout << "\nego summaries (mean, gini):\n";
    for (const Actor& actor : ea.actors) {
        const EgoEntanglementSummary s = ego_summary(ea, actor);
        std::cout << "  " << actor << "  " << format_sig12(s.mean) << "  "
                  << (s.gini ? format_sig12(*s.gini) : "n/a") << "\n";
    }

    const double sync_pair = ea.at(ea.index_of("a000"), ea.index_of("a001"));
    std::vector<double> others;
    for (std::size_t i = 0; i < ea.size(); ++i)
        for (std::size_t j = i + 1; j < ea.size(); ++j)
            if (!(ea.actors[i] == "a000" && ea.actors[j] == "a001")) others.push_back(ea.at(i, j));
    std::sort(others.begin(), others.end());
    const double median = others[others.size() / 2];
    std::cout << "\nsynchronized pair: " << format_sig12(sync_pair)
              << "  median of the other pairs: " << format_sig12(median) << "\n"
              << (sync_pair > median ? "the synchronized pair stands out\n"
                                     : "noise won this seed; most seeds separate cleanly\n");
    return 0;
}
