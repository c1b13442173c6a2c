#pragma once

// Umbrella header.

#include "entangle/centrality.hpp"
#include "entangle/common.hpp"
#include "entangle/csv.hpp"
#include "entangle/entanglement.hpp"
#include "entangle/event_log.hpp"
#include "entangle/interaction_metrics.hpp"
#include "entangle/pipeline.hpp"
#include "entangle/stats.hpp"
#include "entangle/synth.hpp"
#include "entangle/temporal_graph.hpp"
#include "entangle/time.hpp"
