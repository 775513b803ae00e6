#pragma once

#include "gossipsim/analysis.hpp"
#include "gossipsim/config.hpp"
#include "gossipsim/dynamics.hpp"
#include "gossipsim/engine.hpp"
#include "gossipsim/generators.hpp"
#include "gossipsim/harness.hpp"
#include "gossipsim/metrics.hpp"
#include "gossipsim/protocol.hpp"
#include "gossipsim/report.hpp"
#include "gossipsim/rng.hpp"
#include "gossipsim/temporal_graph.hpp"
#include "gossipsim/types.hpp"
