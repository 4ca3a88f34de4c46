#pragma once

#include "hetsim/calibration.hpp"
#include "hetsim/calibration_run.hpp"
#include "hetsim/cli.hpp"
#include "hetsim/cost_model.hpp"
#include "hetsim/engine.hpp"
#include "hetsim/error.hpp"
#include "hetsim/metrics.hpp"
#include "hetsim/platform.hpp"
#include "hetsim/presets.hpp"
#include "hetsim/scenario.hpp"
#include "hetsim/scheduler.hpp"
#include "hetsim/types.hpp"
#include "hetsim/workload.hpp"
