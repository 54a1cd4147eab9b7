#pragma once

// Umbrella header for the whole library: gradient-descent phase analysis of
// linear predictors and one-hidden-layer linear networks under exponential
// and logistic loss.

#include "errors.hpp"
#include "rng.hpp"
#include "linalg.hpp"
#include "loss.hpp"
#include "roots.hpp"
#include "csv.hpp"
#include "linprog.hpp"
#include "dataset.hpp"
#include "cifar10.hpp"
#include "trajectory.hpp"
#include "predictor.hpp"
#include "critical_lr.hpp"
#include "phase_functions.hpp"
#include "scalar_map.hpp"
#include "network.hpp"
#include "detect.hpp"
#include "curvature.hpp"
#include "catapult_search.hpp"
#include "phase_map.hpp"
#include "config.hpp"
#include "experiment.hpp"
