#pragma once

#include "ssa/coverage.hpp"
#include "ssa/error.hpp"
#include "ssa/geometry.hpp"
#include "ssa/latency_model.hpp"
#include "ssa/propagation_sim.hpp"
#include "ssa/rng.hpp"
#include "ssa/special.hpp"
#include "ssa/stats.hpp"
#include "ssa/stochastic_geometry.hpp"
