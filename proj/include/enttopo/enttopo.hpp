#pragma once

#include "enttopo/allocation.hpp"
#include "enttopo/errors.hpp"
#include "enttopo/experiments.hpp"
#include "enttopo/failure_sim.hpp"
#include "enttopo/graph.hpp"
#include "enttopo/graph_state.hpp"
#include "enttopo/rng.hpp"
#include "enttopo/statevector.hpp"
#include "enttopo/topology.hpp"
#include "enttopo/version.hpp"
