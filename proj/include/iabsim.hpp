#pragma once

#include "iabsim/channel.hpp"
#include "iabsim/config.hpp"
#include "iabsim/core.hpp"
#include "iabsim/engine.hpp"
#include "iabsim/experiments.hpp"
#include "iabsim/metrics.hpp"
#include "iabsim/netstate.hpp"
#include "iabsim/routing.hpp"
#include "iabsim/scheduler.hpp"
#include "iabsim/topology.hpp"
