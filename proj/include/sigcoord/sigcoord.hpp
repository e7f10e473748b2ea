#pragma once

#include "sigcoord/types.hpp"
#include "sigcoord/road_network.hpp"
#include "sigcoord/traffic_sim.hpp"
#include "sigcoord/coord_graph.hpp"
#include "sigcoord/dag_order.hpp"
#include "sigcoord/nl_coor.hpp"
#include "sigcoord/loc_iai.hpp"
#include "sigcoord/baselines.hpp"
#include "sigcoord/harness.hpp"
