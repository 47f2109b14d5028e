#pragma once

#include "bridge_rate/error.hpp"
#include "bridge_rate/fm_distance.hpp"
#include "bridge_rate/functionals.hpp"
#include "bridge_rate/lattice_law.hpp"
#include "bridge_rate/local_limit.hpp"
#include "bridge_rate/numeric.hpp"
#include "bridge_rate/parallel.hpp"
#include "bridge_rate/path.hpp"
#include "bridge_rate/path_sim.hpp"
#include "bridge_rate/quadrature.hpp"
#include "bridge_rate/rate_lab.hpp"
#include "bridge_rate/rn_weighting.hpp"
#include "bridge_rate/rng.hpp"
#include "bridge_rate/transport.hpp"
#include "bridge_rate/walk_pmf.hpp"
