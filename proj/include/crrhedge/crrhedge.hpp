#pragma once

// Umbrella header: the whole pricing library.

#include "crrhedge/backward_walk.hpp"
#include "crrhedge/bsm.hpp"
#include "crrhedge/digital.hpp"
#include "crrhedge/errors.hpp"
#include "crrhedge/lattice.hpp"
#include "crrhedge/numeric.hpp"
#include "crrhedge/payoff.hpp"
#include "crrhedge/rational.hpp"
#include "crrhedge/report.hpp"
#include "crrhedge/scenario.hpp"
#include "crrhedge/static_hedging.hpp"
