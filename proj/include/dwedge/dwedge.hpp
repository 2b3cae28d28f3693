#pragma once

#include "dwedge/airy.hpp"
#include "dwedge/dbm.hpp"
#include "dwedge/edgescale.hpp"
#include "dwedge/ensemble.hpp"
#include "dwedge/errors.hpp"
#include "dwedge/freeconv.hpp"
#include "dwedge/gof.hpp"
#include "dwedge/io.hpp"
#include "dwedge/limit_law.hpp"
#include "dwedge/measure.hpp"
#include "dwedge/parallel.hpp"
#include "dwedge/quadrature.hpp"
#include "dwedge/resolvent.hpp"
#include "dwedge/rng.hpp"
#include "dwedge/tracy_widom.hpp"
#include "dwedge/twstats.hpp"
#include "dwedge/verify.hpp"
