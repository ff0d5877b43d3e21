#pragma once

#include "gilbert/accumulators.hpp"
#include "gilbert/closed_forms.hpp"
#include "gilbert/estimators_1d.hpp"
#include "gilbert/estimators_nd.hpp"
#include "gilbert/fenwick.hpp"
#include "gilbert/grid.hpp"
#include "gilbert/importance.hpp"
#include "gilbert/parallel.hpp"
#include "gilbert/point_process.hpp"
#include "gilbert/poisson_cdf.hpp"
#include "gilbert/rng.hpp"
#include "gilbert/window.hpp"
