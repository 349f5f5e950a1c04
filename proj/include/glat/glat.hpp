#pragma once

#include "glat/core/error.hpp"
#include "glat/core/parallel.hpp"
#include "glat/core/types.hpp"
#include "glat/spline/compose.hpp"
#include "glat/spline/fitting.hpp"
#include "glat/spline/geometry.hpp"
#include "glat/spline/offset.hpp"
#include "glat/spline/sampling.hpp"
#include "glat/spline/spline_io.hpp"
#include "glat/tiles/checks.hpp"
#include "glat/tiles/tile.hpp"
#include "glat/lattice/hex_mesh.hpp"
#include "glat/lattice/lattice.hpp"
#include "glat/beam/closed_form.hpp"
#include "glat/beam/modal.hpp"
#include "glat/beam/poisson.hpp"
#include "glat/beam/results_io.hpp"
#include "glat/beam/static_solver.hpp"
#include "glat/optim/sqp.hpp"
#include "glat/inspect/deviation.hpp"
#include "glat/io/config.hpp"
#include "glat/io/pipeline.hpp"
