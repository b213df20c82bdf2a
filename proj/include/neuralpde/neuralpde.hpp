#pragma once

#include "neuralpde/adam.hpp"
#include "neuralpde/core.hpp"
#include "neuralpde/experiment.hpp"
#include "neuralpde/grid.hpp"
#include "neuralpde/image.hpp"
#include "neuralpde/lstm.hpp"
#include "neuralpde/mesh_pipeline.hpp"
#include "neuralpde/model.hpp"
#include "neuralpde/model_io.hpp"
#include "neuralpde/pde_solvers.hpp"
#include "neuralpde/series_io.hpp"
#include "neuralpde/training.hpp"
