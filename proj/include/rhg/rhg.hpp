#pragma once

#include "analysis.hpp"
#include "error.hpp"
#include "experiment.hpp"
#include "explorer.hpp"
#include "geometry.hpp"
#include "graph.hpp"
#include "measure.hpp"
#include "measure_checks.hpp"
#include "params.hpp"
#include "rng.hpp"
#include "sampler.hpp"
