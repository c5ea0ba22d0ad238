#pragma once

#include "downstream.hpp"
#include "errors.hpp"
#include "feature_graph.hpp"
#include "matrix_io.hpp"
#include "rng.hpp"
#include "sbm.hpp"
#include "spectral.hpp"
#include "synth.hpp"
