#pragma once

#include "hyperloom/errors.hpp"
#include "hyperloom/rng.hpp"
#include "hyperloom/geometry.hpp"
#include "hyperloom/positions.hpp"
#include "hyperloom/hypergraph.hpp"
#include "hyperloom/model.hpp"
#include "hyperloom/sampling.hpp"
#include "hyperloom/brent.hpp"
#include "hyperloom/estimator.hpp"
#include "hyperloom/simulator.hpp"
#include "hyperloom/identify.hpp"
#include "hyperloom/eval.hpp"
