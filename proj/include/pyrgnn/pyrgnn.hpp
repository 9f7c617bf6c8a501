#pragma once

#include "pyrgnn/analysis.hpp"
#include "pyrgnn/datasets.hpp"
#include "pyrgnn/errors.hpp"
#include "pyrgnn/graph.hpp"
#include "pyrgnn/pooling.hpp"
#include "pyrgnn/pyramid.hpp"
#include "pyrgnn/pyramid_cache.hpp"
#include "pyrgnn/random.hpp"
#include "pyrgnn/readout.hpp"
#include "pyrgnn/reservoir.hpp"
