#pragma once

#include "dicke/analysis.hpp"
#include "dicke/cpt.hpp"
#include "dicke/dynamics.hpp"
#include "dicke/ensemble.hpp"
#include "dicke/error.hpp"
#include "dicke/model.hpp"
#include "dicke/montecarlo.hpp"
#include "dicke/quadrature.hpp"
#include "dicke/twolevel.hpp"
