#pragma once

#include "dispersim/core_model.hpp"
#include "dispersim/cpi.hpp"
#include "dispersim/design.hpp"
#include "dispersim/error.hpp"
#include "dispersim/fit.hpp"
#include "dispersim/hom.hpp"
#include "dispersim/quadrature.hpp"
