// Umbrella header.

#pragma once

#include "casimir/dperp_table.hpp"
#include "casimir/lifshitz.hpp"
#include "casimir/material.hpp"
#include "casimir/quadrature.hpp"
#include "casimir/surface.hpp"
#include "casimir/sweep.hpp"
#include "casimir/units.hpp"
