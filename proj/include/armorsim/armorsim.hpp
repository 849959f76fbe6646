#pragma once

#include "armorsim/config.hpp"
#include "armorsim/csv.hpp"
#include "armorsim/error.hpp"
#include "armorsim/fabric_backing.hpp"
#include "armorsim/jet_model.hpp"
#include "armorsim/materials.hpp"
#include "armorsim/pipeline.hpp"
#include "armorsim/quadrature.hpp"
#include "armorsim/report.hpp"
#include "armorsim/scenarios.hpp"
#include "armorsim/thin_facing.hpp"
#include "armorsim/validation.hpp"

namespace armorsim {

/// No component draws random numbers; every run is a pure function of its input.
inline constexpr bool kUsesRandomness = false;

}  // namespace armorsim
