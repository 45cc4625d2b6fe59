#pragma once

// Umbrella header.

#include "oct/codesign.hpp"
#include "oct/config.hpp"
#include "oct/current_field.hpp"
#include "oct/dynamics.hpp"
#include "oct/errors.hpp"
#include "oct/format.hpp"
#include "oct/linearize.hpp"
#include "oct/mass_model.hpp"
#include "oct/params.hpp"
#include "oct/path_planner.hpp"
#include "oct/power_model.hpp"
#include "oct/random.hpp"
#include "oct/surrogate.hpp"
