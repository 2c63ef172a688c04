#pragma once

#include "recipe_rl/env.hpp"
#include "recipe_rl/error.hpp"
#include "recipe_rl/grid.hpp"
#include "recipe_rl/learner.hpp"
#include "recipe_rl/numeric_text.hpp"
#include "recipe_rl/oracle.hpp"
#include "recipe_rl/predictor.hpp"
#include "recipe_rl/rng.hpp"
