#pragma once

#include "bldiff/core_math.hpp"
#include "bldiff/dynamics.hpp"
#include "bldiff/errors.hpp"
#include "bldiff/gains.hpp"
#include "bldiff/ladder.hpp"
#include "bldiff/lyapunov.hpp"
#include "bldiff/sampling.hpp"
#include "bldiff/signals.hpp"
