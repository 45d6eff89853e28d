#pragma once

#include "arrival_series.hpp"
#include "collatz_core.hpp"
#include "exact_algebra.hpp"
#include "linear_system.hpp"
#include "verify_harness.hpp"
