#pragma once

/// @file
/// Umbrella header.

#include "tlm/core.hpp"
#include "tlm/polynomial.hpp"
#include "tlm/rational_symbol.hpp"
#include "tlm/fourier.hpp"
#include "tlm/autocovariance.hpp"
#include "tlm/block_linalg.hpp"
#include "tlm/rate_fit.hpp"
#include "tlm/coefficients.hpp"
#include "tlm/inverse_approx.hpp"
#include "tlm/series_bound.hpp"
#include "tlm/wienerhopf.hpp"
