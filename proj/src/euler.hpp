#pragma once

// Internal: the forward-Euler density update shared by the free-boundary
// solver, its Picard mode and the fixed-domain evolution.

#include <span>

#include "frontier/discretization.hpp"
#include "frontier/growth.hpp"

namespace frontier::detail {

/// out[i] = u[i] + dt (d (conv[i] - u[i]) + f(t, x_i, u[i])) on the active
/// range of (g, h). Throws StabilityViolation below -1e-12.
void advance_density(const NonlocalOperator& op, const Growth& growth, double dt,
                     std::span<const double> u, std::span<const double> conv, double g, double h,
                     double t, std::span<double> out);

}  // namespace frontier::detail
