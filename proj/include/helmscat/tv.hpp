#pragma once

#include "helmscat/grid.hpp"

namespace helmscat {

/// Isotropic total variation with forward differences; the difference across
/// the far edge is zero.
double tv_value(const RealField2D& w);

/// 1/2 ||x - w||^2 + weight TV(x).
double tv_prox_objective(const RealField2D& x, const RealField2D& w, double weight);

/// argmin over x >= 0 of tv_prox_objective(x, w, weight), approximated with
/// `iterations` steps of fast gradient projection on the dual.
RealField2D tv_prox(const RealField2D& w, double weight, int iterations);

}  // namespace helmscat
