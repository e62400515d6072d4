#pragma once

#include <span>
#include <vector>

#include "helmscat/grid.hpp"
#include "helmscat/helmholtz.hpp"
#include "helmscat/linear_map.hpp"

namespace helmscat {

/// Penetrable circular cylinder in a homogeneous background.
struct DiskScene {
  double radius = 1.0;      // a (cm)
  double eta_disk = 1.0;
  double eta_b = 1.0;
  double wavelength = 1.0;  // free-space lambda (cm)
  double center_x = 0.0;
  double center_y = 0.0;
  double amplitude = 1.0;   // u0
  /// 0 picks the smallest order >= ceil(k0 eta_disk a) + 15 whose terms at the
  /// rim fall below 1e-15.
  int truncation_order = 0;

  double k0() const;
  int minimum_order() const;
};

/// Cylindrical-harmonic coefficients for orders 0..order; negative orders
/// mirror the positive ones.
struct DiskCoefficients {
  int order = 0;
  std::vector<cplx> outside;  // b_n, multiplying H_n(k_b r)
  std::vector<cplx> inside;   // c_n, multiplying J_n(k_d r)
};
DiskCoefficients disk_coefficients(const DiskScene& scene);

/// Total field of a unit-direction plane wave u0 exp(j k_b <d, x>) scattered by
/// the disk, sampled on `grid`.
ComplexField2D analytic_disk_field(const DiskScene& scene, const Grid2D& grid, double dir_x,
                                   double dir_y);

/// Assemble a linear map column by column and solve it with dense LU.
std::vector<cplx> dense_reference_solve(const LinearMap& apply, std::size_t n,
                                        std::span<const cplx> b);
/// Helmholtz version; grids above 41 x 41 are rejected.
ComplexField2D dense_reference_solve(const HelmholtzOperator& op, const ComplexField2D& b);

/// ||u - u_ref||^2 / ||u_ref||^2.
double relative_error(std::span<const cplx> u, std::span<const cplx> u_ref);

}  // namespace helmscat
