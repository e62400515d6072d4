#pragma once

#include <span>
#include <vector>

#include "helmscat/grid.hpp"

namespace helmscat {

/// Quadratic absorbing profile around the region of interest:
/// alpha(x) = 1 - j beta (d(x) / L)^2, d the distance from x to the ROI box.
struct AbsorbingLayer {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;
  double thickness = 0.0;  // L (cm)
  double beta = 0.0;

  static AbsorbingLayer none() { return {}; }
  static AbsorbingLayer around(const ExtendedGrid2D& eg);

  cplx alpha(double x, double y) const;
};

/// Matrix-free 5-point discretization of -lap - alpha k0^2 eta^2 with the
/// first-order Sommerfeld closure u_ghost = (1 + j h k0 eta_b) u_boundary,
/// where eta_b is eta at the boundary sample.
///
/// Off-diagonal entries are all -1/h^2, so the matrix is complex symmetric and
/// its adjoint is the same stencil with the diagonal conjugated.
class HelmholtzOperator {
 public:
  HelmholtzOperator(RealField2D eta_sq, double k0, AbsorbingLayer layer);

  static HelmholtzOperator assemble(const ExtendedGrid2D& eg, const RealField2D& eta_sq,
                                    double k0);

  const Grid2D& grid() const { return eta_sq_.grid(); }
  std::size_t unknowns() const { return eta_sq_.size(); }
  double k0() const { return k0_; }
  const RealField2D& eta_sq() const { return eta_sq_; }
  const AbsorbingLayer& layer() const { return layer_; }
  std::span<const cplx> alpha() const { return alpha_; }

  /// out = A u.
  void apply(std::span<const cplx> u, std::span<cplx> out) const;
  ComplexField2D apply(const ComplexField2D& u) const;

  /// out = A^H v.
  void apply_adjoint(std::span<const cplx> v, std::span<cplx> out) const;
  ComplexField2D apply_adjoint(const ComplexField2D& v) const;

  /// Diagonal of A, Sommerfeld self-coupling folded in on boundary rows.
  std::span<const cplx> diagonal() const { return diag_; }
  ComplexField2D diagonal_field() const;

 private:
  template <bool Adjoint>
  void apply_stencil(std::span<const cplx> u, std::span<cplx> out) const;

  RealField2D eta_sq_;
  double k0_;
  AbsorbingLayer layer_;
  std::vector<cplx> alpha_;
  std::vector<cplx> diag_;
};

}  // namespace helmscat
