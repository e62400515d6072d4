#include "helmscat/helmholtz.hpp"

#include <algorithm>
#include <stdexcept>

namespace helmscat {

AbsorbingLayer AbsorbingLayer::around(const ExtendedGrid2D& eg) {
  const Grid2D& g = eg.inner;
  const double far = g.side_length();
  return {g.origin_x(),          g.origin_x() + far, g.origin_y(), g.origin_y() + far,
          eg.layer_thickness(), eg.beta};
}

cplx AbsorbingLayer::alpha(double x, double y) const {
  if (beta == 0.0) return {1.0, 0.0};
  const double dx = std::max({x_min - x, 0.0, x - x_max});
  const double dy = std::max({y_min - y, 0.0, y - y_max});
  const double d2 = dx * dx + dy * dy;
  return {1.0, -beta * d2 / (thickness * thickness)};
}

HelmholtzOperator::HelmholtzOperator(RealField2D eta_sq, double k0, AbsorbingLayer layer)
    : eta_sq_(std::move(eta_sq)), k0_(k0), layer_(layer) {
  if (!(k0 >= 0.0)) throw std::invalid_argument("k0 must be >= 0");
  if (layer_.beta < 0.0) throw std::invalid_argument("beta must be >= 0");
  if (layer_.beta > 0.0 && !(layer_.thickness > 0.0)) {
    throw std::invalid_argument("absorbing layer with beta > 0 needs thickness > 0");
  }
  for (double v : eta_sq_.values()) {
    if (!(v > 0.0)) throw std::invalid_argument("eta^2 must be strictly positive");
  }

  const Grid2D& g = eta_sq_.grid();
  const int s = g.size();
  const double h = g.h();
  const double inv_h2 = 1.0 / (h * h);
  const double k0_sq = k0 * k0;
  alpha_.resize(g.count());
  diag_.resize(g.count());
  for (int n = 0; n < s; ++n) {
    for (int m = 0; m < s; ++m) {
      const std::size_t i = g.index(m, n);
      alpha_[i] = layer_.alpha(g.x(m), g.y(n));
      cplx d = 4.0 * inv_h2 - alpha_[i] * k0_sq * eta_sq_[i];
      // Each missing neighbor is a ghost value (1 + j h k0 eta) u_{m,n}.
      const cplx ghost{1.0, h * k0 * std::sqrt(eta_sq_[i])};
      const int missing = (m == 0) + (m == s - 1) + (n == 0) + (n == s - 1);
      d -= static_cast<double>(missing) * ghost * inv_h2;
      diag_[i] = d;
    }
  }
}

HelmholtzOperator HelmholtzOperator::assemble(const ExtendedGrid2D& eg,
                                              const RealField2D& eta_sq, double k0) {
  if (!(eta_sq.grid() == eg.extended)) {
    throw std::invalid_argument("assemble: eta^2 must live on the extended grid");
  }
  return HelmholtzOperator(eta_sq, k0, AbsorbingLayer::around(eg));
}

template <bool Adjoint>
void HelmholtzOperator::apply_stencil(std::span<const cplx> u, std::span<cplx> out) const {
  const std::size_t count = unknowns();
  if (u.size() != count || out.size() != count) {
    throw std::invalid_argument("HelmholtzOperator: vector size does not match grid");
  }
  const int s = grid().size();
  const double h = grid().h();
  const double inv_h2 = 1.0 / (h * h);
  auto diag = [&](std::size_t i) { return Adjoint ? std::conj(diag_[i]) : diag_[i]; };

  for (int n = 0; n < s; ++n) {
    const std::size_t row = static_cast<std::size_t>(n) * s;
    const bool has_down = n > 0;
    const bool has_up = n < s - 1;
    for (int m = 0; m < s; ++m) {
      const std::size_t i = row + m;
      cplx nb{0.0, 0.0};
      if (m > 0) nb += u[i - 1];
      if (m < s - 1) nb += u[i + 1];
      if (has_down) nb += u[i - s];
      if (has_up) nb += u[i + s];
      out[i] = diag(i) * u[i] - inv_h2 * nb;
    }
  }
}

void HelmholtzOperator::apply(std::span<const cplx> u, std::span<cplx> out) const {
  apply_stencil<false>(u, out);
}

void HelmholtzOperator::apply_adjoint(std::span<const cplx> v, std::span<cplx> out) const {
  apply_stencil<true>(v, out);
}

ComplexField2D HelmholtzOperator::apply(const ComplexField2D& u) const {
  if (!(u.grid() == grid())) throw std::invalid_argument("apply: grid mismatch");
  ComplexField2D out(grid());
  apply(u.values(), out.values());
  return out;
}

ComplexField2D HelmholtzOperator::apply_adjoint(const ComplexField2D& v) const {
  if (!(v.grid() == grid())) throw std::invalid_argument("apply_adjoint: grid mismatch");
  ComplexField2D out(grid());
  apply_adjoint(v.values(), out.values());
  return out;
}

ComplexField2D HelmholtzOperator::diagonal_field() const {
  return ComplexField2D(grid(), diag_);
}

}  // namespace helmscat
