#include "helmscat/grid.hpp"

namespace helmscat {

Grid2D::Grid2D(int size, double h, double origin_x, double origin_y)
    : size_(size), h_(h), origin_x_(origin_x), origin_y_(origin_y) {
  if (size < 3) throw std::invalid_argument("grid needs at least 3 points per side");
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("mesh size must be > 0");
}

Grid2D Grid2D::centered(int size, double h) {
  const double half = 0.5 * (size - 1) * h;
  return Grid2D(size, h, -half, -half);
}

Grid2D Grid2D::from_side_length(int size, double side_length) {
  if (size < 3) throw std::invalid_argument("grid needs at least 3 points per side");
  return centered(size, side_length / (size - 1));
}

ExtendedGrid2D build_extended_grid(const Grid2D& inner, int abl_points, double beta,
                                   int levels) {
  if (abl_points < 0) throw std::invalid_argument("abl_points must be >= 0");
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
  if (levels < 1) throw std::invalid_argument("levels must be >= 1");
  if (levels > 30) throw std::invalid_argument("too many multigrid levels");

  const long modulus = 1L << (levels - 1);
  const long base = inner.size() + 2L * abl_points;
  long pad = 0;
  while ((base + pad) % modulus != 1 % modulus) ++pad;
  const long side = base + pad;
  if ((side - 1) / modulus + 1 < 3) {
    throw std::invalid_argument("too many levels: coarsest grid would have < 3 points");
  }

  const double h = inner.h();
  Grid2D extended(static_cast<int>(side), h, inner.origin_x() - abl_points * h,
                  inner.origin_y() - abl_points * h);
  if (beta > 0.0 && abl_points + pad == 0) {
    throw std::invalid_argument("beta > 0 needs a nonempty absorbing layer");
  }
  return ExtendedGrid2D{inner, extended, abl_points, static_cast<int>(pad), levels, beta};
}

double norm2(std::span<const cplx> v) {
  double acc = 0.0;
  for (const cplx& z : v) acc += std::norm(z);
  return std::sqrt(acc);
}

double norm2(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

cplx dot(std::span<const cplx> a, std::span<const cplx> b) {
  cplx acc{0.0, 0.0};
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

}  // namespace helmscat
