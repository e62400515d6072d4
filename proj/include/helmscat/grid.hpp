#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace helmscat {

using cplx = std::complex<double>;

/// Uniform square grid with `size` points per side and mesh size `h` (cm).
///
/// Index (m, n) sits at origin + (m h, n h); m runs along x and the linear
/// index is n * size + m.
class Grid2D {
 public:
  Grid2D(int size, double h, double origin_x, double origin_y);

  /// Grid centered on (0, 0).
  static Grid2D centered(int size, double h);
  /// Centered grid whose outermost points are `side_length` apart.
  static Grid2D from_side_length(int size, double side_length);

  int size() const { return size_; }
  double h() const { return h_; }
  double origin_x() const { return origin_x_; }
  double origin_y() const { return origin_y_; }
  double side_length() const { return (size_ - 1) * h_; }
  std::size_t count() const { return static_cast<std::size_t>(size_) * size_; }

  double x(int m) const { return origin_x_ + m * h_; }
  double y(int n) const { return origin_y_ + n * h_; }
  std::size_t index(int m, int n) const {
    return static_cast<std::size_t>(n) * size_ + m;
  }

  bool operator==(const Grid2D&) const = default;

 private:
  int size_;
  double h_;
  double origin_x_;
  double origin_y_;
};

/// Samples of type T on a Grid2D, row-major.
template <class T>
class Field2D {
 public:
  explicit Field2D(const Grid2D& grid, T fill = T{})
      : grid_(grid), values_(grid.count(), fill) {}

  Field2D(const Grid2D& grid, std::vector<T> values)
      : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.count()) {
      throw std::invalid_argument("field size does not match grid");
    }
    if (!all_finite()) throw std::invalid_argument("field has non-finite values");
  }

  const Grid2D& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  std::span<T> values() { return values_; }
  std::span<const T> values() const { return values_; }
  std::vector<T>& data() { return values_; }
  const std::vector<T>& data() const { return values_; }

  T& operator[](std::size_t i) { return values_[i]; }
  const T& operator[](std::size_t i) const { return values_[i]; }
  T& operator()(int m, int n) { return values_[grid_.index(m, n)]; }
  const T& operator()(int m, int n) const { return values_[grid_.index(m, n)]; }

  bool all_finite() const {
    for (const T& v : values_) {
      if constexpr (std::is_floating_point_v<T>) {
        if (!std::isfinite(v)) return false;
      } else {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
      }
    }
    return true;
  }

 private:
  Grid2D grid_;
  std::vector<T> values_;
};

using RealField2D = Field2D<double>;
using ComplexField2D = Field2D<cplx>;

/// Region of interest padded by an absorbing layer.
///
/// `abl_points` layer points are added on every side; `pad` extra points go
/// on the high-x and high-y sides so that the extended side count closes
/// under `levels - 1` vertex-centered coarsenings.
struct ExtendedGrid2D {
  Grid2D inner;
  Grid2D extended;
  int abl_points = 0;
  int pad = 0;
  int levels = 1;
  double beta = 0.0;

  /// Extended index of inner index (0, 0) along each axis.
  int offset() const { return abl_points; }
  /// Thickness L of the absorbing layer, pad included.
  double layer_thickness() const { return (abl_points + pad) * inner.h(); }
};

ExtendedGrid2D build_extended_grid(const Grid2D& inner, int abl_points, double beta,
                                   int levels);

/// Copy a field on the region of interest into the extended domain, zero outside.
template <class T>
Field2D<T> embed(const Field2D<T>& f, const ExtendedGrid2D& eg) {
  if (!(f.grid() == eg.inner)) throw std::invalid_argument("embed: grid mismatch");
  Field2D<T> out(eg.extended);
  const int s = eg.inner.size();
  const int off = eg.offset();
  for (int n = 0; n < s; ++n) {
    for (int m = 0; m < s; ++m) out(m + off, n + off) = f(m, n);
  }
  return out;
}

/// Select the region-of-interest samples of an extended-domain field.
template <class T>
Field2D<T> restrict_to_roi(const Field2D<T>& u, const ExtendedGrid2D& eg) {
  if (!(u.grid() == eg.extended)) {
    throw std::invalid_argument("restrict_to_roi: grid mismatch");
  }
  Field2D<T> out(eg.inner);
  const int s = eg.inner.size();
  const int off = eg.offset();
  for (int n = 0; n < s; ++n) {
    for (int m = 0; m < s; ++m) out(m, n) = u(m + off, n + off);
  }
  return out;
}

inline RealField2D embed_potential(const RealField2D& f, const ExtendedGrid2D& eg) {
  return embed(f, eg);
}

// Vector helpers shared by the solvers.
double norm2(std::span<const cplx> v);
double norm2(std::span<const double> v);
/// Standard inner product sum(conj(a) * b).
cplx dot(std::span<const cplx> a, std::span<const cplx> b);

}  // namespace helmscat
