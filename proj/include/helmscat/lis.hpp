#pragma once

#include <memory>
#include <span>
#include <vector>

#include "helmscat/grid.hpp"
#include "helmscat/krylov.hpp"

namespace helmscat {

/// Free-space Green's function of the background medium, (j/4) H0(k r).
cplx green_function(double k, double r);

/// Integral of (j/4) H0(k |x|) over the h x h cell centered on the origin.
cplx green_cell_integral(double k, double h);

/// Discrete Green's convolution on a square grid: sample h^2 g(x - x') off the
/// diagonal, the cell integral on it; applied as an aperiodic convolution on
/// the (2s)^2 zero-padded grid with FFTW.
class GreenKernel {
 public:
  GreenKernel(const Grid2D& grid, double k0, double eta_b);

  const Grid2D& grid() const { return grid_; }
  double k0() const { return k0_; }
  double eta_b() const { return eta_b_; }
  double wavenumber() const { return k0_ * eta_b_; }

  /// Weight coupling two samples (dm, dn) grid steps apart.
  cplx sample(int dm, int dn) const;
  cplx singular_value() const { return singular_; }

  void apply(std::span<const cplx> w, std::span<cplx> out) const;
  ComplexField2D apply(const ComplexField2D& w) const;

 private:
  struct Plans;

  Grid2D grid_;
  double k0_;
  double eta_b_;
  cplx singular_;
  int padded_;
  std::vector<cplx> spectrum_;  // already divided by padded^2
  std::shared_ptr<const Plans> plans_;
};

struct LisSolution {
  ComplexField2D total;  // on the kernel grid
  SolveReport report;
};

/// Solves (I - G diag(f)) u = u_in with unpreconditioned Bi-CGSTAB.
LisSolution solve_lis(const GreenKernel& kernel, const RealField2D& f,
                      const ComplexField2D& u_in, const KrylovOptions& options);

}  // namespace helmscat
