#pragma once

#include <span>
#include <vector>

#include "helmscat/banded_lu.hpp"
#include "helmscat/grid.hpp"
#include "helmscat/helmholtz.hpp"
#include "helmscat/linear_map.hpp"

namespace helmscat {

struct MgOptions {
  int levels = 3;
  int pre_smooth = 1;   // nu1
  int post_smooth = 1;  // nu2
  double omega = 0.8;   // Jacobi damping
  int cycle_type = 1;   // 1 = V, 2 = W
};

/// Smoother sweeps per level; one sweep on level p costs 4^-p work units.
class WorkUnitMeter {
 public:
  void record(int level, long sweeps = 1);
  void merge(const WorkUnitMeter& other);
  double work_units() const;
  const std::vector<long>& sweeps_per_level() const { return sweeps_; }

 private:
  std::vector<long> sweeps_;
};

/// v <- v - omega D^{-1} (A v - b), repeated `sweeps` times.
void damped_jacobi(const LinearMap& apply, std::span<const cplx> diagonal,
                   std::span<const cplx> b, std::span<cplx> v, double omega, int sweeps);
void damped_jacobi(const HelmholtzOperator& op, std::span<const cplx> b, std::span<cplx> v,
                   double omega, int sweeps);

/// Grid with (s + 1) / 2 points and mesh 2h sharing the fine origin.
Grid2D coarse_grid(const Grid2D& fine);

/// Full-weighting restriction; fine samples outside the grid read as zero.
template <class T>
void restrict_full_weighting(std::span<const T> fine, int fine_size, std::span<T> coarse);
template <class T>
Field2D<T> restrict_full_weighting(const Field2D<T>& fine);

/// Bilinear interpolation; the transpose of restriction scaled by 4.
template <class T>
void prolong_bilinear(std::span<const T> coarse, int fine_size, std::span<T> fine);
template <class T>
Field2D<T> prolong_bilinear(const Field2D<T>& coarse, const Grid2D& fine_grid);

/// Rediscretization at 2h: eta^2 restricted by full weighting, the outer ring
/// reset to the background, absorbing profile re-evaluated on the coarse grid.
HelmholtzOperator coarsen_operator(const HelmholtzOperator& fine, double background_eta_sq);

/// Local Fourier symbols of the constant-coefficient operator and of the
/// damped Jacobi smoother at frequency (theta1, theta2).
struct LfaSymbols {
  cplx scaled_operator;  // h^2 * a^h(theta)
  cplx smoother;         // s^h(theta)
};
LfaSymbols lfa_symbols(double kh, double omega, double theta1, double theta2);
/// max over theta of |s^h(theta)| for (kh)^2 < 4.
double lfa_max_smoothing_factor(double kh, double omega);

/// Geometric hierarchy used as the preconditioner: matrix-free levels, banded
/// LU on the coarsest one. Immutable after construction; cycles are reentrant.
class MgHierarchy {
 public:
  MgHierarchy(HelmholtzOperator fine, double background_eta_sq, MgOptions options);

  const MgOptions& options() const { return options_; }
  int level_count() const { return static_cast<int>(levels_.size()); }
  const HelmholtzOperator& level(int l) const { return levels_.at(l); }

  /// One multigrid cycle on level `l` for A_l e = b starting from v (updated in place).
  void cycle(int l, std::span<const cplx> b, std::span<cplx> v,
             WorkUnitMeter* meter = nullptr) const;

  /// z = MGCycle(A, r, 0): the preconditioner application.
  void precondition(std::span<const cplx> r, std::span<cplx> z,
                    WorkUnitMeter* meter = nullptr) const;

  /// Exact solve on the coarsest level.
  void solve_coarsest(std::span<const cplx> b, std::span<cplx> x) const;

  /// Points per shortest wavelength on the coarsest grid.
  double coarsest_points_per_wavelength() const;

 private:
  MgOptions options_;
  std::vector<HelmholtzOperator> levels_;
  BandedLU coarse_lu_;
};

}  // namespace helmscat
