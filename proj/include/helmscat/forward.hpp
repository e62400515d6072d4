#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "helmscat/grid.hpp"
#include "helmscat/helmholtz.hpp"
#include "helmscat/krylov.hpp"
#include "helmscat/lis.hpp"
#include "helmscat/multigrid.hpp"

namespace helmscat {

struct Point2D {
  double x = 0.0;
  double y = 0.0;
};

/// Plane-wave views and a ring of sensors around the region of interest.
struct AcquisitionGeometry {
  std::vector<Point2D> directions;  // unit vectors, one per view
  std::vector<Point2D> sensors;     // cm
  std::vector<std::vector<int>> active;  // sensor indices per view, ascending

  std::size_t view_count() const { return directions.size(); }

  /// Q directions at theta0 + 2 pi q / Q; M sensors at angle 2 pi m / M on a
  /// circle of `radius` around `center`. With active_per_view = K > 0 a view
  /// keeps the K sensors farthest from its source point center - radius * d;
  /// K = 0 keeps all of them.
  static AcquisitionGeometry circular(int views, double theta0, int sensor_count,
                                      double radius, Point2D center, int active_per_view);

  /// Throws unless directions are unit, sensors lie strictly outside the
  /// grid's box, and active lists are valid.
  void validate(const Grid2D& roi) const;
};

/// Measured or predicted scattered fields; one vector per view, one entry per
/// active sensor.
struct MeasurementSet {
  std::vector<std::vector<cplx>> views;
};

/// u0 exp(j k0 eta_b <d, x>) on the grid.
ComplexField2D plane_wave(const Grid2D& grid, Point2D direction, double k0, double eta_b,
                          cplx u0);

/// G-tilde: entry (s, n) = h^2 g(|x_s - x_n|). Rows are cached when the full
/// matrix is small enough, computed on the fly otherwise.
class SensorOperator {
 public:
  static constexpr std::size_t kCacheLimit = 8'000'000;

  SensorOperator(const Grid2D& roi, std::vector<Point2D> sensors, double k0, double eta_b);

  const Grid2D& grid() const { return grid_; }
  std::size_t sensor_count() const { return sensors_.size(); }
  bool cached() const { return !rows_.empty(); }

  cplx entry(int sensor, std::size_t n) const;

  /// y_i = sum_n G(rows[i], n) w_n.
  void apply(std::span<const int> rows, std::span<const cplx> w, std::span<cplx> y) const;
  /// w_n = sum_i conj(G(rows[i], n)) r_i.
  void apply_adjoint(std::span<const int> rows, std::span<const cplx> r,
                     std::span<cplx> w) const;

 private:
  void fill_row(int sensor, std::span<cplx> row) const;

  Grid2D grid_;
  std::vector<Point2D> sensors_;
  double k_;
  std::vector<cplx> rows_;
};

/// Everything a forward evaluation needs besides the object.
struct ScatteringScene {
  Grid2D roi = Grid2D::centered(3, 1.0);
  double wavelength = 1.0;  // cm
  double eta_b = 1.0;
  cplx u0 = 1.0;
  int abl_points = 0;
  double beta = 0.0;
  MgOptions mg;
  KrylovOptions krylov;
  AcquisitionGeometry geometry;

  double k0() const;
  ExtendedGrid2D extended() const;
  ComplexField2D incident(int view, const Grid2D& grid) const;
};

/// eta = sqrt(eta_b^2 + f / k0^2) and its inverse.
RealField2D eta_from_potential(const RealField2D& f, double k0, double eta_b);
RealField2D potential_from_eta(const RealField2D& eta, double k0, double eta_b);

/// Helmholtz operator and multigrid hierarchy for one object, shared by all views.
class MghSystem {
 public:
  MghSystem(const ScatteringScene& scene, const RealField2D& f);

  const ExtendedGrid2D& extended() const { return eg_; }
  const HelmholtzOperator& op() const { return op_; }
  const MgHierarchy& hierarchy() const { return hier_; }
  const RealField2D& potential_extended() const { return f_ext_; }

  /// A x = b from a zero start, MG-preconditioned.
  SolveReport solve(std::span<const cplx> b, std::span<cplx> x) const;
  /// A^H x = b, through A^H = conj(A) for the complex-symmetric A.
  SolveReport solve_adjoint(std::span<const cplx> b, std::span<cplx> x) const;

 private:
  KrylovOptions krylov_;
  ExtendedGrid2D eg_;
  RealField2D f_ext_;
  HelmholtzOperator op_;
  MgHierarchy hier_;
};

struct ForwardResult {
  std::vector<cplx> measurements;  // active sensors of the view
  ComplexField2D total;            // u on the region of interest
  SolveReport report;
};

/// Solve for the scattered field on the extended grid, truncate it to the
/// region of interest, and propagate f (u_sc + u_in) to the active sensors.
ForwardResult forward_mgh(const ScatteringScene& scene, const SensorOperator& sensors,
                          const MghSystem& system, const RealField2D& f, int view);

ForwardResult forward_lis(const ScatteringScene& scene, const SensorOperator& sensors,
                          const GreenKernel& kernel, const RealField2D& f, int view);

/// Every view of the geometry, concurrently when threads > 1. Per-view reports
/// carry convergence; callers decide what a failed view means.
struct SimulationResult {
  MeasurementSet data;
  std::vector<SolveReport> reports;
  std::vector<double> seconds;
};
enum class ForwardModel { mgh, lis };
SimulationResult simulate_all(const ScatteringScene& scene, const SensorOperator& sensors,
                              const RealField2D& f, ForwardModel model, int threads);

}  // namespace helmscat
