#include "helmscat/forward.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "helmscat/parallel.hpp"

namespace helmscat {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

AcquisitionGeometry AcquisitionGeometry::circular(int views, double theta0, int sensor_count,
                                                  double radius, Point2D center,
                                                  int active_per_view) {
  if (views < 1) throw std::invalid_argument("need at least one view");
  if (sensor_count < 1) throw std::invalid_argument("need at least one sensor");
  if (!(radius > 0.0)) throw std::invalid_argument("sensor radius must be > 0");
  if (active_per_view < 0 || active_per_view > sensor_count) {
    throw std::invalid_argument("active sensors per view must be in [0, sensor count]");
  }
  AcquisitionGeometry g;
  for (int q = 0; q < views; ++q) {
    const double t = theta0 + 2.0 * kPi * q / views;
    g.directions.push_back({std::cos(t), std::sin(t)});
  }
  for (int m = 0; m < sensor_count; ++m) {
    const double t = 2.0 * kPi * m / sensor_count;
    g.sensors.push_back({center.x + radius * std::cos(t), center.y + radius * std::sin(t)});
  }
  for (int q = 0; q < views; ++q) {
    std::vector<int> idx(sensor_count);
    std::iota(idx.begin(), idx.end(), 0);
    if (active_per_view > 0 && active_per_view < sensor_count) {
      const Point2D d = g.directions[q];
      const Point2D source{center.x - radius * d.x, center.y - radius * d.y};
      std::vector<double> dist(sensor_count);
      for (int m = 0; m < sensor_count; ++m) {
        dist[m] = std::hypot(g.sensors[m].x - source.x, g.sensors[m].y - source.y);
      }
      // ties broken by index so the selection is reproducible
      std::stable_sort(idx.begin(), idx.end(),
                       [&](int a, int b) { return dist[a] > dist[b]; });
      idx.resize(active_per_view);
      std::sort(idx.begin(), idx.end());
    }
    g.active.push_back(std::move(idx));
  }
  return g;
}

void AcquisitionGeometry::validate(const Grid2D& roi) const {
  if (directions.empty()) throw std::invalid_argument("geometry has no views");
  if (active.size() != directions.size()) {
    throw std::invalid_argument("one active-sensor list per view is required");
  }
  for (const Point2D& d : directions) {
    if (std::abs(std::hypot(d.x, d.y) - 1.0) > 1e-12) {
      throw std::invalid_argument("view directions must be unit vectors");
    }
  }
  const double x0 = roi.origin_x(), x1 = roi.origin_x() + roi.side_length();
  const double y0 = roi.origin_y(), y1 = roi.origin_y() + roi.side_length();
  for (const Point2D& s : sensors) {
    if (s.x >= x0 && s.x <= x1 && s.y >= y0 && s.y <= y1) {
      throw std::invalid_argument("sensor lies inside the region of interest");
    }
  }
  for (const auto& list : active) {
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (list[i] < 0 || static_cast<std::size_t>(list[i]) >= sensors.size()) {
        throw std::invalid_argument("active sensor index out of range");
      }
      if (i > 0 && list[i] <= list[i - 1]) {
        throw std::invalid_argument("active sensor indices must be ascending");
      }
    }
  }
}

ComplexField2D plane_wave(const Grid2D& grid, Point2D direction, double k0, double eta_b,
                          cplx u0) {
  if (std::abs(std::hypot(direction.x, direction.y) - 1.0) > 1e-12) {
    throw std::invalid_argument("plane_wave: direction must be a unit vector");
  }
  const double k = k0 * eta_b;
  ComplexField2D out(grid);
  for (int n = 0; n < grid.size(); ++n) {
    for (int m = 0; m < grid.size(); ++m) {
      const double phase = k * (direction.x * grid.x(m) + direction.y * grid.y(n));
      out(m, n) = u0 * std::polar(1.0, phase);
    }
  }
  return out;
}

SensorOperator::SensorOperator(const Grid2D& roi, std::vector<Point2D> sensors, double k0,
                               double eta_b)
    : grid_(roi), sensors_(std::move(sensors)), k_(k0 * eta_b) {
  if (!(k_ > 0.0)) throw std::invalid_argument("SensorOperator: k0 eta_b must be > 0");
  const double x0 = roi.origin_x(), x1 = roi.origin_x() + roi.side_length();
  const double y0 = roi.origin_y(), y1 = roi.origin_y() + roi.side_length();
  for (const Point2D& s : sensors_) {
    if (s.x >= x0 && s.x <= x1 && s.y >= y0 && s.y <= y1) {
      throw std::invalid_argument("sensor lies inside the region of interest");
    }
  }
  const std::size_t N = roi.count();
  if (sensors_.size() * N <= kCacheLimit) {
    rows_.resize(sensors_.size() * N);
    for (std::size_t s = 0; s < sensors_.size(); ++s) {
      fill_row(static_cast<int>(s), std::span<cplx>(rows_).subspan(s * N, N));
    }
  }
}

void SensorOperator::fill_row(int sensor, std::span<cplx> row) const {
  const Point2D p = sensors_.at(sensor);
  const double h2 = grid_.h() * grid_.h();
  for (int n = 0; n < grid_.size(); ++n) {
    const double dy = p.y - grid_.y(n);
    for (int m = 0; m < grid_.size(); ++m) {
      row[grid_.index(m, n)] = h2 * green_function(k_, std::hypot(p.x - grid_.x(m), dy));
    }
  }
}

cplx SensorOperator::entry(int sensor, std::size_t n) const {
  if (cached()) return rows_.at(static_cast<std::size_t>(sensor) * grid_.count() + n);
  const Point2D p = sensors_.at(sensor);
  const int m = static_cast<int>(n % grid_.size());
  const int row = static_cast<int>(n / grid_.size());
  return grid_.h() * grid_.h() *
         green_function(k_, std::hypot(p.x - grid_.x(m), p.y - grid_.y(row)));
}

void SensorOperator::apply(std::span<const int> rows, std::span<const cplx> w,
                           std::span<cplx> y) const {
  const std::size_t N = grid_.count();
  if (w.size() != N || y.size() != rows.size()) {
    throw std::invalid_argument("SensorOperator::apply: size mismatch");
  }
  std::vector<cplx> scratch(cached() ? 0 : N);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::span<const cplx> row;
    if (cached()) {
      row = std::span<const cplx>(rows_).subspan(static_cast<std::size_t>(rows[i]) * N, N);
    } else {
      fill_row(rows[i], scratch);
      row = scratch;
    }
    cplx acc = 0.0;
    for (std::size_t n = 0; n < N; ++n) acc += row[n] * w[n];
    y[i] = acc;
  }
}

void SensorOperator::apply_adjoint(std::span<const int> rows, std::span<const cplx> r,
                                   std::span<cplx> w) const {
  const std::size_t N = grid_.count();
  if (w.size() != N || r.size() != rows.size()) {
    throw std::invalid_argument("SensorOperator::apply_adjoint: size mismatch");
  }
  std::fill(w.begin(), w.end(), cplx{0.0, 0.0});
  std::vector<cplx> scratch(cached() ? 0 : N);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::span<const cplx> row;
    if (cached()) {
      row = std::span<const cplx>(rows_).subspan(static_cast<std::size_t>(rows[i]) * N, N);
    } else {
      fill_row(rows[i], scratch);
      row = scratch;
    }
    for (std::size_t n = 0; n < N; ++n) w[n] += std::conj(row[n]) * r[i];
  }
}

double ScatteringScene::k0() const { return 2.0 * kPi / wavelength; }

ExtendedGrid2D ScatteringScene::extended() const {
  return build_extended_grid(roi, abl_points, beta, mg.levels);
}

ComplexField2D ScatteringScene::incident(int view, const Grid2D& grid) const {
  return plane_wave(grid, geometry.directions.at(view), k0(), eta_b, u0);
}

RealField2D eta_from_potential(const RealField2D& f, double k0, double eta_b) {
  RealField2D eta(f.grid());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double eta_sq = eta_b * eta_b + f[i] / (k0 * k0);
    if (!(eta_sq > 0.0)) throw std::domain_error("potential gives eta^2 <= 0");
    eta[i] = std::sqrt(eta_sq);
  }
  return eta;
}

RealField2D potential_from_eta(const RealField2D& eta, double k0, double eta_b) {
  RealField2D f(eta.grid());
  for (std::size_t i = 0; i < eta.size(); ++i) {
    f[i] = k0 * k0 * (eta[i] * eta[i] - eta_b * eta_b);
  }
  return f;
}

namespace {

HelmholtzOperator build_operator(const ExtendedGrid2D& eg, const RealField2D& f_ext, double k0,
                                 double eta_b) {
  RealField2D eta_sq(eg.extended);
  for (std::size_t i = 0; i < eta_sq.size(); ++i) {
    eta_sq[i] = eta_b * eta_b + f_ext[i] / (k0 * k0);
    if (!(eta_sq[i] > 0.0)) throw std::domain_error("potential gives eta^2 <= 0");
  }
  return HelmholtzOperator::assemble(eg, eta_sq, k0);
}

}  // namespace

MghSystem::MghSystem(const ScatteringScene& scene, const RealField2D& f)
    : krylov_(scene.krylov),
      eg_(scene.extended()),
      f_ext_(embed_potential(f, eg_)),
      op_(build_operator(eg_, f_ext_, scene.k0(), scene.eta_b)),
      hier_(op_, scene.eta_b * scene.eta_b, scene.mg) {}

SolveReport MghSystem::solve(std::span<const cplx> b, std::span<cplx> x) const {
  std::fill(x.begin(), x.end(), cplx{0.0, 0.0});
  WorkUnitMeter meter;
  const LinearMap A = [this](std::span<const cplx> in, std::span<cplx> out) {
    op_.apply(in, out);
  };
  const LinearMap M = [this, &meter](std::span<const cplx> in, std::span<cplx> out) {
    hier_.precondition(in, out, &meter);
  };
  SolveReport report = bicgstab(A, M, b, x, krylov_);
  report.work_units = meter.work_units();
  return report;
}

SolveReport MghSystem::solve_adjoint(std::span<const cplx> b, std::span<cplx> x) const {
  std::vector<cplx> conj_b(b.size());
  std::transform(b.begin(), b.end(), conj_b.begin(), [](cplx z) { return std::conj(z); });
  SolveReport report = solve(conj_b, x);
  for (cplx& z : x) z = std::conj(z);
  return report;
}

ForwardResult forward_mgh(const ScatteringScene& scene, const SensorOperator& sensors,
                          const MghSystem& system, const RealField2D& f, int view) {
  const ExtendedGrid2D& eg = system.extended();
  if (!(f.grid() == eg.inner) || !(sensors.grid() == eg.inner)) {
    throw std::invalid_argument("forward_mgh: grid mismatch");
  }
  const ComplexField2D u_in = scene.incident(view, eg.extended);
  const RealField2D& f_ext = system.potential_extended();
  ComplexField2D b(eg.extended);
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = f_ext[i] * u_in[i];

  ComplexField2D u_sc(eg.extended);
  ForwardResult result{{}, ComplexField2D(eg.inner), {}};
  result.report = system.solve(b.values(), u_sc.values());

  ComplexField2D total = restrict_to_roi(u_sc, eg);
  const ComplexField2D u_in_roi = restrict_to_roi(u_in, eg);
  for (std::size_t i = 0; i < total.size(); ++i) total[i] += u_in_roi[i];

  std::vector<cplx> source(total.size());
  for (std::size_t i = 0; i < source.size(); ++i) source[i] = f[i] * total[i];
  const auto& rows = scene.geometry.active.at(view);
  result.measurements.resize(rows.size());
  sensors.apply(rows, source, result.measurements);
  result.total = std::move(total);
  return result;
}

ForwardResult forward_lis(const ScatteringScene& scene, const SensorOperator& sensors,
                          const GreenKernel& kernel, const RealField2D& f, int view) {
  if (!(f.grid() == kernel.grid()) || !(sensors.grid() == kernel.grid())) {
    throw std::invalid_argument("forward_lis: grid mismatch");
  }
  const ComplexField2D u_in = scene.incident(view, kernel.grid());
  LisSolution sol = solve_lis(kernel, f, u_in, scene.krylov);
  std::vector<cplx> source(f.size());
  for (std::size_t i = 0; i < source.size(); ++i) source[i] = f[i] * sol.total[i];
  const auto& rows = scene.geometry.active.at(view);
  ForwardResult result{std::vector<cplx>(rows.size()), std::move(sol.total), sol.report};
  sensors.apply(rows, source, result.measurements);
  return result;
}

SimulationResult simulate_all(const ScatteringScene& scene, const SensorOperator& sensors,
                              const RealField2D& f, ForwardModel model, int threads) {
  scene.geometry.validate(scene.roi);
  const std::size_t Q = scene.geometry.view_count();
  SimulationResult out;
  out.data.views.resize(Q);
  out.reports.resize(Q);
  out.seconds.resize(Q);

  std::optional<MghSystem> system;
  std::optional<GreenKernel> kernel;
  if (model == ForwardModel::mgh) {
    system.emplace(scene, f);
  } else {
    kernel.emplace(scene.roi, scene.k0(), scene.eta_b);
  }
  parallel_for(Q, threads, [&](std::size_t q) {
    const auto start = std::chrono::steady_clock::now();
    ForwardResult r = model == ForwardModel::mgh
                          ? forward_mgh(scene, sensors, *system, f, static_cast<int>(q))
                          : forward_lis(scene, sensors, *kernel, f, static_cast<int>(q));
    out.seconds[q] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.data.views[q] = std::move(r.measurements);
    out.reports[q] = std::move(r.report);
  });
  return out;
}

}  // namespace helmscat
