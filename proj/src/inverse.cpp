#include "helmscat/inverse.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "helmscat/parallel.hpp"

namespace helmscat {

void ReconstructionConfig::validate(std::size_t views) const {
  if (!auto_gamma && !(gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be > 0");
  if (iterations < 0) throw std::invalid_argument("iterations must be >= 0");
  if (subset_size < 1 || static_cast<std::size_t>(subset_size) > views) {
    throw std::invalid_argument("subset size must be in [1, number of views]");
  }
  if (prox_iterations < 0) throw std::invalid_argument("prox iterations must be >= 0");
  if (!(solver.tolerance > 0.0) || solver.max_iterations < 1) {
    throw std::invalid_argument("invalid solver options");
  }
}

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<int> select_views(std::uint64_t seed, int views, int subset, int iteration) {
  if (views < 1 || subset < 1 || subset > views) {
    throw std::invalid_argument("select_views: need 1 <= subset <= views");
  }
  std::vector<int> idx(views);
  std::iota(idx.begin(), idx.end(), 0);
  if (subset == views) return idx;
  SplitMix64 rng(seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(iteration)));
  for (int i = 0; i < subset; ++i) {
    const auto span = static_cast<std::uint64_t>(views - i);
    std::swap(idx[i], idx[i + static_cast<int>(rng.next() % span)]);
  }
  idx.resize(subset);
  std::sort(idx.begin(), idx.end());
  return idx;
}

namespace {

void require_converged(const SolveReport& report, const char* what, int view) {
  if (!report.converged) {
    throw SolverFailure(std::string(what) + " solve for view " + std::to_string(view) +
                        " stopped: " + std::string(to_string(report.status)));
  }
}

double half_squared_misfit(std::span<const cplx> a, std::span<const cplx> b) {
  if (a.size() != b.size()) throw std::invalid_argument("measurement size mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::norm(a[i] - b[i]);
  return 0.5 * sum;
}

}  // namespace

double data_fidelity(const ScatteringScene& scene, const SensorOperator& sensors,
                     const MghSystem& system, const RealField2D& f, int view,
                     std::span<const cplx> y) {
  const ForwardResult r = forward_mgh(scene, sensors, system, f, view);
  require_converged(r.report, "forward", view);
  return half_squared_misfit(r.measurements, y);
}

GradientResult gradient_data_fidelity(const ScatteringScene& scene,
                                      const SensorOperator& sensors, const RealField2D& f,
                                      std::span<const int> views, const MeasurementSet& data,
                                      int threads) {
  const MghSystem system(scene, f);
  const ExtendedGrid2D& eg = system.extended();
  const std::size_t N = f.size();

  struct Part {
    std::vector<double> grad;
    double fidelity = 0.0;
    double work = 0.0;
  };
  std::vector<Part> parts(views.size());
  parallel_for(views.size(), threads, [&](std::size_t i) {
    const int q = views[i];
    const auto& y = data.views.at(q);
    const ForwardResult fwd = forward_mgh(scene, sensors, system, f, q);
    require_converged(fwd.report, "forward", q);

    std::vector<cplx> r(y.size());
    for (std::size_t k = 0; k < r.size(); ++k) r[k] = fwd.measurements[k] - y[k];
    ComplexField2D w(eg.inner);
    sensors.apply_adjoint(scene.geometry.active.at(q), r, w.values());

    ComplexField2D fw(eg.inner);
    for (std::size_t n = 0; n < N; ++n) fw[n] = f[n] * w[n];
    const ComplexField2D rhs = embed(fw, eg);
    ComplexField2D z(eg.extended);
    const SolveReport adj = system.solve_adjoint(rhs.values(), z.values());
    require_converged(adj, "adjoint", q);
    const ComplexField2D z_roi = restrict_to_roi(z, eg);

    Part& p = parts[i];
    p.grad.resize(N);
    for (std::size_t n = 0; n < N; ++n) {
      p.grad[n] = (std::conj(fwd.total[n]) * (w[n] + z_roi[n])).real();
    }
    p.fidelity = half_squared_misfit(fwd.measurements, y);
    p.work = fwd.report.work_units + adj.work_units;
  });

  GradientResult out{RealField2D(f.grid()), 0.0, 0.0};
  for (const Part& p : parts) {
    for (std::size_t n = 0; n < N; ++n) out.gradient[n] += p.grad[n];
    out.fidelity += p.fidelity;
    out.work_units += p.work;
  }
  return out;
}

std::vector<cplx> jacobian_apply(const ScatteringScene& scene, const SensorOperator& sensors,
                                 const MghSystem& system, const RealField2D& f, int view,
                                 const RealField2D& v) {
  const ExtendedGrid2D& eg = system.extended();
  const ForwardResult fwd = forward_mgh(scene, sensors, system, f, view);
  require_converged(fwd.report, "forward", view);
  ComplexField2D vu(eg.inner);
  for (std::size_t n = 0; n < vu.size(); ++n) vu[n] = v[n] * fwd.total[n];
  const ComplexField2D rhs = embed(vu, eg);
  ComplexField2D x(eg.extended);
  const SolveReport rep = system.solve(rhs.values(), x.values());
  require_converged(rep, "tangent", view);
  const ComplexField2D x_roi = restrict_to_roi(x, eg);
  std::vector<cplx> source(vu.size());
  for (std::size_t n = 0; n < source.size(); ++n) source[n] = vu[n] + f[n] * x_roi[n];
  const auto& rows = scene.geometry.active.at(view);
  std::vector<cplx> out(rows.size());
  sensors.apply(rows, source, out);
  return out;
}

double born_lipschitz(const ScatteringScene& scene, const SensorOperator& sensors,
                      int iterations) {
  const Grid2D& g = scene.roi;
  const std::size_t N = g.count();
  const std::size_t Q = scene.geometry.view_count();
  std::vector<ComplexField2D> incident;
  for (std::size_t q = 0; q < Q; ++q) incident.push_back(scene.incident(static_cast<int>(q), g));

  std::vector<double> v(N, 1.0 / std::sqrt(static_cast<double>(N))), next(N);
  std::vector<cplx> src(N), back(N);
  double lambda = 0.0;
  for (int it = 0; it < iterations; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t q = 0; q < Q; ++q) {
      const auto& rows = scene.geometry.active[q];
      std::vector<cplx> y(rows.size());
      for (std::size_t n = 0; n < N; ++n) src[n] = incident[q][n] * v[n];
      sensors.apply(rows, src, y);
      sensors.apply_adjoint(rows, y, back);
      for (std::size_t n = 0; n < N; ++n) next[n] += (std::conj(incident[q][n]) * back[n]).real();
    }
    double norm = 0.0;
    for (double x : next) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) return 0.0;
    lambda = norm;
    for (std::size_t n = 0; n < N; ++n) v[n] = next[n] / norm;
  }
  return lambda;
}

double snr(const RealField2D& eta_star, const RealField2D& eta_true) {
  if (!(eta_star.grid() == eta_true.grid())) throw std::invalid_argument("snr: grid mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < eta_true.size(); ++i) {
    num += eta_true[i] * eta_true[i];
    den += (eta_true[i] - eta_star[i]) * (eta_true[i] - eta_star[i]);
  }
  if (den == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(num / den);
}

ReconstructionResult reconstruct_fbs(const MeasurementSet& data, const ScatteringScene& scene,
                                     const ReconstructionConfig& config,
                                     const RealField2D* eta_true) {
  const std::size_t Q = scene.geometry.view_count();
  config.validate(Q);
  scene.geometry.validate(scene.roi);
  if (data.views.size() != Q) throw std::invalid_argument("measurements do not match views");
  for (std::size_t q = 0; q < Q; ++q) {
    if (data.views[q].size() != scene.geometry.active[q].size()) {
      throw std::invalid_argument("view " + std::to_string(q) +
                                  " has the wrong number of measurements");
    }
  }
  if (eta_true && !(eta_true->grid() == scene.roi)) {
    throw std::invalid_argument("ground truth grid does not match the region of interest");
  }

  ScatteringScene sc = scene;
  sc.krylov = config.solver;
  const SensorOperator sensors(sc.roi, sc.geometry.sensors, sc.k0(), sc.eta_b);
  double gamma = config.gamma;
  if (config.auto_gamma) {
    const double L = born_lipschitz(sc, sensors);
    if (!(L > 0.0)) throw std::invalid_argument("automatic step: Born operator is zero");
    gamma = static_cast<double>(Q) / (config.subset_size * L);
  }
  const double weight = gamma * config.tau;

  ReconstructionResult result{RealField2D(sc.roi), gamma, {}, std::nullopt};
  RealField2D& f = result.potential;
  RealField2D f_prev = f;
  RealField2D f_bar = f;
  double alpha = 1.0;
  double work = 0.0;
  const auto start = std::chrono::steady_clock::now();

  for (int nu = 1; nu <= config.iterations; ++nu) {
    const auto subset = select_views(config.seed, static_cast<int>(Q), config.subset_size, nu);
    GradientResult g{RealField2D(sc.roi), 0.0, 0.0};
    try {
      g = gradient_data_fidelity(sc, sensors, f_bar, subset, data, config.threads);
    } catch (const SolverFailure& e) {
      result.failure = "iteration " + std::to_string(nu) + ": " + e.what();
      return result;
    } catch (const std::domain_error& e) {
      result.failure = "iteration " + std::to_string(nu) + ": " + e.what();
      return result;
    }
    work += g.work_units;

    HistoryEntry entry;
    entry.iteration = nu;
    entry.objective = g.fidelity + config.tau * tv_value(f_bar);

    RealField2D step(sc.roi);
    for (std::size_t n = 0; n < f.size(); ++n) step[n] = f_bar[n] - gamma * g.gradient[n];
    f_prev = f;
    f = tv_prox(step, weight, config.prox_iterations);

    const double alpha_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * alpha * alpha));
    const double mix = (alpha - 1.0) / alpha_next;
    for (std::size_t n = 0; n < f.size(); ++n) f_bar[n] = f[n] + mix * (f[n] - f_prev[n]);
    alpha = alpha_next;

    if (eta_true) entry.snr = snr(eta_from_potential(f, sc.k0(), sc.eta_b), *eta_true);
    entry.work_units = work;
    if (config.record_timing) {
      entry.seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    result.history.push_back(entry);
  }
  return result;
}

}  // namespace helmscat
