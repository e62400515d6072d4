#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "helmscat/forward.hpp"
#include "helmscat/tv.hpp"

namespace helmscat {

/// Forward or adjoint solve that stopped short of the tolerance.
class SolverFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ReconstructionConfig {
  double gamma = 9e-4;
  bool auto_gamma = false;  // gamma = Q / (|subset| L_born), see born_lipschitz
  double tau = 4.5e-3;
  int iterations = 250;
  int subset_size = 6;
  std::uint64_t seed = 0;
  int prox_iterations = 50;
  KrylovOptions solver{1e-6, 1000};
  int threads = 1;
  bool record_timing = false;  // seconds stay 0 otherwise

  void validate(std::size_t views) const;
};

struct HistoryEntry {
  int iteration = 0;
  double objective = 0.0;  // subset data term plus tau TV, at the gradient point
  std::optional<double> snr;
  double work_units = 0.0;  // cumulative
  double seconds = 0.0;     // cumulative
};

struct ReconstructionResult {
  RealField2D potential;
  double gamma = 0.0;  // step actually used
  std::vector<HistoryEntry> history;
  std::optional<std::string> failure;
};

/// SplitMix64.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t state) : state_(state) {}
  std::uint64_t next();

 private:
  std::uint64_t state_;
};

/// Views used at outer iteration `iteration` (1-based), ascending. The stream
/// is SplitMix64 seeded with seed ^ (0x9E3779B97F4A7C15 * iteration); a
/// Fisher-Yates pass swaps slot i with i + next() % (views - i) for the first
/// `subset` slots. subset == views returns every view without drawing.
std::vector<int> select_views(std::uint64_t seed, int views, int subset, int iteration);

/// 1/2 ||H_q(f) - y_q||^2.
double data_fidelity(const ScatteringScene& scene, const SensorOperator& sensors,
                     const MghSystem& system, const RealField2D& f, int view,
                     std::span<const cplx> y);

struct GradientResult {
  RealField2D gradient;
  double fidelity = 0.0;  // summed over the views
  double work_units = 0.0;
};

/// Sum over `views` of Re(diag(u_q)^H (I + A^-H diag(f)) G^H r_q), reduced in
/// the order given.
GradientResult gradient_data_fidelity(const ScatteringScene& scene,
                                      const SensorOperator& sensors, const RealField2D& f,
                                      std::span<const int> views, const MeasurementSet& data,
                                      int threads);

/// J_q v = G (I + diag(f) A^-1) diag(u_q) v.
std::vector<cplx> jacobian_apply(const ScatteringScene& scene, const SensorOperator& sensors,
                                 const MghSystem& system, const RealField2D& f, int view,
                                 const RealField2D& v);

/// Largest eigenvalue of sum_q J_q^T J_q at f = 0 (real part of the Gauss-Newton
/// operator), by power iteration. At f = 0 the Jacobian is G diag(u_in).
double born_lipschitz(const ScatteringScene& scene, const SensorOperator& sensors,
                      int iterations = 30);

/// 20 log10(||eta_true|| / ||eta_true - eta_star||); +inf when they coincide.
double snr(const RealField2D& eta_star, const RealField2D& eta_true);

/// Accelerated forward-backward splitting from f = 0. The scene's solver
/// options are replaced by config.solver.
ReconstructionResult reconstruct_fbs(const MeasurementSet& data, const ScatteringScene& scene,
                                     const ReconstructionConfig& config,
                                     const RealField2D* eta_true = nullptr);

}  // namespace helmscat
