#include "helmscat/krylov.hpp"

#include <cmath>
#include <stdexcept>

namespace helmscat {

namespace {

constexpr double kBreakdown = 1e-14;

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iterations: return "max_iterations";
    case SolveStatus::breakdown: return "breakdown";
  }
  return "unknown";
}

double SolveReport::relative_residual() const {
  if (residual_history.empty()) return 0.0;
  return rhs_norm > 0.0 ? residual_history.back() / rhs_norm : residual_history.back();
}

SolveReport bicgstab(const LinearMap& apply, const LinearMap& precondition,
                     std::span<const cplx> b, std::span<cplx> x, const KrylovOptions& options) {
  if (!(options.tolerance > 0.0)) throw std::invalid_argument("tolerance must be > 0");
  if (options.max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
  if (b.size() != x.size()) throw std::invalid_argument("bicgstab: size mismatch");
  const std::size_t N = b.size();

  auto apply_m = [&](std::span<const cplx> in, std::span<cplx> out) {
    if (precondition) {
      precondition(in, out);
    } else {
      std::copy(in.begin(), in.end(), out.begin());
    }
  };

  SolveReport report;
  report.rhs_norm = norm2(b);
  if (report.rhs_norm == 0.0) {
    std::fill(x.begin(), x.end(), cplx{0.0, 0.0});
    report.residual_history.push_back(0.0);
    report.converged = true;
    report.status = SolveStatus::converged;
    return report;
  }
  const double target = options.tolerance * report.rhs_norm;

  std::vector<cplx> r(N), r_hat(N), p(N, 0.0), v(N, 0.0), y(N), h(N), s(N), z(N), t(N);
  apply(x, r);
  for (std::size_t i = 0; i < N; ++i) r[i] = b[i] - r[i];
  r_hat = r;
  const double r_hat_norm = norm2(r_hat);

  double r_norm = r_hat_norm;
  report.residual_history.push_back(r_norm);
  if (r_norm <= target) {
    report.converged = true;
    report.status = SolveStatus::converged;
    return report;
  }

  cplx rho_prev{1.0, 0.0};
  cplx alpha{1.0, 0.0};
  cplx sigma_prev{1.0, 0.0};

  auto fail = [&report]() {
    report.status = SolveStatus::breakdown;
    report.converged = false;
    return report;
  };

  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    report.iterations = iter;
    const cplx rho = dot(r_hat, r);
    // Near-orthogonality of r_hat to r or v is a recoverable near-breakdown;
    // only exact zeros stop the iteration.
    if (!finite(rho) || rho == cplx{0.0, 0.0}) return fail();
    const cplx beta = (rho / rho_prev) * (alpha / sigma_prev);
    for (std::size_t i = 0; i < N; ++i) p[i] = r[i] + beta * (p[i] - sigma_prev * v[i]);

    apply_m(p, y);
    apply(y, v);
    const cplx rv = dot(r_hat, v);
    if (!finite(rv) || rv == cplx{0.0, 0.0}) return fail();
    alpha = rho / rv;
    for (std::size_t i = 0; i < N; ++i) {
      h[i] = x[i] + alpha * y[i];
      s[i] = r[i] - alpha * v[i];
    }
    const double s_norm = norm2(s);
    if (s_norm <= target) {
      std::copy(h.begin(), h.end(), x.begin());
      std::copy(s.begin(), s.end(), r.begin());
      report.residual_history.push_back(s_norm);
      report.converged = true;
      report.status = SolveStatus::converged;
      return report;
    }

    apply_m(s, z);
    apply(z, t);
    const double t_norm = norm2(t);
    // ||A y|| / ||y|| sets the operator scale for the t = 0 test.
    const double y_norm = norm2(y);
    const double scale = y_norm > 0.0 ? norm2(v) / y_norm : 1.0;
    if (!std::isfinite(t_norm) || t_norm <= kBreakdown * scale * norm2(z)) return fail();
    const cplx sigma = dot(t, s) / (t_norm * t_norm);
    for (std::size_t i = 0; i < N; ++i) {
      x[i] = h[i] + sigma * z[i];
      r[i] = s[i] - sigma * t[i];
    }
    r_norm = norm2(r);
    report.residual_history.push_back(r_norm);
    if (!std::isfinite(r_norm)) return fail();
    if (r_norm <= target) {
      report.converged = true;
      report.status = SolveStatus::converged;
      return report;
    }
    if (sigma == cplx{0.0, 0.0}) return fail();
    rho_prev = rho;
    sigma_prev = sigma;
  }
  report.status = SolveStatus::max_iterations;
  return report;
}

}  // namespace helmscat
