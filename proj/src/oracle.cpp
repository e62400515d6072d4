#include "helmscat/oracle.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "helmscat/banded_lu.hpp"
#include "helmscat/special.hpp"

namespace helmscat {

namespace {

constexpr double kPi = std::numbers::pi;

void validate(const DiskScene& s) {
  if (!(s.radius > 0.0)) throw std::invalid_argument("disk radius must be > 0");
  if (!(s.eta_disk > 0.0) || !(s.eta_b > 0.0)) {
    throw std::invalid_argument("refractive indices must be > 0");
  }
  if (!(s.wavelength > 0.0)) throw std::invalid_argument("wavelength must be > 0");
  if (s.truncation_order != 0 && s.truncation_order < s.minimum_order()) {
    throw std::invalid_argument("truncation order below ceil(k0 eta_disk a) + 15");
  }
}

// Z_n'(x) = Z_{n-1}(x) - (n / x) Z_n(x), with Z_{-1} = -Z_1.
template <class T>
T derivative(const std::vector<T>& z, int n, double x) {
  const T prev = n == 0 ? -z[1] : z[n - 1];
  return prev - (static_cast<double>(n) / x) * z[n];
}

}  // namespace

double DiskScene::k0() const { return 2.0 * kPi / wavelength; }

int DiskScene::minimum_order() const {
  return static_cast<int>(std::ceil(k0() * eta_disk * radius)) + 15;
}

namespace {

DiskCoefficients coefficients_to(const DiskScene& scene, int N) {
  const double kb = scene.k0() * scene.eta_b;
  const double kd = scene.k0() * scene.eta_disk;
  const double a = scene.radius;
  // One extra order so derivatives reach n = N.
  const auto jd = special::bessel_j_sequence(N + 1, kd * a);
  const auto jyb = special::bessel_jy_sequence(N + 1, kb * a);
  std::vector<cplx> hb(N + 2);
  for (int n = 0; n <= N + 1; ++n) hb[n] = {jyb.j[n], jyb.y[n]};

  DiskCoefficients out;
  out.order = N;
  out.outside.resize(N + 1);
  out.inside.resize(N + 1);
  for (int n = 0; n <= N; ++n) {
    const double Jd = jd[n];
    const double dJd = derivative(jd, n, kd * a);
    const double Jb = jyb.j[n];
    const double dJb = derivative(jyb.j, n, kb * a);
    const cplx Hb = hb[n];
    const cplx dHb = derivative(hb, n, kb * a);
    const cplx denom = kb * Jd * dHb - kd * dJd * Hb;
    if (!std::isfinite(std::abs(denom))) {
      // Y_n overflowed: the order is far past anything the field can feel.
      out.outside[n] = 0.0;
      out.inside[n] = 0.0;
      continue;
    }
    out.outside[n] = (kd * dJd * Jb - kb * Jd * dJb) / denom;
    // Wronskian J_n H_n' - J_n' H_n = 2j / (pi x) at x = k_b a.
    out.inside[n] = cplx{0.0, 2.0 / (kPi * a)} / denom;
  }
  return out;
}

}  // namespace

DiskCoefficients disk_coefficients(const DiskScene& scene) {
  validate(scene);
  if (scene.truncation_order > 0) return coefficients_to(scene, scene.truncation_order);
  // |J_n(k r)| grows with r and |H_n(k r)| decays for n past k r, so the rim
  // bounds every term of order n on both sides.
  const int minimum = scene.minimum_order();
  const int cap = 2 * minimum + 60;
  DiskCoefficients all = coefficients_to(scene, cap);
  const double kb = scene.k0() * scene.eta_b;
  const double kd = scene.k0() * scene.eta_disk;
  const double a = scene.radius;
  const auto jd = special::bessel_j_sequence(cap, kd * a);
  const auto jyb = special::bessel_jy_sequence(cap, kb * a);
  int N = minimum;
  while (N < cap) {
    const double inside = std::abs(all.inside[N]) * std::abs(jd[N]);
    const double outside = std::abs(all.outside[N]) * std::hypot(jyb.j[N], jyb.y[N]);
    if (inside < 1e-15 && outside < 1e-15) break;
    ++N;
  }
  all.order = N;
  all.outside.resize(N + 1);
  all.inside.resize(N + 1);
  return all;
}

ComplexField2D analytic_disk_field(const DiskScene& scene, const Grid2D& grid, double dir_x,
                                   double dir_y) {
  const double norm = std::hypot(dir_x, dir_y);
  if (std::abs(norm - 1.0) > 1e-12) throw std::invalid_argument("direction must be unit");
  const DiskCoefficients coef = disk_coefficients(scene);
  const int N = coef.order;
  const double kb = scene.k0() * scene.eta_b;
  const double kd = scene.k0() * scene.eta_disk;
  const double phi_d = std::atan2(dir_y, dir_x);
  // Incident phase at the disk center.
  const cplx center_phase =
      scene.amplitude *
      std::exp(cplx{0.0, kb * (dir_x * scene.center_x + dir_y * scene.center_y)});

  std::vector<cplx> jpow(N + 1);
  jpow[0] = 1.0;
  for (int n = 1; n <= N; ++n) jpow[n] = jpow[n - 1] * cplx{0.0, 1.0};

  ComplexField2D out(grid);
  double scale = 0.0;
  double last_term = 0.0;
  for (int n_idx = 0; n_idx < grid.size(); ++n_idx) {
    for (int m = 0; m < grid.size(); ++m) {
      const double dx = grid.x(m) - scene.center_x;
      const double dy = grid.y(n_idx) - scene.center_y;
      const double r = std::hypot(dx, dy);
      const double psi = std::atan2(dy, dx) - phi_d;
      cplx sum = 0.0;
      cplx term = 0.0;
      if (r < scene.radius) {
        const auto J = special::bessel_j_sequence(N, kd * r);
        for (int n = 0; n <= N; ++n) {
          const double weight = n == 0 ? 1.0 : 2.0 * std::cos(n * psi);
          term = jpow[n] * coef.inside[n] * J[n] * weight;
          sum += term;
        }
      } else {
        const auto JY = special::bessel_jy_sequence(N, kb * r);
        // incident part directly, scattered part from the series
        sum = std::exp(cplx{0.0, kb * r * std::cos(psi)});
        for (int n = 0; n <= N; ++n) {
          const double weight = n == 0 ? 1.0 : 2.0 * std::cos(n * psi);
          term = jpow[n] * coef.outside[n] * cplx{JY.j[n], JY.y[n]} * weight;
          sum += term;
        }
      }
      out(m, n_idx) = center_phase * sum;
      scale = std::max(scale, std::abs(out(m, n_idx)));
      last_term = std::max(last_term, std::abs(term));
    }
  }
  if (!out.all_finite() || last_term > 1e-12 * scale) {
    throw std::runtime_error("disk series did not converge at the truncation order");
  }
  return out;
}

std::vector<cplx> dense_reference_solve(const LinearMap& apply, std::size_t n,
                                        std::span<const cplx> b) {
  if (b.size() != n) throw std::invalid_argument("dense_reference_solve: size mismatch");
  std::vector<cplx> row_major(n * n);
  std::vector<cplx> e(n, 0.0), col(n);
  for (std::size_t c = 0; c < n; ++c) {
    e[c] = 1.0;
    apply(e, col);
    e[c] = 0.0;
    for (std::size_t r = 0; r < n; ++r) row_major[r * n + c] = col[r];
  }
  const DenseLU lu(static_cast<int>(n), std::move(row_major));
  std::vector<cplx> x(b.begin(), b.end());
  lu.solve_in_place(x);
  return x;
}

ComplexField2D dense_reference_solve(const HelmholtzOperator& op, const ComplexField2D& b) {
  if (op.grid().size() > 41) throw std::invalid_argument("dense reference limited to 41 x 41");
  if (!(b.grid() == op.grid())) throw std::invalid_argument("dense_reference_solve: grid");
  const LinearMap A = [&op](std::span<const cplx> in, std::span<cplx> out) {
    op.apply(in, out);
  };
  return ComplexField2D(op.grid(), dense_reference_solve(A, op.unknowns(), b.values()));
}

double relative_error(std::span<const cplx> u, std::span<const cplx> u_ref) {
  if (u.size() != u_ref.size()) throw std::invalid_argument("relative_error: size mismatch");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    num += std::norm(u[i] - u_ref[i]);
    den += std::norm(u_ref[i]);
  }
  if (den == 0.0) throw std::domain_error("relative_error: reference is zero");
  return num / den;
}

}  // namespace helmscat
