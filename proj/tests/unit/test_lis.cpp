#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helmscat/lis.hpp"
#include "../support/random.hpp"

using namespace helmscat;
using testing_support::random_complex;
using testing_support::rel_diff;

namespace {

constexpr double kPi = std::numbers::pi;

cplx hankel0_std(double x) { return {std::cyl_bessel_j(0.0, x), std::cyl_neumann(0.0, x)}; }

// Cell integral by a Duffy-type map of the triangle 0 <= y <= x <= h/2 onto the
// unit square, where the r ln r behavior becomes t ln t; tensor Gauss-Legendre.
cplx cell_integral_duffy(double k, double h) {
  // 32-point Gauss-Legendre nodes on [0,1] from Newton on P_n
  const int n = 32;
  std::vector<double> x(n), w(n);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k2 = 2; k2 <= n; ++k2) {
        const double p2 = ((2.0 * k2 - 1.0) * z * p1 - (k2 - 1.0) * p0) / k2;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = 0.5 * (1.0 - z);
    w[i] = 1.0 / ((1.0 - z * z) * dp * dp);
  }
  // composite in t over [0,1] graded toward 0 to tame t ln t
  cplx acc = 0.0;
  const double a = 0.5 * h;
  double lo = 0.0;
  for (int panel = 20; panel >= 0; --panel) {
    const double hi = std::pow(0.5, panel);
    for (int i = 0; i < n; ++i) {
      const double t = lo + (hi - lo) * x[i];
      for (int j = 0; j < n; ++j) {
        const double s = x[j];
        const double r = a * t * std::sqrt(1.0 + s * s);
        acc += (hi - lo) * w[i] * w[j] * a * a * t * hankel0_std(k * r);
      }
    }
    lo = hi;
  }
  return cplx{0.0, 0.25} * 8.0 * acc;
}

}  // namespace

TEST_CASE("Green's function value") {
  const cplx g = green_function(1.0, 1.0);
  CHECK(g.real() == doctest::Approx(-0.02207).epsilon(1e-3));
  CHECK(g.imag() == doctest::Approx(0.19130).epsilon(1e-4));
  const cplx g_std = cplx{0.0, 0.25} * hankel0_std(1.0);
  CHECK(std::abs(g - g_std) < 1e-14);
  CHECK_THROWS(green_function(1.0, 0.0));
}

TEST_CASE("kernel samples") {
  const Grid2D grid = Grid2D::centered(17, 0.1);
  const double k0 = 2.0 * kPi / 1.3;
  const GreenKernel K(grid, k0, 1.0);
  for (int dm = -5; dm <= 5; ++dm)
    for (int dn = -5; dn <= 5; ++dn) {
      CHECK(K.sample(dm, dn) == K.sample(dn, dm));
      CHECK(K.sample(dm, dn) == K.sample(-dm, dn));
    }
  // k r = 1 at exactly r = 1 / k
  const GreenKernel unit(Grid2D::centered(9, 1.0 / k0), k0, 1.0);
  const double h2 = unit.grid().h() * unit.grid().h();
  CHECK(std::abs(unit.sample(1, 0) / h2 - green_function(1.0, 1.0)) < 1e-15);

  // far field: |g| ~ (1/4) sqrt(2 / (pi k r)) within 1% at k r = 50
  const double kr = 50.0;
  const double amp = std::abs(green_function(1.0, kr));
  CHECK(std::abs(amp / (0.25 * std::sqrt(2.0 / (kPi * kr))) - 1.0) < 0.01);
}

TEST_CASE("singular cell integral") {
  for (double kh : {0.05, 0.3, 1.0}) {
    const double k = 2.0;
    const double h = kh / k;
    const cplx ours = green_cell_integral(k, h);
    const cplx ref = cell_integral_duffy(k, h);
    CHECK(std::abs(ours - ref) <= 1e-9 * std::abs(ref));
  }
}

TEST_CASE("convolution with a delta and linearity") {
  const Grid2D grid = Grid2D::centered(21, 0.07);
  const GreenKernel K(grid, 5.0, 1.3);
  ComplexField2D delta(grid);
  delta(10, 10) = 1.0;
  const auto out = K.apply(delta);
  double scale = 0.0;
  for (auto v : out.values()) scale = std::max(scale, std::abs(v));
  for (int n = 0; n < 21; ++n)
    for (int m = 0; m < 21; ++m) CHECK(std::abs(out(m, n) - K.sample(m - 10, n - 10)) < 1e-12 * scale);

  const auto zero = K.apply(ComplexField2D(grid));
  for (auto v : zero.values()) CHECK(v == cplx{0.0, 0.0});

  const auto a = random_complex(grid.count(), 1);
  const auto b = random_complex(grid.count(), 2);
  std::vector<cplx> ab(a.size()), Ka(a.size()), Kb(a.size()), Kab(a.size());
  const cplx c{0.3, -1.7};
  for (std::size_t i = 0; i < a.size(); ++i) ab[i] = a[i] + c * b[i];
  K.apply(a, Ka);
  K.apply(b, Kb);
  K.apply(ab, Kab);
  for (std::size_t i = 0; i < a.size(); ++i) Ka[i] += c * Kb[i];
  CHECK(rel_diff(Kab, Ka) < 1e-12);
}

TEST_CASE("aperiodic convolution matches direct summation") {
  const int s = 33;
  const Grid2D grid = Grid2D::centered(s, 0.05);
  const GreenKernel K(grid, 7.0, 1.0);
  ComplexField2D w(grid);
  const auto vals = random_complex(grid.count(), 7);
  for (int n = 8; n < 25; ++n)
    for (int m = 8; m < 25; ++m) w(m, n) = vals[grid.index(m, n)];
  // a full random input exercises wrap-around too
  for (const ComplexField2D& input : {w, ComplexField2D(grid, vals)}) {
    const auto fast = K.apply(input);
    ComplexField2D direct(grid);
    for (int n = 0; n < s; ++n)
      for (int m = 0; m < s; ++m) {
        cplx acc = 0.0;
        for (int q = 0; q < s; ++q)
          for (int p = 0; p < s; ++p) acc += K.sample(m - p, n - q) * input(p, q);
        direct(m, n) = acc;
      }
    CHECK(rel_diff(fast.values(), direct.values()) < 1e-10);
  }
}

TEST_CASE("Lippmann-Schwinger solve") {
  const Grid2D grid = Grid2D::centered(25, 0.05);
  const double k0 = 2.0 * kPi / 0.5;
  const GreenKernel K(grid, k0, 1.0);
  ComplexField2D u_in(grid);
  for (int n = 0; n < 25; ++n)
    for (int m = 0; m < 25; ++m) u_in(m, n) = std::exp(cplx{0.0, k0 * grid.x(m)});

  const auto zero = solve_lis(K, RealField2D(grid), u_in, {});
  CHECK(zero.report.converged);
  CHECK(zero.report.iterations == 1);
  CHECK(rel_diff(zero.total.values(), u_in.values()) < 1e-15);

  RealField2D f(grid);
  for (int n = 0; n < 25; ++n)
    for (int m = 0; m < 25; ++m)
      if (std::hypot(grid.x(m), grid.y(n)) < 0.3) f(m, n) = k0 * k0 * (1.2 * 1.2 - 1.0);
  const auto sol = solve_lis(K, f, u_in, KrylovOptions{1e-8, 500});
  CHECK(sol.report.converged);
  // residual of (I - G diag f) u = u_in
  ComplexField2D fu(grid);
  for (std::size_t i = 0; i < fu.size(); ++i) fu[i] = f[i] * sol.total[i];
  const auto Gfu = K.apply(fu);
  std::vector<cplx> lhs(fu.size());
  for (std::size_t i = 0; i < fu.size(); ++i) lhs[i] = sol.total[i] - Gfu[i];
  CHECK(rel_diff(lhs, u_in.values()) <= 1e-8 * 1.0001);
}
