#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helmscat/krylov.hpp"
#include "helmscat/lis.hpp"
#include "helmscat/multigrid.hpp"
#include "helmscat/oracle.hpp"
#include "../support/random.hpp"

using namespace helmscat;
using testing_support::random_complex;
using testing_support::rel_diff;

namespace {

constexpr double kPi = std::numbers::pi;

DiskScene fig4_scene() {
  DiskScene s;
  s.wavelength = 10.0;
  s.radius = 12.5;
  s.eta_disk = 2.2;
  s.eta_b = 1.0;
  return s;
}

cplx H(int n, double x) { return {std::cyl_bessel_j(n, x), std::cyl_neumann(n, x)}; }
double dJ(int n, double x) {
  if (n == 0) return -std::cyl_bessel_j(1, x);
  return 0.5 * (std::cyl_bessel_j(n - 1, x) - std::cyl_bessel_j(n + 1, x));
}
cplx dH(int n, double x) {
  if (n == 0) return -H(1, x);
  return 0.5 * (H(n - 1, x) - H(n + 1, x));
}

}  // namespace

TEST_CASE("no contrast gives the incident wave") {
  DiskScene s = fig4_scene();
  s.eta_disk = 1.0;
  const Grid2D g = Grid2D::from_side_length(33, 32.0);
  const auto u = analytic_disk_field(s, g, 0.6, 0.8);
  for (int n = 0; n < 33; ++n)
    for (int m = 0; m < 33; ++m) {
      const cplx expected = std::exp(cplx{0.0, s.k0() * (0.6 * g.x(m) + 0.8 * g.y(n))});
      CHECK(std::abs(u(m, n) - expected) < 1e-11);
    }
  for (auto b : disk_coefficients(s).outside) CHECK(std::abs(b) < 1e-15);
}

TEST_CASE("coefficients solve the interface conditions") {
  const DiskScene s = fig4_scene();
  const auto coef = disk_coefficients(s);
  const double kb = s.k0(), kd = s.k0() * s.eta_disk, a = s.radius;
  for (int n = 0; n <= coef.order; n += 3) {
    // Cramer's rule on the 2x2 continuity system
    const cplx a11 = H(n, kb * a), a12 = -std::cyl_bessel_j(n, kd * a);
    const cplx a21 = kb * dH(n, kb * a), a22 = -kd * dJ(n, kd * a);
    const double r1 = -std::cyl_bessel_j(n, kb * a), r2 = -kb * dJ(n, kb * a);
    const cplx det = a11 * a22 - a12 * a21;
    const cplx b = (r1 * a22 - a12 * r2) / det;
    const cplx c = (a11 * r2 - a21 * r1) / det;
    CHECK(std::abs(coef.outside[n] - b) <= 1e-9 * (std::abs(b) + 1e-30));
    CHECK(std::abs(coef.inside[n] - c) <= 1e-9 * (std::abs(c) + 1e-30));
  }
}

TEST_CASE("field is continuous across the rim") {
  const DiskScene s = fig4_scene();
  const auto coef = disk_coefficients(s);
  const double kb = s.k0(), kd = s.k0() * s.eta_disk, a = s.radius;
  double worst = 0.0, scale = 0.0;
  for (int k = 0; k < 16; ++k) {
    const double psi = 2.0 * kPi * k / 16.0;
    cplx in = 0.0, out = std::exp(cplx{0.0, kb * a * std::cos(psi)});
    cplx jn = 1.0;
    for (int n = 0; n <= coef.order; ++n) {
      const double w = n == 0 ? 1.0 : 2.0 * std::cos(n * psi);
      in += jn * coef.inside[n] * std::cyl_bessel_j(n, kd * a) * w;
      out += jn * coef.outside[n] * H(n, kb * a) * w;
      jn *= cplx{0.0, 1.0};
    }
    worst = std::max(worst, std::abs(in - out));
    scale = std::max(scale, std::abs(out));
  }
  CHECK(worst <= 1e-10 * scale);
}

TEST_CASE("Fig. 4 disk series behavior") {
  const DiskScene s = fig4_scene();
  const auto coef = disk_coefficients(s);
  const int onset = static_cast<int>(std::ceil(s.k0() * s.eta_disk * s.radius)) + 2;
  CHECK(coef.order >= s.minimum_order());
  for (int n = onset; n < coef.order; ++n) CHECK(std::abs(coef.outside[n + 1]) < std::abs(coef.outside[n]));

  const Grid2D g = Grid2D::from_side_length(64, 32.0);
  DiskScene twice = s;
  twice.truncation_order = 2 * coef.order;
  const auto u1 = analytic_disk_field(s, g, 1.0, 0.0);
  const auto u2 = analytic_disk_field(twice, g, 1.0, 0.0);
  CHECK(rel_diff(u1.values(), u2.values()) <= 1e-10);

  DiskScene low = s;
  low.truncation_order = 5;
  CHECK_THROWS(disk_coefficients(low));
}

TEST_CASE("shifted disk equals translated field") {
  DiskScene s = fig4_scene();
  const Grid2D g = Grid2D::centered(9, 1.5);
  const Grid2D shifted(9, 1.5, g.origin_x() + 3.0, g.origin_y() - 1.0);
  const auto centered = analytic_disk_field(s, g, 0.0, 1.0);
  s.center_x = 3.0;
  s.center_y = -1.0;
  const auto moved = analytic_disk_field(s, shifted, 0.0, 1.0);
  // moving the disk by c multiplies the field by the incident phase at c
  const cplx phase = std::exp(cplx{0.0, s.k0() * -1.0});
  for (std::size_t i = 0; i < centered.size(); ++i)
    CHECK(std::abs(moved[i] - phase * centered[i]) < 1e-10);
}

TEST_CASE("relative error") {
  const auto ref = random_complex(50, 3);
  std::vector<cplx> zero(50, 0.0), scaled(50);
  for (std::size_t i = 0; i < 50; ++i) scaled[i] = 1.1 * ref[i];
  CHECK(relative_error(ref, ref) == 0.0);
  CHECK(relative_error(zero, ref) == doctest::Approx(1.0));
  CHECK(relative_error(scaled, ref) == doctest::Approx(0.01));
  CHECK_THROWS(relative_error(ref, zero));
}

TEST_CASE("dense reference solve") {
  const Grid2D g = Grid2D::centered(17, 0.05);
  const auto eta = testing_support::random_real(g.count(), 2, 1.0, 2.0);
  const HelmholtzOperator op(RealField2D(g, eta), 2.0 * kPi / 0.4, AbsorbingLayer::none());
  const ComplexField2D x(g, random_complex(g.count(), 4));
  const auto b = op.apply(x);
  const auto solved = dense_reference_solve(op, b);
  CHECK(rel_diff(solved.values(), x.values()) < 1e-10);

  const HelmholtzOperator big(RealField2D(Grid2D::centered(43, 0.05), 1.0), 1.0,
                              AbsorbingLayer::none());
  CHECK_THROWS(dense_reference_solve(big, ComplexField2D(big.grid())));
}

TEST_CASE("MGH solve against the dense reference") {
  const Grid2D roi = Grid2D::centered(9, 0.05);
  const auto eg = build_extended_grid(roi, 4, 0.5, 3);
  REQUIRE(eg.extended.size() == 17);
  RealField2D eta_sq(eg.extended, 1.0);
  for (int n = 6; n < 11; ++n)
    for (int m = 6; m < 11; ++m) eta_sq(m, n) = 1.44;
  const double k0 = 2.0 * kPi / 0.4;
  const auto op = HelmholtzOperator::assemble(eg, eta_sq, k0);
  const MgHierarchy hier(op, 1.0, MgOptions{});
  ComplexField2D b(eg.extended);
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = k0 * k0 * (eta_sq[i] - 1.0);
  std::vector<cplx> x(b.size(), 0.0);
  const auto rep = bicgstab([&](auto in, auto out) { op.apply(in, out); },
                            [&](auto in, auto out) { hier.precondition(in, out); }, b.values(),
                            x, KrylovOptions{1e-6, 200});
  CHECK(rep.converged);
  const auto ref = dense_reference_solve(op, b);
  CHECK(rel_diff(x, ref.values()) <= 1e-5);
}

TEST_CASE("LiS solve against the dense reference") {
  const Grid2D g = Grid2D::centered(9, 0.05);
  const double k0 = 2.0 * kPi / 0.4;
  const GreenKernel K(g, k0, 1.0);
  RealField2D f(g);
  for (int n = 2; n < 7; ++n)
    for (int m = 3; m < 7; ++m) f(m, n) = k0 * k0 * 0.3;
  ComplexField2D u_in(g);
  for (int n = 0; n < 9; ++n)
    for (int m = 0; m < 9; ++m) u_in(m, n) = std::exp(cplx{0.0, k0 * g.y(n)});
  const auto sol = solve_lis(K, f, u_in, KrylovOptions{1e-6, 200});
  CHECK(sol.report.converged);
  // dense I - G diag(f) built from kernel samples, not from the FFT path
  const std::size_t N = g.count();
  const LinearMap dense = [&](std::span<const cplx> in, std::span<cplx> out) {
    for (int n = 0; n < 9; ++n)
      for (int m = 0; m < 9; ++m) {
        cplx acc = in[g.index(m, n)];
        for (int q = 0; q < 9; ++q)
          for (int p = 0; p < 9; ++p) acc -= K.sample(m - p, n - q) * f(p, q) * in[g.index(p, q)];
        out[g.index(m, n)] = acc;
      }
  };
  const auto ref = dense_reference_solve(dense, N, u_in.values());
  CHECK(rel_diff(sol.total.values(), ref) <= 1e-5);
}
