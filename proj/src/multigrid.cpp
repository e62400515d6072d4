#include "helmscat/multigrid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace helmscat {

void WorkUnitMeter::record(int level, long sweeps) {
  if (level < 0) throw std::invalid_argument("WorkUnitMeter: negative level");
  if (static_cast<std::size_t>(level) >= sweeps_.size()) sweeps_.resize(level + 1, 0);
  sweeps_[level] += sweeps;
}

void WorkUnitMeter::merge(const WorkUnitMeter& other) {
  for (std::size_t l = 0; l < other.sweeps_.size(); ++l) {
    record(static_cast<int>(l), other.sweeps_[l]);
  }
}

double WorkUnitMeter::work_units() const {
  double total = 0.0;
  double weight = 1.0;
  for (long count : sweeps_) {
    total += weight * static_cast<double>(count);
    weight *= 0.25;
  }
  return total;
}

void damped_jacobi(const LinearMap& apply, std::span<const cplx> diagonal,
                   std::span<const cplx> b, std::span<cplx> v, double omega, int sweeps) {
  if (!(omega > 0.0 && omega <= 1.0)) throw std::invalid_argument("omega must be in (0, 1]");
  if (sweeps < 0) throw std::invalid_argument("sweeps must be >= 0");
  if (diagonal.size() != v.size() || b.size() != v.size()) {
    throw std::invalid_argument("damped_jacobi: size mismatch");
  }
  for (const cplx& d : diagonal) {
    if (d == cplx{0.0, 0.0}) throw std::domain_error("damped_jacobi: zero diagonal entry");
  }
  std::vector<cplx> av(v.size());
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    apply(v, av);
    for (std::size_t i = 0; i < v.size(); ++i) {
      v[i] -= omega * (av[i] - b[i]) / diagonal[i];
    }
  }
}

void damped_jacobi(const HelmholtzOperator& op, std::span<const cplx> b, std::span<cplx> v,
                   double omega, int sweeps) {
  damped_jacobi([&op](std::span<const cplx> in, std::span<cplx> out) { op.apply(in, out); },
                op.diagonal(), b, v, omega, sweeps);
}

Grid2D coarse_grid(const Grid2D& fine) {
  if (fine.size() % 2 == 0) throw std::invalid_argument("coarsening needs an odd side");
  return Grid2D((fine.size() + 1) / 2, 2.0 * fine.h(), fine.origin_x(), fine.origin_y());
}

template <class T>
void restrict_full_weighting(std::span<const T> fine, int fine_size, std::span<T> coarse) {
  if (fine_size % 2 == 0) throw std::invalid_argument("restriction needs an odd fine side");
  const int sf = fine_size;
  const int sc = (sf + 1) / 2;
  if (fine.size() != static_cast<std::size_t>(sf) * sf ||
      coarse.size() != static_cast<std::size_t>(sc) * sc) {
    throw std::invalid_argument("restriction: size mismatch");
  }
  auto at = [&](int m, int n) -> T {
    if (m < 0 || m >= sf || n < 0 || n >= sf) return T{};
    return fine[static_cast<std::size_t>(n) * sf + m];
  };
  for (int n = 0; n < sc; ++n) {
    for (int m = 0; m < sc; ++m) {
      const int fm = 2 * m;
      const int fn = 2 * n;
      const T center = at(fm, fn);
      const T edges = at(fm - 1, fn) + at(fm + 1, fn) + at(fm, fn - 1) + at(fm, fn + 1);
      const T corners =
          at(fm - 1, fn - 1) + at(fm - 1, fn + 1) + at(fm + 1, fn - 1) + at(fm + 1, fn + 1);
      coarse[static_cast<std::size_t>(n) * sc + m] =
          (4.0 * center + 2.0 * edges + corners) / 16.0;
    }
  }
}

template <class T>
Field2D<T> restrict_full_weighting(const Field2D<T>& fine) {
  Field2D<T> coarse(coarse_grid(fine.grid()));
  restrict_full_weighting<T>(fine.values(), fine.grid().size(), coarse.values());
  return coarse;
}

template <class T>
void prolong_bilinear(std::span<const T> coarse, int fine_size, std::span<T> fine) {
  if (fine_size % 2 == 0) throw std::invalid_argument("prolongation needs an odd fine side");
  const int sf = fine_size;
  const int sc = (sf + 1) / 2;
  if (fine.size() != static_cast<std::size_t>(sf) * sf ||
      coarse.size() != static_cast<std::size_t>(sc) * sc) {
    throw std::invalid_argument("prolongation: size mismatch");
  }
  auto c = [&](int m, int n) { return coarse[static_cast<std::size_t>(n) * sc + m]; };
  for (int n = 0; n < sf; ++n) {
    for (int m = 0; m < sf; ++m) {
      T value;
      const bool m_even = m % 2 == 0;
      const bool n_even = n % 2 == 0;
      if (m_even && n_even) {
        value = c(m / 2, n / 2);
      } else if (!m_even && n_even) {
        value = 0.5 * (c((m - 1) / 2, n / 2) + c((m + 1) / 2, n / 2));
      } else if (m_even && !n_even) {
        value = 0.5 * (c(m / 2, (n - 1) / 2) + c(m / 2, (n + 1) / 2));
      } else {
        value = 0.25 * (c((m - 1) / 2, (n - 1) / 2) + c((m - 1) / 2, (n + 1) / 2) +
                        c((m + 1) / 2, (n - 1) / 2) + c((m + 1) / 2, (n + 1) / 2));
      }
      fine[static_cast<std::size_t>(n) * sf + m] = value;
    }
  }
}

template <class T>
Field2D<T> prolong_bilinear(const Field2D<T>& coarse, const Grid2D& fine_grid) {
  if (!(coarse_grid(fine_grid) == coarse.grid())) {
    throw std::invalid_argument("prolongation: grids are not a coarse/fine pair");
  }
  Field2D<T> fine(fine_grid);
  prolong_bilinear<T>(coarse.values(), fine_grid.size(), fine.values());
  return fine;
}

template void restrict_full_weighting<double>(std::span<const double>, int, std::span<double>);
template void restrict_full_weighting<cplx>(std::span<const cplx>, int, std::span<cplx>);
template Field2D<double> restrict_full_weighting(const Field2D<double>&);
template Field2D<cplx> restrict_full_weighting(const Field2D<cplx>&);
template void prolong_bilinear<double>(std::span<const double>, int, std::span<double>);
template void prolong_bilinear<cplx>(std::span<const cplx>, int, std::span<cplx>);
template Field2D<double> prolong_bilinear(const Field2D<double>&, const Grid2D&);
template Field2D<cplx> prolong_bilinear(const Field2D<cplx>&, const Grid2D&);

HelmholtzOperator coarsen_operator(const HelmholtzOperator& fine, double background_eta_sq) {
  if (fine.grid().size() < 5 || fine.grid().size() % 2 == 0) {
    throw std::invalid_argument("coarsen_operator: grid cannot be coarsened further");
  }
  RealField2D coarse = restrict_full_weighting(fine.eta_sq());
  const int s = coarse.grid().size();
  for (int i = 0; i < s; ++i) {
    coarse(i, 0) = background_eta_sq;
    coarse(i, s - 1) = background_eta_sq;
    coarse(0, i) = background_eta_sq;
    coarse(s - 1, i) = background_eta_sq;
  }
  return HelmholtzOperator(std::move(coarse), fine.k0(), fine.layer());
}

LfaSymbols lfa_symbols(double kh, double omega, double theta1, double theta2) {
  const double kh2 = kh * kh;
  const double cos_sum = std::cos(theta1) + std::cos(theta2);
  const double a = 4.0 - 2.0 * cos_sum - kh2;
  if (4.0 - kh2 == 0.0) throw std::domain_error("lfa_symbols: (kh)^2 = 4");
  const double s = 1.0 - omega + (2.0 * omega / (4.0 - kh2)) * cos_sum;
  return {cplx{a, 0.0}, cplx{s, 0.0}};
}

double lfa_max_smoothing_factor(double kh, double omega) {
  const double kh2 = kh * kh;
  if (!(kh2 < 4.0)) throw std::domain_error("lfa_max_smoothing_factor needs (kh)^2 < 4");
  return 1.0 - omega + 4.0 * omega / (4.0 - kh2);
}

MgHierarchy::MgHierarchy(HelmholtzOperator fine, double background_eta_sq, MgOptions options)
    : options_(options) {
  if (options_.levels < 1) throw std::invalid_argument("levels must be >= 1");
  if (options_.pre_smooth < 0 || options_.post_smooth < 0) {
    throw std::invalid_argument("smoothing counts must be >= 0");
  }
  if (!(options_.omega > 0.0 && options_.omega <= 1.0)) {
    throw std::invalid_argument("omega must be in (0, 1]");
  }
  if (options_.cycle_type < 1) throw std::invalid_argument("cycle_type must be >= 1");

  levels_.reserve(options_.levels);
  levels_.push_back(std::move(fine));
  for (int l = 1; l < options_.levels; ++l) {
    const Grid2D& g = levels_.back().grid();
    if (g.size() % 2 == 0 || (g.size() + 1) / 2 < 3) {
      throw std::invalid_argument("grid side incompatible with the requested level count");
    }
    levels_.push_back(coarsen_operator(levels_.back(), background_eta_sq));
  }

  const HelmholtzOperator& coarsest = levels_.back();
  const int s = coarsest.grid().size();
  const double inv_h2 = 1.0 / (coarsest.grid().h() * coarsest.grid().h());
  const auto diag = coarsest.diagonal();
  coarse_lu_ = BandedLU(static_cast<int>(coarsest.unknowns()), s, [&](int row, int col) {
    if (row == col) return diag[row];
    const int dr = std::abs(row - col);
    if (dr == s) return cplx{-inv_h2, 0.0};
    // horizontal neighbors must share a grid row
    if (dr == 1 && row / s == col / s) return cplx{-inv_h2, 0.0};
    return cplx{0.0, 0.0};
  });
}

void MgHierarchy::solve_coarsest(std::span<const cplx> b, std::span<cplx> x) const {
  std::copy(b.begin(), b.end(), x.begin());
  coarse_lu_.solve_in_place(x);
}

void MgHierarchy::cycle(int l, std::span<const cplx> b, std::span<cplx> v,
                        WorkUnitMeter* meter) const {
  const HelmholtzOperator& op = levels_.at(l);
  if (b.size() != op.unknowns() || v.size() != op.unknowns()) {
    throw std::invalid_argument("MgHierarchy::cycle: size mismatch");
  }
  if (l == level_count() - 1) {
    solve_coarsest(b, v);
    return;
  }
  damped_jacobi(op, b, v, options_.omega, options_.pre_smooth);
  if (meter) meter->record(l, options_.pre_smooth);

  std::vector<cplx> residual(op.unknowns());
  op.apply(v, residual);
  for (std::size_t i = 0; i < residual.size(); ++i) residual[i] = b[i] - residual[i];

  const HelmholtzOperator& coarse = levels_[l + 1];
  std::vector<cplx> coarse_rhs(coarse.unknowns());
  restrict_full_weighting<cplx>(residual, op.grid().size(), coarse_rhs);
  std::vector<cplx> coarse_err(coarse.unknowns(), cplx{0.0, 0.0});
  for (int c = 0; c < options_.cycle_type; ++c) cycle(l + 1, coarse_rhs, coarse_err, meter);

  prolong_bilinear<cplx>(coarse_err, op.grid().size(), residual);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += residual[i];

  damped_jacobi(op, b, v, options_.omega, options_.post_smooth);
  if (meter) meter->record(l, options_.post_smooth);
}

void MgHierarchy::precondition(std::span<const cplx> r, std::span<cplx> z,
                               WorkUnitMeter* meter) const {
  std::fill(z.begin(), z.end(), cplx{0.0, 0.0});
  cycle(0, r, z, meter);
}

double MgHierarchy::coarsest_points_per_wavelength() const {
  const HelmholtzOperator& c = levels_.back();
  const auto eta_sq = c.eta_sq().values();
  const double max_eta = std::sqrt(*std::max_element(eta_sq.begin(), eta_sq.end()));
  if (c.k0() == 0.0) return std::numeric_limits<double>::infinity();
  return 2.0 * std::numbers::pi / (c.k0() * max_eta * c.grid().h());
}

}  // namespace helmscat
