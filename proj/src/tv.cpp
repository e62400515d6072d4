#include "helmscat/tv.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace helmscat {

namespace {

// Dual pair (p, q) lives on the pixels; p(s-1, n) and q(m, s-1) stay zero.
struct Dual {
  std::vector<double> p, q;
  explicit Dual(std::size_t count) : p(count, 0.0), q(count, 0.0) {}
};

// L(p, q) = div: p(m,n) + q(m,n) - p(m-1,n) - q(m,n-1).
void divergence(const Dual& d, int s, std::vector<double>& out) {
  for (int n = 0; n < s; ++n) {
    for (int m = 0; m < s; ++m) {
      const std::size_t i = static_cast<std::size_t>(n) * s + m;
      double v = d.p[i] + d.q[i];
      if (m > 0) v -= d.p[i - 1];
      if (n > 0) v -= d.q[i - s];
      out[i] = v;
    }
  }
}

}  // namespace

double tv_value(const RealField2D& w) {
  const int s = w.grid().size();
  double total = 0.0;
  for (int n = 0; n < s; ++n) {
    for (int m = 0; m < s; ++m) {
      const double dx = m + 1 < s ? w(m + 1, n) - w(m, n) : 0.0;
      const double dy = n + 1 < s ? w(m, n + 1) - w(m, n) : 0.0;
      total += std::sqrt(dx * dx + dy * dy);
    }
  }
  return total;
}

double tv_prox_objective(const RealField2D& x, const RealField2D& w, double weight) {
  if (!(x.grid() == w.grid())) throw std::invalid_argument("tv_prox_objective: grid mismatch");
  double fit = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) fit += (x[i] - w[i]) * (x[i] - w[i]);
  return 0.5 * fit + weight * tv_value(x);
}

RealField2D tv_prox(const RealField2D& w, double weight, int iterations) {
  if (!(weight >= 0.0)) throw std::invalid_argument("tv_prox: weight must be >= 0");
  if (iterations < 0) throw std::invalid_argument("tv_prox: iterations must be >= 0");
  RealField2D x(w.grid());
  for (std::size_t i = 0; i < w.size(); ++i) x[i] = std::max(w[i], 0.0);
  if (weight == 0.0 || iterations == 0) return x;

  const int s = w.grid().size();
  const std::size_t N = w.size();
  Dual pq(N), rs(N), prev(N);
  std::vector<double> div(N);
  const double step = 1.0 / (8.0 * weight);
  double t = 1.0;

  auto primal = [&](const Dual& d) {
    divergence(d, s, div);
    for (std::size_t i = 0; i < N; ++i) x[i] = std::max(w[i] - weight * div[i], 0.0);
  };

  for (int k = 0; k < iterations; ++k) {
    primal(rs);
    prev = pq;
    // (p, q) = P[(r, s) + step * L^T x], L^T x = minus forward differences
    for (int n = 0; n < s; ++n) {
      for (int m = 0; m < s; ++m) {
        const std::size_t i = static_cast<std::size_t>(n) * s + m;
        double a = m + 1 < s ? rs.p[i] + step * (x[i] - x[i + 1]) : 0.0;
        double b = n + 1 < s ? rs.q[i] + step * (x[i] - x[i + s]) : 0.0;
        const double scale = std::max(1.0, std::sqrt(a * a + b * b));
        pq.p[i] = a / scale;
        pq.q[i] = b / scale;
      }
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double mix = (t - 1.0) / t_next;
    for (std::size_t i = 0; i < N; ++i) {
      rs.p[i] = pq.p[i] + mix * (pq.p[i] - prev.p[i]);
      rs.q[i] = pq.q[i] + mix * (pq.q[i] - prev.q[i]);
    }
    t = t_next;
  }
  primal(pq);
  return x;
}

}  // namespace helmscat
