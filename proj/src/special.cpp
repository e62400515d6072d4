#include "helmscat/special.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace helmscat::special {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEulerGamma = std::numbers::egamma;
// Above this argument J0, J1, Y0, Y1 come from the Hankel asymptotic series,
// whose smallest term is ~exp(-2x).
constexpr double kAsymptoticFrom = 25.0;

struct OrderPair {
  double j;
  double y;
};

// Hankel asymptotic expansion for order nu in {0, 1}.
OrderPair asymptotic(int nu, double x) {
  const double mu = 4.0 * nu * nu;
  double p = 1.0;
  double q = 0.0;
  double term = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = term * (mu - odd * odd) / (k * 8.0 * x);
    if (std::abs(next) > std::abs(term) && k > 2) break;  // series starts diverging
    term = next;
    // term_k enters Q for odd k and P for even k, signs alternating in pairs.
    const double sign = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 1) {
      q += sign * term;
    } else {
      p += sign * term;
    }
    if (std::abs(term) < 1e-17) break;
  }
  const double chi = x - (0.5 * nu + 0.25) * kPi;
  const double scale = std::sqrt(2.0 / (kPi * x));
  const double c = std::cos(chi);
  const double s = std::sin(chi);
  return {scale * (p * c - q * s), scale * (p * s + q * c)};
}

int miller_start(int order_max, double x) {
  const int base = std::max(order_max, static_cast<int>(std::ceil(x)));
  int start = base + 30 + static_cast<int>(8.0 * std::cbrt(static_cast<double>(base)));
  if (start % 2 != 0) ++start;
  return start;
}

// Unnormalized minimal solution of the three-term recurrence, orders 0..start.
std::vector<double> miller_raw(int start, double x) {
  std::vector<double> raw(static_cast<std::size_t>(start) + 2, 0.0);
  raw[start + 1] = 0.0;
  raw[start] = 1e-30;
  for (int n = start; n >= 1; --n) {
    raw[n - 1] = (2.0 * n / x) * raw[n] - raw[n + 1];
    if (std::abs(raw[n - 1]) > 1e200) {
      for (int k = n - 1; k <= start + 1; ++k) raw[k] *= 1e-200;
    }
  }
  raw.pop_back();
  return raw;
}

// J_0..J_start normalized by J0 + 2 sum J_2k = 1; valid for moderate x.
std::vector<double> miller_normalized(int start, double x) {
  std::vector<double> raw = miller_raw(start, x);
  double sum = raw[0];
  for (int k = 2; k <= start; k += 2) sum += 2.0 * raw[k];
  for (double& v : raw) v /= sum;
  return raw;
}

// Neumann series for Y0 and Y1 from a normalized J sequence reaching well past x.
OrderPair neumann_y(const std::vector<double>& j, double x) {
  const double log_term = std::log(0.5 * x) + kEulerGamma;
  double sum0 = 0.0;
  double sum1 = 0.0;
  const int top = static_cast<int>(j.size()) - 1;
  for (int k = 1; 2 * k + 1 <= top; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    sum0 += sign * j[2 * k] / k;
    sum1 += sign * (j[2 * k - 1] - j[2 * k + 1]) / k;
  }
  const double y0 = (2.0 / kPi) * log_term * j[0] - (4.0 / kPi) * sum0;
  const double y1 = (2.0 / kPi) * (log_term * j[1] - j[0] / x) + (2.0 / kPi) * sum1;
  return {y0, y1};
}

void fill_j_large(int order_max, double x, double j0, double j1, std::vector<double>& out) {
  out.assign(static_cast<std::size_t>(order_max) + 1, 0.0);
  out[0] = j0;
  if (order_max >= 1) out[1] = j1;
  if (order_max < 2) return;
  if (order_max < x) {
    // Upward recurrence is stable while n < x.
    for (int n = 1; n < order_max; ++n) out[n + 1] = (2.0 * n / x) * out[n] - out[n - 1];
    return;
  }
  const int start = miller_start(order_max, x);
  std::vector<double> raw = miller_raw(start, x);
  const double scale = std::abs(j0) >= std::abs(j1) ? j0 / raw[0] : j1 / raw[1];
  for (int n = 0; n <= order_max; ++n) out[n] = raw[n] * scale;
}

}  // namespace

std::vector<double> bessel_j_sequence(int order_max, double x) {
  if (order_max < 0) throw std::invalid_argument("order_max must be >= 0");
  if (!(x >= 0.0)) throw std::invalid_argument("bessel_j_sequence needs x >= 0");
  std::vector<double> out(static_cast<std::size_t>(order_max) + 1, 0.0);
  if (x == 0.0) {
    out[0] = 1.0;
    return out;
  }
  if (x < kAsymptoticFrom) {
    std::vector<double> j = miller_normalized(miller_start(order_max, x), x);
    std::copy_n(j.begin(), order_max + 1, out.begin());
    return out;
  }
  fill_j_large(order_max, x, asymptotic(0, x).j, asymptotic(1, x).j, out);
  return out;
}

BesselSequence bessel_jy_sequence(int order_max, double x) {
  if (order_max < 0) throw std::invalid_argument("order_max must be >= 0");
  if (!(x > 0.0)) throw std::invalid_argument("bessel_jy_sequence needs x > 0");
  BesselSequence seq;
  const int top = std::max(order_max, 1);
  double y0 = 0.0;
  double y1 = 0.0;
  if (x < kAsymptoticFrom) {
    std::vector<double> j = miller_normalized(miller_start(top, x), x);
    const OrderPair y = neumann_y(j, x);
    y0 = y.j;
    y1 = y.y;
    j.resize(static_cast<std::size_t>(order_max) + 1);
    seq.j = std::move(j);
  } else {
    const OrderPair a0 = asymptotic(0, x);
    const OrderPair a1 = asymptotic(1, x);
    y0 = a0.y;
    y1 = a1.y;
    fill_j_large(order_max, x, a0.j, a1.j, seq.j);
  }
  seq.y.assign(static_cast<std::size_t>(order_max) + 1, 0.0);
  seq.y[0] = y0;
  if (order_max >= 1) seq.y[1] = y1;
  for (int n = 1; n < order_max; ++n) {
    seq.y[n + 1] = (2.0 * n / x) * seq.y[n] - seq.y[n - 1];
  }
  return seq;
}

double bessel_j0(double x) { return bessel_j(0, x); }
double bessel_j1(double x) { return bessel_j(1, x); }
double bessel_y0(double x) { return bessel_y(0, x); }
double bessel_y1(double x) { return bessel_y(1, x); }

double bessel_j(int n, double x) {
  double sign = 1.0;
  if (n < 0) {
    n = -n;
    if (n % 2 == 1) sign = -sign;
  }
  if (x < 0.0) {
    x = -x;
    if (n % 2 == 1) sign = -sign;
  }
  if (x >= kAsymptoticFrom && n <= 1) return sign * asymptotic(n, x).j;
  return sign * bessel_j_sequence(n, x)[n];
}

double bessel_y(int n, double x) {
  double sign = 1.0;
  if (n < 0) {
    n = -n;
    if (n % 2 == 1) sign = -1.0;
  }
  if (x >= kAsymptoticFrom && n <= 1) return sign * asymptotic(n, x).y;
  return sign * bessel_jy_sequence(n, x).y[n];
}

std::complex<double> hankel1_0(double x) {
  if (x >= kAsymptoticFrom) {
    const OrderPair a = asymptotic(0, x);
    return {a.j, a.y};
  }
  const BesselSequence s = bessel_jy_sequence(1, x);
  return {s.j[0], s.y[0]};
}

std::complex<double> hankel1_1(double x) {
  if (x >= kAsymptoticFrom) {
    const OrderPair a = asymptotic(1, x);
    return {a.j, a.y};
  }
  const BesselSequence s = bessel_jy_sequence(1, x);
  return {s.j[1], s.y[1]};
}

std::complex<double> hankel1(int n, double x) { return {bessel_j(n, x), bessel_y(n, x)}; }

}  // namespace helmscat::special
