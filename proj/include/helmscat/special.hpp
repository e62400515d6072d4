#pragma once

#include <complex>
#include <vector>

namespace helmscat::special {

/// Bessel functions of the first and second kind for orders 0..order_max.
struct BesselSequence {
  std::vector<double> j;
  std::vector<double> y;  // empty when only J was requested
};

/// J_n(x) for n = 0..order_max, x >= 0 (Miller downward recurrence,
/// Hankel asymptotics for large x).
std::vector<double> bessel_j_sequence(int order_max, double x);

/// J_n(x) and Y_n(x) for n = 0..order_max, x > 0.
BesselSequence bessel_jy_sequence(int order_max, double x);

double bessel_j0(double x);
double bessel_j1(double x);
double bessel_y0(double x);
double bessel_y1(double x);

/// Integer order, any sign of n.
double bessel_j(int n, double x);
double bessel_y(int n, double x);

std::complex<double> hankel1_0(double x);
std::complex<double> hankel1_1(double x);
std::complex<double> hankel1(int n, double x);

}  // namespace helmscat::special
