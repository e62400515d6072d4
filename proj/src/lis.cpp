#include "helmscat/lis.hpp"

#include <fftw3.h>

#include <cmath>
#include <algorithm>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "helmscat/special.hpp"

namespace helmscat {

namespace {

constexpr double kPi = std::numbers::pi;

// FFTW's planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n)
      : data(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))) {
    if (!data) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  cplx* as_complex() { return reinterpret_cast<cplx*>(data); }
  fftw_complex* data;
};

// Integral over the triangle 0 <= y <= x <= h/2 in polar form; the radial
// part is closed-form: int_0^R H0(k r) r dr = (R H1(k R) + 2j/(pi k)) / k.
cplx radial_integral(double k, double h, double phi) {
  const double R = 0.5 * h / std::cos(phi);
  return (R * special::hankel1_1(k * R) + cplx{0.0, 2.0 / (kPi * k)}) / k;
}

cplx simpson(double a, double b, cplx fa, cplx fm, cplx fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

cplx adaptive(double k, double h, double a, double b, cplx fa, cplx fm, cplx fb, cplx whole,
              double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const cplx flm = radial_integral(k, h, lm);
  const cplx frm = radial_integral(k, h, rm);
  const cplx left = simpson(a, m, fa, flm, fm);
  const cplx right = simpson(m, b, fm, frm, fb);
  const cplx diff = left + right - whole;
  if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
  return adaptive(k, h, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive(k, h, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

// Batched length-P row transforms. `few` covers the s rows that carry data,
// `all` covers every row of a P x P buffer.
struct GreenKernel::Plans {
  Plans(int s, int P) {
    FftwBuffer a(static_cast<std::size_t>(P) * P);
    std::lock_guard lock(planner_mutex());
    auto rows = [&](int count, int sign) {
      return fftw_plan_many_dft(1, &P, count, a.data, nullptr, 1, P, a.data, nullptr, 1, P,
                                sign, FFTW_ESTIMATE);
    };
    few_forward = rows(s, FFTW_FORWARD);
    few_backward = rows(s, FFTW_BACKWARD);
    all_forward = rows(P, FFTW_FORWARD);
    all_backward = rows(P, FFTW_BACKWARD);
    if (!few_forward || !few_backward || !all_forward || !all_backward) {
      throw std::runtime_error("FFTW planning failed");
    }
  }
  ~Plans() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(few_forward);
    fftw_destroy_plan(few_backward);
    fftw_destroy_plan(all_forward);
    fftw_destroy_plan(all_backward);
  }
  fftw_plan few_forward = nullptr;
  fftw_plan few_backward = nullptr;
  fftw_plan all_forward = nullptr;
  fftw_plan all_backward = nullptr;
};

namespace {

// dst[c * dst_stride + r] = src[r * src_stride + c] for r < rows, c < cols.
void transpose(const cplx* src, std::size_t src_stride, cplx* dst, std::size_t dst_stride,
               int rows, int cols) {
  constexpr int kBlock = 16;
  for (int r0 = 0; r0 < rows; r0 += kBlock) {
    const int r1 = std::min(rows, r0 + kBlock);
    for (int c0 = 0; c0 < cols; c0 += kBlock) {
      const int c1 = std::min(cols, c0 + kBlock);
      for (int r = r0; r < r1; ++r) {
        for (int c = c0; c < c1; ++c) dst[c * dst_stride + r] = src[r * src_stride + c];
      }
    }
  }
}

}  // namespace

cplx green_function(double k, double r) {
  if (!(r > 0.0)) throw std::domain_error("green_function needs r > 0");
  return cplx{0.0, 0.25} * special::hankel1_0(k * r);
}

cplx green_cell_integral(double k, double h) {
  if (!(k > 0.0) || !(h > 0.0)) throw std::invalid_argument("green_cell_integral: k, h > 0");
  const double a = 0.0;
  const double b = kPi / 4.0;
  const cplx fa = radial_integral(k, h, a);
  const cplx fm = radial_integral(k, h, 0.5 * (a + b));
  const cplx fb = radial_integral(k, h, b);
  const cplx whole = simpson(a, b, fa, fm, fb);
  const double tol = 1e-13 * std::abs(whole);
  const cplx triangle = adaptive(k, h, a, b, fa, fm, fb, whole, tol, 25);
  return cplx{0.0, 0.25} * 8.0 * triangle;
}

GreenKernel::GreenKernel(const Grid2D& grid, double k0, double eta_b)
    : grid_(grid), k0_(k0), eta_b_(eta_b), padded_(2 * grid.size()) {
  if (!(k0 > 0.0) || !(eta_b > 0.0)) throw std::invalid_argument("GreenKernel: k0 eta_b > 0");
  const double k = wavenumber();
  const double h = grid.h();
  singular_ = green_cell_integral(k, h);

  const int s = grid.size();
  const int P = padded_;
  // Distinct values only depend on (|dm|, |dn|) up to swapping.
  std::vector<cplx> table(static_cast<std::size_t>(s) * s);
  for (int a = 0; a < s; ++a) {
    for (int b = 0; b <= a; ++b) {
      const cplx v = (a == 0 && b == 0)
                         ? singular_
                         : h * h * green_function(k, h * std::sqrt(double(a * a + b * b)));
      table[static_cast<std::size_t>(a) * s + b] = v;
      table[static_cast<std::size_t>(b) * s + a] = v;
    }
  }

  plans_ = std::make_shared<const Plans>(s, P);
  const std::size_t total = static_cast<std::size_t>(P) * P;
  FftwBuffer buf(total);
  cplx* data = buf.as_complex();
  for (int row = 0; row < P; ++row) {
    const int dn = row < s ? row : row - P;
    for (int col = 0; col < P; ++col) {
      const int dm = col < s ? col : col - P;
      const std::size_t i = static_cast<std::size_t>(row) * P + col;
      if (std::abs(dm) >= s || std::abs(dn) >= s) {
        data[i] = 0.0;
      } else {
        data[i] = table[static_cast<std::size_t>(std::abs(dn)) * s + std::abs(dm)];
      }
    }
  }
  // Row transforms along m, then along n on the transposed layout, the same
  // path apply() takes; the spectrum is kept in that (k_m, k_n) layout.
  fftw_execute_dft(plans_->all_forward, buf.data, buf.data);
  FftwBuffer flipped(total);
  transpose(data, P, flipped.as_complex(), P, P, P);
  fftw_execute_dft(plans_->all_forward, flipped.data, flipped.data);
  const double scale = 1.0 / (static_cast<double>(P) * P);
  spectrum_.assign(flipped.as_complex(), flipped.as_complex() + total);
  for (cplx& v : spectrum_) v *= scale;
}

cplx GreenKernel::sample(int dm, int dn) const {
  if (dm == 0 && dn == 0) return singular_;
  const double h = grid_.h();
  return h * h * green_function(wavenumber(), h * std::sqrt(double(dm) * dm + double(dn) * dn));
}

void GreenKernel::apply(std::span<const cplx> w, std::span<cplx> out) const {
  const int s = grid_.size();
  if (w.size() != grid_.count() || out.size() != grid_.count()) {
    throw std::invalid_argument("GreenKernel::apply: size mismatch");
  }
  const int P = padded_;
  const std::size_t total = static_cast<std::size_t>(P) * P;
  // Per-thread scratch, kept across calls: `wide` holds the s data rows,
  // `full` the transposed P x P spectrum.
  thread_local std::unique_ptr<FftwBuffer> wide_buf;
  thread_local std::unique_ptr<FftwBuffer> full_buf;
  thread_local std::size_t capacity = 0;
  if (!full_buf || capacity < total) {
    wide_buf = std::make_unique<FftwBuffer>(total);
    full_buf = std::make_unique<FftwBuffer>(total);
    capacity = total;
  }
  cplx* wide = wide_buf->as_complex();
  cplx* full = full_buf->as_complex();

  for (int n = 0; n < s; ++n) {
    cplx* row = wide + static_cast<std::size_t>(n) * P;
    std::copy_n(w.data() + static_cast<std::size_t>(n) * s, s, row);
    std::fill(row + s, row + P, cplx{});
  }
  fftw_execute_dft(plans_->few_forward, wide_buf->data, wide_buf->data);
  transpose(wide, P, full, P, s, P);
  for (int km = 0; km < P; ++km) {
    cplx* row = full + static_cast<std::size_t>(km) * P;
    std::fill(row + s, row + P, cplx{});
  }
  fftw_execute_dft(plans_->all_forward, full_buf->data, full_buf->data);
  for (std::size_t i = 0; i < total; ++i) full[i] *= spectrum_[i];
  fftw_execute_dft(plans_->all_backward, full_buf->data, full_buf->data);
  transpose(full, P, wide, P, P, s);
  fftw_execute_dft(plans_->few_backward, wide_buf->data, wide_buf->data);
  for (int n = 0; n < s; ++n) {
    std::copy_n(wide + static_cast<std::size_t>(n) * P, s,
                out.data() + static_cast<std::size_t>(n) * s);
  }
}

ComplexField2D GreenKernel::apply(const ComplexField2D& w) const {
  if (!(w.grid() == grid_)) throw std::invalid_argument("GreenKernel::apply: grid mismatch");
  ComplexField2D out(grid_);
  apply(w.values(), out.values());
  return out;
}

LisSolution solve_lis(const GreenKernel& kernel, const RealField2D& f,
                      const ComplexField2D& u_in, const KrylovOptions& options) {
  if (!(f.grid() == kernel.grid()) || !(u_in.grid() == kernel.grid())) {
    throw std::invalid_argument("solve_lis: grid mismatch");
  }
  const std::size_t N = f.size();
  std::vector<cplx> scratch(N);
  const LinearMap A = [&](std::span<const cplx> u, std::span<cplx> out) {
    for (std::size_t i = 0; i < N; ++i) scratch[i] = f[i] * u[i];
    kernel.apply(scratch, out);
    for (std::size_t i = 0; i < N; ++i) out[i] = u[i] - out[i];
  };
  LisSolution sol{ComplexField2D(kernel.grid()), {}};
  sol.report = bicgstab(A, {}, u_in.values(), sol.total.values(), options);
  return sol;
}

}  // namespace helmscat
