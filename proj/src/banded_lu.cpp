#include "helmscat/banded_lu.hpp"

#include <algorithm>
#include <complex>
#include <stdexcept>
#include <string>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace helmscat {

BandedLU::BandedLU(int n, int bandwidth, const std::function<cplx(int, int)>& entry)
    : n_(n), kl_(bandwidth), ldab_(3 * bandwidth + 1) {
  if (n <= 0 || bandwidth < 0) throw std::invalid_argument("BandedLU: bad dimensions");
  ab_.assign(static_cast<std::size_t>(ldab_) * n, cplx{0.0, 0.0});
  pivots_.assign(n, 0);
  // LAPACK band layout: A(i, j) lives at row kl + ku + i - j of column j.
  for (int j = 0; j < n; ++j) {
    const int lo = std::max(0, j - kl_);
    const int hi = std::min(n - 1, j + kl_);
    for (int i = lo; i <= hi; ++i) {
      ab_[static_cast<std::size_t>(j) * ldab_ + (2 * kl_ + i - j)] = entry(i, j);
    }
  }
  const lapack_int info = LAPACKE_zgbtrf(LAPACK_COL_MAJOR, n, n, kl_, kl_, ab_.data(), ldab_,
                                         pivots_.data());
  if (info != 0) {
    throw std::runtime_error("BandedLU: factorization failed (info=" + std::to_string(info) +
                             ")");
  }
}

void BandedLU::solve_in_place(std::span<cplx> b) const {
  if (static_cast<int>(b.size()) != n_) throw std::invalid_argument("BandedLU: size mismatch");
  const lapack_int info = LAPACKE_zgbtrs(LAPACK_COL_MAJOR, 'N', n_, kl_, kl_, 1, ab_.data(),
                                         ldab_, pivots_.data(), b.data(), n_);
  if (info != 0) throw std::runtime_error("BandedLU: solve failed");
}

DenseLU::DenseLU(int n, std::vector<cplx> row_major) : n_(n), lu_(row_major.size()) {
  if (n <= 0 || row_major.size() != static_cast<std::size_t>(n) * n) {
    throw std::invalid_argument("DenseLU: bad dimensions");
  }
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      lu_[static_cast<std::size_t>(c) * n + r] = row_major[static_cast<std::size_t>(r) * n + c];
  pivots_.assign(n, 0);
  const lapack_int info = LAPACKE_zgetrf(LAPACK_COL_MAJOR, n, n, lu_.data(), n, pivots_.data());
  if (info > 0) throw std::runtime_error("DenseLU: matrix is singular");
  if (info < 0) throw std::runtime_error("DenseLU: invalid argument");
}

void DenseLU::solve_in_place(std::span<cplx> b) const {
  if (static_cast<int>(b.size()) != n_) throw std::invalid_argument("DenseLU: size mismatch");
  const lapack_int info = LAPACKE_zgetrs(LAPACK_COL_MAJOR, 'N', n_, 1, lu_.data(), n_,
                                         pivots_.data(), b.data(), n_);
  if (info != 0) throw std::runtime_error("DenseLU: solve failed");
}

}  // namespace helmscat
