#pragma once

#include <functional>
#include <span>
#include <vector>

#include "helmscat/grid.hpp"

namespace helmscat {

/// LU factorization with partial pivoting of a banded complex matrix (LAPACK zgbtrf).
class BandedLU {
 public:
  BandedLU() = default;

  /// `entry(row, col)` is queried only inside the band |row - col| <= bandwidth.
  BandedLU(int n, int bandwidth, const std::function<cplx(int, int)>& entry);

  int size() const { return n_; }
  bool empty() const { return n_ == 0; }

  /// Overwrites b with A^{-1} b.
  void solve_in_place(std::span<cplx> b) const;

 private:
  int n_ = 0;
  int kl_ = 0;
  int ldab_ = 0;
  std::vector<cplx> ab_;
  std::vector<int> pivots_;
};

/// Dense LU with partial pivoting (LAPACK zgetrf); row-major input.
class DenseLU {
 public:
  DenseLU(int n, std::vector<cplx> row_major);

  int size() const { return n_; }
  void solve_in_place(std::span<cplx> b) const;

 private:
  int n_;
  std::vector<cplx> lu_;  // column-major
  std::vector<int> pivots_;
};

}  // namespace helmscat
