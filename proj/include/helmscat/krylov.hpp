#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "helmscat/linear_map.hpp"

namespace helmscat {

enum class SolveStatus { converged, max_iterations, breakdown };

std::string_view to_string(SolveStatus status);

struct KrylovOptions {
  double tolerance = 1e-6;  // on ||r|| / ||b||
  int max_iterations = 1000;
};

struct SolveReport {
  int iterations = 0;
  /// ||r_k||, starting with the initial residual.
  std::vector<double> residual_history;
  bool converged = false;
  SolveStatus status = SolveStatus::max_iterations;
  double rhs_norm = 0.0;
  /// Smoother work of the preconditioner; filled by callers that meter it.
  double work_units = 0.0;

  double relative_residual() const;
};

/// Preconditioned Bi-CGSTAB. `x` holds the initial guess on entry and the
/// solution on return. An empty `precondition` means the identity.
///
/// Iterations also stop at the half step when ||s|| already meets the
/// tolerance (x = h), which keeps e.g. A = I from breaking down on t = 0.
SolveReport bicgstab(const LinearMap& apply, const LinearMap& precondition,
                     std::span<const cplx> b, std::span<cplx> x, const KrylovOptions& options);

}  // namespace helmscat
