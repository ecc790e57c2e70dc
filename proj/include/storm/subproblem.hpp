#pragma once

#include <functional>

#include "storm/model.hpp"

namespace storm {

/// Approximate trust-region step with its Cauchy-decrease certificate.
struct StepResult {
  Vector step;
  /// m(c) - m(c + step).
  double model_decrease = 0.0;
  /// (kappa_fcd_used / 2) ||g|| min(||g|| / ||H||, delta).
  double cauchy_decrease_bound = 0.0;
  /// Achieved fraction of Cauchy decrease, clipped to (0, 1].
  double kappa_fcd_used = 1.0;
  /// True when dogleg returned the Cauchy point.
  bool used_cauchy_fallback = false;
};

/// Spectral norm of a symmetric matrix.
double spectral_norm(const Matrix& symmetric);

/// ||g|| min(||g|| / ||H||, delta); ||H|| = 0 reads as min(inf, delta).
double cauchy_reference_decrease(const QuadraticModel& model, double delta);

/// Exact minimizer of the model along -g inside the ball.
///
/// With the Hessian stored without the 1/2, the Cauchy point always attains
/// kappa_fcd >= 1/2.
StepResult cauchy_point(const QuadraticModel& model, double delta);

/// Powell dogleg when the Hessian is positive definite, the Cauchy point
/// otherwise, and the Cauchy point whenever it beats the dogleg step.
StepResult dogleg(const QuadraticModel& model, double delta);

using SubproblemSolver = std::function<StepResult(const QuadraticModel&, double)>;

/// Check both StepResult invariants at the given relative tolerance.
bool certificate_holds(const StepResult& result, double delta, double rel_tol = 1e-12);

}  // namespace storm
