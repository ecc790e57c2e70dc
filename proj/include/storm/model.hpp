#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "storm/common.hpp"

namespace storm {

/// Local quadratic model m(c + s) = f0 + g's + s'Hs.
///
/// The Hessian is stored WITHOUT the customary 1/2, i.e. the model of
/// f(x) = x'x is H = I. Fitters and the subproblem solver share this form;
/// sources written with the 1/2 convention go through from_half_form().
struct QuadraticModel {
  Vector center;
  double f0 = 0.0;
  Vector gradient;
  Matrix hessian;
  /// Operator-norm cap on the Hessian, if one was enforced.
  std::optional<double> hessian_norm_cap;
  /// True when the cap actually truncated eigenvalues.
  bool hessian_capped = false;

  std::size_t dimension() const { return static_cast<std::size_t>(center.size()); }

  double value(const Vector& y) const;
  /// Value at center + step.
  double value_at_step(const Vector& step) const;
  Vector gradient_at(const Vector& y) const;

  /// Model decrease m(c) - m(c + step).
  double decrease(const Vector& step) const;

  /// Build from m(c + s) = f0 + g's + 1/2 s'Bs.
  static QuadraticModel from_half_form(Vector center, double f0, Vector gradient, const Matrix& B);
};

/// Replace H by the eigenvalue-truncated matrix with spectral norm <= cap.
void cap_hessian(QuadraticModel& model, double cap);

enum class SetKind { interpolation_linear, interpolation_quadratic, regression };

/// Number of points for a kind. `regression_points` is only used for regression.
std::size_t poised_set_size(SetKind kind, std::size_t n, std::size_t regression_points = 0);

/// Number of monomials in the full basis of the given degree in R^n.
std::size_t basis_size(std::size_t n, int degree);

struct PoisedSet {
  std::vector<Vector> points;
  Vector center;
  double delta = 0.0;
  SetKind kind = SetKind::interpolation_linear;
  /// Monte-Carlo estimate of max |Lagrange polynomial| over B(center, delta).
  double poisedness_estimate = 0.0;
};

/// Random orthonormal basis of R^n (columns), from QR of a Gaussian matrix.
Matrix random_orthonormal_basis(std::size_t n, Rng& rng);

/// Uniform sample from the closed ball B(center, radius).
Vector sample_in_ball(const Vector& center, double radius, Rng& rng);

/// Build a sample set in B(center, delta).
///
/// interpolation_linear: center plus delta times a random orthonormal basis.
/// interpolation_quadratic: center, +-delta along a random orthonormal basis,
/// then delta*(q_i+q_j)/sqrt(2) cross points, (n+1)(n+2)/2 in total.
/// regression: the center plus regression_points-1 uniform samples in the ball.
PoisedSet make_poised_set(const Vector& center, double delta, SetKind kind, Rng& rng,
                          std::size_t regression_points = 0);

/// Condition number of the delta-scaled basis matrix of `points` around
/// `center` for a polynomial basis of the given degree.
double scaled_condition_number(const std::vector<Vector>& points, const Vector& center,
                               double delta, int degree);

/// Largest |Lagrange polynomial| over `samples` random points of the ball
/// plus the nodes themselves. Least-squares Lagrange polynomials are used when
/// there are more points than basis functions.
double estimate_poisedness(const std::vector<Vector>& points, const Vector& center, double delta,
                           int degree, Rng& rng, std::size_t samples = 100);

inline constexpr double kMaxConditionNumber = 1e12;

/// Interpolating model through (points, values). Throws DegenerateGeometry.
QuadraticModel fit_interpolation(const PoisedSet& set, const std::vector<double>& values);

/// Interpolation on an arbitrary point list (persistent sets), centred at `center`.
/// Degree is 2 when points.size() == (n+1)(n+2)/2 and 1 when it is n+1.
QuadraticModel fit_interpolation(const std::vector<Vector>& points, const std::vector<double>& values,
                                 const Vector& center, double delta);

/// Least-squares model of degree 1 or 2. Throws DegenerateGeometry.
QuadraticModel fit_regression(const PoisedSet& set, const std::vector<double>& values, int degree);

QuadraticModel fit_regression(const std::vector<Vector>& points, const std::vector<double>& values,
                              const Vector& center, double delta, int degree);

/// First-order Taylor-style model from averaged value/gradient samples.
QuadraticModel fit_gradient_taylor(const Vector& x0, double fbar, const Vector& gbar,
                                   const std::optional<Matrix>& hessian = std::nullopt);

/// A smooth reference function with exact derivatives.
struct SmoothFunction {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  /// Full second derivative (standard convention). Optional.
  std::function<Matrix(const Vector&)> hessian;
};

struct ModelQualityReport {
  double delta = 0.0;
  double max_value_error = 0.0;
  double max_gradient_error = 0.0;
  double implied_kappa_ef = 0.0;
  double implied_kappa_eg = 0.0;
};

/// Empirical fully-linear check of `model` against `truth` on B(model.center, delta).
ModelQualityReport probe_fully_linear(const QuadraticModel& model, const SmoothFunction& truth,
                                      double delta, std::size_t n_probe, Rng& rng);

}  // namespace storm
