#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "storm/core.hpp"

namespace storm {

/// Sum-of-squares problem f(x) = sum_i r_i(x)^2.
struct ProblemSpec {
  std::string name;
  std::size_t n = 0;
  std::size_t m = 0;
  std::function<Vector(const Vector&)> residuals;
  std::function<Matrix(const Vector&)> jacobian;
  Vector x0;
  std::optional<double> f_star;
  std::optional<Vector> x_star;
  /// Budget is budget_multiplier * (n + 1) evaluations.
  std::size_t budget_multiplier = 1000;

  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  SmoothFunction smooth() const;
};

enum class NoiseKind { none, multiplicative, additive, failure };

const char* to_string(NoiseKind kind);
NoiseKind noise_kind_from_string(const std::string& name);

struct NoiseModel {
  NoiseKind kind = NoiseKind::none;
  /// Half-width of the uniform noise, or the per-component failure probability.
  double sigma = 0.0;
  /// Components with |r_i(x)| < epsilon may fail.
  double epsilon = 0.1;
  /// Garbage value a failed component takes.
  double garbage = -10000.0;
  /// Replace the whole objective (not a component) by the garbage value on failure.
  bool whole_objective = false;

  static NoiseModel none() { return {}; }
  static NoiseModel multiplicative(double sigma);
  static NoiseModel additive(double sigma);
  static NoiseModel failure(double sigma, double epsilon = 0.1, double garbage = -10000.0);
};

/// Per-component failure probability giving problem-level success p_s over m components.
double sigma_from_success_probability(double p_s, std::size_t m);

/// sum_i ((1 + w_i) r_i)^2, w_i ~ U[-sigma, sigma].
double eval_multiplicative(const Vector& residuals, double sigma, Rng& rng);
/// sum_i (r_i + w_i)^2, w_i ~ U[-sigma, sigma].
double eval_additive(const Vector& residuals, double sigma, Rng& rng);
/// Each |r_i| < epsilon becomes `garbage` with probability sigma, then squares are summed.
double eval_failure(const Vector& residuals, double sigma, double epsilon, double garbage, Rng& rng);

/// E[f~(x)] for the unbiased regimes (failure regime: exact mean given residuals).
double noise_mean(const Vector& residuals, const NoiseModel& noise);
/// Var[f~(x)] in closed form.
double noise_variance(const Vector& residuals, const NoiseModel& noise);

/// A sum-of-squares problem behind one of the noise regimes, with an
/// evaluation counter.
class StochasticProblem : public CountedObjective {
 public:
  StochasticProblem(ProblemSpec spec, NoiseModel noise);

  /// One noisy evaluation; increments the counter by one.
  double evaluate(const Vector& x, Rng& rng);

  double true_value(const Vector& x) const { return spec_.value(x); }
  Vector true_gradient(const Vector& x) const { return spec_.gradient(x); }

  const ProblemSpec& spec() const { return spec_; }
  const NoiseModel& noise() const { return noise_; }

  std::size_t dimension() const override { return spec_.n; }
  Vector initial_point() const override { return spec_.x0; }
  std::size_t evaluations() const override { return evals_; }
  std::optional<double> reference_value(const Vector& x) const override { return spec_.value(x); }

  void reset_counter() { evals_ = 0; }

 private:
  ProblemSpec spec_;
  NoiseModel noise_;
  std::size_t evals_ = 0;
};

/// Mean of p fresh noisy evaluations; adds p to the counter.
double averaged_estimate(StochasticProblem& problem, const Vector& x, std::size_t p, Rng& rng);

/// ceil(V / (kappa^2 (1 - alpha') delta^4)), at least 1.
std::size_t chebyshev_sample_size(double V, double kappa, double alpha_prime, double delta);

/// max of the value bound above and ceil(V / (kappa_eg^2 (1 - alpha') delta^2)).
std::size_t chebyshev_gradient_sample_size(double V, double kappa_ef, double kappa_eg,
                                           double alpha_prime, double delta);

// Logistic regression data ------------------------------------------------

/// Dense labelled data; labels in {-1, +1}.
struct Dataset {
  Matrix features;  // N x m
  Vector labels;    // N

  std::size_t size() const { return static_cast<std::size_t>(labels.size()); }
  std::size_t dimension() const { return static_cast<std::size_t>(features.cols()); }
  Dataset subset(std::span<const std::size_t> rows) const;
};

/// Parse "label idx:val idx:val ..." lines with 1-based indices.
///
/// Two distinct labels map to -1 (smaller) and +1 (larger). With more classes
/// `positive_label` selects the +1 class. Throws ParseError with the line number.
Dataset parse_libsvm(std::istream& in, std::optional<double> positive_label = std::nullopt,
                     std::size_t min_dimension = 0);
Dataset load_libsvm(const std::string& path, std::optional<double> positive_label = std::nullopt);

/// Random split with floor(train_fraction * N) training rows.
std::pair<Dataset, Dataset> train_test_split(const Dataset& data, double train_fraction,
                                             std::uint64_t seed);

/// Two Gaussian-feature classes separated by a random hyperplane, with
/// `label_noise` standard deviation added to the margin before thresholding.
Dataset make_synthetic_dataset(std::size_t n_samples, std::size_t n_features, double label_noise,
                               std::uint64_t seed);

struct LogisticEvaluation {
  double loss = 0.0;
  Vector gradient;
  Matrix hessian;  // empty unless requested
};

/// Subsampled regularized logistic loss over rows `sample` at theta = (w, beta):
/// (1/|I|) sum log(1 + exp(-y (w'x + beta))) + lambda ||w||^2 with exact
/// gradient and (optionally) Hessian. The bias is not regularized.
LogisticEvaluation subsample_logistic_oracle(const Dataset& data, std::span<const std::size_t> sample,
                                             const Vector& theta, double lambda,
                                             bool with_hessian = true);

/// Same, with w and beta passed separately.
LogisticEvaluation subsample_logistic_oracle(const Dataset& data, std::span<const std::size_t> sample,
                                             const Vector& w, double beta, double lambda,
                                             bool with_hessian = true);

/// Logistic loss over a training set with per-data-point evaluation counting.
class LogisticProblem : public CountedObjective {
 public:
  LogisticProblem(Dataset train, double lambda);

  /// Subsampled evaluation; adds |sample| to the counter.
  LogisticEvaluation evaluate(std::span<const std::size_t> sample, const Vector& theta,
                              bool with_hessian);
  /// Full-data loss, not counted.
  double full_loss(const Vector& theta) const;
  LogisticEvaluation full_evaluation(const Vector& theta, bool with_hessian = true) const;

  /// p distinct row indices drawn uniformly without replacement. p >= N
  /// returns every row in order without drawing.
  std::vector<std::size_t> draw_sample(std::size_t p, Rng& rng) const;

  const Dataset& data() const { return train_; }
  double lambda() const { return lambda_; }

  std::size_t dimension() const override { return train_.dimension() + 1; }
  Vector initial_point() const override { return Vector::Zero(static_cast<Eigen::Index>(dimension())); }
  std::size_t evaluations() const override { return evals_; }
  std::optional<double> reference_value(const Vector& x) const override { return full_loss(x); }

 private:
  Dataset train_;
  double lambda_;
  std::vector<std::size_t> all_rows_;
  std::size_t evals_ = 0;
};

/// Numerically stable log(1 + exp(-z)).
double log1p_exp_neg(double z);

}  // namespace storm
