#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "storm/common.hpp"
#include "storm/model.hpp"
#include "storm/subproblem.hpp"

namespace storm {

/// Algorithm constants and run budget.
struct TrustRegionConfig {
  double delta0 = 1.0;
  double delta_max = 10.0;
  double gamma = 2.0;
  double eta1 = 0.1;
  double eta2 = 0.001;
  /// Maximum number of noisy function evaluations.
  std::size_t budget = 1000;
  std::uint64_t seed = 0;

  /// Throws InvalidArgument unless 0 < delta0 <= delta_max, gamma > 1,
  /// 0 < eta1 < 1, eta2 >= 0 and budget > 0.
  void validate() const;
};

struct TrustRegionState {
  std::size_t k = 0;
  Vector x;
  double delta = 0.0;
  std::size_t eval_count = 0;
  std::optional<double> last_rho;
  bool last_success = false;
  double last_model_gradient_norm = 0.0;
};

enum class IterationFlag { none, degenerate_model, zero_model_decrease };

struct IterationEvent {
  std::size_t k = 0;
  Vector x_before;
  Vector x_after;
  double delta_before = 0.0;
  double delta_after = 0.0;
  std::optional<double> rho;
  double model_gradient_norm = 0.0;
  std::optional<double> f0_estimate;
  std::optional<double> fs_estimate;
  std::size_t evals_used = 0;
  /// Noiseless reference values, when the problem exposes one.
  std::optional<double> true_f_before;
  std::optional<double> true_f_after;
  /// Lyapunov monitor nu f(x_k) + (1 - nu) delta_k^2 for the state entering the iteration.
  std::optional<double> phi;
  double kappa_fcd_used = 1.0;
  bool success = false;
  IterationFlag flag = IterationFlag::none;
};

enum class StopReason { budget, target_reached, delta_floor, iteration_limit };

const char* to_string(StopReason reason);

/// Algorithm phases, for fidelity audits of the variant listings.
enum class Phase {
  sample_rate,
  value_update,
  regression_draw,
  model,
  step,
  estimates,
  acceptance,
  radius,
  set_update,
};

const char* to_string(Phase phase);

struct PhaseRecord {
  std::size_t k = 0;
  Phase phase = Phase::model;
  /// Cumulative evaluation count when the phase finished.
  std::size_t evals = 0;
  /// Cumulative draw count of each watched RNG stream when the phase finished.
  std::vector<std::uint64_t> stream_draws;
};

/// Optional instrumentation: an ordered log of phases with RNG snapshots.
class PhaseTrace {
 public:
  void watch(const Rng* stream) { streams_.push_back(stream); }
  void mark(std::size_t k, Phase phase, std::size_t evals);
  const std::vector<PhaseRecord>& records() const { return records_; }
  std::size_t stream_count() const { return streams_.size(); }

 private:
  std::vector<const Rng*> streams_;
  std::vector<PhaseRecord> records_;
};

inline void mark_phase(PhaseTrace* trace, std::size_t k, Phase phase, std::size_t evals) {
  if (trace) trace->mark(k, phase, evals);
}

struct RunRecord {
  std::vector<IterationEvent> events;
  Vector x0;
  Vector x_final;
  double delta_final = 0.0;
  std::size_t total_evals = 0;
  StopReason stop_reason = StopReason::budget;
  std::optional<double> true_f_x0;

  /// Smallest noiseless value seen at an iterate (x0 included).
  std::optional<double> best_true_f() const;
  /// Cumulative evaluations at the end of the first iteration whose accepted
  /// iterate has noiseless value below `threshold`; 0 if x0 already is.
  std::optional<std::size_t> evals_to_reach(double threshold) const;
  std::size_t successful_iterations() const;
};

/// Termination policy; the algorithm itself has none.
struct StoppingRule {
  /// 0 means no limit.
  std::size_t max_iterations = 0;
  /// Stop once the noiseless value at the iterate drops below this.
  std::optional<double> target_value;
  double delta_floor = 1e-12;
  /// Also stop before an iteration whose planned evaluations would overrun
  /// the budget. Otherwise the last iteration may overrun it.
  bool strict_budget = false;
};

struct RunOptions {
  StoppingRule stop;
  /// Enables the Lyapunov monitor with this nu in (0, 1).
  std::optional<double> phi_nu;
  PhaseTrace* trace = nullptr;
};

/// Estimates of f(x_k) and f(x_k + s_k).
struct EstimatePair {
  double f0 = 0.0;
  double fs = 0.0;
  std::size_t samples_used = 1;
  /// Accuracy target eps_F delta^2 the estimator was sized for, if any.
  std::optional<double> epsilon_target;
};

/// What the loop needs from a problem: a start point, an evaluation counter
/// and, optionally, noiseless values for diagnostics.
class CountedObjective {
 public:
  virtual ~CountedObjective() = default;
  virtual std::size_t dimension() const = 0;
  virtual Vector initial_point() const = 0;
  virtual std::size_t evaluations() const = 0;
  virtual std::optional<double> reference_value(const Vector& x) const = 0;
};

/// Passed to the components after the radius update.
struct IterationOutcome {
  std::size_t k = 0;
  const Vector* x_before = nullptr;
  /// Trial point x_k + s_k; null when no model could be built.
  const Vector* trial = nullptr;
  const Vector* x_after = nullptr;
  double delta_before = 0.0;
  double delta_after = 0.0;
  bool success = false;
};

class ModelBuilder {
 public:
  virtual ~ModelBuilder() = default;
  /// Upper bound on evaluations the next build() will spend.
  virtual std::size_t planned_evaluations(std::size_t /*k*/, double /*delta*/) const { return 0; }
  /// Model on B(x, delta); nullopt when the sample geometry is degenerate.
  virtual std::optional<QuadraticModel> build(std::size_t k, const Vector& x, double delta) = 0;
  virtual void finish_iteration(const IterationOutcome& /*outcome*/) {}
};

class Estimator {
 public:
  virtual ~Estimator() = default;
  virtual std::size_t planned_evaluations(std::size_t /*k*/, double /*delta*/) const { return 0; }
  virtual EstimatePair estimate(std::size_t k, const Vector& x, const Vector& trial,
                                double delta) = 0;
  virtual void finish_iteration(const IterationOutcome& /*outcome*/) {}
};

/// rho >= eta1 and ||g|| >= eta2 * delta.
bool acceptance_test(double rho, double model_grad_norm, double delta, double eta1, double eta2);

/// nu f + (1 - nu) delta^2.
double phi_monitor(double f_value, double delta, double nu);

/// The generic stochastic trust-region loop.
///
/// Each iteration builds a model on B(x_k, delta_k), takes a certified step,
/// obtains estimates f0, fs, applies the acceptance test to
/// rho = (f0 - fs) / (m(x_k) - m(x_k + s_k)) and updates the radius.
/// Degenerate models and zero model decrease count as unsuccessful.
RunRecord run(CountedObjective& problem, ModelBuilder& builder, Estimator& estimator,
              const SubproblemSolver& solver, const TrustRegionConfig& cfg,
              const RunOptions& options = {});

/// Builds the exact second-order Taylor model of a smooth function. The
/// Hessian falls back to central differences of the gradient when absent.
class ExactModelBuilder : public ModelBuilder {
 public:
  explicit ExactModelBuilder(SmoothFunction f) : f_(std::move(f)) {}
  std::optional<QuadraticModel> build(std::size_t k, const Vector& x, double delta) override;

 private:
  SmoothFunction f_;
};

/// Exact function values as estimates; spends no evaluations.
class ExactEstimator : public Estimator {
 public:
  explicit ExactEstimator(std::function<double(const Vector&)> f) : f_(std::move(f)) {}
  EstimatePair estimate(std::size_t k, const Vector& x, const Vector& trial, double delta) override;

 private:
  std::function<double(const Vector&)> f_;
};

/// Central-difference Hessian of a gradient map.
Matrix finite_difference_hessian(const std::function<Vector(const Vector&)>& gradient,
                                 const Vector& x, double h = 1e-5);

}  // namespace storm
