#pragma once

#include <optional>
#include <string>
#include <vector>

#include "storm/core.hpp"
#include "storm/oracle.hpp"

namespace storm {

enum class Variant { tr_saa, tr_saa_resample, storm_unbiased, storm_failure, storm_logistic };

const char* to_string(Variant v);
/// Accepts "tr-saa", "tr-saa-resample", "storm-unbiased", "storm-failure", "storm-logistic".
Variant variant_from_string(const std::string& name);

enum class SetPolicy { persist_and_augment, fresh_per_iteration };

/// Sampling parameters shared by the variants. Unset limits take the
/// per-variant defaults documented on each run_* function.
struct VariantConfig {
  Variant variant = Variant::storm_unbiased;
  std::size_t p_min = 10;
  std::optional<std::size_t> p_max;
  std::optional<std::size_t> p0;
  SetPolicy set_policy = SetPolicy::persist_and_augment;
  /// Logistic runs: use the subsampled Hessian (false sets H_k = 0).
  bool use_hessian = true;
  /// Logistic runs: every sample is the full training set.
  bool full_batch = false;
  /// Cap on the model Hessian's spectral norm, if any.
  std::optional<double> hessian_cap;
  SubproblemSolver solver = dogleg;
  RunOptions run;

  static VariantConfig defaults(Variant v);
};

/// max{p_min + k, ceil(1 / delta)}.
std::size_t saa_sample_rate(std::size_t k, double delta, std::size_t p_min);
/// min{p_max, max{100 k + p0, ceil(1 / delta^2)}}.
std::size_t logistic_sample_rate(std::size_t k, double delta, std::size_t p0, std::size_t p_max);

/// Append `point` to `points`; if the set then exceeds p_max, remove the point
/// furthest from `new_center` (lowest index on ties). Returns the removed
/// index in the augmented list.
std::optional<std::size_t> augment_and_evict(std::vector<Vector>& points, const Vector& point,
                                             const Vector& new_center, std::size_t p_max);

/// Index of the point furthest from `center`, lowest index on ties.
std::size_t furthest_point(const std::vector<Vector>& points, const Vector& center);

/// Interpolation-set TR with sample averaging.
///
/// The set starts as a quadratic poised set of (n+1)(n+2)/2 points, each
/// averaged over p_min draws. Each iteration tops retained points up to p_k
/// draws (or redraws all of them when `resample`), interpolates the
/// averages, uses the stored center average as f0 and a fresh p_k average
/// at the trial point as fs, then augments the set with the trial point.
RunRecord run_tr_saa(StochasticProblem& problem, const TrustRegionConfig& cfg, bool resample,
                     const VariantConfig& vc = VariantConfig::defaults(Variant::tr_saa));

/// Fresh regression set of max(p_k, n+1) points each iteration, one draw per
/// point; f0 and fs are p_k-draw means on an independent stream.
RunRecord run_storm_unbiased(StochasticProblem& problem, const TrustRegionConfig& cfg,
                             const VariantConfig& vc = VariantConfig::defaults(Variant::storm_unbiased));

/// Persistent interpolation set whose values are all redrawn (one draw
/// each) every iteration; f0 and fs are single draws.
RunRecord run_storm_failure(StochasticProblem& problem, const TrustRegionConfig& cfg,
                            const VariantConfig& vc = VariantConfig::defaults(Variant::storm_failure));

/// Subsampled Newton trust region on a logistic loss. Budget and counts are
/// in data-point evaluations. p0 defaults to m + 2 (m features) and p_max to N.
RunRecord run_storm_logistic(LogisticProblem& problem, const TrustRegionConfig& cfg,
                             const VariantConfig& vc = VariantConfig::defaults(Variant::storm_logistic));

/// Dispatch on vc.variant for sum-of-squares problems.
RunRecord run_variant(StochasticProblem& problem, const TrustRegionConfig& cfg, const VariantConfig& vc);

struct AdagradConfig {
  double step0 = 1.0;
  std::size_t batch = 1;
  /// Data-point evaluations.
  std::size_t budget = 1000;
  std::uint64_t seed = 0;
  double epsilon = 1e-8;
  /// Record the true loss every this many evaluations (0: about 100 records).
  std::size_t record_every = 0;
};

/// Diagonal Adagrad on minibatch gradients of the logistic loss from the
/// problem's initial point. Each recorded event covers the steps since the
/// previous record.
RunRecord run_adagrad(LogisticProblem& problem, const AdagradConfig& cfg);

}  // namespace storm
