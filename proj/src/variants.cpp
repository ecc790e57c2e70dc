#include "storm/variants.hpp"

#include <algorithm>
#include <cmath>

namespace storm {

const char* to_string(Variant v) {
  switch (v) {
    case Variant::tr_saa:
      return "tr-saa";
    case Variant::tr_saa_resample:
      return "tr-saa-resample";
    case Variant::storm_unbiased:
      return "storm-unbiased";
    case Variant::storm_failure:
      return "storm-failure";
    case Variant::storm_logistic:
      return "storm-logistic";
  }
  return "unknown";
}

Variant variant_from_string(const std::string& name) {
  for (Variant v : {Variant::tr_saa, Variant::tr_saa_resample, Variant::storm_unbiased,
                    Variant::storm_failure, Variant::storm_logistic})
    if (name == to_string(v)) return v;
  throw InvalidArgument("unknown variant '" + name + "'");
}

VariantConfig VariantConfig::defaults(Variant v) {
  VariantConfig c;
  c.variant = v;
  c.set_policy = (v == Variant::storm_unbiased || v == Variant::storm_logistic)
                     ? SetPolicy::fresh_per_iteration
                     : SetPolicy::persist_and_augment;
  return c;
}

namespace {

std::size_t ceil_positive(double x) {
  if (!std::isfinite(x)) throw InvalidArgument("sample rate is not finite");
  return static_cast<std::size_t>(std::max(0.0, std::ceil(x)));
}

}  // namespace

std::size_t saa_sample_rate(std::size_t k, double delta, std::size_t p_min) {
  if (!(delta > 0.0)) throw InvalidArgument("sample rate: delta must be positive");
  return std::max(p_min + k, ceil_positive(1.0 / delta));
}

std::size_t logistic_sample_rate(std::size_t k, double delta, std::size_t p0, std::size_t p_max) {
  if (!(delta > 0.0)) throw InvalidArgument("sample rate: delta must be positive");
  return std::min(p_max, std::max(100 * k + p0, ceil_positive(1.0 / (delta * delta))));
}

std::size_t furthest_point(const std::vector<Vector>& points, const Vector& center) {
  if (points.empty()) throw InvalidArgument("furthest_point: empty set");
  std::size_t best = 0;
  double best_d = -1.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double d = (points[i] - center).squaredNorm();
    if (d > best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

std::optional<std::size_t> augment_and_evict(std::vector<Vector>& points, const Vector& point,
                                             const Vector& new_center, std::size_t p_max) {
  points.push_back(point);
  if (points.size() <= p_max) return std::nullopt;
  const std::size_t idx = furthest_point(points, new_center);
  points.erase(points.begin() + static_cast<std::ptrdiff_t>(idx));
  return idx;
}

namespace {

struct Streams {
  Rng geometry;
  Rng model;
  Rng estimates;

  explicit Streams(std::uint64_t seed) {
    const Rng base(seed);
    geometry = base.derive(1);
    model = base.derive(2);
    estimates = base.derive(3);
  }

  void watch(PhaseTrace* trace) const {
    if (!trace) return;
    trace->watch(&geometry);
    trace->watch(&model);
    trace->watch(&estimates);
  }
};

// Interpolation when the count matches a full basis, least squares above it,
// linear least squares in between. Points are scaled by their spread.
QuadraticModel fit_point_cloud(const std::vector<Vector>& points, const std::vector<double>& values,
                               const Vector& center, double delta) {
  const auto n = static_cast<std::size_t>(center.size());
  const std::size_t q = basis_size(n, 2);
  const std::size_t l = basis_size(n, 1);
  double spread = 0.0;
  for (const auto& y : points) spread = std::max(spread, (y - center).norm());
  if (!(spread > 0.0)) throw DegenerateGeometry("sample set collapsed to its center");
  spread = std::max(spread, delta);
  if (points.size() == q || points.size() == l)
    return fit_interpolation(points, values, center, spread);
  if (points.size() > q) return fit_regression(points, values, center, spread, 2);
  if (points.size() > l) return fit_regression(points, values, center, spread, 1);
  throw DegenerateGeometry("too few sample points for a linear model");
}

void apply_cap(QuadraticModel& m, const VariantConfig& vc) {
  if (vc.hessian_cap) cap_hessian(m, *vc.hessian_cap);
}

// Initial persistent set of `size` points with the linear part first:
// center, +q_i, -q_i, then the cross points.
std::vector<Vector> initial_persistent_set(const Vector& center, double delta, std::size_t size,
                                           Rng& rng) {
  const auto n = static_cast<std::size_t>(center.size());
  PoisedSet full = make_poised_set(center, delta, SetKind::interpolation_quadratic, rng);
  std::vector<Vector> ordered;
  ordered.reserve(full.points.size());
  ordered.push_back(full.points[0]);
  for (std::size_t i = 0; i < n; ++i) ordered.push_back(full.points[1 + 2 * i]);
  for (std::size_t i = 0; i < n; ++i) ordered.push_back(full.points[2 + 2 * i]);
  for (std::size_t i = 1 + 2 * n; i < full.points.size(); ++i) ordered.push_back(full.points[i]);
  ordered.resize(std::min(size, ordered.size()));
  return ordered;
}

// A persistent sample set with running means of the draws at each point.
struct SetEntry {
  Vector y;
  double mean = 0.0;
  std::size_t count = 0;

  void add(double v) { mean += (v - mean) / static_cast<double>(++count); }
};

struct PersistentSet {
  std::vector<SetEntry> entries;
  std::size_t p_max = 0;
  std::size_t initial_size = 0;
  bool stale = true;  // regenerate at the next build

  std::vector<Vector> points() const {
    std::vector<Vector> pts;
    pts.reserve(entries.size());
    for (const auto& e : entries) pts.push_back(e.y);
    return pts;
  }

  void regenerate(const Vector& x, double delta, Rng& geometry) {
    entries.clear();
    for (auto& y : initial_persistent_set(x, delta, initial_size, geometry)) entries.push_back({y, 0.0, 0});
    stale = false;
  }

  std::optional<std::size_t> find(const Vector& x) const {
    for (std::size_t i = 0; i < entries.size(); ++i)
      if (entries[i].y == x) return i;
    return std::nullopt;
  }

  // Set update after the radius update.
  void update(const IterationOutcome& out) {
    if (stale || !out.trial) return;
    if (find(*out.trial)) return;  // a zero step adds nothing new
    std::vector<Vector> pts = points();
    const auto evicted = augment_and_evict(pts, *out.trial, *out.x_after, p_max);
    entries.push_back({*out.trial, 0.0, 0});
    if (evicted) entries.erase(entries.begin() + static_cast<std::ptrdiff_t>(*evicted));
  }
};

// Values shared between a builder and its estimator within one iteration.
struct SharedState {
  std::size_t p_k = 1;
  double f0 = 0.0;
};

// TR-SAA ----------------------------------------------------------------

class SaaBuilder : public ModelBuilder {
 public:
  SaaBuilder(StochasticProblem& problem, Streams& streams, const VariantConfig& vc, bool resample,
             SharedState& shared)
      : problem_(problem), streams_(streams), vc_(vc), resample_(resample), shared_(shared) {
    const std::size_t q = basis_size(problem.dimension(), 2);
    set_.p_max = vc.p_max.value_or(q);
    set_.initial_size = std::min(vc.p0.value_or(q), set_.p_max);
  }

  std::size_t planned_evaluations(std::size_t k, double delta) const override {
    const std::size_t p = saa_sample_rate(k, delta, vc_.p_min);
    if (set_.stale) return set_.initial_size * p + p;
    std::size_t total = p;
    for (const auto& e : set_.entries) total += resample_ ? p : p - std::min(p, e.count);
    return total;
  }

  std::optional<QuadraticModel> build(std::size_t k, const Vector& x, double delta) override {
    PhaseTrace* trace = vc_.run.trace;
    const std::size_t p = saa_sample_rate(k, delta, vc_.p_min);
    shared_.p_k = p;
    mark_phase(trace, k, Phase::sample_rate, problem_.evaluations());

    if (set_.stale || !set_.find(x)) set_.regenerate(x, delta, streams_.geometry);
    for (auto& e : set_.entries) {
      if (resample_) {
        e.mean = 0.0;
        e.count = 0;
      }
      while (e.count < p) e.add(problem_.evaluate(e.y, streams_.model));
    }
    mark_phase(trace, k, Phase::value_update, problem_.evaluations());

    shared_.f0 = set_.entries[*set_.find(x)].mean;
    std::vector<double> values;
    values.reserve(set_.entries.size());
    for (const auto& e : set_.entries) values.push_back(e.mean);
    try {
      QuadraticModel m = fit_point_cloud(set_.points(), values, x, delta);
      apply_cap(m, vc_);
      return m;
    } catch (const DegenerateGeometry&) {
      set_.stale = true;
      return std::nullopt;
    }
  }

  void finish_iteration(const IterationOutcome& out) override {
    set_.update(out);
    mark_phase(vc_.run.trace, out.k, Phase::set_update, problem_.evaluations());
  }

 private:
  StochasticProblem& problem_;
  Streams& streams_;
  const VariantConfig& vc_;
  bool resample_;
  SharedState& shared_;
  PersistentSet set_;
};

class SaaEstimator : public Estimator {
 public:
  SaaEstimator(StochasticProblem& problem, Streams& streams, SharedState& shared)
      : problem_(problem), streams_(streams), shared_(shared) {}

  EstimatePair estimate(std::size_t, const Vector&, const Vector& trial, double) override {
    EstimatePair e;
    e.f0 = shared_.f0;
    e.fs = averaged_estimate(problem_, trial, shared_.p_k, streams_.estimates);
    e.samples_used = shared_.p_k;
    return e;
  }

 private:
  StochasticProblem& problem_;
  Streams& streams_;
  SharedState& shared_;
};

// STORM, unbiased noise -------------------------------------------------

std::size_t regression_size(std::size_t p, std::size_t n) { return std::max(p, n + 1); }

class RegressionBuilder : public ModelBuilder {
 public:
  RegressionBuilder(StochasticProblem& problem, Streams& streams, const VariantConfig& vc,
                    SharedState& shared)
      : problem_(problem), streams_(streams), vc_(vc), shared_(shared) {}

  std::size_t planned_evaluations(std::size_t k, double delta) const override {
    return regression_size(saa_sample_rate(k, delta, vc_.p_min), problem_.dimension());
  }

  std::optional<QuadraticModel> build(std::size_t k, const Vector& x, double delta) override {
    PhaseTrace* trace = vc_.run.trace;
    const std::size_t n = problem_.dimension();
    const std::size_t p = saa_sample_rate(k, delta, vc_.p_min);
    shared_.p_k = p;
    mark_phase(trace, k, Phase::sample_rate, problem_.evaluations());

    const PoisedSet set =
        make_poised_set(x, delta, SetKind::regression, streams_.geometry, regression_size(p, n));
    mark_phase(trace, k, Phase::regression_draw, problem_.evaluations());

    std::vector<double> values;
    values.reserve(set.points.size());
    for (const auto& y : set.points) values.push_back(problem_.evaluate(y, streams_.model));
    mark_phase(trace, k, Phase::value_update, problem_.evaluations());

    const int degree = set.points.size() >= basis_size(n, 2) ? 2 : 1;
    try {
      QuadraticModel m = fit_regression(set, values, degree);
      apply_cap(m, vc_);
      return m;
    } catch (const DegenerateGeometry&) {
      return std::nullopt;
    }
  }

 private:
  StochasticProblem& problem_;
  Streams& streams_;
  const VariantConfig& vc_;
  SharedState& shared_;
};

class MeanEstimator : public Estimator {
 public:
  MeanEstimator(StochasticProblem& problem, Streams& streams, const VariantConfig& vc)
      : problem_(problem), streams_(streams), vc_(vc) {}

  std::size_t planned_evaluations(std::size_t k, double delta) const override {
    return 2 * saa_sample_rate(k, delta, vc_.p_min);
  }

  EstimatePair estimate(std::size_t k, const Vector& x, const Vector& trial, double delta) override {
    const std::size_t p = saa_sample_rate(k, delta, vc_.p_min);
    EstimatePair e;
    e.f0 = averaged_estimate(problem_, x, p, streams_.estimates);
    e.fs = averaged_estimate(problem_, trial, p, streams_.estimates);
    e.samples_used = p;
    return e;
  }

 private:
  StochasticProblem& problem_;
  Streams& streams_;
  const VariantConfig& vc_;
};

// STORM, computation failures -------------------------------------------

class AfreshBuilder : public ModelBuilder {
 public:
  AfreshBuilder(StochasticProblem& problem, Streams& streams, const VariantConfig& vc)
      : problem_(problem), streams_(streams), vc_(vc) {
    const std::size_t q = basis_size(problem.dimension(), 2);
    set_.p_max = vc.p_max.value_or(q);
    set_.initial_size = std::clamp(vc.p0.value_or(q), problem.dimension() + 1, set_.p_max);
  }

  std::size_t planned_evaluations(std::size_t, double) const override {
    return set_.stale ? set_.initial_size : set_.entries.size();
  }

  std::optional<QuadraticModel> build(std::size_t k, const Vector& x, double delta) override {
    if (set_.stale || !set_.find(x)) set_.regenerate(x, delta, streams_.geometry);
    std::vector<double> values;
    values.reserve(set_.entries.size());
    for (const auto& e : set_.entries) values.push_back(problem_.evaluate(e.y, streams_.model));
    mark_phase(vc_.run.trace, k, Phase::value_update, problem_.evaluations());
    try {
      QuadraticModel m = fit_point_cloud(set_.points(), values, x, delta);
      apply_cap(m, vc_);
      return m;
    } catch (const DegenerateGeometry&) {
      set_.stale = true;
      return std::nullopt;
    }
  }

  void finish_iteration(const IterationOutcome& out) override {
    set_.update(out);
    mark_phase(vc_.run.trace, out.k, Phase::set_update, problem_.evaluations());
  }

 private:
  StochasticProblem& problem_;
  Streams& streams_;
  const VariantConfig& vc_;
  PersistentSet set_;
};

class SingleDrawEstimator : public Estimator {
 public:
  SingleDrawEstimator(StochasticProblem& problem, Streams& streams)
      : problem_(problem), streams_(streams) {}

  std::size_t planned_evaluations(std::size_t, double) const override { return 2; }

  EstimatePair estimate(std::size_t, const Vector& x, const Vector& trial, double) override {
    EstimatePair e;
    e.f0 = problem_.evaluate(x, streams_.estimates);
    e.fs = problem_.evaluate(trial, streams_.estimates);
    return e;
  }

 private:
  StochasticProblem& problem_;
  Streams& streams_;
};

// STORM, logistic loss ----------------------------------------------------

struct LogisticRate {
  std::size_t p0;
  std::size_t p_max;
  bool full_batch;

  std::size_t operator()(std::size_t k, double delta) const {
    return full_batch ? p_max : logistic_sample_rate(k, delta, p0, p_max);
  }
};

class SubsampledNewtonBuilder : public ModelBuilder {
 public:
  SubsampledNewtonBuilder(LogisticProblem& problem, Streams& streams, const VariantConfig& vc,
                          LogisticRate rate)
      : problem_(problem), streams_(streams), vc_(vc), rate_(rate) {}

  std::size_t planned_evaluations(std::size_t k, double delta) const override { return rate_(k, delta); }

  std::optional<QuadraticModel> build(std::size_t k, const Vector& x, double delta) override {
    PhaseTrace* trace = vc_.run.trace;
    const std::size_t p = rate_(k, delta);
    mark_phase(trace, k, Phase::sample_rate, problem_.evaluations());
    const auto sample = problem_.draw_sample(p, streams_.model);
    const LogisticEvaluation ev = problem_.evaluate(sample, x, vc_.use_hessian);
    const auto d = x.size();
    const Matrix B = vc_.use_hessian ? ev.hessian : Matrix::Zero(d, d);
    QuadraticModel m = QuadraticModel::from_half_form(x, 0.0, ev.gradient, B);
    apply_cap(m, vc_);
    return m;
  }

 private:
  LogisticProblem& problem_;
  Streams& streams_;
  const VariantConfig& vc_;
  LogisticRate rate_;
};

class SubsampledLossEstimator : public Estimator {
 public:
  SubsampledLossEstimator(LogisticProblem& problem, Streams& streams, LogisticRate rate)
      : problem_(problem), streams_(streams), rate_(rate) {}

  std::size_t planned_evaluations(std::size_t k, double delta) const override {
    return 2 * rate_(k, delta);
  }

  EstimatePair estimate(std::size_t k, const Vector& x, const Vector& trial, double delta) override {
    const std::size_t p = rate_(k, delta);
    const auto s0 = problem_.draw_sample(p, streams_.estimates);
    const auto ss = problem_.draw_sample(p, streams_.estimates);
    EstimatePair e;
    e.f0 = problem_.evaluate(s0, x, false).loss;
    e.fs = problem_.evaluate(ss, trial, false).loss;
    e.samples_used = s0.size();
    return e;
  }

 private:
  LogisticProblem& problem_;
  Streams& streams_;
  LogisticRate rate_;
};

}  // namespace

RunRecord run_tr_saa(StochasticProblem& problem, const TrustRegionConfig& cfg, bool resample,
                     const VariantConfig& vc) {
  Streams streams(cfg.seed);
  streams.watch(vc.run.trace);
  SharedState shared;
  SaaBuilder builder(problem, streams, vc, resample, shared);
  SaaEstimator estimator(problem, streams, shared);
  return run(problem, builder, estimator, vc.solver, cfg, vc.run);
}

RunRecord run_storm_unbiased(StochasticProblem& problem, const TrustRegionConfig& cfg,
                             const VariantConfig& vc) {
  Streams streams(cfg.seed);
  streams.watch(vc.run.trace);
  SharedState shared;
  RegressionBuilder builder(problem, streams, vc, shared);
  MeanEstimator estimator(problem, streams, vc);
  return run(problem, builder, estimator, vc.solver, cfg, vc.run);
}

RunRecord run_storm_failure(StochasticProblem& problem, const TrustRegionConfig& cfg,
                            const VariantConfig& vc) {
  Streams streams(cfg.seed);
  streams.watch(vc.run.trace);
  AfreshBuilder builder(problem, streams, vc);
  SingleDrawEstimator estimator(problem, streams);
  return run(problem, builder, estimator, vc.solver, cfg, vc.run);
}

RunRecord run_storm_logistic(LogisticProblem& problem, const TrustRegionConfig& cfg,
                             const VariantConfig& vc) {
  Streams streams(cfg.seed);
  streams.watch(vc.run.trace);
  const std::size_t N = problem.data().size();
  LogisticRate rate{vc.p0.value_or(problem.data().dimension() + 2), std::min(vc.p_max.value_or(N), N),
                    vc.full_batch};
  if (rate.p0 == 0) throw InvalidArgument("storm-logistic: p0 must be positive");
  SubsampledNewtonBuilder builder(problem, streams, vc, rate);
  SubsampledLossEstimator estimator(problem, streams, rate);
  return run(problem, builder, estimator, vc.solver, cfg, vc.run);
}

RunRecord run_variant(StochasticProblem& problem, const TrustRegionConfig& cfg, const VariantConfig& vc) {
  switch (vc.variant) {
    case Variant::tr_saa:
      return run_tr_saa(problem, cfg, false, vc);
    case Variant::tr_saa_resample:
      return run_tr_saa(problem, cfg, true, vc);
    case Variant::storm_unbiased:
      return run_storm_unbiased(problem, cfg, vc);
    case Variant::storm_failure:
      return run_storm_failure(problem, cfg, vc);
    case Variant::storm_logistic:
      break;
  }
  throw InvalidArgument("storm-logistic runs on a dataset, not a sum-of-squares problem");
}

RunRecord run_adagrad(LogisticProblem& problem, const AdagradConfig& cfg) {
  if (!(cfg.step0 > 0.0)) throw InvalidArgument("adagrad: step0 must be positive");
  if (cfg.batch == 0) throw InvalidArgument("adagrad: batch must be positive");
  const std::size_t record_every = cfg.record_every ? cfg.record_every : std::max<std::size_t>(1, cfg.budget / 100);

  Rng rng = Rng(cfg.seed).derive(4);
  RunRecord record;
  Vector x = problem.initial_point();
  Vector accum = Vector::Zero(x.size());
  record.x0 = x;
  record.true_f_x0 = problem.full_loss(x);

  const std::size_t start = problem.evaluations();
  std::size_t last_record = start;
  IterationEvent ev;
  ev.x_before = x;
  ev.true_f_before = record.true_f_x0;
  std::size_t k = 0;
  while (problem.evaluations() - start + cfg.batch <= cfg.budget) {
    const auto sample = problem.draw_sample(cfg.batch, rng);
    const Vector g = problem.evaluate(sample, x, false).gradient;
    accum.array() += g.array().square();
    x.array() -= cfg.step0 * g.array() / (accum.array().sqrt() + cfg.epsilon);

    const std::size_t now = problem.evaluations();
    const bool last = now - start + cfg.batch > cfg.budget;
    if (now - last_record >= record_every || last) {
      ev.k = k++;
      ev.x_after = x;
      ev.evals_used = now - last_record;
      ev.true_f_after = problem.full_loss(x);
      ev.success = true;
      record.events.push_back(ev);
      ev.x_before = x;
      ev.true_f_before = record.events.back().true_f_after;
      last_record = now;
    }
  }
  record.x_final = x;
  record.total_evals = problem.evaluations() - start;
  record.stop_reason = StopReason::budget;
  return record;
}

}  // namespace storm
