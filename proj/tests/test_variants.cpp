#include "doctest.h"

#include <cmath>

#include "storm/problems.hpp"
#include "storm/variants.hpp"

using namespace storm;

namespace {

TrustRegionConfig config(std::size_t budget, std::uint64_t seed) {
  TrustRegionConfig cfg;
  cfg.budget = budget;
  cfg.seed = seed;
  return cfg;
}

std::vector<std::vector<Phase>> phases_by_iteration(const PhaseTrace& trace) {
  std::vector<std::vector<Phase>> out;
  for (const auto& r : trace.records()) {
    if (r.k >= out.size()) out.resize(r.k + 1);
    out[r.k].push_back(r.phase);
  }
  return out;
}

// Deterministic trust-region Newton on the full logistic loss.
class FullNewtonBuilder : public ModelBuilder {
 public:
  explicit FullNewtonBuilder(const LogisticProblem& p) : p_(p) {}
  std::optional<QuadraticModel> build(std::size_t, const Vector& x, double) override {
    const LogisticEvaluation e = p_.full_evaluation(x, true);
    return QuadraticModel::from_half_form(x, 0.0, e.gradient, e.hessian);
  }

 private:
  const LogisticProblem& p_;
};

}  // namespace

TEST_CASE("sample-rate rules") {
  CHECK(saa_sample_rate(0, 1.0, 10) == 10);
  CHECK(saa_sample_rate(5, 0.01, 10) == 100);
  CHECK(saa_sample_rate(7, 1.0, 10) == 17);
  CHECK(logistic_sample_rate(0, 1.0, 12, 1900) == 12);
  CHECK(logistic_sample_rate(0, 0.01, 12, 20000) == 10000);
  CHECK(logistic_sample_rate(0, 0.01, 12, 1900) == 1900);
  CHECK(logistic_sample_rate(3, 1.0, 12, 1900) == 312);
}

TEST_CASE("variant names round-trip") {
  for (Variant v : {Variant::tr_saa, Variant::tr_saa_resample, Variant::storm_unbiased, Variant::storm_failure,
                    Variant::storm_logistic})
    CHECK(variant_from_string(to_string(v)) == v);
  CHECK_THROWS_AS(variant_from_string("storm"), InvalidArgument);
}

TEST_CASE("augmentation evicts the furthest point, lowest index on ties") {
  Rng rng(1);
  for (int t = 0; t < 200; ++t) {
    std::vector<Vector> pts;
    const std::size_t p_max = 3 + rng.index(5);
    for (std::size_t i = 0; i < p_max; ++i) pts.push_back(Vector::NullaryExpr(2, [&] { return rng.normal(); }));
    const Vector trial = Vector::NullaryExpr(2, [&] { return rng.normal(); });
    const Vector center = rng.uniform() < 0.5 ? trial : pts[0];
    std::vector<Vector> augmented = pts;
    augmented.push_back(trial);
    double far = -1;
    std::size_t expect = 0;
    for (std::size_t i = 0; i < augmented.size(); ++i) {
      const double d = (augmented[i] - center).norm();
      if (d > far) {
        far = d;
        expect = i;
      }
    }
    const auto evicted = augment_and_evict(pts, trial, center, p_max);
    REQUIRE(evicted.has_value());
    CHECK(*evicted == expect);
    CHECK(pts.size() == p_max);
  }
  std::vector<Vector> tie = {Vector::Zero(1), Vector::Constant(1, 1.0), Vector::Constant(1, -1.0)};
  CHECK(furthest_point(tie, Vector::Zero(1)) == 1);
  std::vector<Vector> small = {Vector::Zero(1)};
  CHECK_FALSE(augment_and_evict(small, Vector::Ones(1), Vector::Ones(1), 3).has_value());
  CHECK(small.size() == 2);
}

TEST_CASE("TR-SAA follows its listing order") {
  StochasticProblem p(simple_quadratic_problem(2), NoiseModel::multiplicative(1e-3));
  PhaseTrace trace;
  VariantConfig vc = VariantConfig::defaults(Variant::tr_saa);
  vc.run.trace = &trace;
  vc.run.stop.max_iterations = 20;
  const RunRecord r = run_tr_saa(p, config(100000, 3), false, vc);
  const auto it = phases_by_iteration(trace);
  const std::vector<Phase> expect = {Phase::sample_rate, Phase::value_update, Phase::model,     Phase::step,
                                     Phase::estimates,   Phase::acceptance,   Phase::radius, Phase::set_update};
  for (std::size_t k = 0; k < r.events.size(); ++k)
    if (r.events[k].flag == IterationFlag::none) CHECK(it[k] == expect);
}

TEST_CASE("STORM-unbiased draws the regression set first and keeps model and estimate draws apart") {
  StochasticProblem p(simple_quadratic_problem(2), NoiseModel::multiplicative(1e-3));
  PhaseTrace trace;
  VariantConfig vc = VariantConfig::defaults(Variant::storm_unbiased);
  vc.run.trace = &trace;
  vc.run.stop.max_iterations = 20;
  const RunRecord r = run_storm_unbiased(p, config(100000, 4), vc);
  REQUIRE(trace.stream_count() == 3);
  const auto& recs = trace.records();
  const auto it = phases_by_iteration(trace);
  for (std::size_t k = 0; k < r.events.size(); ++k) {
    if (r.events[k].flag != IterationFlag::none) continue;
    CHECK(it[k] == std::vector<Phase>{Phase::sample_rate, Phase::regression_draw, Phase::value_update, Phase::model,
                                      Phase::step, Phase::estimates, Phase::acceptance, Phase::radius});
  }
  // Stream 0 geometry, 1 model values, 2 estimates.
  for (std::size_t i = 1; i < recs.size(); ++i) {
    const auto& a = recs[i - 1];
    const auto& b = recs[i];
    if (b.k != a.k) continue;
    if (b.phase == Phase::regression_draw || b.phase == Phase::value_update)
      CHECK(b.stream_draws[2] == a.stream_draws[2]);
    if (b.phase == Phase::estimates) {
      CHECK(b.stream_draws[0] == a.stream_draws[0]);
      CHECK(b.stream_draws[1] == a.stream_draws[1]);
    }
  }
}

TEST_CASE("STORM-failure recomputes values afresh and then updates the set") {
  StochasticProblem p(simple_quadratic_problem(2), NoiseModel::failure(0.01));
  PhaseTrace trace;
  VariantConfig vc = VariantConfig::defaults(Variant::storm_failure);
  vc.run.trace = &trace;
  vc.run.stop.max_iterations = 20;
  const RunRecord r = run_storm_failure(p, config(100000, 5), vc);
  const auto it = phases_by_iteration(trace);
  for (std::size_t k = 0; k < r.events.size(); ++k) {
    if (r.events[k].flag != IterationFlag::none) continue;
    CHECK(it[k] == std::vector<Phase>{Phase::value_update, Phase::model, Phase::step, Phase::estimates,
                                      Phase::acceptance, Phase::radius, Phase::set_update});
    // Six set values plus two estimates, every iteration.
    CHECK(r.events[k].evals_used == 8);
  }
}

TEST_CASE("noise-free TR-SAA and STORM-failure match the same interpolation TR") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    VariantConfig vs = VariantConfig::defaults(Variant::tr_saa);
    vs.run.stop.max_iterations = 25;
    VariantConfig vf = VariantConfig::defaults(Variant::storm_failure);
    vf.run.stop.max_iterations = 25;
    StochasticProblem a(rosenbrock_problem(2), NoiseModel::none());
    StochasticProblem b(rosenbrock_problem(2), NoiseModel::failure(0.0));
    StochasticProblem c(rosenbrock_problem(2), NoiseModel::none());
    const RunRecord ra = run_tr_saa(a, config(10000000, seed), false, vs);
    const RunRecord rb = run_storm_failure(b, config(10000000, seed), vf);
    const RunRecord rc = run_storm_failure(c, config(10000000, seed), vf);
    REQUIRE(ra.events.size() == rb.events.size());
    REQUIRE(rb.events.size() == rc.events.size());
    for (std::size_t k = 0; k < ra.events.size(); ++k) {
      CHECK((ra.events[k].x_after - rb.events[k].x_after).norm() <= 1e-12);
      CHECK(rb.events[k].x_after == rc.events[k].x_after);
      CHECK(rb.events[k].delta_after == rc.events[k].delta_after);
    }
  }
}

TEST_CASE("a corrupted estimate only affects one acceptance decision") {
  // With sigma = 1 every small component fails, so from a point near the
  // optimum the estimates are wildly wrong; x, delta and the set are the only state.
  ProblemSpec spec = simple_quadratic_problem(2);
  spec.x0 = Vector::Constant(2, 0.95);
  StochasticProblem p(spec, NoiseModel::failure(1.0));
  VariantConfig vc = VariantConfig::defaults(Variant::storm_failure);
  vc.run.stop.max_iterations = 5;
  const RunRecord r = run_storm_failure(p, config(100000, 6), vc);
  for (const auto& e : r.events) {
    CHECK(e.delta_after > 0.0);
    if (!e.success) CHECK(e.x_after == e.x_before);
  }
}

TEST_CASE("noiseless STORM-unbiased solves the simple quadratic") {
  int solved = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    StochasticProblem p(simple_quadratic_problem(2), NoiseModel::none());
    const RunRecord r = run_storm_unbiased(p, config(3000, seed));
    if (*r.best_true_f() < 1e-5) ++solved;
  }
  CHECK(solved >= 9);
}

TEST_CASE("budget compliance and evaluation totals") {
  for (Variant v : {Variant::tr_saa, Variant::tr_saa_resample, Variant::storm_unbiased, Variant::storm_failure}) {
    StochasticProblem p(beale_problem(), v == Variant::storm_failure ? NoiseModel::failure(0.01)
                                                                     : NoiseModel::multiplicative(1e-3));
    VariantConfig vc = VariantConfig::defaults(v);
    vc.variant = v;
    const RunRecord r = run_variant(p, config(3000, 7), vc);
    std::size_t sum = 0, largest = 0;
    for (const auto& e : r.events) {
      sum += e.evals_used;
      largest = std::max(largest, e.evals_used);
    }
    CAPTURE(to_string(v));
    CHECK(sum == r.total_evals);
    CHECK(r.total_evals == p.evaluations());
    CHECK(r.total_evals <= 3000 + largest);
  }
}

TEST_CASE("solved fraction grows with the failure success probability") {
  const ProblemSpec spec = simple_quadratic_problem(2);
  double previous = -1.0;
  for (double ps : {0.9, 0.95, 0.99, 0.999, 1.0}) {
    int solved = 0;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      StochasticProblem p(spec, NoiseModel::failure(sigma_from_success_probability(ps, spec.m)));
      const RunRecord r = run_storm_failure(p, config(3000, seed));
      if (*r.best_true_f() < 1e-5) ++solved;
    }
    const double frac = solved / 30.0;
    CAPTURE(ps);
    CHECK(frac >= previous);
    previous = frac;
  }
  CHECK(previous == 1.0);
}

TEST_CASE("full-batch STORM-logistic is trust-region Newton on the true loss") {
  LogisticProblem p(make_synthetic_dataset(20, 3, 0.5, 8), 1e-4);
  VariantConfig vc = VariantConfig::defaults(Variant::storm_logistic);
  vc.full_batch = true;
  vc.run.stop.max_iterations = 15;
  const RunRecord r = run_storm_logistic(p, config(1000000, 9), vc);

  LogisticProblem q(make_synthetic_dataset(20, 3, 0.5, 8), 1e-4);
  FullNewtonBuilder builder(q);
  ExactEstimator est([&q](const Vector& x) { return q.full_loss(x); });
  RunOptions opt;
  opt.stop.max_iterations = 15;
  const RunRecord ref = run(q, builder, est, dogleg, config(1000000, 9), opt);
  REQUIRE(r.events.size() == ref.events.size());
  for (std::size_t k = 0; k < r.events.size(); ++k)
    CHECK((r.events[k].x_after - ref.events[k].x_after).norm() <= 1e-10);
  CHECK(r.events[0].evals_used == 60);
}

TEST_CASE("STORM-logistic sample sizes and Hessian-free mode") {
  LogisticProblem p(make_synthetic_dataset(500, 4, 0.5, 10), 1e-4);
  VariantConfig vc = VariantConfig::defaults(Variant::storm_logistic);
  vc.run.stop.max_iterations = 1;
  const RunRecord r = run_storm_logistic(p, config(100000, 11), vc);
  CHECK(r.events[0].evals_used == 3 * 6);  // p0 = m + 2 for model and both estimates

  vc.use_hessian = false;
  vc.run.stop.max_iterations = 10;
  LogisticProblem q(make_synthetic_dataset(500, 4, 0.5, 10), 1e-4);
  const RunRecord h = run_storm_logistic(q, config(100000, 11), vc);
  CHECK(*h.best_true_f() < std::log(2.0));
}

TEST_CASE("Adagrad") {
  // One full-batch step moves each coordinate by about -step0 * sign(g).
  const Dataset data = make_synthetic_dataset(40, 3, 0.2, 12);
  LogisticProblem p(data, 0.0);
  const Vector g = p.full_evaluation(p.initial_point(), false).gradient;
  AdagradConfig ac;
  ac.batch = 40;
  ac.budget = 40;
  ac.step0 = 0.5;
  const RunRecord r = run_adagrad(p, ac);
  REQUIRE(r.events.size() == 1);
  for (int i = 0; i < 4; ++i) CHECK(r.x_final(i) == doctest::Approx(-0.5 * g(i) / (std::abs(g(i)) + 1e-8)));

  Dataset flat;
  flat.features = Matrix::Ones(2, 1);
  flat.labels = (Vector(2) << 1.0, -1.0).finished();
  LogisticProblem z(flat, 0.0);
  ac.batch = 2;
  ac.budget = 10;
  CHECK(run_adagrad(z, ac).x_final.norm() == 0.0);

  LogisticProblem sep(make_synthetic_dataset(200, 2, 0.0, 13), 1e-4);
  AdagradConfig one_pass;
  one_pass.budget = 200;
  const RunRecord op = run_adagrad(sep, one_pass);
  CHECK(*op.events.back().true_f_after < std::log(2.0));
  CHECK(op.total_evals == 200);
}
