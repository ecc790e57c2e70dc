#include "doctest.h"

#include <cmath>

#include "storm/core.hpp"

using namespace storm;

namespace {

Vector v2(double a, double b) {
  Vector x(2);
  x << a, b;
  return x;
}

class Fixed : public CountedObjective {
 public:
  explicit Fixed(Vector x0, std::function<double(const Vector&)> f = {}) : x0_(std::move(x0)), f_(std::move(f)) {}
  std::size_t dimension() const override { return static_cast<std::size_t>(x0_.size()); }
  Vector initial_point() const override { return x0_; }
  std::size_t evaluations() const override { return evals; }
  std::optional<double> reference_value(const Vector& x) const override {
    if (f_) return f_(x);
    return std::nullopt;
  }
  std::size_t evals = 0;

 private:
  Vector x0_;
  std::function<double(const Vector&)> f_;
};

// Linear model with the given gradient; each build charges `cost` evaluations.
class LinearBuilder : public ModelBuilder {
 public:
  LinearBuilder(Fixed& p, Vector g, std::size_t cost = 0) : p_(p), g_(std::move(g)), cost_(cost) {}
  std::optional<QuadraticModel> build(std::size_t, const Vector& x, double) override {
    p_.evals += cost_;
    return fit_gradient_taylor(x, 0.0, g_);
  }

 private:
  Fixed& p_;
  Vector g_;
  std::size_t cost_;
};

class Injected : public Estimator {
 public:
  Injected(double f0, double fs) : f0_(f0), fs_(fs) {}
  EstimatePair estimate(std::size_t, const Vector&, const Vector&, double) override { return {f0_, fs_, 1, {}}; }

 private:
  double f0_, fs_;
};

class Degenerate : public ModelBuilder {
 public:
  std::optional<QuadraticModel> build(std::size_t, const Vector&, double) override { return std::nullopt; }
};

SmoothFunction sq() {
  return {[](const Vector& x) { return x.squaredNorm(); }, [](const Vector& x) { return Vector(2.0 * x); },
          [](const Vector& x) { return Matrix(2.0 * Matrix::Identity(x.size(), x.size())); }};
}

}  // namespace

TEST_CASE("acceptance test examples") {
  CHECK(acceptance_test(0.5, 1.0, 0.1, 0.1, 0.001));
  CHECK_FALSE(acceptance_test(0.05, 1.0, 0.1, 0.1, 0.001));
  CHECK_FALSE(acceptance_test(0.5, 1e-6, 1.0, 0.1, 0.001));
}

TEST_CASE("phi monitor examples") {
  CHECK(phi_monitor(2.0, 1.0, 0.5) == doctest::Approx(1.5));
  CHECK(phi_monitor(0.0, 0.0, 0.9) == 0.0);
  CHECK(phi_monitor(10.0, 0.5, 0.99) == doctest::Approx(9.9025));
}

TEST_CASE("config validation") {
  TrustRegionConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.gamma = 1.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.delta0 = 20.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.eta1 = 1.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
}

TEST_CASE("exact model of the squared norm converges with rho = 1") {
  Fixed p(v2(1, 1), [](const Vector& x) { return x.squaredNorm(); });
  ExactModelBuilder builder(sq());
  ExactEstimator est([](const Vector& x) { return x.squaredNorm(); });
  TrustRegionConfig cfg;
  cfg.eta2 = 0.0;
  RunOptions opt;
  opt.stop.max_iterations = 200;
  opt.stop.delta_floor = 0.0;
  const RunRecord r = run(p, builder, est, dogleg, cfg, opt);
  bool reached = false;
  for (const auto& e : r.events) {
    if (e.model_gradient_norm > 0 && e.rho) {
      CHECK(*e.rho == doctest::Approx(1.0));
      CHECK(e.success);
    }
    if ((2.0 * e.x_after).norm() < 1e-8) reached = true;
  }
  CHECK(reached);
}

TEST_CASE("injected estimates give rho = 1") {
  Fixed p(v2(0, 0));
  LinearBuilder b(p, v2(0.5, 0.0));  // decrease 0.5 at delta 1
  Injected est(1.0, 0.5);
  TrustRegionConfig cfg;
  RunOptions opt;
  opt.stop.max_iterations = 1;
  const RunRecord r = run(p, b, est, dogleg, cfg, opt);
  REQUIRE(r.events.size() == 1);
  CHECK(*r.events[0].rho == doctest::Approx(1.0));
  CHECK(r.events[0].success);
  CHECK(r.events[0].delta_after == doctest::Approx(2.0));
  CHECK(r.x_final(0) == doctest::Approx(-1.0));
}

TEST_CASE("unsuccessful iteration halves the radius and keeps x") {
  Fixed p(v2(0, 0));
  LinearBuilder b(p, v2(1.0, 0.0));
  Injected est(1.0, 2.0);
  TrustRegionConfig cfg;
  cfg.delta0 = 0.8;
  RunOptions opt;
  opt.stop.max_iterations = 1;
  const RunRecord r = run(p, b, est, dogleg, cfg, opt);
  CHECK(r.events[0].delta_after == doctest::Approx(0.4));
  CHECK_FALSE(r.events[0].success);
  CHECK(r.x_final == v2(0, 0));
}

TEST_CASE("successful radius growth is capped at delta_max") {
  Fixed p(v2(0, 0));
  LinearBuilder b(p, v2(1.0, 0.0));
  Injected est(100.0, 0.0);
  TrustRegionConfig cfg;
  cfg.delta0 = 8.0;
  RunOptions opt;
  opt.stop.max_iterations = 1;
  CHECK(run(p, b, est, dogleg, cfg, opt).delta_final == doctest::Approx(10.0));
}

TEST_CASE("degenerate models and zero decrease are flagged unsuccessful") {
  Fixed p(v2(0, 0));
  Degenerate d;
  Injected est(1.0, 0.0);
  TrustRegionConfig cfg;
  RunOptions opt;
  opt.stop.max_iterations = 2;
  const RunRecord r = run(p, d, est, dogleg, cfg, opt);
  REQUIRE(r.events.size() == 2);
  CHECK(r.events[0].flag == IterationFlag::degenerate_model);
  CHECK_FALSE(r.events[0].success);
  CHECK(r.events[1].delta_before == doctest::Approx(0.5));

  LinearBuilder flat(p, v2(0, 0));
  const RunRecord z = run(p, flat, est, dogleg, cfg, opt);
  CHECK(z.events[0].flag == IterationFlag::zero_model_decrease);
  CHECK_FALSE(z.events[0].rho.has_value());
  CHECK_FALSE(z.events[0].success);
}

TEST_CASE("run invariants: radius bounds, evaluation totals, budget") {
  Fixed p(v2(3, -2), [](const Vector& x) { return x.squaredNorm(); });
  LinearBuilder b(p, v2(1.0, 1.0), 7);
  Injected est(1.0, 0.95);
  TrustRegionConfig cfg;
  cfg.budget = 100;
  RunOptions opt;
  opt.phi_nu = 0.5;
  const RunRecord r = run(p, b, est, dogleg, cfg, opt);
  std::size_t sum = 0;
  for (const auto& e : r.events) {
    CHECK(e.delta_after > 0.0);
    CHECK(e.delta_after <= cfg.delta_max);
    if (!e.success) CHECK(e.x_after == e.x_before);
    CHECK(e.phi.has_value());
    sum += e.evals_used;
  }
  CHECK(sum == r.total_evals);
  CHECK(r.stop_reason == StopReason::budget);
  CHECK(r.total_evals >= cfg.budget);
  CHECK(r.total_evals < cfg.budget + 7);
}

TEST_CASE("the loop is deterministic") {
  auto once = [] {
    Fixed p(v2(1, 2), [](const Vector& x) { return x.squaredNorm(); });
    ExactModelBuilder b(sq());
    ExactEstimator est([](const Vector& x) { return x.squaredNorm(); });
    RunOptions opt;
    opt.stop.max_iterations = 30;
    return run(p, b, est, dogleg, TrustRegionConfig{}, opt);
  };
  const RunRecord a = once(), b = once();
  REQUIRE(a.events.size() == b.events.size());
  for (std::size_t i = 0; i < a.events.size(); ++i) CHECK(a.events[i].x_after == b.events[i].x_after);
}

TEST_CASE("target value and run-record queries") {
  Fixed p(v2(1, 1), [](const Vector& x) { return x.squaredNorm(); });
  ExactModelBuilder b(sq());
  ExactEstimator est([](const Vector& x) { return x.squaredNorm(); });
  RunOptions opt;
  opt.stop.target_value = 1e-6;
  const RunRecord r = run(p, b, est, dogleg, TrustRegionConfig{}, opt);
  CHECK(r.stop_reason == StopReason::target_reached);
  CHECK(*r.best_true_f() < 1e-6);
  CHECK(r.evals_to_reach(1e-6).has_value());
  CHECK(r.evals_to_reach(10.0) == std::optional<std::size_t>(0));
  CHECK(r.successful_iterations() >= 1);
}

TEST_CASE("finite-difference Hessian") {
  auto grad = [](const Vector& x) { return v2(3 * x(0) * x(0) + x(1), x(0) + 4 * x(1)); };
  const Matrix H = finite_difference_hessian(grad, v2(1.0, 2.0));
  CHECK(H(0, 0) == doctest::Approx(6.0).epsilon(1e-6));
  CHECK(H(0, 1) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(H(1, 1) == doctest::Approx(4.0).epsilon(1e-6));
}
