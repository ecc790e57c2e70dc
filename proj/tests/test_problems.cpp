#include "doctest.h"

#include <cmath>
#include <set>

#include "storm/problems.hpp"

using namespace storm;

namespace {

Vector fd_gradient(const ProblemSpec& p, const Vector& x, double h = 1e-6) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector a = x, b = x;
    a(i) += h;
    b(i) -= h;
    g(i) = (p.value(a) - p.value(b)) / (2 * h);
  }
  return g;
}

}  // namespace

TEST_CASE("built-in suite covers the required problems") {
  const auto suite = builtin_suite();
  CHECK(suite.size() >= 8);
  std::set<std::string> names;
  for (const auto& p : suite) names.insert(p.name);
  for (const char* n : {"rosenbrock-2", "rosenbrock-10", "powell-4", "beale-2", "freudenstein-roth-2",
                        "linear-full-rank-5", "simple-quad-2", "simple-quad-10"})
    CHECK(names.count(n) == 1);
}

TEST_CASE("every suite entry is consistent") {
  for (const auto& p : builtin_suite()) {
    CAPTURE(p.name);
    REQUIRE(p.f_star.has_value());
    REQUIRE(p.x_star.has_value());
    CHECK(static_cast<std::size_t>(p.x0.size()) == p.n);
    CHECK(static_cast<std::size_t>(p.residuals(p.x0).size()) == p.m);
    CHECK(*p.f_star <= p.value(p.x0));
    CHECK(p.value(*p.x_star) == doctest::Approx(*p.f_star));
    CHECK(fd_gradient(p, *p.x_star).norm() < 1e-8);
    CHECK(p.gradient(*p.x_star).norm() < 1e-8);
    // Jacobian against central differences of the residuals at x0.
    const Matrix J = p.jacobian(p.x0);
    for (Eigen::Index i = 0; i < p.x0.size(); ++i) {
      Vector a = p.x0, b = p.x0;
      a(i) += 1e-6;
      b(i) -= 1e-6;
      const Vector col = (p.residuals(a) - p.residuals(b)) / 2e-6;
      CHECK((col - J.col(i)).norm() <= 1e-5 * std::max(1.0, col.norm()));
    }
    const Vector g = p.gradient(p.x0);
    CHECK((g - fd_gradient(p, p.x0)).norm() <= 1e-5 * std::max(1.0, g.norm()));
  }
}

TEST_CASE("simple quadratic and Rosenbrock values") {
  const ProblemSpec q = simple_quadratic_problem(2);
  CHECK(q.value(q.x0) == 2.0);
  CHECK(*q.f_star == 0.0);
  CHECK((*q.x_star - Vector::Ones(2)).norm() == 0.0);
  const ProblemSpec r = rosenbrock_problem(2);
  CHECK(r.x0(0) == -1.2);
  CHECK(r.x0(1) == 1.0);
  CHECK(r.value(r.x0) == doctest::Approx(24.2));
  CHECK(r.value(Vector::Ones(2)) == 0.0);
  CHECK_THROWS_AS(rosenbrock_problem(3), InvalidArgument);
}

TEST_CASE("problem lookup") {
  CHECK(find_problem("beale-2").n == 2);
  CHECK_THROWS_AS(find_problem("nope"), InvalidArgument);
}
