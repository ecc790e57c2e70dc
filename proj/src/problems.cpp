#include "storm/problems.hpp"

#include <cmath>

namespace storm {

ProblemSpec rosenbrock_problem(std::size_t n) {
  if (n < 2 || n % 2 != 0) throw InvalidArgument("rosenbrock: n must be even and >= 2");
  ProblemSpec p;
  p.name = "rosenbrock-" + std::to_string(n);
  p.n = n;
  p.m = n;
  const auto N = static_cast<Eigen::Index>(n);
  p.residuals = [N](const Vector& x) {
    Vector r(N);
    for (Eigen::Index i = 0; i < N; i += 2) {
      r(i) = 10.0 * (x(i + 1) - x(i) * x(i));
      r(i + 1) = 1.0 - x(i);
    }
    return r;
  };
  p.jacobian = [N](const Vector& x) {
    Matrix J = Matrix::Zero(N, N);
    for (Eigen::Index i = 0; i < N; i += 2) {
      J(i, i) = -20.0 * x(i);
      J(i, i + 1) = 10.0;
      J(i + 1, i) = -1.0;
    }
    return J;
  };
  p.x0.resize(N);
  for (Eigen::Index i = 0; i < N; i += 2) {
    p.x0(i) = -1.2;
    p.x0(i + 1) = 1.0;
  }
  p.f_star = 0.0;
  p.x_star = Vector::Ones(N);
  return p;
}

ProblemSpec powell_singular_problem() {
  ProblemSpec p;
  p.name = "powell-4";
  p.n = 4;
  p.m = 4;
  const double s5 = std::sqrt(5.0);
  const double s10 = std::sqrt(10.0);
  p.residuals = [=](const Vector& x) {
    Vector r(4);
    r << x(0) + 10.0 * x(1), s5 * (x(2) - x(3)), std::pow(x(1) - 2.0 * x(2), 2),
        s10 * std::pow(x(0) - x(3), 2);
    return r;
  };
  p.jacobian = [=](const Vector& x) {
    Matrix J = Matrix::Zero(4, 4);
    J(0, 0) = 1.0;
    J(0, 1) = 10.0;
    J(1, 2) = s5;
    J(1, 3) = -s5;
    const double a = 2.0 * (x(1) - 2.0 * x(2));
    J(2, 1) = a;
    J(2, 2) = -2.0 * a;
    const double b = 2.0 * s10 * (x(0) - x(3));
    J(3, 0) = b;
    J(3, 3) = -b;
    return J;
  };
  p.x0 = Vector(4);
  p.x0 << 3.0, -1.0, 0.0, 1.0;
  p.f_star = 0.0;
  p.x_star = Vector::Zero(4);
  return p;
}

ProblemSpec beale_problem() {
  ProblemSpec p;
  p.name = "beale-2";
  p.n = 2;
  p.m = 3;
  static constexpr double y[3] = {1.5, 2.25, 2.625};
  p.residuals = [](const Vector& x) {
    Vector r(3);
    for (int i = 0; i < 3; ++i) r(i) = y[i] - x(0) * (1.0 - std::pow(x(1), i + 1));
    return r;
  };
  p.jacobian = [](const Vector& x) {
    Matrix J(3, 2);
    for (int i = 0; i < 3; ++i) {
      J(i, 0) = -(1.0 - std::pow(x(1), i + 1));
      J(i, 1) = x(0) * (i + 1) * std::pow(x(1), i);
    }
    return J;
  };
  p.x0 = Vector::Ones(2);
  p.f_star = 0.0;
  p.x_star = Vector(2);
  *p.x_star << 3.0, 0.5;
  return p;
}

ProblemSpec freudenstein_roth_problem() {
  ProblemSpec p;
  p.name = "freudenstein-roth-2";
  p.n = 2;
  p.m = 2;
  p.residuals = [](const Vector& x) {
    Vector r(2);
    r << -13.0 + x(0) + ((5.0 - x(1)) * x(1) - 2.0) * x(1),
        -29.0 + x(0) + ((x(1) + 1.0) * x(1) - 14.0) * x(1);
    return r;
  };
  p.jacobian = [](const Vector& x) {
    Matrix J(2, 2);
    J << 1.0, 10.0 * x(1) - 3.0 * x(1) * x(1) - 2.0, 1.0, 3.0 * x(1) * x(1) + 2.0 * x(1) - 14.0;
    return J;
  };
  p.x0 = Vector(2);
  p.x0 << 0.5, -2.0;
  p.f_star = 0.0;
  p.x_star = Vector(2);
  *p.x_star << 5.0, 4.0;
  return p;
}

ProblemSpec linear_full_rank_problem(std::size_t n, std::size_t m) {
  if (n == 0 || m < n) throw InvalidArgument("linear_full_rank: need 1 <= n <= m");
  ProblemSpec p;
  p.name = "linear-full-rank-" + std::to_string(n);
  p.n = n;
  p.m = m;
  const auto N = static_cast<Eigen::Index>(n);
  const auto M = static_cast<Eigen::Index>(m);
  const double c = 2.0 / static_cast<double>(m);
  p.residuals = [=](const Vector& x) {
    const double s = c * x.sum();
    Vector r = Vector::Constant(M, -s - 1.0);
    r.head(N) += x;
    return r;
  };
  p.jacobian = [=](const Vector&) {
    Matrix J = Matrix::Constant(M, N, -c);
    J.topRows(N).diagonal().array() += 1.0;
    return J;
  };
  p.x0 = Vector::Ones(N);
  p.f_star = static_cast<double>(m - n);
  p.x_star = Vector::Constant(N, -1.0);
  return p;
}

ProblemSpec simple_quadratic_problem(std::size_t n) {
  if (n == 0) throw InvalidArgument("simple_quadratic: n must be positive");
  ProblemSpec p;
  p.name = "simple-quad-" + std::to_string(n);
  p.n = n;
  p.m = n;
  const auto N = static_cast<Eigen::Index>(n);
  p.residuals = [](const Vector& x) { return Vector(x.array() - 1.0); };
  p.jacobian = [N](const Vector&) { return Matrix(Matrix::Identity(N, N)); };
  p.x0 = Vector::Zero(N);
  p.f_star = 0.0;
  p.x_star = Vector::Ones(N);
  return p;
}

std::vector<ProblemSpec> builtin_suite() {
  return {rosenbrock_problem(2),      rosenbrock_problem(10),       powell_singular_problem(),
          beale_problem(),            freudenstein_roth_problem(),  linear_full_rank_problem(5, 10),
          simple_quadratic_problem(2), simple_quadratic_problem(10)};
}

ProblemSpec find_problem(const std::string& name) {
  std::string known;
  for (auto& p : builtin_suite()) {
    if (p.name == name) return p;
    known += known.empty() ? p.name : ", " + p.name;
  }
  throw InvalidArgument("unknown problem '" + name + "' (known: " + known + ")");
}

}  // namespace storm
