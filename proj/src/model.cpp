#include "storm/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace storm {

double QuadraticModel::value_at_step(const Vector& step) const {
  return f0 + gradient.dot(step) + step.dot(hessian * step);
}

double QuadraticModel::value(const Vector& y) const { return value_at_step(y - center); }

Vector QuadraticModel::gradient_at(const Vector& y) const {
  return gradient + 2.0 * (hessian * (y - center));
}

double QuadraticModel::decrease(const Vector& step) const {
  return -(gradient.dot(step) + step.dot(hessian * step));
}

QuadraticModel QuadraticModel::from_half_form(Vector center, double f0, Vector gradient,
                                              const Matrix& B) {
  QuadraticModel m;
  m.center = std::move(center);
  m.f0 = f0;
  m.gradient = std::move(gradient);
  m.hessian = 0.25 * (B + B.transpose());
  return m;
}

void cap_hessian(QuadraticModel& model, double cap) {
  if (cap < 0.0) throw InvalidArgument("cap_hessian: negative cap");
  model.hessian_norm_cap = cap;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(model.hessian);
  Vector values = eig.eigenvalues();
  bool clipped = false;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (std::abs(values(i)) > cap) {
      values(i) = std::copysign(cap, values(i));
      clipped = true;
    }
  }
  if (clipped) {
    model.hessian = eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().transpose();
    model.hessian = 0.5 * (model.hessian + model.hessian.transpose());
    model.hessian_capped = true;
  }
}

std::size_t basis_size(std::size_t n, int degree) {
  switch (degree) {
    case 0:
      return 1;
    case 1:
      return n + 1;
    case 2:
      return (n + 1) * (n + 2) / 2;
    default:
      throw InvalidArgument("basis_size: degree must be 0, 1 or 2");
  }
}

std::size_t poised_set_size(SetKind kind, std::size_t n, std::size_t regression_points) {
  switch (kind) {
    case SetKind::interpolation_linear:
      return n + 1;
    case SetKind::interpolation_quadratic:
      return (n + 1) * (n + 2) / 2;
    case SetKind::regression:
      return regression_points;
  }
  return 0;
}

namespace {

// Monomial basis of the scaled displacement u = (y - c) / delta:
// [1, u_1..u_n, u_i u_j (i <= j)].
void fill_basis_row(const Vector& u, int degree, Eigen::Ref<Vector> row) {
  const Eigen::Index n = u.size();
  row(0) = 1.0;
  if (degree >= 1) row.segment(1, n) = u;
  if (degree >= 2) {
    Eigen::Index col = n + 1;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i; j < n; ++j) row(col++) = u(i) * u(j);
  }
}

Matrix basis_matrix(const std::vector<Vector>& points, const Vector& center, double delta,
                    int degree) {
  const std::size_t n = static_cast<std::size_t>(center.size());
  const auto cols = static_cast<Eigen::Index>(basis_size(n, degree));
  Matrix M(static_cast<Eigen::Index>(points.size()), cols);
  Vector row(cols);
  for (std::size_t r = 0; r < points.size(); ++r) {
    fill_basis_row((points[r] - center) / delta, degree, row);
    M.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return M;
}

QuadraticModel model_from_coefficients(const Vector& coef, const Vector& center, double delta,
                                       int degree) {
  const Eigen::Index n = center.size();
  QuadraticModel m;
  m.center = center;
  m.f0 = coef(0);
  m.gradient = Vector::Zero(n);
  m.hessian = Matrix::Zero(n, n);
  if (degree >= 1) m.gradient = coef.segment(1, n) / delta;
  if (degree >= 2) {
    Eigen::Index col = n + 1;
    const double d2 = delta * delta;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i; j < n; ++j) {
        const double q = coef(col++);
        if (i == j) {
          m.hessian(i, i) = q / d2;
        } else {
          m.hessian(i, j) = 0.5 * q / d2;
          m.hessian(j, i) = 0.5 * q / d2;
        }
      }
    }
  }
  m.hessian = 0.5 * (m.hessian + m.hessian.transpose());
  return m;
}

void check_inputs(const std::vector<Vector>& points, const std::vector<double>& values,
                  const Vector& center, double delta) {
  if (points.size() != values.size())
    throw InvalidArgument("fit: number of values does not match number of points");
  if (!(delta > 0.0)) throw InvalidArgument("fit: delta must be positive");
  for (const auto& p : points)
    if (p.size() != center.size()) throw InvalidArgument("fit: point dimension mismatch");
}

Vector solve_checked(const Matrix& M, const std::vector<double>& values, const char* what) {
  Eigen::BDCSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double smax = s.size() ? s(0) : 0.0;
  const double smin = s.size() ? s(s.size() - 1) : 0.0;
  if (!(smin > 0.0) || smax / smin > kMaxConditionNumber)
    throw DegenerateGeometry(std::string(what) + ": sample set is not poised (condition number " +
                             std::to_string(smin > 0.0 ? smax / smin : kInf) + ")");
  const Eigen::Map<const Vector> rhs(values.data(), static_cast<Eigen::Index>(values.size()));
  return svd.solve(rhs);
}

int interpolation_degree(std::size_t n, std::size_t count) {
  if (count == 1) return 0;
  if (count == n + 1) return 1;
  if (count == (n + 1) * (n + 2) / 2) return 2;
  throw InvalidArgument("fit_interpolation: point count matches neither linear nor quadratic basis");
}

}  // namespace

Matrix random_orthonormal_basis(std::size_t n, Rng& rng) {
  Matrix G(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index j = 0; j < G.cols(); ++j)
    for (Eigen::Index i = 0; i < G.rows(); ++i) G(i, j) = rng.normal();
  Eigen::HouseholderQR<Matrix> qr(G);
  Matrix Q = qr.householderQ() * Matrix::Identity(G.rows(), G.cols());
  // Fix column signs so Q is a deterministic function of G.
  const Matrix R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < Q.cols(); ++j)
    if (R(j, j) < 0.0) Q.col(j) *= -1.0;
  return Q;
}

Vector sample_in_ball(const Vector& center, double radius, Rng& rng) {
  const Eigen::Index n = center.size();
  Vector dir(n);
  double norm = 0.0;
  do {
    for (Eigen::Index i = 0; i < n; ++i) dir(i) = rng.normal();
    norm = dir.norm();
  } while (norm == 0.0);
  const double r = radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(n));
  return center + (r / norm) * dir;
}

double scaled_condition_number(const std::vector<Vector>& points, const Vector& center,
                               double delta, int degree) {
  const Matrix M = basis_matrix(points, center, delta, degree);
  Eigen::BDCSVD<Matrix> svd(M);
  const Vector& s = svd.singularValues();
  if (s.size() == 0 || s(s.size() - 1) == 0.0) return kInf;
  return s(0) / s(s.size() - 1);
}

double estimate_poisedness(const std::vector<Vector>& points, const Vector& center, double delta,
                           int degree, Rng& rng, std::size_t samples) {
  const Matrix M = basis_matrix(points, center, delta, degree);
  Eigen::BDCSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  if (s.size() == 0 || s(s.size() - 1) <= 0.0) return kInf;
  // pinv(M)' maps a basis row phi(y) to the vector of Lagrange values at y.
  const Matrix pinv_t =
      svd.matrixU() * s.cwiseInverse().asDiagonal() * svd.matrixV().transpose();

  double best = 0.0;
  Vector row(M.cols());
  auto visit = [&](const Vector& y) {
    fill_basis_row((y - center) / delta, degree, row);
    best = std::max(best, (pinv_t * row).cwiseAbs().maxCoeff());
  };
  for (const auto& p : points) visit(p);
  for (std::size_t i = 0; i < samples; ++i) visit(sample_in_ball(center, delta, rng));
  return best;
}

PoisedSet make_poised_set(const Vector& center, double delta, SetKind kind, Rng& rng,
                          std::size_t regression_points) {
  if (!(delta > 0.0)) throw InvalidArgument("make_poised_set: delta must be positive");
  const std::size_t n = static_cast<std::size_t>(center.size());
  if (n == 0) throw InvalidArgument("make_poised_set: empty center");

  PoisedSet set;
  set.center = center;
  set.delta = delta;
  set.kind = kind;
  set.points.push_back(center);

  int degree = 1;
  switch (kind) {
    case SetKind::interpolation_linear: {
      const Matrix Q = random_orthonormal_basis(n, rng);
      for (std::size_t i = 0; i < n; ++i)
        set.points.push_back(center + delta * Q.col(static_cast<Eigen::Index>(i)));
      break;
    }
    case SetKind::interpolation_quadratic: {
      degree = 2;
      const Matrix Q = random_orthonormal_basis(n, rng);
      for (std::size_t i = 0; i < n; ++i) {
        set.points.push_back(center + delta * Q.col(static_cast<Eigen::Index>(i)));
        set.points.push_back(center - delta * Q.col(static_cast<Eigen::Index>(i)));
      }
      const double scale = delta / std::numbers::sqrt2;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
          set.points.push_back(center + scale * (Q.col(static_cast<Eigen::Index>(i)) +
                                                 Q.col(static_cast<Eigen::Index>(j))));
      break;
    }
    case SetKind::regression: {
      if (regression_points < n + 1)
        throw InvalidArgument("make_poised_set: regression needs at least n+1 points");
      for (std::size_t i = 1; i < regression_points; ++i)
        set.points.push_back(sample_in_ball(center, delta, rng));
      degree = regression_points >= basis_size(n, 2) ? 2 : 1;
      break;
    }
  }
  set.poisedness_estimate = estimate_poisedness(set.points, center, delta, degree, rng);
  return set;
}

QuadraticModel fit_interpolation(const std::vector<Vector>& points,
                                 const std::vector<double>& values, const Vector& center,
                                 double delta) {
  check_inputs(points, values, center, delta);
  const int degree = interpolation_degree(static_cast<std::size_t>(center.size()), points.size());
  const Matrix M = basis_matrix(points, center, delta, degree);
  return model_from_coefficients(solve_checked(M, values, "fit_interpolation"), center, delta,
                                 degree);
}

QuadraticModel fit_interpolation(const PoisedSet& set, const std::vector<double>& values) {
  if (set.kind == SetKind::regression)
    throw InvalidArgument("fit_interpolation: set is a regression set");
  return fit_interpolation(set.points, values, set.center, set.delta);
}

QuadraticModel fit_regression(const std::vector<Vector>& points, const std::vector<double>& values,
                              const Vector& center, double delta, int degree) {
  check_inputs(points, values, center, delta);
  if (degree != 1 && degree != 2) throw InvalidArgument("fit_regression: degree must be 1 or 2");
  if (points.size() < basis_size(static_cast<std::size_t>(center.size()), degree))
    throw InvalidArgument("fit_regression: fewer points than basis functions");
  const Matrix M = basis_matrix(points, center, delta, degree);
  return model_from_coefficients(solve_checked(M, values, "fit_regression"), center, delta, degree);
}

QuadraticModel fit_regression(const PoisedSet& set, const std::vector<double>& values, int degree) {
  return fit_regression(set.points, values, set.center, set.delta, degree);
}

QuadraticModel fit_gradient_taylor(const Vector& x0, double fbar, const Vector& gbar,
                                   const std::optional<Matrix>& hessian) {
  if (gbar.size() != x0.size()) throw InvalidArgument("fit_gradient_taylor: gradient size mismatch");
  QuadraticModel m;
  m.center = x0;
  m.f0 = fbar;
  m.gradient = gbar;
  if (hessian) {
    if (hessian->rows() != x0.size() || hessian->cols() != x0.size())
      throw InvalidArgument("fit_gradient_taylor: Hessian size mismatch");
    m.hessian = 0.5 * (*hessian + hessian->transpose());
  } else {
    m.hessian = Matrix::Zero(x0.size(), x0.size());
  }
  return m;
}

ModelQualityReport probe_fully_linear(const QuadraticModel& model, const SmoothFunction& truth,
                                      double delta, std::size_t n_probe, Rng& rng) {
  if (!(delta > 0.0)) throw InvalidArgument("probe_fully_linear: delta must be positive");
  ModelQualityReport report;
  report.delta = delta;

  auto visit = [&](const Vector& y) {
    report.max_value_error = std::max(report.max_value_error, std::abs(truth.value(y) - model.value(y)));
    report.max_gradient_error =
        std::max(report.max_gradient_error, (truth.gradient(y) - model.gradient_at(y)).norm());
  };

  visit(model.center);
  const double gnorm = model.gradient.norm();
  if (gnorm > 0.0) {
    const Vector dir = model.gradient / gnorm;
    visit(model.center + delta * dir);
    visit(model.center - delta * dir);
  }
  for (std::size_t i = 0; i < n_probe; ++i) visit(sample_in_ball(model.center, delta, rng));

  report.implied_kappa_ef = report.max_value_error / (delta * delta);
  report.implied_kappa_eg = report.max_gradient_error / delta;
  return report;
}

}  // namespace storm
