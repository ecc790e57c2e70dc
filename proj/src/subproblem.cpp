#include "storm/subproblem.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace storm {

double spectral_norm(const Matrix& symmetric) {
  if (symmetric.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetric, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

double cauchy_reference_decrease(const QuadraticModel& model, double delta) {
  const double gnorm = model.gradient.norm();
  if (gnorm == 0.0) return 0.0;
  const double hnorm = spectral_norm(model.hessian);
  const double ratio = hnorm > 0.0 ? gnorm / hnorm : kInf;
  return gnorm * std::min(ratio, delta);
}

namespace {

StepResult certify(const QuadraticModel& model, double delta, Vector step) {
  StepResult r;
  r.model_decrease = model.decrease(step);
  r.step = std::move(step);
  const double reference = cauchy_reference_decrease(model, delta);
  if (reference > 0.0) {
    r.kappa_fcd_used = std::clamp(2.0 * r.model_decrease / reference, 0.0, 1.0);
    r.cauchy_decrease_bound = 0.5 * r.kappa_fcd_used * reference;
  } else {
    r.kappa_fcd_used = 1.0;
    r.cauchy_decrease_bound = 0.0;
  }
  return r;
}

// Keep numerically tiny overshoots of the radius inside the ball.
void clip_to_ball(Vector& step, double delta) {
  const double norm = step.norm();
  if (norm > delta) step *= delta / norm;
}

}  // namespace

StepResult cauchy_point(const QuadraticModel& model, double delta) {
  if (!(delta > 0.0)) throw InvalidArgument("cauchy_point: delta must be positive");
  const Eigen::Index n = model.gradient.size();
  const double gnorm = model.gradient.norm();
  if (gnorm == 0.0) return certify(model, delta, Vector::Zero(n));

  // phi(t) = m(c - t u) - f0 = -t ||g|| + t^2 u'Hu, u = g / ||g||.
  const Vector u = model.gradient / gnorm;
  const double curvature = u.dot(model.hessian * u);
  double t = delta;
  if (curvature > 0.0) t = std::min(gnorm / (2.0 * curvature), delta);
  Vector step = -t * u;
  clip_to_ball(step, delta);
  return certify(model, delta, std::move(step));
}

StepResult dogleg(const QuadraticModel& model, double delta) {
  if (!(delta > 0.0)) throw InvalidArgument("dogleg: delta must be positive");
  StepResult cauchy = cauchy_point(model, delta);
  const Eigen::Index n = model.gradient.size();
  const double gnorm = model.gradient.norm();
  if (gnorm == 0.0) return cauchy;

  // Standard form m = f0 + g's + 1/2 s'Bs with B = 2H.
  const Matrix B = 2.0 * model.hessian;
  Eigen::LLT<Matrix> llt(B);
  if (llt.info() != Eigen::Success) {
    cauchy.used_cauchy_fallback = true;
    return cauchy;
  }

  Vector step(n);
  const Vector newton = -llt.solve(model.gradient);
  if (!newton.allFinite()) {
    cauchy.used_cauchy_fallback = true;
    return cauchy;
  }
  if (newton.norm() <= delta) {
    step = newton;
  } else {
    const double gBg = model.gradient.dot(B * model.gradient);
    const Vector unconstrained_cauchy = -(gnorm * gnorm / gBg) * model.gradient;
    const double uc_norm = unconstrained_cauchy.norm();
    if (uc_norm >= delta) {
      step = -(delta / gnorm) * model.gradient;
    } else {
      // Largest tau in [0, 1] with ||pu + tau (pn - pu)|| = delta.
      const Vector d = newton - unconstrained_cauchy;
      const double a = d.squaredNorm();
      const double b = 2.0 * unconstrained_cauchy.dot(d);
      const double c = uc_norm * uc_norm - delta * delta;
      const double disc = std::max(b * b - 4.0 * a * c, 0.0);
      // c < 0, so the positive root is well defined; use the stable form.
      const double tau = (b >= 0.0) ? (-2.0 * c) / (b + std::sqrt(disc))
                                    : (-b + std::sqrt(disc)) / (2.0 * a);
      step = unconstrained_cauchy + std::clamp(tau, 0.0, 1.0) * d;
    }
  }
  clip_to_ball(step, delta);

  StepResult result = certify(model, delta, std::move(step));
  if (result.model_decrease < cauchy.model_decrease) {
    cauchy.used_cauchy_fallback = true;
    return cauchy;
  }
  return result;
}

bool certificate_holds(const StepResult& result, double delta, double rel_tol) {
  const bool decrease_ok =
      result.model_decrease >=
      result.cauchy_decrease_bound - rel_tol * std::max(1.0, std::abs(result.model_decrease));
  const bool feasible = result.step.norm() <= delta * (1.0 + rel_tol);
  const bool kappa_ok = result.kappa_fcd_used > 0.0 && result.kappa_fcd_used <= 1.0;
  return decrease_ok && feasible && kappa_ok;
}

}  // namespace storm
