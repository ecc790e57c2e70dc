#include "storm/core.hpp"

#include <algorithm>
#include <cmath>

namespace storm {

void TrustRegionConfig::validate() const {
  if (!(delta0 > 0.0)) throw InvalidArgument("delta0 must be positive");
  if (!(delta_max >= delta0)) throw InvalidArgument("delta_max must be >= delta0");
  if (!(gamma > 1.0)) throw InvalidArgument("gamma must exceed 1");
  if (!(eta1 > 0.0 && eta1 < 1.0)) throw InvalidArgument("eta1 must lie in (0, 1)");
  if (!(eta2 >= 0.0)) throw InvalidArgument("eta2 must be nonnegative");
  if (budget == 0) throw InvalidArgument("budget must be positive");
}

const char* to_string(StopReason reason) {
  switch (reason) {
    case StopReason::budget:
      return "budget";
    case StopReason::target_reached:
      return "target";
    case StopReason::delta_floor:
      return "delta_floor";
    case StopReason::iteration_limit:
      return "iteration_limit";
  }
  return "unknown";
}

const char* to_string(Phase phase) {
  switch (phase) {
    case Phase::sample_rate:
      return "sample_rate";
    case Phase::value_update:
      return "value_update";
    case Phase::regression_draw:
      return "regression_draw";
    case Phase::model:
      return "model";
    case Phase::step:
      return "step";
    case Phase::estimates:
      return "estimates";
    case Phase::acceptance:
      return "acceptance";
    case Phase::radius:
      return "radius";
    case Phase::set_update:
      return "set_update";
  }
  return "unknown";
}

void PhaseTrace::mark(std::size_t k, Phase phase, std::size_t evals) {
  PhaseRecord rec;
  rec.k = k;
  rec.phase = phase;
  rec.evals = evals;
  rec.stream_draws.reserve(streams_.size());
  for (const Rng* s : streams_) rec.stream_draws.push_back(s->draws());
  records_.push_back(std::move(rec));
}

std::optional<double> RunRecord::best_true_f() const {
  std::optional<double> best = true_f_x0;
  for (const auto& e : events) {
    if (!e.true_f_after) continue;
    if (!best || *e.true_f_after < *best) best = e.true_f_after;
  }
  return best;
}

std::optional<std::size_t> RunRecord::evals_to_reach(double threshold) const {
  if (true_f_x0 && *true_f_x0 < threshold) return 0;
  std::size_t evals = 0;
  for (const auto& e : events) {
    evals += e.evals_used;
    if (e.true_f_after && *e.true_f_after < threshold) return evals;
  }
  return std::nullopt;
}

std::size_t RunRecord::successful_iterations() const {
  return static_cast<std::size_t>(
      std::count_if(events.begin(), events.end(), [](const IterationEvent& e) { return e.success; }));
}

bool acceptance_test(double rho, double model_grad_norm, double delta, double eta1, double eta2) {
  return rho >= eta1 && model_grad_norm >= eta2 * delta;
}

double phi_monitor(double f_value, double delta, double nu) {
  if (!(nu > 0.0 && nu < 1.0)) throw InvalidArgument("phi_monitor: nu must lie in (0, 1)");
  return nu * f_value + (1.0 - nu) * delta * delta;
}

RunRecord run(CountedObjective& problem, ModelBuilder& builder, Estimator& estimator,
              const SubproblemSolver& solver, const TrustRegionConfig& cfg,
              const RunOptions& options) {
  cfg.validate();
  if (problem.dimension() == 0) throw InvalidArgument("run: problem dimension must be >= 1");
  if (options.phi_nu && !(*options.phi_nu > 0.0 && *options.phi_nu < 1.0))
    throw InvalidArgument("run: phi_nu must lie in (0, 1)");

  const StoppingRule& stop = options.stop;
  PhaseTrace* trace = options.trace;

  RunRecord record;
  Vector x = problem.initial_point();
  if (static_cast<std::size_t>(x.size()) != problem.dimension())
    throw InvalidArgument("run: initial point has the wrong dimension");
  double delta = cfg.delta0;
  const std::size_t evals_at_start = problem.evaluations();

  record.x0 = x;
  std::optional<double> true_f = problem.reference_value(x);
  record.true_f_x0 = true_f;
  record.stop_reason = StopReason::budget;

  bool stopped = false;
  if (stop.target_value && true_f && *true_f < *stop.target_value) {
    record.stop_reason = StopReason::target_reached;
    stopped = true;
  }

  for (std::size_t k = 0; !stopped; ++k) {
    if (stop.max_iterations && k >= stop.max_iterations) {
      record.stop_reason = StopReason::iteration_limit;
      break;
    }
    if (delta < stop.delta_floor) {
      record.stop_reason = StopReason::delta_floor;
      break;
    }
    const std::size_t evals_before = problem.evaluations();
    const std::size_t used = evals_before - evals_at_start;
    const bool overrun =
        stop.strict_budget &&
        used + builder.planned_evaluations(k, delta) + estimator.planned_evaluations(k, delta) > cfg.budget;
    if (used >= cfg.budget || overrun) {
      record.stop_reason = StopReason::budget;
      break;
    }

    IterationEvent ev;
    ev.k = k;
    ev.x_before = x;
    ev.delta_before = delta;
    ev.true_f_before = true_f;
    if (options.phi_nu && true_f) ev.phi = phi_monitor(*true_f, delta, *options.phi_nu);

    std::optional<Vector> trial;
    std::optional<QuadraticModel> model = builder.build(k, x, delta);
    mark_phase(trace, k, Phase::model, problem.evaluations());

    bool success = false;
    if (!model) {
      ev.flag = IterationFlag::degenerate_model;
    } else {
      const StepResult step = solver(*model, delta);
      mark_phase(trace, k, Phase::step, problem.evaluations());
      ev.model_gradient_norm = model->gradient.norm();
      ev.kappa_fcd_used = step.kappa_fcd_used;
      trial = x + step.step;

      if (!(step.model_decrease > 0.0)) {
        ev.flag = IterationFlag::zero_model_decrease;
      } else {
        const EstimatePair est = estimator.estimate(k, x, *trial, delta);
        mark_phase(trace, k, Phase::estimates, problem.evaluations());
        ev.f0_estimate = est.f0;
        ev.fs_estimate = est.fs;
        const double floor = 1e-15 * std::max(1.0, std::abs(est.f0));
        if (step.model_decrease <= floor) {
          ev.flag = IterationFlag::zero_model_decrease;
        } else {
          const double rho = (est.f0 - est.fs) / step.model_decrease;
          ev.rho = rho;
          success = acceptance_test(rho, ev.model_gradient_norm, delta, cfg.eta1, cfg.eta2);
        }
        mark_phase(trace, k, Phase::acceptance, problem.evaluations());
      }
    }

    if (success) {
      x = *trial;
      delta = std::min(cfg.gamma * delta, cfg.delta_max);
      true_f = problem.reference_value(x);
    } else {
      delta /= cfg.gamma;
    }
    mark_phase(trace, k, Phase::radius, problem.evaluations());

    IterationOutcome outcome;
    outcome.k = k;
    outcome.x_before = &ev.x_before;
    outcome.trial = trial ? &*trial : nullptr;
    outcome.x_after = &x;
    outcome.delta_before = ev.delta_before;
    outcome.delta_after = delta;
    outcome.success = success;
    builder.finish_iteration(outcome);
    estimator.finish_iteration(outcome);

    ev.x_after = x;
    ev.delta_after = delta;
    ev.success = success;
    ev.true_f_after = true_f;
    ev.evals_used = problem.evaluations() - evals_before;
    record.events.push_back(std::move(ev));

    if (stop.target_value && true_f && *true_f < *stop.target_value) {
      record.stop_reason = StopReason::target_reached;
      stopped = true;
    }
  }

  record.x_final = x;
  record.delta_final = delta;
  record.total_evals = problem.evaluations() - evals_at_start;
  return record;
}

Matrix finite_difference_hessian(const std::function<Vector(const Vector&)>& gradient,
                                 const Vector& x, double h) {
  const Eigen::Index n = x.size();
  Matrix H(n, n);
  Vector xp = x, xm = x;
  for (Eigen::Index j = 0; j < n; ++j) {
    xp(j) = x(j) + h;
    xm(j) = x(j) - h;
    H.col(j) = (gradient(xp) - gradient(xm)) / (2.0 * h);
    xp(j) = x(j);
    xm(j) = x(j);
  }
  return 0.5 * (H + H.transpose());
}

std::optional<QuadraticModel> ExactModelBuilder::build(std::size_t, const Vector& x, double) {
  const Matrix hess = f_.hessian ? f_.hessian(x) : finite_difference_hessian(f_.gradient, x);
  return QuadraticModel::from_half_form(x, f_.value(x), f_.gradient(x), hess);
}

EstimatePair ExactEstimator::estimate(std::size_t, const Vector& x, const Vector& trial, double) {
  EstimatePair e;
  e.f0 = f_(x);
  e.fs = f_(trial);
  return e;
}

}  // namespace storm
