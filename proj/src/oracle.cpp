#include "storm/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <sstream>

namespace storm {

double ProblemSpec::value(const Vector& x) const { return residuals(x).squaredNorm(); }

Vector ProblemSpec::gradient(const Vector& x) const {
  return 2.0 * jacobian(x).transpose() * residuals(x);
}

SmoothFunction ProblemSpec::smooth() const {
  SmoothFunction f;
  auto r = residuals;
  auto J = jacobian;
  f.value = [r](const Vector& x) { return r(x).squaredNorm(); };
  f.gradient = [r, J](const Vector& x) { return Vector(2.0 * J(x).transpose() * r(x)); };
  return f;
}

const char* to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::none:
      return "none";
    case NoiseKind::multiplicative:
      return "multiplicative";
    case NoiseKind::additive:
      return "additive";
    case NoiseKind::failure:
      return "failure";
  }
  return "unknown";
}

NoiseKind noise_kind_from_string(const std::string& name) {
  if (name == "none") return NoiseKind::none;
  if (name == "multiplicative" || name == "mult") return NoiseKind::multiplicative;
  if (name == "additive" || name == "add") return NoiseKind::additive;
  if (name == "failure") return NoiseKind::failure;
  throw InvalidArgument("unknown noise kind: " + name);
}

NoiseModel NoiseModel::multiplicative(double sigma) {
  if (!(sigma >= 0.0)) throw InvalidArgument("noise sigma must be nonnegative");
  NoiseModel m;
  m.kind = NoiseKind::multiplicative;
  m.sigma = sigma;
  return m;
}

NoiseModel NoiseModel::additive(double sigma) {
  if (!(sigma >= 0.0)) throw InvalidArgument("noise sigma must be nonnegative");
  NoiseModel m;
  m.kind = NoiseKind::additive;
  m.sigma = sigma;
  return m;
}

NoiseModel NoiseModel::failure(double sigma, double epsilon, double garbage) {
  if (!(sigma >= 0.0 && sigma <= 1.0)) throw InvalidArgument("failure probability must lie in [0, 1]");
  if (!(epsilon > 0.0)) throw InvalidArgument("failure epsilon must be positive");
  NoiseModel m;
  m.kind = NoiseKind::failure;
  m.sigma = sigma;
  m.epsilon = epsilon;
  m.garbage = garbage;
  return m;
}

double sigma_from_success_probability(double p_s, std::size_t m) {
  if (!(p_s > 0.0 && p_s <= 1.0)) throw InvalidArgument("success probability must lie in (0, 1]");
  if (m == 0) throw InvalidArgument("component count must be positive");
  return 1.0 - std::pow(p_s, 1.0 / static_cast<double>(m));
}

double eval_multiplicative(const Vector& residuals, double sigma, Rng& rng) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < residuals.size(); ++i) {
    const double v = (1.0 + rng.uniform(-sigma, sigma)) * residuals(i);
    sum += v * v;
  }
  return sum;
}

double eval_additive(const Vector& residuals, double sigma, Rng& rng) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < residuals.size(); ++i) {
    const double v = residuals(i) + rng.uniform(-sigma, sigma);
    sum += v * v;
  }
  return sum;
}

namespace {

// Returns the noisy value; `any_failed` reports whether a component failed.
double failure_components(const Vector& residuals, double sigma, double epsilon, double garbage,
                          Rng& rng, bool& any_failed) {
  any_failed = false;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < residuals.size(); ++i) {
    double v = residuals(i);
    if (std::abs(v) < epsilon && rng.uniform() < sigma) {
      v = garbage;
      any_failed = true;
    }
    sum += v * v;
  }
  return sum;
}

}  // namespace

double eval_failure(const Vector& residuals, double sigma, double epsilon, double garbage, Rng& rng) {
  bool failed = false;
  return failure_components(residuals, sigma, epsilon, garbage, rng, failed);
}

double noise_mean(const Vector& r, const NoiseModel& noise) {
  const double s2 = noise.sigma * noise.sigma;
  switch (noise.kind) {
    case NoiseKind::none:
      return r.squaredNorm();
    case NoiseKind::multiplicative:
      return (1.0 + s2 / 3.0) * r.squaredNorm();
    case NoiseKind::additive:
      return r.squaredNorm() + static_cast<double>(r.size()) * s2 / 3.0;
    case NoiseKind::failure: {
      const double V2 = noise.garbage * noise.garbage;
      if (noise.whole_objective) {
        double ok = 1.0;
        for (Eigen::Index i = 0; i < r.size(); ++i)
          if (std::abs(r(i)) < noise.epsilon) ok *= 1.0 - noise.sigma;
        return ok * r.squaredNorm() + (1.0 - ok) * noise.garbage;
      }
      double mean = 0.0;
      for (Eigen::Index i = 0; i < r.size(); ++i) {
        const double f2 = r(i) * r(i);
        mean += std::abs(r(i)) < noise.epsilon ? (1.0 - noise.sigma) * f2 + noise.sigma * V2 : f2;
      }
      return mean;
    }
  }
  return 0.0;
}

double noise_variance(const Vector& r, const NoiseModel& noise) {
  const double s2 = noise.sigma * noise.sigma;
  const double s4 = s2 * s2;
  switch (noise.kind) {
    case NoiseKind::none:
      return 0.0;
    case NoiseKind::multiplicative:
      // Var[(1+w)^2] = 4s^2/3 + 4s^4/45 for w ~ U[-s, s].
      return (4.0 * s2 / 3.0 + 4.0 * s4 / 45.0) * r.array().pow(4).sum();
    case NoiseKind::additive:
      // Var[(r+w)^2] = 4 r^2 s^2/3 + 4 s^4/45.
      return (4.0 * s2 / 3.0) * r.squaredNorm() + static_cast<double>(r.size()) * 4.0 * s4 / 45.0;
    case NoiseKind::failure: {
      const double V2 = noise.garbage * noise.garbage;
      if (noise.whole_objective) {
        double ok = 1.0;
        for (Eigen::Index i = 0; i < r.size(); ++i)
          if (std::abs(r(i)) < noise.epsilon) ok *= 1.0 - noise.sigma;
        const double gap = r.squaredNorm() - noise.garbage;
        return ok * (1.0 - ok) * gap * gap;
      }
      double var = 0.0;
      for (Eigen::Index i = 0; i < r.size(); ++i) {
        if (std::abs(r(i)) >= noise.epsilon) continue;
        const double gap = V2 - r(i) * r(i);
        var += noise.sigma * (1.0 - noise.sigma) * gap * gap;
      }
      return var;
    }
  }
  return 0.0;
}

StochasticProblem::StochasticProblem(ProblemSpec spec, NoiseModel noise)
    : spec_(std::move(spec)), noise_(noise) {
  if (spec_.n == 0 || static_cast<std::size_t>(spec_.x0.size()) != spec_.n)
    throw InvalidArgument("problem " + spec_.name + ": x0 does not match n");
  if (!spec_.residuals || !spec_.jacobian)
    throw InvalidArgument("problem " + spec_.name + ": residuals and jacobian are required");
}

double StochasticProblem::evaluate(const Vector& x, Rng& rng) {
  ++evals_;
  const Vector r = spec_.residuals(x);
  switch (noise_.kind) {
    case NoiseKind::none:
      return r.squaredNorm();
    case NoiseKind::multiplicative:
      return eval_multiplicative(r, noise_.sigma, rng);
    case NoiseKind::additive:
      return eval_additive(r, noise_.sigma, rng);
    case NoiseKind::failure: {
      bool failed = false;
      const double v = failure_components(r, noise_.sigma, noise_.epsilon, noise_.garbage, rng, failed);
      return (noise_.whole_objective && failed) ? noise_.garbage : v;
    }
  }
  return r.squaredNorm();
}

double averaged_estimate(StochasticProblem& problem, const Vector& x, std::size_t p, Rng& rng) {
  if (p == 0) throw InvalidArgument("averaged_estimate: p must be positive");
  // Running mean: exact when every draw is equal.
  double mean = 0.0;
  for (std::size_t i = 1; i <= p; ++i) mean += (problem.evaluate(x, rng) - mean) / static_cast<double>(i);
  return mean;
}

namespace {

// ceil() that ignores representation error in an exact integer quotient.
std::size_t robust_ceil(double x) {
  if (!std::isfinite(x)) throw InvalidArgument("sample size is not finite");
  const double c = std::ceil(x - 1e-9 * std::max(1.0, std::abs(x)));
  return static_cast<std::size_t>(std::max(1.0, c));
}

void check_sample_inputs(double V, double alpha_prime, double delta) {
  if (!(V >= 0.0)) throw InvalidArgument("variance bound must be nonnegative");
  if (!(alpha_prime >= 0.0 && alpha_prime < 1.0)) throw InvalidArgument("alpha' must lie in [0, 1)");
  if (!(delta > 0.0)) throw InvalidArgument("delta must be positive");
}

}  // namespace

std::size_t chebyshev_sample_size(double V, double kappa, double alpha_prime, double delta) {
  check_sample_inputs(V, alpha_prime, delta);
  if (!(kappa > 0.0)) throw InvalidArgument("kappa must be positive");
  const double d2 = delta * delta;
  return robust_ceil(V / (kappa * kappa * (1.0 - alpha_prime) * d2 * d2));
}

std::size_t chebyshev_gradient_sample_size(double V, double kappa_ef, double kappa_eg,
                                           double alpha_prime, double delta) {
  check_sample_inputs(V, alpha_prime, delta);
  if (!(kappa_eg > 0.0)) throw InvalidArgument("kappa_eg must be positive");
  const std::size_t value = chebyshev_sample_size(V, kappa_ef, alpha_prime, delta);
  const std::size_t grad = robust_ceil(V / (kappa_eg * kappa_eg * (1.0 - alpha_prime) * delta * delta));
  return std::max(value, grad);
}

// Logistic regression -----------------------------------------------------

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset d;
  d.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
  d.labels.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(rows[i]);
    d.features.row(static_cast<Eigen::Index>(i)) = features.row(r);
    d.labels(static_cast<Eigen::Index>(i)) = labels(r);
  }
  return d;
}

Dataset parse_libsvm(std::istream& in, std::optional<double> positive_label,
                     std::size_t min_dimension) {
  struct Row {
    double label;
    std::vector<std::pair<std::size_t, double>> entries;
  };
  std::vector<Row> rows;
  std::size_t dim = min_dimension;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    Row row;
    try {
      std::size_t used = 0;
      row.label = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ParseError("bad label '" + tok + "'", line_no);
    }
    std::size_t last = 0;
    while (ls >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 == tok.size())
        throw ParseError("expected index:value, got '" + tok + "'", line_no);
      long long idx = 0;
      double val = 0.0;
      try {
        std::size_t used = 0;
        idx = std::stoll(tok.substr(0, colon), &used);
        if (used != colon) throw std::invalid_argument(tok);
        const std::string vs = tok.substr(colon + 1);
        val = std::stod(vs, &used);
        if (used != vs.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw ParseError("bad feature '" + tok + "'", line_no);
      }
      if (idx < 1) throw ParseError("feature index must be >= 1", line_no);
      const auto uidx = static_cast<std::size_t>(idx);
      if (uidx <= last) throw ParseError("feature indices must increase", line_no);
      last = uidx;
      dim = std::max(dim, uidx);
      row.entries.emplace_back(uidx - 1, val);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("no data rows", line_no);

  std::map<double, std::size_t> classes;
  for (const auto& r : rows) ++classes[r.label];
  double positive = 0.0;
  if (positive_label) {
    positive = *positive_label;
  } else if (classes.size() == 2) {
    positive = classes.rbegin()->first;
  } else if (classes.size() == 1) {
    positive = classes.begin()->first > 0.0 ? classes.begin()->first : kInf;
  } else {
    throw InvalidArgument("parse_libsvm: " + std::to_string(classes.size()) +
                          " classes found; a positive label is required");
  }

  Dataset d;
  d.features = Matrix::Zero(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(dim));
  d.labels.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    d.labels(ii) = rows[i].label == positive ? 1.0 : -1.0;
    for (const auto& [j, v] : rows[i].entries) d.features(ii, static_cast<Eigen::Index>(j)) = v;
  }
  return d;
}

Dataset load_libsvm(const std::string& path, std::optional<double> positive_label) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  return parse_libsvm(in, positive_label);
}

std::pair<Dataset, Dataset> train_test_split(const Dataset& data, double train_fraction,
                                             std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction <= 1.0))
    throw InvalidArgument("train fraction must lie in (0, 1]");
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed, 0x5b11);
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
  const auto n_train =
      static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(data.size())));
  const std::span<const std::size_t> all(order);
  return {data.subset(all.first(n_train)), data.subset(all.subspan(n_train))};
}

Dataset make_synthetic_dataset(std::size_t n_samples, std::size_t n_features, double label_noise,
                               std::uint64_t seed) {
  if (n_samples == 0 || n_features == 0) throw InvalidArgument("synthetic dataset must be non-empty");
  Rng rng(seed, 0xda7a);
  Vector w(static_cast<Eigen::Index>(n_features));
  for (Eigen::Index j = 0; j < w.size(); ++j) w(j) = rng.normal();
  w /= w.norm();
  const double bias = 0.25 * rng.normal();
  Dataset d;
  d.features.resize(static_cast<Eigen::Index>(n_samples), static_cast<Eigen::Index>(n_features));
  d.labels.resize(static_cast<Eigen::Index>(n_samples));
  for (Eigen::Index i = 0; i < d.features.rows(); ++i) {
    for (Eigen::Index j = 0; j < d.features.cols(); ++j) d.features(i, j) = rng.normal();
    const double margin = d.features.row(i).dot(w) + bias + label_noise * rng.normal();
    d.labels(i) = margin >= 0.0 ? 1.0 : -1.0;
  }
  return d;
}

double log1p_exp_neg(double z) {
  // log(1 + e^{-z}) = max(-z, 0) + log1p(e^{-|z|})
  return std::max(-z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

namespace {

// 1 / (1 + e^{z}), computed without overflow.
double sigmoid_neg(double z) {
  if (z >= 0.0) {
    const double e = std::exp(-z);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(z));
}

}  // namespace

LogisticEvaluation subsample_logistic_oracle(const Dataset& data, std::span<const std::size_t> sample,
                                             const Vector& theta, double lambda, bool with_hessian) {
  const auto m = static_cast<Eigen::Index>(data.dimension());
  if (theta.size() != m + 1) throw InvalidArgument("logistic: theta must have dimension m + 1");
  if (sample.empty()) throw InvalidArgument("logistic: empty sample");
  if (!(lambda >= 0.0)) throw InvalidArgument("logistic: lambda must be nonnegative");

  const auto w = theta.head(m);
  const double beta = theta(m);
  LogisticEvaluation out;
  out.gradient = Vector::Zero(m + 1);
  if (with_hessian) out.hessian = Matrix::Zero(m + 1, m + 1);
  Vector a(m + 1);
  for (const std::size_t idx : sample) {
    if (idx >= data.size()) throw InvalidArgument("logistic: sample index out of range");
    const auto i = static_cast<Eigen::Index>(idx);
    const double y = data.labels(i);
    a.head(m) = data.features.row(i).transpose();
    a(m) = 1.0;
    const double z = y * (w.dot(a.head(m)) + beta);
    out.loss += log1p_exp_neg(z);
    const double s = sigmoid_neg(z);  // d/dz log(1+e^{-z}) = -s
    out.gradient.noalias() -= (y * s) * a;
    if (with_hessian) out.hessian.selfadjointView<Eigen::Lower>().rankUpdate(a, s * (1.0 - s));
  }
  const double inv = 1.0 / static_cast<double>(sample.size());
  out.loss = out.loss * inv + lambda * w.squaredNorm();
  out.gradient *= inv;
  out.gradient.head(m) += 2.0 * lambda * w;
  if (with_hessian) {
    out.hessian = out.hessian.selfadjointView<Eigen::Lower>();
    out.hessian *= inv;
    out.hessian.topLeftCorner(m, m).diagonal().array() += 2.0 * lambda;
  }
  return out;
}

LogisticEvaluation subsample_logistic_oracle(const Dataset& data, std::span<const std::size_t> sample,
                                             const Vector& w, double beta, double lambda,
                                             bool with_hessian) {
  Vector theta(w.size() + 1);
  theta << w, beta;
  return subsample_logistic_oracle(data, sample, theta, lambda, with_hessian);
}

LogisticProblem::LogisticProblem(Dataset train, double lambda)
    : train_(std::move(train)), lambda_(lambda) {
  if (train_.size() == 0) throw InvalidArgument("logistic: empty training set");
  if (!(lambda_ >= 0.0)) throw InvalidArgument("logistic: lambda must be nonnegative");
  all_rows_.resize(train_.size());
  std::iota(all_rows_.begin(), all_rows_.end(), 0);
}

LogisticEvaluation LogisticProblem::evaluate(std::span<const std::size_t> sample, const Vector& theta,
                                             bool with_hessian) {
  evals_ += sample.size();
  return subsample_logistic_oracle(train_, sample, theta, lambda_, with_hessian);
}

double LogisticProblem::full_loss(const Vector& theta) const {
  return subsample_logistic_oracle(train_, all_rows_, theta, lambda_, false).loss;
}

LogisticEvaluation LogisticProblem::full_evaluation(const Vector& theta, bool with_hessian) const {
  return subsample_logistic_oracle(train_, all_rows_, theta, lambda_, with_hessian);
}

std::vector<std::size_t> LogisticProblem::draw_sample(std::size_t p, Rng& rng) const {
  const std::size_t N = train_.size();
  if (p >= N) return all_rows_;
  p = std::max<std::size_t>(p, 1);
  std::vector<std::size_t> pool = all_rows_;
  for (std::size_t i = 0; i < p; ++i) std::swap(pool[i], pool[i + rng.index(N - i)]);
  pool.resize(p);
  return pool;
}

}  // namespace storm
