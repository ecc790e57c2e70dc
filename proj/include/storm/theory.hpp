#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>

#include <boost/multiprecision/cpp_int.hpp>

#include "storm/common.hpp"

namespace storm {

using Rational = boost::multiprecision::cpp_rational;

/// Problem and algorithm constants entering the convergence conditions.
template <class T>
struct TheoryInputs {
  T L = 1;
  T kappa_ef = 1;
  T kappa_eg = 1;
  T kappa_bhm = 1;
  T kappa_fcd = 1;
  T eta1 = 0.5;
  T gamma = 2;
  /// eta2 used for zeta, epsF_max and the probability bounds; defaults to eta2_min.
  std::optional<T> eta2;
};

template <class T>
struct TheoryConstants {
  TheoryInputs<T> inputs;
  /// max{kappa_bhm, 8 kappa_ef / (kappa_fcd (1 - eta1))}.
  T eta2_min;
  T eta2;
  /// min{kappa_ef, eta1 eta2 kappa_fcd / 8}.
  T epsF_max;
  /// kappa_eg + eta2.
  T zeta;
  /// (kappa_fcd/4) max{kappa_bhm/(kappa_bhm+kappa_eg), 8kappa_ef/(8kappa_ef+kappa_fcd kappa_eg)}.
  T C1;
  /// 1 + 3L / (2 zeta).
  T C3;
  /// max{4/(zeta C1), 4/(eta1 eta2 kappa_fcd), 1/kappa_ef}.
  T M;
  /// Smallest nu with nu/(1-nu) >= gamma^2 M; any larger nu is admissible.
  T nu_min;
  /// Lower bound on (alpha beta - 1/2) / ((1-alpha)(1-beta)): C3 / C1.
  T bound_A;
  /// Upper bound on (1-alpha)(1-beta): (gamma^2-1) / (gamma^4-1 + gamma^2 (3L + 2 zeta) M).
  T bound_B;
};

namespace detail {
template <class T>
T tmax(const T& a, const T& b) { return a < b ? b : a; }
template <class T>
T tmin(const T& a, const T& b) { return b < a ? b : a; }
}  // namespace detail

template <class T>
TheoryConstants<T> compute_theory_constants(const TheoryInputs<T>& in) {
  const T zero(0), one(1);
  if (!(in.L > zero && in.kappa_ef > zero && in.kappa_eg > zero && in.kappa_bhm > zero &&
        in.kappa_fcd > zero))
    throw InvalidArgument("theory: L and the kappas must be positive");
  if (!(in.eta1 > zero && in.eta1 < one)) throw InvalidArgument("theory: eta1 must lie in (0, 1)");
  if (!(in.gamma > one)) throw InvalidArgument("theory: gamma must exceed 1");
  if (in.eta2 && !(*in.eta2 > zero)) throw InvalidArgument("theory: eta2 must be positive");

  using detail::tmax;
  using detail::tmin;
  TheoryConstants<T> c;
  c.inputs = in;
  c.eta2_min = tmax<T>(in.kappa_bhm, T(8) * in.kappa_ef / (in.kappa_fcd * (one - in.eta1)));
  c.eta2 = in.eta2.value_or(c.eta2_min);
  c.epsF_max = tmin<T>(in.kappa_ef, in.eta1 * c.eta2 * in.kappa_fcd / T(8));
  c.zeta = in.kappa_eg + c.eta2;
  c.C1 = in.kappa_fcd / T(4) *
         tmax<T>(in.kappa_bhm / (in.kappa_bhm + in.kappa_eg),
                 T(8) * in.kappa_ef / (T(8) * in.kappa_ef + in.kappa_fcd * in.kappa_eg));
  c.C3 = one + T(3) * in.L / (T(2) * c.zeta);
  c.M = tmax<T>(tmax<T>(T(4) / (c.zeta * c.C1), T(4) / (in.eta1 * c.eta2 * in.kappa_fcd)),
                one / in.kappa_ef);
  const T g2 = in.gamma * in.gamma;
  c.nu_min = g2 * c.M / (one + g2 * c.M);
  c.bound_A = c.C3 / c.C1;
  c.bound_B = (g2 - one) / (g2 * g2 - one + g2 * (T(3) * in.L + T(2) * c.zeta) * c.M);
  return c;
}

template <class T>
struct ProbabilityCheck {
  bool product_at_least_half = false;
  bool ratio_bound = false;   // (alpha beta - 1/2)/((1-alpha)(1-beta)) >= bound_A
  bool product_bound = false; // (1-alpha)(1-beta) <= bound_B
  bool all() const { return product_at_least_half && ratio_bound && product_bound; }
};

/// Check the three conditions on the model and estimate probabilities.
template <class T>
ProbabilityCheck<T> check_probabilities(const TheoryConstants<T>& c, const T& alpha, const T& beta) {
  const T one(1), half = T(1) / T(2);
  ProbabilityCheck<T> r;
  const T ab = alpha * beta;
  const T gap = (one - alpha) * (one - beta);
  r.product_at_least_half = !(ab < half);
  r.product_bound = !(c.bound_B < gap);
  if (gap == T(0))
    r.ratio_bound = ab > half;  // the ratio is +infinity
  else
    r.ratio_bound = !((ab - half) / gap < c.bound_A);
  return r;
}

/// Worst-case model and estimate success probabilities on the simple
/// quadratic with per-component failure probability sigma:
/// alpha = ((1-sigma)^n)^points, beta = ((1-sigma)^n)^2.
/// `points` defaults to (n+1)(n+2)/2.
std::pair<double, double> failure_alpha_beta(double sigma, std::size_t n, std::size_t points = 0);

/// Smallest per-component success probability 1 - sigma in (0, 1] for which
/// failure_alpha_beta satisfies all probability conditions (bisection to 1e-12).
/// Returns nullopt when even 1 - sigma = 1 fails.
std::optional<double> min_success_probability(const TheoryConstants<double>& c, std::size_t n);

/// Exact rational as "p/q" (or "p" when integral).
std::string to_string(const Rational& r);

/// Parse "p/q", an integer, or a finite decimal like "0.25" into an exact rational.
Rational parse_rational(const std::string& s);

TheoryInputs<double> to_double(const TheoryInputs<Rational>& in);
TheoryConstants<double> to_double(const TheoryConstants<Rational>& c);

}  // namespace storm
