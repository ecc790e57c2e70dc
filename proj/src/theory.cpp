#include "storm/theory.hpp"

#include <cctype>

namespace storm {

std::pair<double, double> failure_alpha_beta(double sigma, std::size_t n, std::size_t points) {
  if (!(sigma >= 0.0 && sigma <= 1.0)) throw InvalidArgument("failure_alpha_beta: sigma must lie in [0, 1]");
  if (n == 0) throw InvalidArgument("failure_alpha_beta: n must be positive");
  if (points == 0) points = (n + 1) * (n + 2) / 2;
  const double per_point = std::pow(1.0 - sigma, static_cast<double>(n));
  return {std::pow(per_point, static_cast<double>(points)), per_point * per_point};
}

std::optional<double> min_success_probability(const TheoryConstants<double>& c, std::size_t n) {
  auto ok = [&](double q) {
    const auto [a, b] = failure_alpha_beta(1.0 - q, n);
    return check_probabilities(c, a, b).all();
  };
  if (!ok(1.0)) return std::nullopt;
  double lo = 0.0, hi = 1.0;  // ok(hi) holds; the conditions are monotone in q
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

std::string to_string(const Rational& r) {
  const auto num = boost::multiprecision::numerator(r);
  const auto den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

namespace {

// Signed decimal integer. cpp_int alone would read a leading 0 as octal.
boost::multiprecision::cpp_int parse_integer(std::string digits, const std::string& whole) {
  const bool negative = !digits.empty() && digits.front() == '-';
  if (!digits.empty() && (digits.front() == '-' || digits.front() == '+')) digits.erase(0, 1);
  if (digits.empty()) throw InvalidArgument("not a rational: '" + whole + "'");
  for (char ch : digits)
    if (!std::isdigit(static_cast<unsigned char>(ch))) throw InvalidArgument("not a rational: '" + whole + "'");
  const std::size_t nz = digits.find_first_not_of('0');
  digits.erase(0, nz == std::string::npos ? digits.size() - 1 : nz);
  boost::multiprecision::cpp_int v(digits);
  return negative ? boost::multiprecision::cpp_int(-v) : v;
}

}  // namespace

Rational parse_rational(const std::string& s) {
  using boost::multiprecision::cpp_int;
  if (s.empty()) throw InvalidArgument("empty rational");
  if (const auto slash = s.find('/'); slash != std::string::npos) {
    const cpp_int p = parse_integer(s.substr(0, slash), s);
    const cpp_int q = parse_integer(s.substr(slash + 1), s);
    if (q == 0) throw InvalidArgument("zero denominator in '" + s + "'");
    return Rational(p, q);
  }
  std::string digits = s;
  std::size_t exp10 = 0;
  if (const auto dot = s.find('.'); dot != std::string::npos) {
    exp10 = s.size() - dot - 1;
    digits.erase(dot, 1);
  }
  cpp_int den = 1;
  for (std::size_t i = 0; i < exp10; ++i) den *= 10;
  return Rational(parse_integer(digits, s), den);
}

TheoryInputs<double> to_double(const TheoryInputs<Rational>& in) {
  TheoryInputs<double> d;
  d.L = in.L.convert_to<double>();
  d.kappa_ef = in.kappa_ef.convert_to<double>();
  d.kappa_eg = in.kappa_eg.convert_to<double>();
  d.kappa_bhm = in.kappa_bhm.convert_to<double>();
  d.kappa_fcd = in.kappa_fcd.convert_to<double>();
  d.eta1 = in.eta1.convert_to<double>();
  d.gamma = in.gamma.convert_to<double>();
  if (in.eta2) d.eta2 = in.eta2->convert_to<double>();
  return d;
}

TheoryConstants<double> to_double(const TheoryConstants<Rational>& c) {
  TheoryConstants<double> d;
  d.inputs = to_double(c.inputs);
  d.eta2_min = c.eta2_min.convert_to<double>();
  d.eta2 = c.eta2.convert_to<double>();
  d.epsF_max = c.epsF_max.convert_to<double>();
  d.zeta = c.zeta.convert_to<double>();
  d.C1 = c.C1.convert_to<double>();
  d.C3 = c.C3.convert_to<double>();
  d.M = c.M.convert_to<double>();
  d.nu_min = c.nu_min.convert_to<double>();
  d.bound_A = c.bound_A.convert_to<double>();
  d.bound_B = c.bound_B.convert_to<double>();
  return d;
}

}  // namespace storm
