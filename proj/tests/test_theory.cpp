#include "doctest.h"

#include "storm/theory.hpp"

using namespace storm;

namespace {

Rational q(long p, long r = 1) { return Rational(p, r); }

}  // namespace

TEST_CASE("rational constants for the kappa = 10L setting") {
  TheoryInputs<Rational> in;
  in.L = 1;
  in.kappa_ef = in.kappa_eg = in.kappa_bhm = 10;
  in.kappa_fcd = q(1, 2);
  in.eta1 = q(1, 2);
  in.gamma = 2;
  const auto c = compute_theory_constants(in);
  // 8 * 10 / (1/2 * 1/2)
  CHECK(c.eta2_min == 320);
  // 8 kappa_ef / (8 kappa_ef + kappa_fcd kappa_eg) = 80/85 dominates 10/20.
  CHECK(c.C1 == q(1, 8) * q(80, 85));
  CHECK(c.C1 == q(2, 17));

  in.eta2 = 32;
  const auto d = compute_theory_constants(in);
  CHECK(d.zeta == 42);
  CHECK(d.C3 == 1 + q(3, 84));
  CHECK(d.bound_A == q(29, 28) * q(17, 2));
  CHECK(d.epsF_max == 1);
  // M = max{4/(42 * 2/17), 4/(1/2 * 32 * 1/2), 1/10} = max{34/42, 1/2, 1/10}.
  CHECK(d.M == q(17, 21));
  CHECK(d.nu_min == q(4 * 17, 21 + 4 * 17));
  CHECK(d.bound_B == q(3) / (q(15) + 4 * (3 + 84) * q(17, 21)));
  CHECK(to_string(d.bound_B) == "21/2077");
}

TEST_CASE("constants scale with L") {
  TheoryInputs<Rational> in;
  for (long L : {1, 3, 7}) {
    in.L = L;
    in.kappa_ef = in.kappa_eg = in.kappa_bhm = 10 * L;
    in.kappa_fcd = q(1, 2);
    in.eta1 = q(1, 2);
    in.eta2 = 32 * L;
    const auto c = compute_theory_constants(in);
    CHECK(c.zeta == 42 * L);
    CHECK(c.C1 == q(2, 17));
    CHECK(c.eta2_min == 320 * L);
  }
}

TEST_CASE("double and rational agree; computation is pure") {
  TheoryInputs<Rational> in;
  in.L = q(3, 2);
  in.kappa_ef = 2;
  in.kappa_eg = 5;
  in.kappa_bhm = 4;
  in.kappa_fcd = q(3, 4);
  in.eta1 = q(1, 10);
  const auto exact = compute_theory_constants(in);
  const auto approx = compute_theory_constants(to_double(in));
  const auto conv = to_double(exact);
  CHECK(approx.C1 == doctest::Approx(conv.C1));
  CHECK(approx.M == doctest::Approx(conv.M));
  CHECK(approx.bound_B == doctest::Approx(conv.bound_B));
  CHECK(compute_theory_constants(in).bound_A == exact.bound_A);
}

TEST_CASE("input validation") {
  TheoryInputs<double> in;
  in.eta1 = 1.0;
  CHECK_THROWS_AS(compute_theory_constants(in), InvalidArgument);
  in = {};
  in.gamma = 1.0;
  CHECK_THROWS_AS(compute_theory_constants(in), InvalidArgument);
  in = {};
  in.L = 0.0;
  CHECK_THROWS_AS(compute_theory_constants(in), InvalidArgument);
}

TEST_CASE("probability checks") {
  TheoryInputs<Rational> in;
  in.kappa_ef = in.kappa_eg = in.kappa_bhm = 10;
  in.kappa_fcd = q(1, 2);
  in.eta1 = q(1, 2);
  in.eta2 = 32;
  const auto c = compute_theory_constants(in);
  CHECK(check_probabilities(c, Rational(1), Rational(1)).all());
  CHECK_FALSE(check_probabilities(c, q(1, 2), q(1, 2)).product_at_least_half);
  const auto near = check_probabilities(c, q(99, 100), q(99, 100));
  CHECK(near.product_at_least_half);
  CHECK(near.product_bound);  // 1e-4 <= 21/2077
  CHECK(near.ratio_bound);    // (0.9801 - 0.5) / 1e-4 >= 493/56
}

TEST_CASE("failure alpha and beta") {
  const auto [a0, b0] = failure_alpha_beta(0.0, 3);
  CHECK(a0 == 1.0);
  CHECK(b0 == 1.0);
  const auto [a, b] = failure_alpha_beta(0.002, 10);
  CHECK(a == doctest::Approx(0.266782).epsilon(1e-6));
  CHECK(b == doctest::Approx(0.960751).epsilon(1e-6));
  const auto [a2, b2] = failure_alpha_beta(1 - 0.9592, 2);
  CHECK(a2 == doctest::Approx(std::pow(0.9592, 12)));
  CHECK(b2 == doctest::Approx(std::pow(0.9592, 4)));
  CHECK_THROWS_AS(failure_alpha_beta(1.5, 2), InvalidArgument);
}

TEST_CASE("minimum success probability rises with the dimension") {
  TheoryInputs<double> in;
  in.L = 2 * std::sqrt(2.0);
  in.kappa_ef = 2 * std::sqrt(2.0);
  in.kappa_eg = 2;
  in.kappa_bhm = 2;
  in.kappa_fcd = 1;
  in.eta1 = 0.1;
  in.eta2 = 1;
  const auto c2 = compute_theory_constants(in);
  const auto p2 = min_success_probability(c2, 2);
  REQUIRE(p2.has_value());
  const auto [a, b] = failure_alpha_beta(1 - *p2, 2);
  CHECK(check_probabilities(c2, a, b).all());
  const auto [a_lo, b_lo] = failure_alpha_beta(1 - (*p2 - 1e-6), 2);
  CHECK_FALSE(check_probabilities(c2, a_lo, b_lo).all());
  const auto p10 = min_success_probability(c2, 10);
  REQUIRE(p10.has_value());
  CHECK(*p10 > *p2);
}

TEST_CASE("rational parsing and printing") {
  CHECK(parse_rational("2/17") == q(2, 17));
  CHECK(parse_rational("0.25") == q(1, 4));
  CHECK(parse_rational("-3") == -3);
  CHECK(parse_rational("10") == 10);
  CHECK(to_string(q(4, 2)) == "2");
  CHECK(to_string(q(-1, 3)) == "-1/3");
  CHECK_THROWS_AS(parse_rational("abc"), InvalidArgument);
  CHECK_THROWS_AS(parse_rational("1/0"), InvalidArgument);
  CHECK_THROWS_AS(parse_rational(""), InvalidArgument);
}

TEST_CASE("leading zeros are decimal") {
  CHECK(parse_rational("010") == 10);
  CHECK(parse_rational("-0.5") == q(-1, 2));
  CHECK(parse_rational("08/09") == q(8, 9));
  CHECK(parse_rational("0") == 0);
  CHECK_THROWS_AS(parse_rational("-"), InvalidArgument);
  CHECK_THROWS_AS(parse_rational("1.2.3"), InvalidArgument);
}
