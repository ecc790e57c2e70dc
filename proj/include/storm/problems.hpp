#pragma once

#include <string>
#include <vector>

#include "storm/oracle.hpp"

namespace storm {

/// Extended Rosenbrock; n even. x0 = (-1.2, 1, ...), minimizer at all ones.
ProblemSpec rosenbrock_problem(std::size_t n);
/// Powell singular function (n = 4); minimizer at the origin.
ProblemSpec powell_singular_problem();
/// Beale function (n = 2, m = 3); minimizer (3, 0.5).
ProblemSpec beale_problem();
/// Freudenstein and Roth (n = 2); global minimizer (5, 4).
ProblemSpec freudenstein_roth_problem();
/// Linear function, full rank, with m >= n; f* = m - n at x = -1.
ProblemSpec linear_full_rank_problem(std::size_t n, std::size_t m);
/// sum_i (x_i - 1)^2 from x0 = 0.
ProblemSpec simple_quadratic_problem(std::size_t n);

/// The built-in sum-of-squares suite.
std::vector<ProblemSpec> builtin_suite();

/// Look up a suite entry by name; throws InvalidArgument listing the known names.
ProblemSpec find_problem(const std::string& name);

}  // namespace storm
