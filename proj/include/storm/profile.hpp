#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "storm/core.hpp"

namespace storm {

/// (f_x0 - f_best) / (f_x0 - f_star) > 1 - tau. Throws InvalidArgument when f_x0 <= f_star.
bool tau_solved(double f_x0, double f_best, double f_star, double tau);

/// The value f' must drop below: f_x0 - (1 - tau)(f_x0 - f_star).
double tau_target(double f_x0, double f_star, double tau);

/// Evaluations until the run first accepted an iterate meeting the
/// tau-criterion, or nullopt.
std::optional<std::size_t> evals_to_solve(const RunRecord& record, double f_star, double tau);

struct ProfileEntry {
  std::string solver;
  std::string problem;
  std::uint64_t seed = 0;
  std::optional<std::size_t> evals_to_solve;
  double tau = 1e-3;
  std::size_t budget = 0;

  bool operator==(const ProfileEntry&) const = default;
};

struct ProfileTable {
  std::vector<ProfileEntry> rows;

  /// Order rows by (solver, problem, seed).
  void sort();
  /// Header row then one line per entry; unsolved cells are left empty.
  void write_csv(std::ostream& out) const;
  static ProfileTable read_csv(std::istream& in);

  std::vector<std::string> solvers() const;
  std::vector<std::string> problems() const;

  bool operator==(const ProfileTable&) const = default;
};

/// Performance-profile curves sampled on a ratio grid.
struct ProfileCurves {
  std::vector<std::string> solvers;
  std::vector<std::string> problems;
  /// mean_evals[s][p]: mean evaluations over seeds, +inf if any seed failed.
  std::vector<std::vector<double>> mean_evals;
  std::vector<double> ratios;
  /// values[s][i]: fraction of problems solver s solves within ratios[i] times the best.
  std::vector<std::vector<double>> values;

  /// Exact profile value for one solver at ratio r >= 1.
  double value_at(const std::string& solver, double r) const;
  /// "ratio,<solver>,..." rows; the layout gnuplot reads directly.
  void write_csv(std::ostream& out) const;
};

/// Build curves from a table with at least two solvers. The default grid is
/// 200 log-spaced ratios in [1, max budget], with 1 and 2 always included.
ProfileCurves build_profiles(const ProfileTable& table, std::vector<double> ratios = {});

}  // namespace storm
