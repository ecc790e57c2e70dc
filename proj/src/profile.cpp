#include "storm/profile.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

namespace storm {

bool tau_solved(double f_x0, double f_best, double f_star, double tau) {
  if (!(f_x0 > f_star)) throw InvalidArgument("tau_solved: f(x0) must exceed f*");
  if (!(tau > 0.0 && tau < 1.0)) throw InvalidArgument("tau_solved: tau must lie in (0, 1)");
  return (f_x0 - f_best) / (f_x0 - f_star) > 1.0 - tau;
}

double tau_target(double f_x0, double f_star, double tau) {
  if (!(f_x0 > f_star)) throw InvalidArgument("tau_target: f(x0) must exceed f*");
  if (!(tau > 0.0 && tau < 1.0)) throw InvalidArgument("tau_target: tau must lie in (0, 1)");
  return f_x0 - (1.0 - tau) * (f_x0 - f_star);
}

std::optional<std::size_t> evals_to_solve(const RunRecord& record, double f_star, double tau) {
  if (!record.true_f_x0) throw InvalidArgument("evals_to_solve: run has no reference values");
  const double f0 = *record.true_f_x0;
  std::size_t evals = 0;
  for (const auto& e : record.events) {
    evals += e.evals_used;
    if (e.true_f_after && tau_solved(f0, *e.true_f_after, f_star, tau)) return evals;
  }
  return std::nullopt;
}

void ProfileTable::sort() {
  std::sort(rows.begin(), rows.end(), [](const ProfileEntry& a, const ProfileEntry& b) {
    return std::tie(a.solver, a.problem, a.seed) < std::tie(b.solver, b.problem, b.seed);
  });
}

namespace {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

template <class T>
T parse_number(const std::string& s, std::size_t line) {
  T v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ParseError("bad number '" + s + "'", line);
  return v;
}

constexpr const char* kHeader = "solver,problem,seed,evals_to_solve,tau,budget";

}  // namespace

void ProfileTable::write_csv(std::ostream& out) const {
  out << kHeader << '\n';
  for (const auto& r : rows) {
    if (r.solver.find(',') != std::string::npos || r.problem.find(',') != std::string::npos)
      throw InvalidArgument("profile names must not contain commas");
    out << r.solver << ',' << r.problem << ',' << r.seed << ',';
    if (r.evals_to_solve) out << *r.evals_to_solve;
    out << ',' << format_double(r.tau) << ',' << r.budget << '\n';
  }
}

ProfileTable ProfileTable::read_csv(std::istream& in) {
  ProfileTable t;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError("missing header", 1);
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader) throw ParseError("unexpected header '" + line + "'", line_no);
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 6) throw ParseError("expected 6 fields", line_no);
    ProfileEntry e;
    e.solver = cells[0];
    e.problem = cells[1];
    e.seed = parse_number<std::uint64_t>(cells[2], line_no);
    if (!cells[3].empty()) e.evals_to_solve = parse_number<std::size_t>(cells[3], line_no);
    e.tau = parse_number<double>(cells[4], line_no);
    e.budget = parse_number<std::size_t>(cells[5], line_no);
    t.rows.push_back(std::move(e));
  }
  return t;
}

std::vector<std::string> ProfileTable::solvers() const {
  std::set<std::string> s;
  for (const auto& r : rows) s.insert(r.solver);
  return {s.begin(), s.end()};
}

std::vector<std::string> ProfileTable::problems() const {
  std::set<std::string> s;
  for (const auto& r : rows) s.insert(r.problem);
  return {s.begin(), s.end()};
}

namespace {

double profile_fraction(const ProfileCurves& c, std::size_t s, double r) {
  const std::size_t np = c.problems.size();
  std::size_t count = 0;
  for (std::size_t p = 0; p < np; ++p) {
    double best = kInf;
    for (const auto& row : c.mean_evals) best = std::min(best, row[p]);
    const double mine = c.mean_evals[s][p];
    if (std::isfinite(mine) && mine <= r * best) ++count;
  }
  return np ? static_cast<double>(count) / static_cast<double>(np) : 0.0;
}

}  // namespace

double ProfileCurves::value_at(const std::string& solver, double r) const {
  if (!(r >= 1.0)) throw InvalidArgument("profile ratio must be >= 1");
  const auto it = std::find(solvers.begin(), solvers.end(), solver);
  if (it == solvers.end()) throw InvalidArgument("unknown solver '" + solver + "'");
  return profile_fraction(*this, static_cast<std::size_t>(it - solvers.begin()), r);
}

void ProfileCurves::write_csv(std::ostream& out) const {
  out << "ratio";
  for (const auto& s : solvers) out << ',' << s;
  out << '\n';
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    out << format_double(ratios[i]);
    for (const auto& v : values) out << ',' << format_double(v[i]);
    out << '\n';
  }
}

ProfileCurves build_profiles(const ProfileTable& table, std::vector<double> ratios) {
  if (table.rows.empty()) throw InvalidArgument("build_profiles: empty table");
  ProfileCurves c;
  c.solvers = table.solvers();
  c.problems = table.problems();
  if (c.solvers.size() < 2) throw InvalidArgument("build_profiles: need at least two solvers");

  std::map<std::pair<std::string, std::string>, std::pair<double, std::size_t>> acc;
  std::size_t max_budget = 1;
  for (const auto& r : table.rows) {
    auto& [sum, count] = acc[{r.solver, r.problem}];
    sum += r.evals_to_solve ? static_cast<double>(*r.evals_to_solve) : kInf;
    ++count;
    max_budget = std::max(max_budget, r.budget);
  }
  c.mean_evals.assign(c.solvers.size(), std::vector<double>(c.problems.size(), kInf));
  for (std::size_t s = 0; s < c.solvers.size(); ++s)
    for (std::size_t p = 0; p < c.problems.size(); ++p)
      if (const auto it = acc.find({c.solvers[s], c.problems[p]}); it != acc.end())
        c.mean_evals[s][p] = it->second.first / static_cast<double>(it->second.second);

  if (ratios.empty()) {
    const std::size_t points = 200;
    const double top = std::log(static_cast<double>(std::max<std::size_t>(max_budget, 2)));
    for (std::size_t i = 0; i < points; ++i)
      ratios.push_back(std::exp(top * static_cast<double>(i) / static_cast<double>(points - 1)));
    ratios.push_back(1.0);
    ratios.push_back(2.0);
  }
  for (double r : ratios)
    if (!(r >= 1.0)) throw InvalidArgument("build_profiles: ratios must be >= 1");
  std::sort(ratios.begin(), ratios.end());
  ratios.erase(std::unique(ratios.begin(), ratios.end()), ratios.end());
  c.ratios = std::move(ratios);

  c.values.assign(c.solvers.size(), std::vector<double>(c.ratios.size(), 0.0));
  for (std::size_t s = 0; s < c.solvers.size(); ++s)
    for (std::size_t i = 0; i < c.ratios.size(); ++i) c.values[s][i] = profile_fraction(c, s, c.ratios[i]);
  return c;
}

}  // namespace storm
