#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "storm/storm.hpp"

namespace py = pybind11;
using namespace storm;

namespace {

NoiseModel make_noise(const std::string& kind, double sigma, double epsilon, double garbage, bool whole_objective) {
  NoiseModel nm;
  nm.kind = noise_kind_from_string(kind);
  nm.sigma = sigma;
  nm.epsilon = epsilon;
  nm.garbage = garbage;
  nm.whole_objective = whole_objective;
  return nm;
}

RunRecord run_problem(const ProblemSpec& spec, const std::string& variant, const NoiseModel& noise,
                      const TrustRegionConfig& cfg, std::size_t max_iterations, std::optional<double> target) {
  StochasticProblem p(spec, noise);
  VariantConfig vc = VariantConfig::defaults(variant_from_string(variant));
  vc.run.stop.max_iterations = max_iterations;
  vc.run.stop.target_value = target;
  py::gil_scoped_release release;
  return run_variant(p, cfg, vc);
}

Dataset make_dataset(const Matrix& X, const Vector& y) {
  if (X.rows() != y.size()) throw InvalidArgument("X and y must have the same number of rows");
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (y(i) != 1.0 && y(i) != -1.0) throw InvalidArgument("labels must be -1 or +1");
  return {X, y};
}

py::dict theory_constants(const std::string& L, const std::string& kappa_ef, const std::string& kappa_eg,
                          const std::string& kappa_bhm, const std::string& kappa_fcd, const std::string& eta1,
                          const std::string& gamma, std::optional<std::string> eta2) {
  TheoryInputs<Rational> in;
  in.L = parse_rational(L);
  in.kappa_ef = parse_rational(kappa_ef);
  in.kappa_eg = parse_rational(kappa_eg);
  in.kappa_bhm = parse_rational(kappa_bhm);
  in.kappa_fcd = parse_rational(kappa_fcd);
  in.eta1 = parse_rational(eta1);
  in.gamma = parse_rational(gamma);
  if (eta2) in.eta2 = parse_rational(*eta2);
  const auto c = compute_theory_constants(in);
  py::dict d;
  auto put = [&](const char* name, const Rational& v) { d[name] = py::make_tuple(to_string(v), v.convert_to<double>()); };
  put("eta2_min", c.eta2_min);
  put("eta2", c.eta2);
  put("epsF_max", c.epsF_max);
  put("zeta", c.zeta);
  put("C1", c.C1);
  put("C3", c.C3);
  put("M", c.M);
  put("nu_min", c.nu_min);
  put("ratio_bound", c.bound_A);
  put("product_bound", c.bound_B);
  return d;
}

}  // namespace

PYBIND11_MODULE(_storm, m) {
  m.doc() = "Stochastic trust-region methods with probabilistic models";

  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<DegenerateGeometry>(m, "DegenerateGeometry", PyExc_ArithmeticError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

  py::class_<ProblemSpec>(m, "ProblemSpec")
      .def_readonly("name", &ProblemSpec::name)
      .def_readonly("n", &ProblemSpec::n)
      .def_readonly("m", &ProblemSpec::m)
      .def_readonly("x0", &ProblemSpec::x0)
      .def_readonly("f_star", &ProblemSpec::f_star)
      .def_readonly("x_star", &ProblemSpec::x_star)
      .def_readonly("budget_multiplier", &ProblemSpec::budget_multiplier)
      .def("value", &ProblemSpec::value)
      .def("gradient", &ProblemSpec::gradient)
      .def("residuals", [](const ProblemSpec& p, const Vector& x) { return p.residuals(x); })
      .def("__repr__", [](const ProblemSpec& p) { return "<ProblemSpec " + p.name + ">"; });

  m.def("builtin_suite", &builtin_suite);
  m.def("find_problem", &find_problem, py::arg("name"));

  py::class_<NoiseModel>(m, "NoiseModel")
      .def(py::init(&make_noise), py::arg("kind") = "none", py::arg("sigma") = 0.0, py::arg("epsilon") = 0.1,
           py::arg("garbage") = -10000.0, py::arg("whole_objective") = false)
      .def_property_readonly("kind", [](const NoiseModel& n) { return std::string(to_string(n.kind)); })
      .def_readonly("sigma", &NoiseModel::sigma)
      .def_readonly("epsilon", &NoiseModel::epsilon)
      .def_readonly("garbage", &NoiseModel::garbage);

  py::class_<TrustRegionConfig>(m, "TrustRegionConfig")
      .def(py::init<>())
      .def_readwrite("delta0", &TrustRegionConfig::delta0)
      .def_readwrite("delta_max", &TrustRegionConfig::delta_max)
      .def_readwrite("gamma", &TrustRegionConfig::gamma)
      .def_readwrite("eta1", &TrustRegionConfig::eta1)
      .def_readwrite("eta2", &TrustRegionConfig::eta2)
      .def_readwrite("budget", &TrustRegionConfig::budget)
      .def_readwrite("seed", &TrustRegionConfig::seed)
      .def("validate", &TrustRegionConfig::validate);

  py::class_<IterationEvent>(m, "IterationEvent")
      .def_readonly("k", &IterationEvent::k)
      .def_readonly("x_before", &IterationEvent::x_before)
      .def_readonly("x_after", &IterationEvent::x_after)
      .def_readonly("delta_before", &IterationEvent::delta_before)
      .def_readonly("delta_after", &IterationEvent::delta_after)
      .def_readonly("rho", &IterationEvent::rho)
      .def_readonly("model_gradient_norm", &IterationEvent::model_gradient_norm)
      .def_readonly("evals_used", &IterationEvent::evals_used)
      .def_readonly("true_f_after", &IterationEvent::true_f_after)
      .def_readonly("success", &IterationEvent::success);

  py::class_<RunRecord>(m, "RunRecord")
      .def_readonly("events", &RunRecord::events)
      .def_readonly("x0", &RunRecord::x0)
      .def_readonly("x_final", &RunRecord::x_final)
      .def_readonly("delta_final", &RunRecord::delta_final)
      .def_readonly("total_evals", &RunRecord::total_evals)
      .def_readonly("true_f_x0", &RunRecord::true_f_x0)
      .def_property_readonly("stop_reason", [](const RunRecord& r) { return std::string(to_string(r.stop_reason)); })
      .def("best_true_f", &RunRecord::best_true_f)
      .def("successful_iterations", &RunRecord::successful_iterations)
      .def("evals_to_solve", [](const RunRecord& r, double f_star, double tau) { return evals_to_solve(r, f_star, tau); },
           py::arg("f_star"), py::arg("tau"));

  m.def("run", &run_problem, py::arg("problem"), py::arg("variant") = "storm-unbiased",
        py::arg("noise") = NoiseModel{}, py::arg("config") = TrustRegionConfig{}, py::arg("max_iterations") = 0,
        py::arg("target_value") = std::nullopt,
        "Run one variant (tr-saa, tr-saa-resample, storm-unbiased, storm-failure) on a problem.");

  m.def("train_logistic",
        [](const Matrix& X, const Vector& y, double lambda, std::size_t budget, std::uint64_t seed, bool use_hessian,
           bool full_batch) {
          LogisticProblem p(make_dataset(X, y), lambda);
          TrustRegionConfig cfg;
          cfg.budget = budget;
          cfg.seed = seed;
          VariantConfig vc = VariantConfig::defaults(Variant::storm_logistic);
          vc.use_hessian = use_hessian;
          vc.full_batch = full_batch;
          py::gil_scoped_release release;
          return run_storm_logistic(p, cfg, vc);
        },
        py::arg("X"), py::arg("y"), py::arg("lam") = 1e-4, py::arg("budget") = 1000, py::arg("seed") = 0,
        py::arg("use_hessian") = true, py::arg("full_batch") = false);

  m.def("adagrad",
        [](const Matrix& X, const Vector& y, double lambda, std::size_t budget, std::uint64_t seed, double step0,
           std::size_t batch) {
          LogisticProblem p(make_dataset(X, y), lambda);
          AdagradConfig ac;
          ac.budget = budget;
          ac.seed = seed;
          ac.step0 = step0;
          ac.batch = batch;
          py::gil_scoped_release release;
          return run_adagrad(p, ac);
        },
        py::arg("X"), py::arg("y"), py::arg("lam") = 1e-4, py::arg("budget") = 1000, py::arg("seed") = 0,
        py::arg("step0") = 1.0, py::arg("batch") = 1);

  m.def("logistic_loss",
        [](const Matrix& X, const Vector& y, const Vector& theta, double lambda) {
          const Dataset d = make_dataset(X, y);
          std::vector<std::size_t> all(d.size());
          for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
          const LogisticEvaluation e = subsample_logistic_oracle(d, all, theta, lambda, true);
          return py::make_tuple(e.loss, e.gradient, e.hessian);
        },
        py::arg("X"), py::arg("y"), py::arg("theta"), py::arg("lam") = 0.0,
        "Loss, gradient and Hessian over all rows; theta = (w, beta).");

  m.def("synthetic_dataset",
        [](std::size_t n, std::size_t features, double label_noise, std::uint64_t seed) {
          Dataset d = make_synthetic_dataset(n, features, label_noise, seed);
          return py::make_tuple(d.features, d.labels);
        },
        py::arg("n_samples"), py::arg("n_features"), py::arg("label_noise") = 0.5, py::arg("seed") = 0);

  m.def("cauchy_point",
        [](const Vector& g, const Matrix& H, double delta) {
          QuadraticModel model;
          model.center = Vector::Zero(g.size());
          model.gradient = g;
          model.hessian = H;
          const StepResult r = cauchy_point(model, delta);
          return py::make_tuple(r.step, r.model_decrease, r.kappa_fcd_used);
        },
        py::arg("g"), py::arg("H"), py::arg("delta"), "Model m(s) = g's + s'Hs; returns (step, decrease, kappa_fcd).");
  m.def("dogleg",
        [](const Vector& g, const Matrix& H, double delta) {
          QuadraticModel model;
          model.center = Vector::Zero(g.size());
          model.gradient = g;
          model.hessian = H;
          const StepResult r = dogleg(model, delta);
          return py::make_tuple(r.step, r.model_decrease, r.kappa_fcd_used);
        },
        py::arg("g"), py::arg("H"), py::arg("delta"));

  m.def("theory_constants", &theory_constants, py::arg("L") = "1", py::arg("kappa_ef") = "10",
        py::arg("kappa_eg") = "10", py::arg("kappa_bhm") = "10", py::arg("kappa_fcd") = "1/2",
        py::arg("eta1") = "1/2", py::arg("gamma") = "2", py::arg("eta2") = std::nullopt,
        "Each entry is (exact rational string, float).");
  m.def("failure_alpha_beta", &failure_alpha_beta, py::arg("sigma"), py::arg("n"), py::arg("points") = 0);
  m.def("sigma_from_success_probability", &sigma_from_success_probability, py::arg("ps"), py::arg("m"));
  m.def("chebyshev_sample_size", &chebyshev_sample_size, py::arg("V"), py::arg("kappa"), py::arg("alpha_prime"),
        py::arg("delta"));
  m.def("tau_solved", &tau_solved, py::arg("f_x0"), py::arg("f_best"), py::arg("f_star"), py::arg("tau"));

  m.def("build_profiles",
        [](const std::vector<std::tuple<std::string, std::string, std::uint64_t, std::optional<std::size_t>>>& rows,
           std::vector<double> ratios) {
          ProfileTable t;
          for (const auto& [solver, problem, seed, evals] : rows) {
            ProfileEntry e;
            e.solver = solver;
            e.problem = problem;
            e.seed = seed;
            e.evals_to_solve = evals;
            t.rows.push_back(e);
          }
          const ProfileCurves c = build_profiles(t, std::move(ratios));
          py::dict curves;
          for (std::size_t s = 0; s < c.solvers.size(); ++s) curves[py::str(c.solvers[s])] = c.values[s];
          return py::make_tuple(c.ratios, curves);
        },
        py::arg("rows"), py::arg("ratios"),
        "rows: (solver, problem, seed, evals or None). Returns (ratios, {solver: values}).");
}
