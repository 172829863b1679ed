#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cliplab/algorithms.hpp"
#include "cliplab/clipping.hpp"
#include "cliplab/config.hpp"
#include "cliplab/diagnostics.hpp"
#include "cliplab/geometry.hpp"
#include "cliplab/harness.hpp"
#include "cliplab/io.hpp"
#include "cliplab/noise.hpp"
#include "cliplab/problems.hpp"
#include "cliplab/schedules.hpp"

namespace py = pybind11;
using namespace cliplab;

namespace {

// Python lists convert to Vector; the core API takes spans.
using Vec = const Vector&;

Schedule make_schedule(const std::string& mode, const ScheduleInputs& in) {
  return Schedule(parse_schedule_mode(mode), in);
}

RunRecord run(const std::string& algorithm, Oracle& oracle, const StepSource& steps, std::size_t T,
              const Vector& x1, bool keep_rows) {
  RunOptions opt;
  opt.keep_rows = keep_rows;
  switch (parse_algorithm(algorithm)) {
    case Algorithm::Smd:
      return run_smd(oracle, steps, T, x1, opt);
    case Algorithm::Asmd:
      return run_asmd(oracle, steps, T, x1, opt);
    case Algorithm::Sgd:
      return run_sgd(oracle, steps, T, x1, opt);
    case Algorithm::VanillaSgd:
      break;
  }
  throw DomainError("run: use run_vanilla_sgd for the unclipped baseline");
}

}  // namespace

PYBIND11_MODULE(_cliplab, m) {
  m.doc() = "Clipped stochastic mirror descent, accelerated mirror descent and SGD under heavy-tailed noise";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  // geometry
  py::class_<Geometry>(m, "Geometry")
      .def_static("euclidean", &Geometry::euclidean, py::arg("dim"))
      .def_static("ball", &Geometry::ball, py::arg("radius"), py::arg("center"))
      .def_static("simplex", &Geometry::simplex, py::arg("dim"))
      .def_property_readonly("kind", [](const Geometry& g) { return to_string(g.kind()); })
      .def_property_readonly("dim", &Geometry::dim)
      .def("norm", [](const Geometry& g, Vec v) { return g.norm(v); })
      .def("dual_norm", [](const Geometry& g, Vec v) { return g.dual_norm(v); })
      .def("psi", [](const Geometry& g, Vec x) { return g.psi(x); })
      .def("grad_psi", [](const Geometry& g, Vec x) { return g.grad_psi(x); })
      .def("bregman", [](const Geometry& g, Vec x, Vec y) { return g.bregman(x, y); })
      .def("mirror_step", [](const Geometry& g, Vec x, Vec grad, double eta) { return g.mirror_step(x, grad, eta); },
           py::arg("x"), py::arg("g"), py::arg("eta"))
      .def("contains", [](const Geometry& g, Vec x, double tol) { return g.contains(x, tol); }, py::arg("x"),
           py::arg("tol") = 1e-9);

  // problems
  py::class_<Problem>(m, "Problem")
      .def_readonly("name", &Problem::name)
      .def_readonly("geometry", &Problem::geometry)
      .def_readonly("L", &Problem::L)
      .def_readonly("G", &Problem::G)
      .def_readonly("f_star", &Problem::f_star)
      .def_readonly("x_star", &Problem::x_star)
      .def_readonly("convex", &Problem::convex)
      .def_property_readonly("dim", &Problem::dim)
      .def("value", [](const Problem& p, Vec x) { return p.value(x); })
      .def("gradient", [](const Problem& p, Vec x) { return p.gradient(x); })
      .def("gap", [](const Problem& p, Vec x) { return p.gap(x); });
  m.def("make_quadratic", &make_quadratic, py::arg("d"), py::arg("diag"), py::arg("shift"),
        py::arg("geometry") = std::nullopt);
  m.def("make_simplex_quadratic", &make_simplex_quadratic, py::arg("d"), py::arg("target"));
  m.def("make_nonconvex_ratio", &make_nonconvex_ratio, py::arg("d"));
  m.def("make_nonsmooth_quadratic", &make_nonsmooth_quadratic, py::arg("d"), py::arg("weight"));

  // noise
  py::class_<NoiseModel>(m, "NoiseModel")
      .def_property_readonly("kind", [](const NoiseModel& n) { return to_string(n.kind); })
      .def_readonly("p", &NoiseModel::p)
      .def_readonly("sigma", &NoiseModel::sigma)
      .def_readonly("q", &NoiseModel::q)
      .def_readonly("tail", &NoiseModel::tail)
      .def_readonly("scale", &NoiseModel::scale);
  m.def("make_no_noise", &make_no_noise, py::arg("p") = 2.0);
  m.def("make_two_point", &make_two_point, py::arg("p"), py::arg("sigma"), py::arg("q"));
  m.def("make_radial_pareto", &make_radial_pareto, py::arg("p"), py::arg("sigma"), py::arg("tail"));

  py::class_<MomentEstimate>(m, "MomentEstimate")
      .def_readonly("moment", &MomentEstimate::moment)
      .def_readonly("std_error", &MomentEstimate::std_error)
      .def_readonly("median_of_means", &MomentEstimate::median_of_means);
  m.def(
      "moment_check",
      [](const NoiseModel& n, std::size_t d, std::size_t count, std::uint64_t seed) {
        Rng rng(seed);
        return moment_check(n, d, count, rng);
      },
      py::arg("noise"), py::arg("d"), py::arg("n"), py::arg("seed") = 1);

  py::class_<Oracle>(m, "Oracle")
      .def(py::init<Problem, NoiseModel, std::uint64_t>(), py::arg("problem"), py::arg("noise"), py::arg("seed"))
      .def_property_readonly("problem", &Oracle::problem)
      .def_property_readonly("noise", &Oracle::noise)
      .def_property_readonly("seed", &Oracle::seed)
      .def("exact_gradient", [](const Oracle& o, Vec x) { return o.exact_gradient(x); })
      .def("stochastic_grad", [](Oracle& o, Vec x) { return o.stochastic_grad(x); })
      .def("fork", &Oracle::fork, py::arg("stream"));

  // clipping
  m.def(
      "clip",
      [](Vec g, double lambda, const std::string& dual) {
        const NormKind k = dual == "l1" ? NormKind::L1 : dual == "linf" ? NormKind::LInf : NormKind::L2;
        if (dual != "l1" && dual != "l2" && dual != "linf") throw DomainError("clip: dual must be l1, l2 or linf");
        return clip(g, lambda, k);
      },
      py::arg("g"), py::arg("lam"), py::arg("dual") = "l2");
  m.def("geometric_median", &geometric_median, py::arg("points"), py::arg("tol") = 1e-10,
        py::arg("max_iter") = 1000);
  py::class_<ThetaEstimate>(m, "ThetaEstimate")
      .def_readonly("theta", &ThetaEstimate::theta)
      .def_readonly("theta_u", &ThetaEstimate::theta_u)
      .def_readonly("theta_b", &ThetaEstimate::theta_b)
      .def_readonly("m", &ThetaEstimate::m)
      .def_readonly("mc_stderr", &ThetaEstimate::mc_stderr);
  m.def(
      "estimate_theta", [](Oracle& o, Vec x, double lambda, std::size_t count) { return estimate_theta(o, x, lambda, count); },
      py::arg("oracle"), py::arg("x"), py::arg("lam"), py::arg("m"));
  py::class_<G0Estimate>(m, "G0Estimate").def_readonly("g0", &G0Estimate::g0).def_readonly("mu", &G0Estimate::mu);
  m.def(
      "estimate_g0", [](Oracle& o, Vec x0, std::size_t blocks, std::size_t per) { return estimate_g0(o, x0, blocks, per); },
      py::arg("oracle"), py::arg("x0"), py::arg("blocks") = 51, py::arg("per_block") = 20);

  // schedules
  py::class_<ScheduleInputs>(m, "ScheduleInputs")
      .def(py::init<>())
      .def_readwrite("p", &ScheduleInputs::p)
      .def_readwrite("sigma", &ScheduleInputs::sigma)
      .def_readwrite("L", &ScheduleInputs::L)
      .def_readwrite("delta", &ScheduleInputs::delta)
      .def_readwrite("R1", &ScheduleInputs::R1)
      .def_readwrite("R0", &ScheduleInputs::R0)
      .def_readwrite("mu", &ScheduleInputs::mu)
      .def_readwrite("g0_norm", &ScheduleInputs::g0_norm)
      .def_readwrite("T", &ScheduleInputs::T)
      .def_readwrite("c1", &ScheduleInputs::c1)
      .def_readwrite("c2", &ScheduleInputs::c2)
      .def_readwrite("grad1", &ScheduleInputs::grad1)
      .def_readwrite("Delta1", &ScheduleInputs::Delta1)
      .def_readwrite("c_override", &ScheduleInputs::c_override)
      .def_readwrite("eta_scale", &ScheduleInputs::eta_scale)
      .def_property_readonly("gamma", &ScheduleInputs::gamma);
  py::class_<StepParams>(m, "StepParams")
      .def_readonly("eta", &StepParams::eta)
      .def_readonly("lam", &StepParams::lambda)
      .def_readonly("alpha", &StepParams::alpha);
  py::class_<PropositionConstants>(m, "PropositionConstants")
      .def_readonly("C1", &PropositionConstants::C1)
      .def_readonly("C2", &PropositionConstants::C2)
      .def_readonly("C3", &PropositionConstants::C3)
      .def_readonly("A", &PropositionConstants::A);
  py::class_<Schedule>(m, "Schedule")
      .def(py::init(&make_schedule), py::arg("mode"), py::arg("inputs"))
      .def_property_readonly("mode", [](const Schedule& s) { return to_string(s.mode()); })
      .def_property_readonly("inputs", &Schedule::inputs)
      .def_property_readonly("gamma", &Schedule::gamma)
      .def("params", &Schedule::params, py::arg("t"))
      .def("observe", &Schedule::observe, py::arg("t"), py::arg("distance_from_x1"))
      .def("reset", &Schedule::reset)
      .def("accel_c", &Schedule::accel_c, py::arg("t"))
      .def("constants", &Schedule::constants, py::arg("horizon"));
  m.def("anytime_factor", &anytime_factor, py::arg("t"));
  m.def("theorem_bound", &theorem_bound, py::arg("schedule"), py::arg("T"));
  m.def(
      "theoretical_exponent",
      [](const std::string& mode, double p, double sigma) {
        return theoretical_exponent(parse_schedule_mode(mode), p, sigma);
      },
      py::arg("mode"), py::arg("p"), py::arg("sigma"));
  py::class_<ConditionResult>(m, "ConditionResult")
      .def_readonly("name", &ConditionResult::name)
      .def_readonly("passed", &ConditionResult::passed)
      .def_readonly("vacuous", &ConditionResult::vacuous)
      .def_readonly("lhs", &ConditionResult::lhs)
      .def_readonly("rhs", &ConditionResult::rhs)
      .def_readonly("margin", &ConditionResult::margin);
  py::class_<ConditionReport>(m, "ConditionReport")
      .def_readonly("conditions", &ConditionReport::conditions)
      .def("all_passed", &ConditionReport::all_passed);
  m.def("verify_proposition_conditions", &verify_proposition_conditions, py::arg("schedule"),
        py::arg("horizon"));

  // algorithms
  py::class_<StepSource>(m, "StepSource")
      .def_readonly("name", &StepSource::name)
      .def_readonly("theorem", &StepSource::theorem)
      .def("params", [](const StepSource& s, std::size_t t) { return s.params(t); });
  m.def("from_schedule", &from_schedule, py::arg("schedule"));
  m.def("constant_steps", &constant_steps, py::arg("eta"),
        py::arg("lam") = std::numeric_limits<double>::infinity());
  py::class_<StepRow>(m, "StepRow")
      .def_readonly("t", &StepRow::t)
      .def_readonly("eta", &StepRow::eta)
      .def_readonly("lam", &StepRow::lambda)
      .def_readonly("clipped", &StepRow::clipped)
      .def_readonly("raw_grad_norm", &StepRow::raw_grad_norm)
      .def_readonly("metric", &StepRow::metric);
  py::class_<RunRecord>(m, "RunRecord")
      .def_property_readonly("algorithm", [](const RunRecord& r) { return to_string(r.algorithm); })
      .def_readonly("seed", &RunRecord::seed)
      .def_readonly("T", &RunRecord::T)
      .def_readonly("steps", &RunRecord::steps)
      .def_readonly("rows", &RunRecord::rows)
      .def_readonly("summary", &RunRecord::summary)
      .def_readonly("final_gap", &RunRecord::final_gap)
      .def_readonly("final_iterate", &RunRecord::final_iterate)
      .def_readonly("clipped_steps", &RunRecord::clipped_steps)
      .def_readonly("diverged", &RunRecord::diverged)
      .def_property_readonly("clip_fraction", &RunRecord::clip_fraction);
  m.def(
      "run",
      [](const std::string& algorithm, Oracle& o, const Schedule& s, std::size_t T, Vec x1, bool keep_rows) {
        return run(algorithm, o, from_schedule(s), T, x1, keep_rows);
      },
      py::arg("algorithm"), py::arg("oracle"), py::arg("schedule"), py::arg("T"), py::arg("x1"),
      py::arg("keep_rows") = true);
  m.def("run", &run, py::arg("algorithm"), py::arg("oracle"), py::arg("steps"), py::arg("T"), py::arg("x1"),
        py::arg("keep_rows") = true);
  m.def(
      "run_vanilla_sgd",
      [](Oracle& o, double eta, std::size_t T, Vec x1) { return run_vanilla_sgd(o, eta, T, x1); },
      py::arg("oracle"), py::arg("eta"), py::arg("T"), py::arg("x1"));

  // diagnostics
  m.def("check_fact1", &check_fact1, py::arg("upper"));
  py::class_<MgfPoint>(m, "MgfPoint")
      .def_readonly("lam", &MgfPoint::lambda)
      .def_readonly("lhs", &MgfPoint::lhs)
      .def_readonly("rhs", &MgfPoint::rhs)
      .def_readonly("skipped", &MgfPoint::skipped)
      .def_readonly("holds", &MgfPoint::holds);
  py::class_<MgfReport>(m, "MgfReport")
      .def_readonly("points", &MgfReport::points)
      .def("all_hold", &MgfReport::all_hold);
  m.def(
      "check_mgf_two_point",
      [](double a, double b, const std::vector<double>& grid) {
        return check_lemma2_mgf(std::max(a, b), grid, DiscreteLaw::two_point(a, b));
      },
      py::arg("a"), py::arg("b"), py::arg("lambda_grid"));
  m.def(
      "check_mgf_rademacher",
      [](double R, const std::vector<double>& grid) { return check_lemma2_mgf(R, grid, DiscreteLaw::rademacher(R)); },
      py::arg("R"), py::arg("lambda_grid"));
  m.def("lambda_grid", &lambda_grid, py::arg("R"), py::arg("n"));
  py::class_<ClipBoundsReport>(m, "ClipBoundsReport")
      .def_readonly("bias", &ClipBoundsReport::bias)
      .def_readonly("bias_stderr", &ClipBoundsReport::bias_stderr)
      .def_readonly("bias_bound", &ClipBoundsReport::bias_bound)
      .def_readonly("bias_applicable", &ClipBoundsReport::bias_applicable)
      .def_readonly("second_moment", &ClipBoundsReport::second_moment)
      .def_readonly("second_moment_bound", &ClipBoundsReport::second_moment_bound)
      .def("passed", &ClipBoundsReport::passed);
  m.def("check_lemma1_bounds", &check_lemma1_bounds, py::arg("oracle"), py::arg("x"), py::arg("lam"),
        py::arg("m"));

  // experiments
  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def_readonly("id", &ExperimentConfig::id)
      .def_property_readonly("algorithm", [](const ExperimentConfig& c) { return to_string(c.algorithm); })
      .def_readonly("seeds", &ExperimentConfig::seeds)
      .def_readonly("T", &ExperimentConfig::T)
      .def_readonly("T_grid", &ExperimentConfig::T_grid)
      .def_readonly("p", &ExperimentConfig::p)
      .def_readonly("sigma", &ExperimentConfig::sigma)
      .def_readonly("schedule", &ExperimentConfig::schedule)
      .def_readonly("delta", &ExperimentConfig::delta)
      .def("__eq__", [](const ExperimentConfig& a, const ExperimentConfig& b) { return a == b; });
  m.def("parse_config", &parse_config, py::arg("text"), py::arg("overrides") = std::vector<std::string>{});
  m.def("serialize_config", &serialize_config, py::arg("config"));
  m.def("config_digest", &config_digest, py::arg("config"));

  py::class_<SeedResult>(m, "SeedResult")
      .def_readonly("seed", &SeedResult::seed)
      .def_readonly("summary", &SeedResult::summary)
      .def_readonly("final_gap", &SeedResult::final_gap)
      .def_readonly("clip_fraction", &SeedResult::clip_fraction)
      .def_readonly("diverged", &SeedResult::diverged)
      .def_readonly("pathwise_violations", &SeedResult::pathwise_violations);
  py::class_<TrialSummary>(m, "TrialSummary")
      .def_readonly("digest", &TrialSummary::digest)
      .def_readonly("T", &TrialSummary::T)
      .def_readonly("N", &TrialSummary::N)
      .def_readonly("seeds", &TrialSummary::seeds)
      .def_readonly("median", &TrialSummary::median)
      .def_readonly("upper_quantile", &TrialSummary::upper_quantile)
      .def_readonly("bound", &TrialSummary::bound)
      .def_readonly("failures", &TrialSummary::failures)
      .def_readonly("failure_rate", &TrialSummary::failure_rate)
      .def_readonly("failure_stderr", &TrialSummary::failure_stderr)
      .def_readonly("warnings", &TrialSummary::warnings)
      .def("to_json", [](const TrialSummary& s) { return summary_json(s); })
      .def("to_csv", [](const TrialSummary& s) { return seed_results_csv(s); });
  m.def(
      "run_trials",
      [](const ExperimentConfig& c, std::optional<std::size_t> T) {
        py::gil_scoped_release release;
        return T ? run_trials(c, *T) : run_trials(c);
      },
      py::arg("config"), py::arg("T") = std::nullopt);

  py::class_<RateFit>(m, "RateFit")
      .def_readonly("T", &RateFit::T)
      .def_readonly("metric", &RateFit::metric)
      .def_readonly("slope", &RateFit::slope)
      .def_readonly("intercept", &RateFit::intercept)
      .def_readonly("r_squared", &RateFit::r_squared)
      .def_readonly("theoretical", &RateFit::theoretical)
      .def_readonly("deviation", &RateFit::deviation)
      .def("to_json", [](const RateFit& f) { return rate_fit_json(f); });
  m.def("fit_power_law", &fit_power_law, py::arg("T"), py::arg("metric"));
  m.def(
      "fit_rate",
      [](const ExperimentConfig& c) {
        py::gil_scoped_release release;
        return fit_rate(c);
      },
      py::arg("config"));

  py::class_<CompareReport>(m, "CompareReport")
      .def_readonly("T", &CompareReport::T)
      .def_readonly("N", &CompareReport::N)
      .def_readonly("vanilla_eta", &CompareReport::vanilla_eta)
      .def_readonly("clipped_median", &CompareReport::clipped_median)
      .def_readonly("vanilla_median", &CompareReport::vanilla_median)
      .def_readonly("ratio", &CompareReport::ratio)
      .def_readonly("clipped_wins", &CompareReport::clipped_wins)
      .def_readonly("vanilla_diverged", &CompareReport::vanilla_diverged)
      .def("to_json", [](const CompareReport& r) { return compare_json(r); });
  m.def(
      "compare_clipped_vanilla",
      [](const ExperimentConfig& c) {
        py::gil_scoped_release release;
        return compare_clipped_vanilla(c);
      },
      py::arg("config"));
  m.def("p_label", &p_label, py::arg("p"));
}
