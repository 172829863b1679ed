#include "cliplab/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "cliplab/clipping.hpp"

namespace cliplab {

void CheckReport::record(double lhs_minus_rhs, double tol) {
  ++steps;
  max_margin = std::max(max_margin, lhs_minus_rhs);
  if (!(lhs_minus_rhs <= tol)) ++violations;
}

// MGF bound for bounded zero-mean variables ----------------------------------

DiscreteLaw DiscreteLaw::rademacher(double R) {
  if (!(R > 0.0)) throw DomainError("rademacher: R must be positive");
  return {{R, -R}, {0.5, 0.5}};
}

DiscreteLaw DiscreteLaw::two_point(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("two_point: a and b must be positive");
  const double pi = b / (a + b);
  return {{a, -b}, {pi, 1.0 - pi}};
}

double DiscreteLaw::mean() const {
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) s += probs[i] * values[i];
  return s;
}

double DiscreteLaw::second_moment() const {
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) s += probs[i] * values[i] * values[i];
  return s;
}

double DiscreteLaw::mgf(double lambda) const {
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) s += probs[i] * std::exp(lambda * values[i]);
  return s;
}

double DiscreteLaw::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

bool MgfReport::all_hold() const {
  return std::all_of(points.begin(), points.end(),
                     [](const MgfPoint& p) { return p.skipped || p.holds; });
}

std::vector<double> lambda_grid(double R, std::size_t n) {
  if (!(R > 0.0) || n < 2) throw DomainError("lambda_grid: need R > 0 and n >= 2");
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = static_cast<double>(i) / (static_cast<double>(n - 1) * R);
  }
  g.back() = 1.0 / R;
  return g;
}

MgfReport check_lemma2_mgf(double R, const std::vector<double>& grid,
                           const DiscreteLaw& law) {
  if (law.values.size() != law.probs.size() || law.values.empty()) {
    throw DomainError("check_lemma2_mgf: malformed law");
  }
  if (law.max_abs() > R * (1.0 + 1e-12)) throw DomainError("check_lemma2_mgf: law exceeds the radius");
  if (std::abs(law.mean()) > 1e-12 * std::max(1.0, R)) {
    throw DomainError("check_lemma2_mgf: law must have mean zero");
  }
  MgfReport rep;
  const double m2 = law.second_moment();
  for (double lam : grid) {
    MgfPoint pt;
    pt.lambda = lam;
    if (lam < 0.0 || lam > (1.0 / R) * (1.0 + 1e-12)) {
      pt.skipped = true;
    } else {
      pt.lhs = law.mgf(lam);
      pt.rhs = std::exp(0.75 * lam * lam * m2);
      pt.holds = pt.lhs <= pt.rhs * (1.0 + 1e-15);
    }
    rep.points.push_back(pt);
  }
  return rep;
}

MgfReport check_lemma2_mgf_mc(double R, const std::vector<double>& grid,
                              const std::function<double(Rng&)>& sampler,
                              std::size_t n, Rng& rng) {
  if (n < 2) throw DomainError("check_lemma2_mgf: need at least 2 samples");
  std::vector<double> xs(n);
  double m2 = 0.0;
  for (double& x : xs) {
    x = sampler(rng);
    if (std::abs(x) > R) throw DomainError("check_lemma2_mgf: sample exceeds the radius");
    m2 += x * x;
  }
  m2 /= static_cast<double>(n);
  MgfReport rep;
  for (double lam : grid) {
    MgfPoint pt;
    pt.lambda = lam;
    if (lam < 0.0 || lam > (1.0 / R) * (1.0 + 1e-12)) {
      pt.skipped = true;
      rep.points.push_back(pt);
      continue;
    }
    double s = 0.0, ss = 0.0;
    for (double x : xs) {
      const double e = std::exp(lam * x);
      s += e;
      ss += e * e;
    }
    const double nd = static_cast<double>(n);
    pt.lhs = s / nd;
    pt.std_error = std::sqrt(std::max(0.0, ss / nd - pt.lhs * pt.lhs) / nd);
    pt.rhs = std::exp(0.75 * lam * lam * m2);
    pt.holds = pt.lhs <= pt.rhs + 5.0 * pt.std_error;
    rep.points.push_back(pt);
  }
  return rep;
}

// Clipped-gradient bias and variance -----------------------------------------

ClipBoundsReport check_lemma1_bounds(Oracle& oracle, const Vector& x, double lambda,
                                 std::size_t m) {
  if (m < 2) throw DomainError("check_lemma1_bounds: need at least 2 samples");
  const Problem& problem = oracle.problem();
  const Geometry& geom = problem.geometry;
  const NormKind dual = geom.dual();
  const Vector grad = oracle.exact_gradient(x);
  const std::size_t d = grad.size();
  const double p = oracle.noise().p;
  const double sp = std::pow(oracle.noise().sigma, p);

  std::vector<double> flat(m * d);
  Vector mean(d, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    const Vector c = clip(oracle.stochastic_grad(x), lambda, dual);
    for (std::size_t i = 0; i < d; ++i) {
      flat[j * d + i] = c[i];
      mean[i] += c[i];
    }
  }
  const double md = static_cast<double>(m);
  for (double& v : mean) v /= md;

  ClipBoundsReport rep;
  rep.theta_u_bound.name = "theta_u_le_2lambda";
  Vector var(d, 0.0);
  double sq = 0.0, sqsq = 0.0;
  Vector u(d);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < d; ++i) {
      u[i] = flat[j * d + i] - mean[i];
      var[i] += u[i] * u[i];
    }
    const double n = norm(dual, u);
    rep.theta_u_bound.record(n - 2.0 * lambda, 1e-12 * lambda);
    sq += n * n;
    sqsq += n * n * n * n;
  }

  double se2 = 0.0;
  for (double v : var) se2 += v / (md - 1.0) / md;
  rep.bias = norm(dual, sub(mean, grad));
  rep.bias_stderr = std::sqrt(se2);
  rep.second_moment = sq / md;
  rep.second_moment_stderr =
      std::sqrt(std::max(0.0, sqsq / md - rep.second_moment * rep.second_moment) / md);
  rep.bias_bound = 4.0 * sp * std::pow(lambda, 1.0 - p);
  rep.second_moment_bound = 40.0 * sp * std::pow(lambda, 2.0 - p);

  rep.bias_applicable = geom.dual_norm(grad) <= lambda / 2.0;
  if (rep.bias_applicable) {
    rep.bias_holds = rep.bias <= rep.bias_bound + 5.0 * rep.bias_stderr;
    rep.second_moment_holds =
        rep.second_moment <= rep.second_moment_bound + 5.0 * rep.second_moment_stderr;
  } else {
    rep.theta_u_bound.note = "bias and second-moment bounds not applicable";
  }
  return rep;
}

// Pathwise --------------------------------------------------------------------

double pathwise_smd_slack(const Problem& problem, const StepContext& ctx) {
  const Geometry& geom = problem.geometry;
  const Vector& xs = problem.x_star.value();
  const double eta = ctx.params.eta;
  const Vector theta = sub(ctx.clipped, ctx.grad);
  const double lhs = eta * problem.gap(ctx.x_next) + geom.bregman(xs, ctx.x_next) -
                     geom.bregman(xs, ctx.x);
  const double tn = geom.dual_norm(theta);
  const double rhs = eta * dot(theta, sub(xs, ctx.x)) + eta * eta * tn * tn +
                     2.0 * problem.G * problem.G * eta * eta;
  return rhs - lhs;
}

double pathwise_asmd_slack(const Problem& problem, const StepContext& ctx) {
  const Geometry& geom = problem.geometry;
  const Vector& xs = problem.x_star.value();
  const double eta = ctx.params.eta;
  const double alpha = ctx.params.alpha;
  const Vector theta = sub(ctx.clipped, ctx.grad);
  const double lhs = eta / alpha * problem.gap(ctx.y_next) + geom.bregman(xs, ctx.z_next) -
                     geom.bregman(xs, ctx.z);
  const double tn = geom.dual_norm(theta);
  const double rhs = eta * (1.0 - alpha) / alpha * problem.gap(ctx.y) +
                     eta * dot(theta, sub(xs, ctx.z)) +
                     eta * eta * tn * tn / (2.0 * (1.0 - problem.L * eta * alpha));
  return rhs - lhs;
}

double pathwise_sgd_slack(const Problem& problem, const StepContext& ctx) {
  const double eta = ctx.params.eta;
  const double L = problem.L;
  const Vector theta = sub(ctx.clipped, ctx.grad);
  const double lhs = problem.value(ctx.x_next) - problem.value(ctx.x);
  const double rhs = -(eta - L * eta * eta / 2.0) * squared_norm2(ctx.grad) +
                     L * eta * eta / 2.0 * squared_norm2(theta) +
                     (L * eta * eta - eta) * dot(ctx.grad, theta);
  return rhs - lhs;
}

PathwiseMonitor::PathwiseMonitor(const Problem& problem, double tol)
    : problem_(problem), tol_(tol) {}

StepObserver PathwiseMonitor::observer() {
  return [this](const StepContext& ctx) {
    double slack = 0.0;
    switch (ctx.algorithm) {
      case Algorithm::Smd:
        report_.name = "pathwise_smd";
        slack = pathwise_smd_slack(problem_, ctx);
        break;
      case Algorithm::Asmd:
        report_.name = "pathwise_asmd";
        slack = pathwise_asmd_slack(problem_, ctx);
        break;
      case Algorithm::Sgd:
      case Algorithm::VanillaSgd:
        report_.name = "pathwise_sgd";
        slack = pathwise_sgd_slack(problem_, ctx);
        break;
    }
    report_.record(-slack, tol_);
  };
}

// Martingale ----------------------------------------------------------------

MartingaleTrace martingale_trace_smd(Oracle& oracle, const StepSource& steps,
                                     std::size_t T, const Vector& x1, double Q,
                                     double delta, std::size_t m) {
  if (!(Q >= 1.0)) throw DomainError("martingale: Q must be at least 1");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("martingale: delta must lie in (0, 1)");
  const Problem& problem = oracle.problem();
  const Geometry& geom = problem.geometry;
  const Vector xs = problem.x_star.value();
  Oracle aux = oracle.fork(kResampleStream);

  MartingaleTrace trace;
  trace.Q = Q;
  trace.threshold = std::log(1.0 / delta);
  double running_max = 0.0;
  double S = 0.0;
  double prev_z = std::numeric_limits<double>::infinity();

  RunOptions opts;
  opts.keep_rows = false;
  opts.observer = [&](const StepContext& ctx) {
    const double eta = ctx.params.eta;
    const double lam = ctx.params.lambda;
    const ThetaEstimate th = estimate_theta(ctx.clipped, ctx.x, lam, m, aux);
    const double d_t = geom.bregman(xs, ctx.x);
    running_max = std::max(running_max, std::sqrt(2.0 * d_t));
    const double z = 1.0 / (2.0 * eta * lam * running_max + 16.0 * Q * eta * eta * lam * lam);
    const double bn = geom.dual_norm(th.theta_b);
    const double inner = eta * problem.gap(ctx.x_next) + geom.bregman(xs, ctx.x_next) - d_t -
                         eta * dot(sub(xs, ctx.x), th.theta_b) - 2.0 * eta * eta * bn * bn -
                         2.0 * eta * eta * th.theta_u_sq;
    const double Z = z * inner -
                     (3.0 / (8.0 * lam * lam) + 24.0 * z * z * std::pow(eta, 4) * lam * lam) *
                         th.theta_u_sq;
    S += Z;
    if (z > prev_z * (1.0 + 1e-12)) trace.z_nonincreasing = false;
    prev_z = z;
    if (th.mc_stderr > 0.1 * lam) trace.unstable_mc = true;
    trace.max_S = std::max(trace.max_S, S);
    trace.rows.push_back({ctx.t, z, Z, S, th.theta_u_sq, bn, th.mc_stderr});
  };
  run_smd(oracle, steps, T, x1, opts);
  trace.crossed = trace.max_S >= trace.threshold;
  return trace;
}

MartingaleTrace martingale_trace_sgd(Oracle& oracle, const Schedule& schedule,
                                     std::size_t T, const Vector& x1,
                                     double delta, std::size_t m) {
  if (!is_sgd(schedule.mode())) throw DomainError("martingale: needs an SGD schedule");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("martingale: delta must lie in (0, 1)");
  const Problem& problem = oracle.problem();
  const double L = problem.L;
  const PropositionConstants k = schedule.constants(T);
  Oracle aux = oracle.fork(kResampleStream);

  MartingaleTrace trace;
  trace.threshold = std::log(1.0 / delta);
  double running_max = 0.0;
  double S = 0.0;
  double prev_z = std::numeric_limits<double>::infinity();

  RunOptions opts;
  opts.keep_rows = false;
  opts.observer = [&](const StepContext& ctx) {
    const double eta = ctx.params.eta;
    const double lam = ctx.params.lambda;
    const ThetaEstimate th = estimate_theta(ctx.clipped, ctx.x, lam, m, aux);
    const double delta_t = problem.gap(ctx.x);
    const double delta_next = problem.gap(ctx.x_next);
    running_max = std::max(running_max, std::sqrt(2.0 * L * std::max(delta_t, 0.0)));
    const double P = k.C1 / (lam * eta * std::sqrt(2.0 * L));
    const double Qt = k.C1 * k.C1 * std::sqrt(k.A) / (2.0 * L * eta * eta * lam * lam);
    const double z = 1.0 / (2.0 * P * eta * lam * running_max + 8.0 * Qt * L * eta * eta * lam * lam);
    const double bn = norm2(th.theta_b);
    const double inner = eta / 2.0 * squared_norm2(ctx.grad) + delta_next - delta_t -
                         1.5 * eta * bn * bn - L * eta * eta * th.theta_u_sq;
    const double Z = z * inner - (3.0 * z * z * L * eta * eta * delta_t +
                                  6.0 * L * L * z * z * std::pow(eta, 4) * lam * lam) *
                                     th.theta_u_sq;
    S += Z;
    if (z > prev_z * (1.0 + 1e-12)) trace.z_nonincreasing = false;
    prev_z = z;
    if (th.mc_stderr > 0.1 * lam) trace.unstable_mc = true;
    trace.P = P;
    trace.Q = Qt;
    trace.max_S = std::max(trace.max_S, S);
    trace.rows.push_back({ctx.t, z, Z, S, th.theta_u_sq, bn, th.mc_stderr});
  };
  run_sgd(oracle, schedule, T, x1, opts);
  trace.crossed = trace.max_S >= trace.threshold;
  return trace;
}

double check_fact1(std::size_t upper) {
  if (upper < 1) throw DomainError("check_fact1: upper must be at least 1");
  double s = 0.0;
  for (std::size_t t = 1; t <= upper; ++t) s += 1.0 / anytime_factor(t);
  return s;
}

}  // namespace cliplab
