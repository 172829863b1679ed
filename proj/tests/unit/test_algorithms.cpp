#include <gtest/gtest.h>

#include <cmath>

#include "cliplab/algorithms.hpp"

using namespace cliplab;

namespace {

const double kHuge = 1e300;

ScheduleInputs inputs(double p, double sigma, std::int64_t T) {
  ScheduleInputs in;
  in.p = p;
  in.sigma = sigma;
  in.T = T;
  in.delta = 0.1;
  return in;
}

}  // namespace

TEST(RunSmd, GeometricDecay) {
  Oracle o(make_quadratic(2, {1, 1}, {0, 0}), make_no_noise(), 1);
  const RunRecord r = run_smd(o, constant_steps(0.25, kHuge), 20, {1, 0});
  ASSERT_EQ(r.rows.size(), 20u);
  double x = 1.0;
  for (std::size_t t = 0; t < 20; ++t) {
    x *= 0.75;
    EXPECT_NEAR(r.rows[t].metric, 0.5 * x * x, 1e-15);
    if (t > 0) EXPECT_NEAR(r.rows[t].metric, 0.5625 * r.rows[t - 1].metric, 1e-15);
  }
  EXPECT_EQ(r.clipped_steps, 0u);
  EXPECT_EQ(r.clip_fraction(), 0.0);
}

TEST(RunSmd, SingleStepSummary) {
  Oracle o(make_quadratic(2, {1, 1}, {0, 0}), make_two_point(1.5, 1.0, 0.3), 4);
  const RunRecord r = run_smd(o, constant_steps(0.1, 2.0), 1, {1, 0});
  EXPECT_EQ(r.summary, r.rows[0].metric);
  EXPECT_EQ(r.summary, o.problem().gap(r.final_iterate));
}

TEST(RunSmd, NoiselessTheoremBound) {
  for (double R1 : {0.5, 1.0, 3.0}) {
    for (std::size_t T : {10u, 100u, 1000u}) {
      const Problem pr = make_quadratic(2, {1, 1}, {0, 0});
      Oracle o(pr, make_no_noise(1.5), 1);
      ScheduleInputs in = inputs(1.5, 0.0, T);
      in.R1 = R1;
      in.L = 1.0;
      const Schedule s = smd_known_T(in);
      const RunRecord r = run_smd(o, s, T, {R1, 0});
      const double bound = 48.0 * R1 * 2.0 * (2.0 * R1) * s.gamma() / T;
      EXPECT_LE(r.summary, bound);
      EXPECT_NEAR(theorem_bound(s, T), bound, 1e-12 * bound);
      EXPECT_EQ(r.clipped_steps, 0u);
    }
  }
}

TEST(RunSmd, SimplexStaysInterior) {
  Oracle o(make_simplex_quadratic(3, {0.7, 0.2, 0.1}), make_two_point(1.5, 1.0, 0.05), 2);
  const Schedule s = smd_known_T([] {
    ScheduleInputs in = inputs(1.5, 1.0, 500);
    in.L = 1.0;
    in.R1 = 1.0;
    return in;
  }());
  bool ok = true;
  RunOptions opt;
  opt.observer = [&](const StepContext& c) {
    ok &= o.problem().geometry.contains(c.x_next);
    for (double v : c.x_next) ok &= v > 0.0;
  };
  run_smd(o, s, 500, {0.2, 0.3, 0.5}, opt);
  EXPECT_TRUE(ok);
}

TEST(RunSmd, RejectsWrongScheduleAndDomain) {
  Oracle o(make_quadratic(2, {1, 1}, {0, 0}), make_no_noise(), 1);
  EXPECT_THROW(run_smd(o, sgd_known_T(inputs(2, 0, 10)), 10, {1, 0}), DomainError);
  Oracle s(make_simplex_quadratic(2, {0.5, 0.5}), make_no_noise(), 1);
  EXPECT_THROW(run_smd(s, constant_steps(0.1), 10, {2, -1}), DomainError);
}

TEST(RunAsmd, FirstStepCollapses) {
  Oracle o(make_quadratic(2, {1, 2}, {0, 0}), make_two_point(2.0, 0.5, 0.5), 3);
  StepContext first{};
  Vector x1, y1, z1, y2, z2;
  RunOptions opt;
  opt.observer = [&](const StepContext& c) {
    if (c.t == 1) {
      x1.assign(c.x.begin(), c.x.end());
      y1.assign(c.y.begin(), c.y.end());
      z1.assign(c.z.begin(), c.z.end());
      y2.assign(c.y_next.begin(), c.y_next.end());
      z2.assign(c.z_next.begin(), c.z_next.end());
      first = c;
    }
  };
  const RunRecord r = run_asmd(o, asmd_known_T(inputs(2.0, 0.5, 5)), 1, {1, 1}, opt);
  EXPECT_EQ(first.params.alpha, 1.0);
  EXPECT_EQ(x1, y1);
  EXPECT_EQ(x1, z1);
  EXPECT_EQ(y2, z2);
  EXPECT_EQ(r.summary, o.problem().gap(y2));
}

TEST(RunAsmd, NoiselessQuadraticRate) {
  // unclipped accelerated steps at the cap eta_t = 1/(2 L alpha_t)
  const Problem pr = make_quadratic(2, {1, 0.5}, {0, 0});
  StepSource steps;
  steps.name = "accelerated";
  steps.theorem = false;
  steps.params = [&](std::size_t t) {
    const double alpha = 2.0 / (t + 1.0);
    return StepParams{1.0 / (2.0 * pr.L * alpha), kHuge, alpha};
  };
  double prev = 0.0;
  for (std::size_t T : {64u, 128u, 256u, 512u}) {
    Oracle o(pr, make_no_noise(), 1);
    const RunRecord r = run_asmd(o, steps, T, {1, 1});
    if (prev > 0.0) EXPECT_LE(r.summary / prev, 0.35) << T;
    EXPECT_LE(r.summary, 2.0 * pr.L * 1.0 / (T * (T + 1.0)) * 4.0);
    prev = r.summary;
  }
}

TEST(RunAsmd, NoiselessTheoremScheduleMonotone) {
  const Problem pr = make_quadratic(2, {1, 0.5}, {0, 0});
  Oracle o(pr, make_no_noise(), 1);
  ScheduleInputs in = inputs(2.0, 0.0, 400);
  in.R1 = std::sqrt(2.0);
  const Schedule s = asmd_known_T(in);
  const RunRecord r = run_asmd(o, s, 400, {1, 1});
  EXPECT_LE(r.summary, theorem_bound(s, 400));
  EXPECT_LT(r.summary, pr.gap(Vector{1, 1}));
}

TEST(RunSgd, OneStepToMinimizer) {
  Oracle o(make_quadratic(2, {1, 1}, {0, 0}), make_no_noise(), 1);
  const RunRecord r = run_sgd(o, constant_steps(1.0, kHuge), 2, {3, -4});
  EXPECT_EQ(r.final_iterate, (Vector{0, 0}));
  EXPECT_DOUBLE_EQ(r.rows[0].metric, 25.0);
  EXPECT_DOUBLE_EQ(r.rows[1].metric, 0.0);
}

TEST(RunSgd, SingleStepSummary) {
  Oracle o(make_nonconvex_ratio(2), make_two_point(1.5, 1.0, 0.3), 4);
  const Vector x1{0.4, -0.3};
  const double g2 = squared_norm2(o.exact_gradient(x1));
  const RunRecord r = run_sgd(o, constant_steps(0.1, 1.0), 1, x1);
  EXPECT_DOUBLE_EQ(r.summary, g2);
}

TEST(RunSgd, NonconvexDescent) {
  // |f'| peaks at 1/sqrt(3), so the gradient norm only falls once iterates pass it
  const Problem pr = make_nonconvex_ratio(1);
  Oracle o(pr, make_no_noise(), 1);
  std::vector<double> f, x;
  RunOptions opt;
  opt.observer = [&](const StepContext& c) {
    x.push_back(c.x[0]);
    f.push_back(pr.value(c.x));
  };
  const RunRecord r = run_sgd(o, constant_steps(0.4, kHuge), 200, {1}, opt);
  for (std::size_t t = 1; t < f.size(); ++t) EXPECT_LT(f[t], f[t - 1]);
  for (std::size_t t = 1; t < r.rows.size(); ++t) {
    if (x[t - 1] < 1.0 / std::sqrt(3.0)) EXPECT_LT(r.rows[t].metric, r.rows[t - 1].metric);
  }
  EXPECT_LT(r.rows.back().metric, 1e-6);
}

TEST(RunSgd, NoiselessTheoremBound) {
  for (double p : {1.25, 1.5, 2.0}) {
    const Problem pr = make_nonconvex_ratio(2);
    const Vector x1{0.5, -1.0};
    Oracle o(pr, make_no_noise(p), 1);
    ScheduleInputs in = inputs(p, 0.0, 500);
    in.L = pr.L;
    in.Delta1 = pr.gap(x1);
    const Schedule s = sgd_known_T(in);
    const RunRecord r = run_sgd(o, s, 500, x1);
    EXPECT_LE(r.summary, theorem_bound(s, 500));
  }
}

TEST(RunVanilla, MatchesUnclippedSgdWithoutNoise) {
  Oracle a(make_nonconvex_ratio(3), make_no_noise(), 1), b(make_nonconvex_ratio(3), make_no_noise(), 1);
  const RunRecord v = run_vanilla_sgd(a, 0.3, 100, {1, -2, 0.5});
  const RunRecord c = run_sgd(b, constant_steps(0.3), 100, {1, -2, 0.5});
  ASSERT_EQ(v.rows.size(), c.rows.size());
  for (std::size_t t = 0; t < v.rows.size(); ++t) EXPECT_EQ(v.rows[t].metric, c.rows[t].metric);
  EXPECT_EQ(v.final_iterate, c.final_iterate);
}

TEST(RunVanilla, DivergenceFlag) {
  Oracle o(make_quadratic(1, {1}, {0}), make_no_noise(), 1);
  const RunRecord r = run_vanilla_sgd(o, 3.0, 1000, {1});
  EXPECT_TRUE(r.diverged);
  EXPECT_LT(r.steps, 1000u);
  EXPECT_GT(std::abs(r.final_iterate[0]), kDivergenceThreshold);
  Oracle ok(make_quadratic(1, {1}, {0}), make_no_noise(), 1);
  EXPECT_FALSE(run_vanilla_sgd(ok, 0.5, 1000, {1}).diverged);
}

TEST(Reproducibility, SameSeedSameRecord) {
  const Problem pr = make_quadratic(3, {1, 2, 3}, {0, 0, 0});
  for (int alg = 0; alg < 3; ++alg) {
    auto go = [&] {
      Oracle o(pr, make_radial_pareto(1.5, 1.0, 1.8), 99);
      ScheduleInputs in = inputs(1.5, 1.0, 300);
      in.L = 3.0;
      in.Delta1 = pr.gap(Vector{1, 1, 1});
      if (alg == 0) return run_smd(o, smd_known_T(in), 300, {1, 1, 1});
      if (alg == 1) return run_asmd(o, asmd_known_T(in), 300, {1, 1, 1});
      return run_sgd(o, sgd_known_T(in), 300, {1, 1, 1});
    };
    const RunRecord a = go(), b = go();
    EXPECT_EQ(a.summary, b.summary);
    EXPECT_EQ(a.final_iterate, b.final_iterate);
    ASSERT_EQ(a.rows.size(), b.rows.size());
    for (std::size_t t = 0; t < a.rows.size(); ++t) {
      EXPECT_EQ(a.rows[t].metric, b.rows[t].metric);
      EXPECT_EQ(a.rows[t].clipped, b.rows[t].clipped);
      EXPECT_EQ(a.rows[t].raw_grad_norm, b.rows[t].raw_grad_norm);
    }
  }
}

TEST(ParamFree, ObserveHookIsWired) {
  const Problem pr = make_quadratic(2, {1, 1}, {0, 0});
  Oracle o(pr, make_two_point(2.0, 1.0, 0.1), 5);
  ScheduleInputs in = inputs(2.0, 1.0, 1);
  in.c1 = 1.0;
  in.c2 = 1.0;
  in.grad1 = 1.0;
  const RunRecord r = run_smd(o, smd_param_free(in), 200, {1, 0});
  EXPECT_EQ(r.steps, 200u);
  for (const auto& row : r.rows) EXPECT_NEAR(row.eta * row.lambda, 1.0 / 24.0, 1e-15);
}
