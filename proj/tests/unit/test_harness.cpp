#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "cliplab/harness.hpp"
#include "cliplab/io.hpp"

using namespace cliplab;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config(const std::string& alg, double sigma) {
  ExperimentConfig c;
  c.id = "unit";
  c.algorithm = parse_algorithm(alg);
  c.seeds = 40;
  c.T = 200;
  c.problem = alg == "sgd" ? "nonconvex_ratio" : "quadratic";
  c.schedule = alg == "smd" ? "smd_known_T" : alg == "asmd" ? "asmd_known_T" : "sgd_known_T";
  c.noise = sigma > 0 ? "two_point" : "none";
  c.p = 2.0;
  c.sigma = sigma;
  c.q = 0.1;
  return c;
}

}  // namespace

TEST(Quantile, Type7) {
  EXPECT_DOUBLE_EQ(quantile({3, 1, 2}, 0.5), 2.0);
  EXPECT_DOUBLE_EQ(quantile({1, 2, 3, 4}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile({1, 2, 3, 4}, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(quantile({1, 2, 3, 4}, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(quantile({0, 10}, 0.9), 9.0);
  EXPECT_DOUBLE_EQ(quantile({1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11}, 0.9), 10.0);
}

TEST(PowerLaw, ExactFit) {
  std::vector<double> T, m;
  for (double t : {10.0, 100.0, 1000.0, 10000.0}) {
    T.push_back(t);
    m.push_back(7.0 * std::pow(t, -0.5));
  }
  const RateFit f = fit_power_law(T, m);
  EXPECT_NEAR(f.slope, -0.5, 1e-12);
  EXPECT_NEAR(std::exp(f.intercept), 7.0, 1e-10);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
}

TEST(PowerLaw, Errors) {
  EXPECT_THROW(fit_power_law({1, 2, 3}, {1, 1, 1}), DomainError);
  EXPECT_THROW(fit_power_law({1, 2, 3, 4}, {1, 0, 1, 1}), DomainError);
}

TEST(Trials, NoiselessHasNoFailures) {
  for (const char* alg : {"smd", "asmd", "sgd"}) {
    const TrialSummary s = run_trials(small_config(alg, 0.0));
    EXPECT_EQ(s.N, 40u);
    EXPECT_EQ(s.failures, 0u) << alg;
    EXPECT_EQ(s.failure_rate, 0.0);
    EXPECT_TRUE(std::isfinite(s.bound));
    for (const auto& r : s.seeds) EXPECT_EQ(r.summary, s.seeds[0].summary);
  }
}

TEST(Trials, JobsDoNotChangeResults) {
  ExperimentConfig c = small_config("smd", 1.0);
  c.pathwise = true;
  c.jobs = 1;
  const TrialSummary a = run_trials(c);
  c.jobs = 4;
  const TrialSummary b = run_trials(c);
  ASSERT_EQ(a.seeds.size(), b.seeds.size());
  for (std::size_t i = 0; i < a.seeds.size(); ++i) {
    EXPECT_EQ(a.seeds[i].seed, b.seeds[i].seed);
    EXPECT_EQ(a.seeds[i].summary, b.seeds[i].summary);
    EXPECT_EQ(a.seeds[i].pathwise_violations, 0u);
  }
  c.jobs = 1;
  EXPECT_EQ(seed_results_csv(a), seed_results_csv(run_trials(c)));
}

TEST(Trials, FailureRateWithinDelta) {
  ExperimentConfig c = small_config("smd", 1.0);
  c.seeds = 1000;
  c.q = 0.01;
  c.jobs = 4;
  const TrialSummary s = run_trials(c);
  EXPECT_LE(s.failure_rate, 0.1 + 3.0 * std::sqrt(0.09 / 1000.0));
  EXPECT_NEAR(s.failure_stderr, std::sqrt(s.failure_rate * (1 - s.failure_rate) / 1000.0), 1e-15);
}

TEST(Trials, OffTheoremHasNoBound) {
  ExperimentConfig c = small_config("smd", 1.0);
  c.eta_scale = 2.0;
  const TrialSummary s = run_trials(c);
  EXPECT_TRUE(std::isnan(s.bound));
  EXPECT_EQ(s.failures, 0u);
}

TEST(Compare, NoiselessRatioIsOne) {
  ExperimentConfig c = small_config("sgd", 0.0);
  c.vanilla_eta = 0.01;
  c.eta = 0.01;
  c.schedule = "constant";
  c.lambda = 1e300;
  c.seeds = 5;
  const CompareReport r = compare_clipped_vanilla(c);
  EXPECT_DOUBLE_EQ(r.ratio, 1.0);
  EXPECT_EQ(r.clipped_wins, 0u);
  EXPECT_EQ(r.clipped_gaps, r.vanilla_gaps);
}

TEST(Compare, RequiresSgd) {
  EXPECT_THROW(compare_clipped_vanilla(small_config("smd", 1.0)), std::exception);
}

TEST(Labels, PLabelAndDigest) {
  EXPECT_EQ(p_label(1.5), "p15");
  EXPECT_EQ(p_label(2.0), "p20");
  EXPECT_EQ(p_label(1.25), "p125");
  ExperimentConfig a = small_config("smd", 1.0), b = a;
  EXPECT_EQ(config_digest(a), config_digest(b));
  EXPECT_EQ(config_digest(a).size(), 16u);
  b.jobs = 7;
  b.out = "elsewhere";
  EXPECT_EQ(config_digest(a), config_digest(b));
  b.seeds += 1;
  EXPECT_NE(config_digest(a), config_digest(b));
}

TEST(ParallelFor, CoversAllAndRethrows) {
  std::vector<int> hit(100, 0);
  parallel_for(100, 8, [&](std::size_t i) { hit[i] += 1; });
  for (int h : hit) EXPECT_EQ(h, 1);
  EXPECT_THROW(parallel_for(10, 3, [](std::size_t i) {
                 if (i == 7) throw std::runtime_error("boom");
               }),
               std::runtime_error);
}

TEST(Io, FormatDoubleRoundTrip) {
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double v = rng.normal() * std::pow(10.0, static_cast<double>(rng.index(40)) - 20.0);
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(format_double(std::nan("")), "nan");
  EXPECT_EQ(format_double(INFINITY), "inf");
  EXPECT_EQ(format_double(-INFINITY), "-inf");
}

TEST(Io, CsvQuoting) {
  EXPECT_EQ(csv_field("plain"), "plain");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(csv_field("x\ny"), "\"x\ny\"");
  EXPECT_EQ(csv_row({"a", "b,c"}), "a,\"b,c\"\r\n");
}

TEST(Io, SeedCsvShape) {
  const TrialSummary s = run_trials(small_config("smd", 0.0));
  const std::string csv = seed_results_csv(s);
  EXPECT_EQ(csv.rfind("# schema=1\r\n", 0), 0u);
  std::size_t lines = 0;
  for (char ch : csv) lines += ch == '\n';
  EXPECT_EQ(lines, 2u + s.N);
  EXPECT_NE(csv.find("seed,algorithm,schedule,p,T,summary"), std::string::npos);
}

TEST(Io, ResultDirAndContainment) {
  const fs::path root = fs::path(::testing::TempDir()) / "cliplab_io_root";
  fs::remove_all(root);
  EXPECT_EQ(result_dir(root, "exp", Algorithm::Smd, 1.5), root / "exp" / "smd" / "p15");
  EXPECT_THROW(result_dir(root, "../x", Algorithm::Smd, 1.5), DomainError);
  EXPECT_THROW(result_dir(root, "..", Algorithm::Smd, 1.5), DomainError);
  EXPECT_THROW(result_dir(root, "a/b", Algorithm::Smd, 1.5), DomainError);
  write_file(root, root / "a" / "b.txt", "one\n");
  write_file(root, root / "a" / "b.txt", "two\n", true);
  std::ifstream f(root / "a" / "b.txt");
  std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  EXPECT_EQ(text, "one\ntwo\n");
  EXPECT_THROW(write_file(root, root / ".." / "escape.txt", "x"), std::exception);
  EXPECT_FALSE(fs::exists(root.parent_path() / "escape.txt"));
}

TEST(Io, JsonLinesAreSingleLine) {
  const TrialSummary s = run_trials(small_config("sgd", 0.5));
  const std::string j = summary_json(s);
  EXPECT_EQ(j.find('\n'), std::string::npos);
  EXPECT_EQ(j.front(), '{');
  EXPECT_NE(j.find("\"failure_rate\""), std::string::npos);
}
