#include "cliplab/noise.hpp"

#include <algorithm>
#include <cmath>

namespace cliplab {

namespace {

void check_p(double p) {
  if (!(p > 1.0 && p <= 2.0)) throw DomainError("noise: p must lie in (1, 2]");
}

void check_sigma(double sigma) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw DomainError("noise: sigma must be finite and nonnegative");
  }
}

double median(Vector v) {
  const std::size_t n = v.size();
  std::nth_element(v.begin(), v.begin() + n / 2, v.end());
  double hi = v[n / 2];
  if (n % 2 == 1) return hi;
  double lo = *std::max_element(v.begin(), v.begin() + n / 2);
  return 0.5 * (lo + hi);
}

}  // namespace

std::string to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::None:
      return "none";
    case NoiseKind::TwoPoint:
      return "two_point";
    case NoiseKind::RadialPareto:
      return "radial_pareto";
  }
  return "unknown";
}

NoiseModel make_no_noise(double p) {
  check_p(p);
  return NoiseModel{.kind = NoiseKind::None, .p = p};
}

NoiseModel make_two_point(double p, double sigma, double q) {
  check_p(p);
  check_sigma(sigma);
  if (!(q > 0.0 && q <= 1.0)) throw DomainError("noise: q must lie in (0, 1]");
  return NoiseModel{.kind = NoiseKind::TwoPoint,
                    .p = p,
                    .sigma = sigma,
                    .q = q,
                    .scale = sigma * std::pow(q, -1.0 / p)};
}

NoiseModel make_radial_pareto(double p, double sigma, double tail) {
  check_p(p);
  check_sigma(sigma);
  if (!(tail > p)) throw DomainError("noise: p-th moment would be infinite (need a > p)");
  if (!(tail <= 2.0)) throw DomainError("noise: tail index must lie in (p, 2]");
  return NoiseModel{.kind = NoiseKind::RadialPareto,
                    .p = p,
                    .sigma = sigma,
                    .tail = tail,
                    .scale = sigma * std::pow((tail - p) / tail, 1.0 / p)};
}

Vector sample_noise(const NoiseModel& model, std::size_t d, Rng& rng) {
  Vector xi(d, 0.0);
  if (d == 0) throw DomainError("noise: dimension must be positive");
  switch (model.kind) {
    case NoiseKind::None:
      return xi;
    case NoiseKind::TwoPoint: {
      if (rng.uniform() < model.q) {
        const auto i = rng.index(d);
        const double sign = rng.uniform() < 0.5 ? 1.0 : -1.0;
        xi[i] = sign * model.scale;
      }
      return xi;
    }
    case NoiseKind::RadialPareto: {
      const double r = model.scale * std::pow(rng.uniform_open_zero(), -1.0 / model.tail);
      double n2 = 0.0;
      do {
        for (double& v : xi) v = rng.normal();
        n2 = norm2(xi);
      } while (n2 == 0.0);
      for (double& v : xi) v *= r / n2;
      return xi;
    }
  }
  return xi;
}

MomentEstimate moment_check(const NoiseModel& model, std::size_t d,
                            std::size_t n, Rng& rng) {
  if (n < 1000) throw DomainError("moment_check: need n >= 1000");
  const NormKind nk = NormKind::L2;
  if (model.kind != NoiseKind::RadialPareto) {
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = std::pow(norm(nk, sample_noise(model, d, rng)), model.p);
      sum += v;
      sumsq += v * v;
    }
    const double mean = sum / static_cast<double>(n);
    const double var = std::max(0.0, (sumsq - n * mean * mean) / static_cast<double>(n - 1));
    return {mean, std::sqrt(var / static_cast<double>(n)), false};
  }

  constexpr std::size_t kBlocks = 50;
  const std::size_t per = n / kBlocks;
  Vector means(kBlocks, 0.0);
  for (std::size_t b = 0; b < kBlocks; ++b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < per; ++i) {
      sum += std::pow(norm(nk, sample_noise(model, d, rng)), model.p);
    }
    means[b] = sum / static_cast<double>(per);
  }
  const double med = median(means);
  Vector dev(kBlocks);
  for (std::size_t b = 0; b < kBlocks; ++b) dev[b] = std::abs(means[b] - med);
  return {med, 1.4826 * median(dev), true};
}

Oracle::Oracle(Problem problem, NoiseModel noise, std::uint64_t seed)
    : problem_(std::move(problem)), noise_(noise), seed_(seed), rng_(seed) {
  if (noise_.kind == NoiseKind::RadialPareto &&
      problem_.geometry.dual() != NormKind::L2) {
    throw DomainError("oracle: radial Pareto noise requires an l2 geometry");
  }
}

Vector Oracle::exact_gradient(std::span<const double> x) const {
  problem_.geometry.check_dim(x, "oracle");
  return problem_.gradient(x);
}

Vector Oracle::stochastic_grad(std::span<const double> x) {
  Vector g = exact_gradient(x);
  if (noise_.degenerate()) return g;
  const Vector xi = sample_noise(noise_, g.size(), rng_);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] += xi[i];
  return g;
}

Oracle Oracle::fork(std::uint64_t stream) const {
  return Oracle(problem_, noise_, derive_seed(seed_, stream));
}

}  // namespace cliplab
