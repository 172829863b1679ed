#include "cliplab/clipping.hpp"

#include <cmath>
#include <string>

namespace cliplab {

Vector clip(std::span<const double> g, double lambda, NormKind dual) {
  if (!(lambda > 0.0)) throw DomainError("clip: lambda must be positive");
  const double n = norm(dual, g);
  if (n <= lambda) return Vector(g.begin(), g.end());
  return scaled(g, lambda / n);
}

bool clips(std::span<const double> g, double lambda, NormKind dual) {
  return norm(dual, g) > lambda;
}

ThetaEstimate estimate_theta(std::span<const double> clipped,
                             std::span<const double> x, double lambda,
                             std::size_t m, Oracle& aux) {
  if (m < 2) throw DomainError("estimate_theta: need at least 2 resamples");
  const NormKind dual = aux.problem().geometry.dual();
  const Vector grad = aux.exact_gradient(x);
  require_same_size(clipped, grad, "estimate_theta");
  const std::size_t d = grad.size();

  std::vector<Vector> samples;
  samples.reserve(m);
  Vector mean(d, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    samples.push_back(clip(aux.stochastic_grad(x), lambda, dual));
    for (std::size_t i = 0; i < d; ++i) mean[i] += samples.back()[i];
  }
  for (double& v : mean) v /= static_cast<double>(m);

  double var_sum = 0.0;
  double sq_sum = 0.0, sq_sumsq = 0.0;
  for (const Vector& s : samples) {
    const Vector c = sub(s, mean);
    var_sum += squared_norm2(c);
    const double nd = norm(dual, c);
    sq_sum += nd * nd;
    sq_sumsq += nd * nd * nd * nd;
  }
  const double md = static_cast<double>(m);

  ThetaEstimate est;
  est.m = m;
  est.theta = sub(clipped, grad);
  est.theta_b = sub(mean, grad);
  est.theta_u = sub(est.theta, est.theta_b);
  est.mc_stderr = std::sqrt(var_sum / (md - 1.0) / md);
  // Unbiased for the conditional second moment after the m/(m-1) correction.
  est.theta_u_sq = sq_sum / (md - 1.0);
  const double mean_sq = sq_sum / md;
  const double var_sq = std::max(0.0, sq_sumsq / md - mean_sq * mean_sq);
  est.theta_u_sq_stderr = std::sqrt(var_sq / md) * md / (md - 1.0);
  return est;
}

ThetaEstimate estimate_theta(Oracle& oracle, std::span<const double> x,
                             double lambda, std::size_t m) {
  const NormKind dual = oracle.problem().geometry.dual();
  const Vector clipped = clip(oracle.stochastic_grad(x), lambda, dual);
  return estimate_theta(clipped, x, lambda, m, oracle);
}

Vector geometric_median(const std::vector<Vector>& points, double tol,
                        std::size_t max_iter) {
  if (points.empty()) throw DomainError("geometric_median: no points");
  const std::size_t d = points.front().size();
  for (const Vector& p : points) {
    if (p.size() != d) throw DomainError("geometric_median: dimension mismatch");
  }
  if (points.size() == 1) return points.front();

  Vector y(d, 0.0);
  for (const Vector& p : points) {
    for (std::size_t i = 0; i < d; ++i) y[i] += p[i];
  }
  for (double& v : y) v /= static_cast<double>(points.size());

  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    Vector num(d, 0.0);
    Vector r(d, 0.0);
    double wsum = 0.0;
    std::size_t coincident = 0;
    for (const Vector& p : points) {
      const Vector diff = sub(p, y);
      const double dist = norm2(diff);
      if (dist <= 1e-15 * (1.0 + norm2(y))) {
        ++coincident;
        continue;
      }
      const double w = 1.0 / dist;
      wsum += w;
      for (std::size_t i = 0; i < d; ++i) {
        num[i] += w * p[i];
        r[i] += w * diff[i];
      }
    }

    Vector next;
    if (wsum == 0.0) return y;
    Vector t = scaled(num, 1.0 / wsum);
    if (coincident == 0) {
      next = std::move(t);
    } else {
      const double rn = norm2(r);
      const double eta = static_cast<double>(coincident);
      if (rn <= eta) return y;  // y is the median
      const double beta = eta / rn;
      next = lerp(t, y, beta);
    }
    const double step = norm2(sub(next, y));
    y = std::move(next);
    if (step <= tol * (1.0 + norm2(y))) return y;
  }
  throw ConvergenceError("geometric_median: no convergence after " +
                         std::to_string(max_iter) + " iterations");
}

G0Estimate estimate_g0(Oracle& oracle, std::span<const double> x0,
                       std::size_t blocks, std::size_t per_block) {
  if (blocks < 1 || per_block < 1) {
    throw DomainError("estimate_g0: blocks and per_block must be positive");
  }
  const std::size_t d = x0.size();
  std::vector<Vector> means;
  means.reserve(blocks);
  for (std::size_t b = 0; b < blocks; ++b) {
    Vector mean(d, 0.0);
    for (std::size_t j = 0; j < per_block; ++j) {
      const Vector g = oracle.stochastic_grad(x0);
      for (std::size_t i = 0; i < d; ++i) mean[i] += g[i];
    }
    for (double& v : mean) v /= static_cast<double>(per_block);
    means.push_back(std::move(mean));
  }
  G0Estimate out;
  out.g0 = geometric_median(means);
  const double sigma = oracle.noise().sigma;
  if (sigma > 0.0 && !oracle.noise().degenerate()) {
    const Vector err = sub(out.g0, oracle.exact_gradient(x0));
    out.mu = oracle.problem().geometry.dual_norm(err) / sigma;
  }
  return out;
}

}  // namespace cliplab
