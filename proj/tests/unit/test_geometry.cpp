#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cliplab/geometry.hpp"
#include "test_helpers.hpp"

using namespace cliplab;
using cliplab::testing::random_gaussian;
using cliplab::testing::random_in_ball;
using cliplab::testing::random_simplex;

TEST(Norms, Examples) {
  EXPECT_DOUBLE_EQ(Geometry::euclidean(2).norm(Vector{3, 4}), 5.0);
  const Geometry s = Geometry::simplex(3);
  EXPECT_DOUBLE_EQ(s.norm(Vector{1, -2, 0.5}), 3.5);
  EXPECT_DOUBLE_EQ(s.dual_norm(Vector{1, -2, 0.5}), 2.0);
}

TEST(Norms, DimensionMismatchThrows) {
  EXPECT_THROW(Geometry::euclidean(2).norm(Vector{1, 2, 3}), DomainError);
  EXPECT_THROW(Geometry::simplex(2).dual_norm(Vector{1}), DomainError);
}

TEST(Bregman, Examples) {
  const Geometry e = Geometry::euclidean(2);
  EXPECT_DOUBLE_EQ(e.bregman(Vector{0.3, 0.7}, Vector{0.3, 0.7}), 0.0);
  EXPECT_DOUBLE_EQ(e.bregman(Vector{1, 0}, Vector{0, 0}), 0.5);
  // KL((1,0) || (1/2,1/2)) = 1 * log(1 / 0.5)
  EXPECT_NEAR(Geometry::simplex(2).bregman(Vector{1, 0}, Vector{0.5, 0.5}), std::log(2.0), 1e-15);
}

TEST(Bregman, BoundaryDivergenceUndefined) {
  try {
    Geometry::simplex(2).bregman(Vector{0.5, 0.5}, Vector{1, 0});
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("divergence undefined"), std::string::npos);
  }
}

TEST(MirrorStep, Examples) {
  const Vector a = Geometry::euclidean(2).mirror_step(Vector{1, 1}, Vector{1, 0}, 0.5);
  EXPECT_DOUBLE_EQ(a[0], 0.5);
  EXPECT_DOUBLE_EQ(a[1], 1.0);

  // x_i exp(-eta g_i) with eta = log 2: (0.25, 0.5) renormalized
  const Vector b = Geometry::simplex(2).mirror_step(Vector{0.5, 0.5}, Vector{1, 0}, std::log(2.0));
  EXPECT_NEAR(b[0], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(b[1], 2.0 / 3.0, 1e-15);

  const Vector c = Geometry::ball(1.0, {0, 0}).mirror_step(Vector{0.8, 0}, Vector{-1, 0}, 1.0);
  EXPECT_NEAR(c[0], 1.0, 1e-15);
  EXPECT_NEAR(c[1], 0.0, 1e-15);
}

TEST(MirrorStep, RejectsNonpositiveEta) {
  EXPECT_THROW(Geometry::euclidean(1).mirror_step(Vector{1}, Vector{1}, 0.0), DomainError);
}

TEST(MirrorStep, EntropyNeverOverflows) {
  const Geometry s = Geometry::simplex(3);
  const Vector x = s.mirror_step(Vector{0.2, 0.3, 0.5}, Vector{-1e6, 1e6, 0}, 10.0);
  EXPECT_TRUE(all_finite(x));
  EXPECT_TRUE(s.contains(x));
}

TEST(MirrorStep, EntropyKeepsIteratesInterior) {
  const Geometry s = Geometry::simplex(4);
  Vector x{0.25, 0.25, 0.25, 0.25};
  for (int k = 0; k < 50; ++k) x = s.mirror_step(x, Vector{5, -1, 0, 2}, 1.0);
  for (double v : x) EXPECT_GT(v, 0.0);
  EXPECT_TRUE(s.contains(x));
}

TEST(Geometry, InvalidConstruction) {
  EXPECT_THROW(Geometry::euclidean(0), DomainError);
  EXPECT_THROW(Geometry::ball(0.0, {0, 0}), DomainError);
  EXPECT_THROW(Geometry::ball(1.0, {}), DomainError);
}

namespace {

struct Sampler {
  Geometry geom;
  std::function<Vector(Rng&)> draw;
};

std::vector<Sampler> samplers() {
  const Vector c{0.5, -1.0, 0.25};
  return {
      {Geometry::euclidean(3), [](Rng& r) { return random_gaussian(r, 3, 2.0); }},
      {Geometry::ball(1.5, c), [c](Rng& r) { return random_in_ball(r, c, 1.5); }},
      {Geometry::simplex(4), [](Rng& r) { return random_simplex(r, 4); }},
  };
}

}  // namespace

TEST(GeometryProperties, StrongConvexity) {
  Rng rng(11);
  for (const auto& s : samplers()) {
    for (int i = 0; i < 1000; ++i) {
      const Vector x = s.draw(rng), y = s.draw(rng);
      const double n = s.geom.norm(sub(x, y));
      EXPECT_GE(s.geom.bregman(x, y), 0.5 * n * n - 1e-12) << to_string(s.geom.kind());
    }
  }
}

TEST(GeometryProperties, ThreePointIdentity) {
  Rng rng(12);
  for (const auto& s : samplers()) {
    for (int i = 0; i < 300; ++i) {
      const Vector x = s.draw(rng), y = s.draw(rng), z = s.draw(rng);
      const double lhs = s.geom.bregman(x, z);
      const double rhs = s.geom.bregman(x, y) + s.geom.bregman(y, z) +
                         dot(sub(s.geom.grad_psi(y), s.geom.grad_psi(z)), sub(x, y));
      EXPECT_NEAR(lhs, rhs, 1e-9 * std::max(1.0, std::abs(lhs)));
    }
  }
}

TEST(GeometryProperties, MirrorStepFirstOrderOptimality) {
  Rng rng(13);
  for (const auto& s : samplers()) {
    for (int call = 0; call < 20; ++call) {
      const Vector x = s.draw(rng);
      const Vector g = random_gaussian(rng, s.geom.dim(), 3.0);
      const double eta = 0.05 + rng.uniform();
      const Vector xp = s.geom.mirror_step(x, g, eta);
      ASSERT_TRUE(s.geom.contains(xp));
      const Vector w = sub(add(scaled(g, eta), s.geom.grad_psi(xp)), s.geom.grad_psi(x));
      for (int k = 0; k < 100; ++k) {
        const Vector u = s.draw(rng);
        EXPECT_GE(dot(w, sub(u, xp)), -1e-8);
      }
    }
  }
}

namespace {

// Euclidean projection onto the simplex (sort-based).
Vector project_simplex(const Vector& v) {
  Vector u = v;
  std::sort(u.begin(), u.end(), std::greater<>());
  double css = 0.0, theta = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    css += u[i];
    const double t = (css - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0) theta = t;
  }
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i] - theta, 1e-300);
  return out;
}

// Generic projected-gradient minimizer of eta <g, u> + D(u, x).
Vector numeric_prox(const Geometry& geom, const Vector& x, const Vector& g, double eta) {
  Vector u = x;
  const double step = geom.kind() == GeometryKind::SimplexEntropy ? 0.02 : 0.5;
  for (int it = 0; it < 40000; ++it) {
    const Vector grad = add(scaled(g, eta), sub(geom.grad_psi(u), geom.grad_psi(x)));
    Vector v = axpy(u, -step, grad);
    if (geom.kind() == GeometryKind::SimplexEntropy) {
      v = project_simplex(v);
    } else if (geom.kind() == GeometryKind::EuclideanBall) {
      const Vector off = sub(v, geom.center());
      const double n = norm2(off);
      if (n > geom.radius()) v = axpy(geom.center(), geom.radius() / n, off);
    }
    u = v;
  }
  return u;
}

}  // namespace

TEST(GeometryProperties, ClosedFormMatchesNumericMinimizer) {
  Rng rng(14);
  for (std::size_t d : {2u, 3u, 5u}) {
    const Vector c(d, 0.1);
    const std::vector<Geometry> geoms{Geometry::euclidean(d), Geometry::ball(0.8, c),
                                      Geometry::simplex(d)};
    for (const auto& geom : geoms) {
      Vector x = geom.kind() == GeometryKind::SimplexEntropy ? random_simplex(rng, d)
                 : geom.kind() == GeometryKind::EuclideanBall ? random_in_ball(rng, c, 0.8)
                                                              : random_gaussian(rng, d);
      const Vector g = random_gaussian(rng, d);
      const double eta = 0.7;
      const Vector closed = geom.mirror_step(x, g, eta);
      const Vector numeric = numeric_prox(geom, x, g, eta);
      for (std::size_t i = 0; i < d; ++i) {
        EXPECT_NEAR(closed[i], numeric[i], 1e-6) << to_string(geom.kind()) << " d=" << d;
      }
    }
  }
}
