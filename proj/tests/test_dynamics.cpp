#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "mavd/dynamics.hpp"
#include "mavd/error.hpp"
#include "support.hpp"

using namespace mavd;
using mavd_test::random_vec;

namespace {

Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }

MOProblem half_norm_squared(int d) {
  return MOProblem({ObjectiveSpec::quadratic(Mat::Identity(d, d), Vec::Zero(d))});
}

IntegratorConfig config(double alpha, long steps, SchemeVariant scheme = SchemeVariant::kCentralDifference) {
  IntegratorConfig c;
  c.alpha = alpha;
  c.steps = steps;
  c.scheme = scheme;
  return c;
}

const SchemeVariant kSchemes[] = {SchemeVariant::kSemiImplicitDamping, SchemeVariant::kExplicitEuler,
                                  SchemeVariant::kCentralDifference};

}  // namespace

TEST(Scheme, NamesRoundTrip) {
  for (auto s : kSchemes) EXPECT_EQ(parse_scheme(to_string(s)), s);
  EXPECT_FALSE(parse_scheme("leapfrog"));
}

TEST(Config, Validation) {
  IntegratorConfig c;
  EXPECT_NO_THROW(c.validate());
  c.t0 = 0.0;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.h = -1;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.alpha = 0;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.steps = -1;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.h = 0.5;
  c.alpha = 3;
  EXPECT_TRUE(c.coarse_damping());
  EXPECT_FALSE(IntegratorConfig{}.coarse_damping());
}

TEST(Step, StationaryAtMinimizer) {
  const auto p = half_norm_squared(2);
  for (auto scheme : kSchemes) {
    const auto r = step_mavd(p, State{1.0, Vec::Zero(2), Vec::Zero(2)}, config(3, 1, scheme));
    EXPECT_EQ(r.state.x, Vec::Zero(2));
    EXPECT_EQ(r.state.v, Vec::Zero(2));
    EXPECT_EQ(r.state.t, 1.0 + 1e-3);
  }
}

TEST(Step, FirstStepFromRest) {
  const auto p = builtin_quadratic();
  const Vec x0 = v2(-0.2, -0.1);
  const double h = 1e-3, alpha = 3.0;
  const Vec g = min_norm_in_hull(eval_bundle(p, x0).bundle).g;
  for (auto scheme : {SchemeVariant::kSemiImplicitDamping, SchemeVariant::kCentralDifference}) {
    const auto r = step_mavd(p, State{1.0, x0, Vec::Zero(2)}, config(alpha, 1, scheme));
    const Vec v1 = -h * g / (1.0 + h * alpha);
    EXPECT_LE((r.state.v - v1).cwiseAbs().maxCoeff(), 1e-15);
    const Vec x1 = x0 - h * h * g / (1.0 + h * alpha);
    EXPECT_LE((r.state.x - x1).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(Step, RejectsTimeBeforeStart) {
  EXPECT_THROW(step_mavd(builtin_quadratic(), State{0.5, v2(0, 0), v2(0, 0)}, config(3, 1)), Error);
}

TEST(Integrate, ZeroStepsHoldsInitialState) {
  const auto rec = integrate(builtin_quadratic(), v2(-0.2, -0.1), config(3, 0));
  EXPECT_EQ(rec.steps(), 0);
  EXPECT_EQ(rec.times.size(), 1);
  EXPECT_EQ(rec.position(0), v2(-0.2, -0.1));
  EXPECT_EQ(rec.velocity(0), v2(0, 0));
  EXPECT_EQ(rec.weights.rows(), 0);
}

TEST(Integrate, ShapesAndSimplexWeights) {
  const auto rec = integrate(builtin_logsumexp(), v2(0, 3), config(10, 500));
  EXPECT_EQ(rec.times.size(), 501);
  EXPECT_EQ(rec.positions.rows(), 501);
  EXPECT_EQ(rec.velocities.rows(), 501);
  EXPECT_EQ(rec.weights.rows(), 500);
  EXPECT_EQ(rec.directions.rows(), 500);
  for (long k = 0; k < 500; ++k) {
    EXPECT_GE(rec.weights.row(k).minCoeff(), 0.0);
    EXPECT_LE(std::abs(rec.weights.row(k).sum() - 1.0), 1e-12);
  }
  EXPECT_EQ(rec.times[500], 1.0 + 500 * 1e-3);
}

TEST(Integrate, RejectsBadInitialData) {
  EXPECT_THROW(integrate(builtin_quadratic(), Vec::Zero(3), config(3, 10)), Error);
  EXPECT_THROW(integrate(builtin_quadratic(), v2(NAN, 0), config(3, 10)), Error);
  EXPECT_THROW(integrate(builtin_quadratic(), v2(0, 0), config(3, 10), Vec::Zero(1)), Error);
}

TEST(Integrate, InitialVelocityOverride) {
  const auto rec = integrate(builtin_quadratic(), v2(0, 0), config(3, 5), v2(1, -1));
  EXPECT_EQ(rec.velocity(0), v2(1, -1));
}

TEST(Integrate, DivergenceCarriesStep) {
  // gradient field pushing outward: f = -1e3 |x|^2 / 2 (not convex, used only to blow up)
  Custom c;
  c.dim = 1;
  c.value = [](const Vec& x) { return -500.0 * x.squaredNorm(); };
  c.gradient = [](const Vec& x) { return Vec(-1000.0 * x); };
  const MOProblem p({ObjectiveSpec::custom(c)});
  IntegratorConfig cfg = config(3, 100000);
  cfg.h = 0.1;
  try {
    integrate(p, Vec::Constant(1, 1.0), cfg);
    FAIL() << "expected divergence";
  } catch (const DivergenceError& e) {
    EXPECT_GT(e.step(), 0);
    EXPECT_LT(e.step(), 100000);
    EXPECT_EQ(e.code(), ErrorCode::kDiverged);
  }
}

TEST(Integrate, Deterministic) {
  for (auto scheme : kSchemes) {
    const auto a = integrate(builtin_logsumexp(), v2(0, 3), config(3, 3000, scheme));
    const auto b = integrate(builtin_logsumexp(), v2(0, 3), config(3, 3000, scheme));
    EXPECT_EQ(a.positions, b.positions);
    EXPECT_EQ(a.velocities, b.velocities);
    EXPECT_EQ(a.weights, b.weights);
    EXPECT_EQ(a.directions, b.directions);
  }
}

TEST(Reduction, StepMatchesSingleObjectiveBitwise) {
  const ObjectiveSpec f = ObjectiveSpec::quadratic(Mat::Identity(3, 3), Vec::Zero(3));
  const MOProblem p({f});
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> time(1.0, 50.0);
  for (auto scheme : kSchemes) {
    if (scheme == SchemeVariant::kExplicitEuler) continue;  // different update
    for (int n = 0; n < 1000; ++n) {
      const State s{time(rng), random_vec(rng, 3, -2, 2), n % 10 == 0 ? Vec(Vec::Zero(3)) : random_vec(rng, 3, -1, 1)};
      IntegratorConfig cfg = config(3.0 + n % 7, 1, scheme);
      const auto r = step_mavd(p, s, cfg);
      const State a = step_avd(f, s, cfg.alpha, cfg.h);
      ASSERT_EQ(r.state.x, a.x);
      ASSERT_EQ(r.state.v, a.v);
      ASSERT_EQ(r.selection.theta.size(), 1);
      ASSERT_EQ(r.selection.theta[0], 1.0);
    }
  }
}

TEST(Reduction, TrajectoryMatchesComposition) {
  const ObjectiveSpec f = ObjectiveSpec::quadratic(Mat::Identity(2, 2), Vec::Zero(2));
  const MOProblem p({f});
  for (long K : {100L, 1000L}) {
    const IntegratorConfig cfg = config(3, K);
    const auto rec = integrate(p, v2(1, -0.5), cfg);
    State s{cfg.t0, v2(1, -0.5), Vec::Zero(2)};
    for (long k = 0; k < K; ++k) {
      s = step_avd(f, s, cfg.alpha, cfg.h);
      s.t = cfg.t0 + static_cast<double>(k + 1) * cfg.h;
      ASSERT_EQ(s.x, rec.position(k + 1)) << "step " << k + 1;
      ASSERT_EQ(s.v, rec.velocity(k + 1)) << "step " << k + 1;
    }
  }
}

TEST(Avd, HandArithmetic) {
  const ObjectiveSpec f = ObjectiveSpec::quadratic(Mat::Identity(1, 1), Vec::Zero(1));
  const State s = step_avd(f, State{1.0, Vec::Constant(1, 1.0), Vec::Zero(1)}, 3.0, 0.1);
  EXPECT_DOUBLE_EQ(s.v[0], -0.1 / 1.3);
  EXPECT_DOUBLE_EQ(s.x[0], 1.0 + 0.1 * (-0.1 / 1.3));
  EXPECT_DOUBLE_EQ(s.t, 1.1);
}

TEST(Avd, MinimizerIsFixed) {
  const ObjectiveSpec f = ObjectiveSpec::quadratic(Mat::Identity(2, 2), v2(0.5, 0.5));
  const State s = step_avd(f, State{2.0, v2(0.5, 0.5), Vec::Zero(2)}, 3.0, 0.01);
  EXPECT_EQ(s.x, v2(0.5, 0.5));
  EXPECT_EQ(s.v, v2(0, 0));
}

TEST(Mog, CriticalPointIsFixed) {
  const auto p = builtin_quadratic();
  const Vec z = pareto_point(*p.front(), 0.3);
  const State s = step_mog(p, State{1.0, z, Vec::Zero(2)}, 1e-2);
  EXPECT_LE((s.x - z).norm(), 1e-12);
}

TEST(Mog, SingleObjectiveIsGradientDescent) {
  const auto p = half_norm_squared(2);
  const State s = step_mog(p, State{1.0, v2(1, 2), Vec::Zero(2)}, 0.1);
  EXPECT_EQ(s.x, v2(0.9, 1.8));
  EXPECT_EQ(s.v, v2(-1, -2));
}

TEST(Mog, ObjectivesDecrease) {
  const auto p = builtin_quadratic();
  State s{1.0, v2(-0.2, -0.1), Vec::Zero(2)};
  double f0 = eval_objective(p, 0, s.x), f1 = eval_objective(p, 1, s.x);
  for (int k = 0; k < 1000; ++k) {
    s = step_mog(p, s, 1e-3);
    const double n0 = eval_objective(p, 0, s.x), n1 = eval_objective(p, 1, s.x);
    ASSERT_LE(n0, f0 + 1e-9) << "step " << k;
    ASSERT_LE(n1, f1 + 1e-9) << "step " << k;
    f0 = n0;
    f1 = n1;
  }
}

// --- properties --------------------------------------------------------------

TEST(Property, LevelSetContainmentShortRuns) {
  for (const auto& [p, x0] : {std::pair{builtin_quadratic(), v2(-0.2, -0.1)}, std::pair{builtin_logsumexp(), v2(0, 3)}}) {
    for (double alpha : {3.0, 10.0, 50.0, 100.0}) {
      const auto rec = integrate(p, x0, config(alpha, 10000));
      const Vec f0 = eval_bundle(p, x0).values;
      double worst = -INFINITY;
      for (long k = 0; k <= rec.steps(); ++k) {
        worst = std::max(worst, (eval_bundle(p, rec.position(k)).values - f0).maxCoeff());
      }
      EXPECT_LE(worst, 1e-6) << "alpha " << alpha;
    }
  }
}

TEST(Property, StepHalvingIsFirstOrder) {
  // Final state at T = 3 for h, h/2, h/4; successive differences shrink by ~2.
  const auto p = builtin_quadratic();
  for (auto scheme : kSchemes) {
    Vec finals[3];
    double h = 1e-2;
    for (auto& x : finals) {
      IntegratorConfig cfg = config(3, static_cast<long>(std::lround(2.0 / h)), scheme);
      cfg.h = h;
      x = integrate(p, v2(-0.2, -0.1), cfg).position(cfg.steps);
      h /= 2;
    }
    const double ratio = (finals[0] - finals[1]).norm() / (finals[1] - finals[2]).norm();
    EXPECT_GE(ratio, 1.5) << to_string(scheme);
    EXPECT_LE(ratio, 2.5) << to_string(scheme);
  }
}
