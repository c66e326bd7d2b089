#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "mavd/error.hpp"
#include "mavd/merit.hpp"
#include "support.hpp"

using namespace mavd;

namespace {

Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }

const Vec kQuadStart = v2(-0.2, -0.1);
const Vec kLseStart = v2(0.0, 3.0);

Eigen::Vector2d e2(const Vec& x) { return {x[0], x[1]}; }

// Uniform grid over the closed-form front, precomputed once.
struct GridOracle {
  std::vector<Eigen::Vector2d> z;
  std::vector<double> f0, f1;

  template <class F, class Z>
  GridOracle(F f, Z front, long n) {
    for (long j = 0; j < n; ++j) {
      z.push_back(front(static_cast<double>(j) / static_cast<double>(n - 1)));
      f0.push_back(f(0, z.back()));
      f1.push_back(f(1, z.back()));
    }
  }

  template <class F>
  double u0(F f, const Eigen::Vector2d& x) const {
    const double a = f(0, x), b = f(1, x);
    double best = -INFINITY;
    for (std::size_t j = 0; j < z.size(); ++j) best = std::max(best, std::min(a - f0[j], b - f1[j]));
    return best;
  }
};

MOProblem single(const Vec& minimizer) {
  const auto d = minimizer.size();
  return MOProblem({ObjectiveSpec::quadratic(Mat::Identity(d, d), minimizer)},
                   segment_front(minimizer, minimizer, true));
}

template <class Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no exception";
  return ErrorCode::kInvalidArgument;
}

std::vector<Vec> level_set_points(const MOProblem& p, const Vec& x0, int count, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-4, 4);
  const Vec f0 = eval_bundle(p, x0).values;
  std::vector<Vec> out;
  while (static_cast<int>(out.size()) < count) {
    const Vec x = v2(u(rng), u(rng));
    if (((eval_bundle(p, x).values - f0).array() <= 0.0).all()) out.push_back(x);
  }
  return out;
}

IntegratorConfig config(double alpha, long steps) {
  IntegratorConfig c;
  c.alpha = alpha;
  c.steps = steps;
  return c;
}

}  // namespace

TEST(Oracle, RequiresInjectiveFront) {
  EXPECT_EQ(code_of([] { make_front_oracle(MOProblem({ObjectiveSpec::quadratic(Mat::Identity(2, 2), Vec::Zero(2))})); }),
            ErrorCode::kUnsupported);
  const MOProblem flat({ObjectiveSpec::quadratic(Mat::Identity(2, 2), Vec::Zero(2))},
                       segment_front(v2(0, 0), v2(1, 0), false));
  EXPECT_EQ(code_of([&] { make_front_oracle(flat); }), ErrorCode::kUnsupported);
  EXPECT_THROW(make_front_oracle(builtin_quadratic(), 1), Error);
}

TEST(U0, ZeroOnFront) {
  for (const auto& p : {builtin_quadratic(), builtin_logsumexp()}) {
    const auto o = make_front_oracle(p);
    for (double l : {0.0, 0.1, 0.5, 0.77, 1.0}) {
      EXPECT_NEAR(eval_u0(o, p, pareto_point(*p.front(), l)), 0.0, 1e-8) << "lambda " << l;
    }
  }
}

TEST(U0, QuadraticStartMatchesGrid) {
  const auto p = builtin_quadratic();
  const double u = eval_u0(make_front_oracle(p), p, kQuadStart);
  EXPECT_GT(u, 0.0);
  const double grid = mavd_test::grid_u0(mavd_test::quad_f, mavd_test::quad_front, e2(kQuadStart), 1'000'000);
  EXPECT_NEAR(u, grid, 1e-6);
  EXPECT_NEAR(u, 0.994451, 1e-6);
}

TEST(U0, LogSumExpStart) {
  const auto p = builtin_logsumexp();
  const double u = eval_u0(make_front_oracle(p), p, kLseStart);
  const double grid = mavd_test::grid_u0(mavd_test::lse_f, mavd_test::lse_front, e2(kLseStart), 1'000'000);
  EXPECT_GE(u, grid - 1e-12);
  // kink crossing near lambda = 1/4; the log terms pull it down by about e^-10
  EXPECT_NEAR(u, 20.0 - std::exp(-10.0), 1e-7);
}

TEST(U0, SingleObjectiveIsSuboptimality) {
  const Vec xs = v2(0.5, -1.0);
  const auto p = single(xs);
  const auto o = make_front_oracle(p);
  std::mt19937_64 rng(4);
  for (int n = 0; n < 50; ++n) {
    const Vec x = mavd_test::random_vec(rng, 2, -3, 3);
    EXPECT_NEAR(eval_u0(o, p, x), 0.5 * (x - xs).squaredNorm(), 1e-10);
  }
}

TEST(U0, BruteForceTwoPointGrid) {
  const auto p = builtin_quadratic();
  const auto o = make_front_oracle(p);
  const Vec x = v2(0.3, 0.1);
  const Vec fx = eval_bundle(p, x).values;
  const double at0 = (fx - eval_bundle(p, v2(0, 1)).values).minCoeff();
  const double at1 = (fx - eval_bundle(p, v2(1, 0)).values).minCoeff();
  EXPECT_EQ(eval_u0_bruteforce(o, p, x, 2), std::max(at0, at1));
}

TEST(U0, BruteForceVanishesOnGridFrontPoints) {
  const auto p = builtin_logsumexp();
  const auto o = make_front_oracle(p);
  for (int j = 0; j <= 10; ++j) {
    EXPECT_LE(std::abs(eval_u0_bruteforce(o, p, pareto_point(*p.front(), j / 10.0), 11)), 1e-12);
  }
}

TEST(U0, AgreesWithBruteForceOnQuadraticLevelSet) {
  const auto p = builtin_quadratic();
  const auto o = make_front_oracle(p);
  const GridOracle grid(mavd_test::quad_f, mavd_test::quad_front, 1'000'000);
  for (const Vec& x : level_set_points(p, kQuadStart, 100, 41)) {
    EXPECT_NEAR(eval_u0(o, p, x), grid.u0(mavd_test::quad_f, e2(x)), 1e-6) << x.transpose();
  }
}

TEST(U0, LogSumExpGridErrorWithinResolution) {
  // The uniform grid can only miss the kink maximum by slope * spacing / 2;
  // slopes of f_i along this front are bounded by 40.
  const auto p = builtin_logsumexp();
  const auto o = make_front_oracle(p);
  const long n = 1'000'000;
  const GridOracle grid(mavd_test::lse_f, mavd_test::lse_front, n);
  const double resolution = 40.0 * 0.5 / static_cast<double>(n - 1) + 1e-12;
  for (const Vec& x : level_set_points(p, kLseStart, 100, 42)) {
    const double u = eval_u0(o, p, x);
    const double g = grid.u0(mavd_test::lse_f, e2(x));
    EXPECT_GE(u, g - 1e-12);
    EXPECT_LE(u - g, resolution);
  }
}

TEST(U0, AgreesWithNestedGrid) {
  // coarse grid, then an equally fine grid across the two best cells
  auto nested = [](auto f, auto front, const Eigen::Vector2d& x, long n) {
    const double a = f(0, x), b = f(1, x);
    double best = -INFINITY;
    long arg = 0;
    for (long j = 0; j < n; ++j) {
      const auto z = front(static_cast<double>(j) / (n - 1));
      const double v = std::min(a - f(0, z), b - f(1, z));
      if (v > best) best = v, arg = j;
    }
    const double lo = std::max(0.0, (arg - 1.0) / (n - 1)), hi = std::min(1.0, (arg + 1.0) / (n - 1));
    for (long j = 0; j < n; ++j) {
      const auto z = front(lo + (hi - lo) * j / (n - 1));
      best = std::max(best, std::min(a - f(0, z), b - f(1, z)));
    }
    return best;
  };
  const auto q = builtin_quadratic();
  const auto l = builtin_logsumexp();
  for (const Vec& x : level_set_points(q, kQuadStart, 20, 43)) {
    EXPECT_NEAR(eval_u0(make_front_oracle(q), q, x), nested(mavd_test::quad_f, mavd_test::quad_front, e2(x), 20000), 1e-8);
  }
  for (const Vec& x : level_set_points(l, kLseStart, 20, 44)) {
    EXPECT_NEAR(eval_u0(make_front_oracle(l), l, x), nested(mavd_test::lse_f, mavd_test::lse_front, e2(x), 20000), 1e-6);
  }
}

TEST(U0, NonNegativeOnLevelSet) {
  for (const auto& [p, x0] : {std::pair{builtin_quadratic(), kQuadStart}, std::pair{builtin_logsumexp(), kLseStart}}) {
    const auto o = make_front_oracle(p);
    for (const Vec& x : level_set_points(p, x0, 200, 45)) EXPECT_GE(eval_u0(o, p, x), -1e-10);
    for (int j = 0; j <= 50; ++j) {
      EXPECT_GE(eval_u0(o, p, pareto_point(*p.front(), j / 50.0)), -1e-10);
    }
  }
}

TEST(R, FrontPointAtStart) {
  const auto p = single(v2(1, 2));
  EXPECT_EQ(compute_R(make_front_oracle(p), p, v2(1, 2)), 0.0);
}

TEST(R, QuadraticMatchesGrid) {
  const auto p = builtin_quadratic();
  const double R = compute_R(make_front_oracle(p), p, kQuadStart);
  const double grid = mavd_test::grid_R(mavd_test::quad_f, mavd_test::quad_front, e2(kQuadStart), 1'000'000);
  EXPECT_NEAR(R, grid, 1e-6);
  EXPECT_NEAR(R, 0.704418, 1e-6);
}

TEST(R, LogSumExpMatchesBoundarySearch) {
  // 1/2 |z(l) - x0|^2 is convex along the segment, so the maximum over the
  // dominated interval sits at one of its ends; find the ends by bisection.
  const auto p = builtin_logsumexp();
  const double R = compute_R(make_front_oracle(p), p, kLseStart);
  const Eigen::Vector2d x0 = e2(kLseStart);
  auto dominated = [&](double l) {
    const auto z = mavd_test::lse_front(l);
    return mavd_test::lse_f(0, z) <= mavd_test::lse_f(0, x0) && mavd_test::lse_f(1, z) <= mavd_test::lse_f(1, x0);
  };
  const long n = 10000;
  long first = -1, last = -1;
  for (long j = 0; j < n; ++j) {
    if (dominated(j / (n - 1.0))) {
      if (first < 0) first = j;
      last = j;
    }
  }
  ASSERT_GE(first, 0);
  auto edge = [&](double in, double out) {
    for (int it = 0; it < 200 && std::abs(in - out) > 1e-15; ++it) {
      const double mid = 0.5 * (in + out);
      (dominated(mid) ? in : out) = mid;
    }
    return in;
  };
  const double lo = first == 0 ? 0.0 : edge(first / (n - 1.0), (first - 1) / (n - 1.0));
  const double hi = last == n - 1 ? 1.0 : edge(last / (n - 1.0), (last + 1) / (n - 1.0));
  const double expect = std::max(0.5 * (mavd_test::lse_front(lo) - x0).squaredNorm(),
                                 0.5 * (mavd_test::lse_front(hi) - x0).squaredNorm());
  EXPECT_NEAR(R, expect, 1e-8);
}

TEST(R, EmptyRestrictionViolatesAssumption) {
  const MOProblem p({ObjectiveSpec::quadratic(Mat::Identity(2, 2), v2(1, 0)),
                     ObjectiveSpec::quadratic(Mat::Identity(2, 2), v2(0, 1))},
                    segment_front(v2(5, 5), v2(6, 6), true));
  EXPECT_EQ(code_of([&] { compute_R(make_front_oracle(p), p, v2(0.5, 0.5)); }), ErrorCode::kAssumptionViolated);
}

TEST(Sampling, StepsIncludeFinal) {
  EXPECT_EQ(sampled_steps(10, 3), (std::vector<long>{0, 3, 6, 9, 10}));
  EXPECT_EQ(sampled_steps(10, 5), (std::vector<long>{0, 5, 10}));
  EXPECT_EQ(sampled_steps(0, 100), (std::vector<long>{0}));
  EXPECT_THROW(sampled_steps(10, 0), Error);
}

TEST(Certificate, InitialRowAndConstant) {
  const auto p = builtin_quadratic();
  const auto o = make_front_oracle(p);
  const auto traj = integrate(p, kQuadStart, config(3, 1000));
  const auto cert = certify_bound(traj, o, p, 100);
  ASSERT_EQ(cert.rows.size(), 11u);
  EXPECT_EQ(cert.status, CertificateStatus::kPass);
  EXPECT_EQ(cert.rows[0].k, 0);
  EXPECT_NEAR(cert.rows[0].bound, cert.u0_initial + 2.0 * 2.0 * cert.R, 1e-15);
  EXPECT_GE(cert.rows[0].slack, 0.0);
  for (const auto& r : cert.rows) EXPECT_DOUBLE_EQ(r.slack, r.bound - r.u0);
  EXPECT_FALSE(cert.first_violation);
}

TEST(Certificate, NotApplicableBelowThree) {
  const auto p = builtin_quadratic();
  const auto cert = certify_bound(integrate(p, kQuadStart, config(2, 100)), make_front_oracle(p), p);
  EXPECT_EQ(cert.status, CertificateStatus::kNotApplicable);
  EXPECT_TRUE(cert.rows.empty());
  EXPECT_STREQ(to_string(cert.status), "not-applicable");
}

TEST(Certificate, ZeroStepsPassVacuously) {
  const auto p = builtin_logsumexp();
  const auto cert = certify_bound(integrate(p, kLseStart, config(3, 0)), make_front_oracle(p), p);
  ASSERT_EQ(cert.rows.size(), 1u);
  EXPECT_EQ(cert.status, CertificateStatus::kPass);
}

TEST(Certificate, FrozenTrajectoryFails) {
  // u0 stays at u0(x0) while the bound decays like 1/t^2.
  const auto p = builtin_quadratic();
  auto traj = integrate(p, kQuadStart, config(3, 0));
  const long K = 5000;
  traj.times = Vec::LinSpaced(K + 1, 1.0, 1.0 + K * 1e-3);
  traj.positions = kQuadStart.transpose().replicate(K + 1, 1);
  traj.velocities = RowMat::Zero(K + 1, 2);
  traj.weights = RowMat::Constant(K, 2, 0.5);
  traj.directions = RowMat::Zero(K, 2);
  const auto cert = certify_bound(traj, make_front_oracle(p), p, 100);
  EXPECT_EQ(cert.status, CertificateStatus::kFail);
  ASSERT_TRUE(cert.first_violation);
  EXPECT_GT(*cert.first_violation, 0);
  EXPECT_LT(cert.worst_slack, 0.0);
  const double constant = cert.constant;
  const auto& row = cert.rows[static_cast<std::size_t>(*cert.first_violation / 100)];
  EXPECT_GT(cert.u0_initial, constant / (row.t * row.t));
}

TEST(Certificate, BoundMonotoneInAlpha) {
  const auto p = builtin_logsumexp();
  const auto o = make_front_oracle(p);
  auto traj = integrate(p, kLseStart, config(3, 2000));
  const auto low = certify_bound(traj, o, p, 100);
  for (double alpha : {3.5, 10.0, 100.0}) {
    traj.config.alpha = alpha;
    const auto high = certify_bound(traj, o, p, 100);
    ASSERT_EQ(high.rows.size(), low.rows.size());
    for (std::size_t j = 0; j < low.rows.size(); ++j) EXPECT_GT(high.rows[j].bound, low.rows[j].bound);
  }
}

TEST(Certificate, Tolerance) {
  EXPECT_DOUBLE_EQ(bound_tolerance(0.0), 1e-8);
  EXPECT_DOUBLE_EQ(bound_tolerance(3.0), 4e-8);
}

TEST(LevelSet, PassAndConstructedViolation) {
  const auto p = builtin_quadratic();
  auto traj = integrate(p, kQuadStart, config(10, 2000));
  const auto ok = check_level_set(traj, p);
  EXPECT_TRUE(ok.pass);
  EXPECT_LE(ok.worst_excess, 1e-6);
  traj.positions.row(1000) << -3.0, -3.0;
  const auto bad = check_level_set(traj, p);
  EXPECT_FALSE(bad.pass);
  EXPECT_EQ(bad.violations, 1);
}

TEST(Energy, StationaryTrajectory) {
  const auto p = single(v2(0.25, 0.75));
  const auto traj = integrate(p, v2(0.25, 0.75), config(3, 500));
  const auto r = energy_report(traj, p, nullptr, EnergyOptions{.z = v2(0.25, 0.75)});
  for (long k = 0; k <= 500; ++k) EXPECT_EQ(r.objective_energy(k, 0), 0.0);
  EXPECT_EQ(r.energy_violations, 0);
  EXPECT_TRUE(r.energy_monotone);
  EXPECT_EQ(r.lyapunov_violations, 0);
  EXPECT_EQ(r.lyapunov_pass_fraction, 1.0);
  EXPECT_EQ(r.tail_fraction, 0.0);
  EXPECT_TRUE(r.merit_energy.size() == 0);
}

TEST(Energy, HypothesisAndInputErrors) {
  const auto p = builtin_quadratic();
  const auto traj = integrate(p, kQuadStart, config(2.5, 10));
  EXPECT_EQ(code_of([&] { energy_report(traj, p, nullptr, EnergyOptions{.lambda = 2.0, .z = v2(0, 0)}); }),
            ErrorCode::kConfig);
  EXPECT_EQ(code_of([&] { energy_report(traj, p, nullptr, EnergyOptions{.lambda = 1.0, .z = std::nullopt}); }), ErrorCode::kConfig);
  EXPECT_NO_THROW(energy_report(traj, p, nullptr, EnergyOptions{.lambda = 1.5, .z = v2(0, 0)}));
}

TEST(Energy, SeriesLengthsAndDefaults) {
  const auto p = builtin_quadratic();
  const auto o = make_front_oracle(p);
  const auto traj = integrate(p, kQuadStart, config(3, 1000));
  const auto r = energy_report(traj, p, &o);
  EXPECT_EQ(r.objective_energy.rows(), 1001);
  EXPECT_EQ(r.distance_energy.size(), 1001);
  EXPECT_EQ(r.lyapunov.size(), 1001);
  EXPECT_EQ(r.kinetic_integral.size(), 1001);
  EXPECT_EQ(r.merit_steps.size(), 11u);
  EXPECT_EQ(r.lambda, 2.0);
  EXPECT_EQ(r.xi, 0.0);  // lambda (alpha - 1 - lambda) at alpha = 3
  EXPECT_NEAR(eval_u0(o, p, kQuadStart), (eval_bundle(p, kQuadStart).values - eval_bundle(p, r.z).values).minCoeff(),
              1e-12);
  EXPECT_EQ(r.merit_energy[0], eval_u0(o, p, kQuadStart));
}

TEST(Energy, QuadraticAlphaTenFullRun) {
  const auto p = builtin_quadratic();
  const auto o = make_front_oracle(p);
  const auto traj = integrate(p, kQuadStart, config(10, 100000));
  EnergyOptions eo;
  eo.energy_slack_c = 10.0;
  eo.lyapunov_slack_c = 2.0;
  const auto r = energy_report(traj, p, &o, eo);
  EXPECT_LT(r.merit_energy[r.merit_energy.size() - 1], 1e-2);
  EXPECT_LT(r.tail_fraction, 0.01);
  EXPECT_EQ(r.energy_violations, 0);
  EXPECT_TRUE(r.lyapunov_ok);
  EXPECT_GE(r.lyapunov_pass_fraction, 0.999);
  EXPECT_LT(eval_u0(o, p, traj.position(traj.steps())), 1e-3);
}
