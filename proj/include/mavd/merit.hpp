#pragma once

// Merit function u0(x) = sup_z min_i (f_i(x) - f_i(z)), the initial-distance
// constant R, the O(1/t^2) bound certificate and the energy diagnostics
// evaluated along a recorded trajectory.

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "mavd/dynamics.hpp"
#include "mavd/problems.hpp"

namespace mavd {

/// The supremum in u0 is taken over a parametrized front curve: a dense
/// coarse grid in lambda, then golden-section refinement around the best
/// grid bracket.
struct FrontOracle {
  ParetoParametrization front;
  std::size_t coarse_grid = 2048;
  double refine_tol = 1e-10;
};

/// Oracle over problem.front(). Throws kUnsupported when the problem has no
/// front or the front is not flagged injective.
FrontOracle make_front_oracle(const MOProblem& problem, std::size_t coarse_grid = 2048,
                              double refine_tol = 1e-10);

struct MeritValue {
  double value;
  double lambda;  // front parameter attaining the maximum
};

MeritValue eval_u0_detail(const FrontOracle& oracle, const MOProblem& problem, const Vec& x);
double eval_u0(const FrontOracle& oracle, const MOProblem& problem, const Vec& x);

/// Objective values on a uniform lambda grid, for repeated brute-force use.
struct FrontSamples {
  Vec lambdas;
  Mat values;  // m x grid
};

FrontSamples sample_front(const FrontOracle& oracle, const MOProblem& problem, std::size_t grid);
/// Plain maximum over a uniform lambda grid of `grid` points, no refinement.
double eval_u0_bruteforce(const FrontOracle& oracle, const MOProblem& problem, const Vec& x,
                          std::size_t grid);
double eval_u0_bruteforce(const FrontSamples& samples, const MOProblem& problem, const Vec& x);

/// max of 1/2 |z(lambda) - x0|^2 over front points with F(z) <= F(x0).
/// Throws kAssumptionViolated when no front point is dominated by F(x0).
double compute_R(const FrontOracle& oracle, const MOProblem& problem, const Vec& x0);

enum class CertificateStatus { kPass, kFail, kNotApplicable };
const char* to_string(CertificateStatus status) noexcept;

inline constexpr double kDefaultCertEps = 1e-8;

/// Admissible excess of u0 over the bound: eps * (1 + bound).
inline double bound_tolerance(double bound, double eps = kDefaultCertEps) noexcept {
  return eps * (1.0 + bound);
}

struct BoundRow {
  long k;
  double t;
  double u0;
  double bound;
  double slack;  // bound - u0
  bool pass;
};

struct BoundCertificate {
  CertificateStatus status = CertificateStatus::kNotApplicable;
  double alpha = 0.0;
  double t0 = 0.0;
  double u0_initial = 0.0;
  double R = 0.0;
  double constant = 0.0;  // t0^2 u0(x0) + 2 (alpha - 1) R
  std::vector<BoundRow> rows;
  double worst_slack = 0.0;
  std::optional<long> first_violation;
};

/// Steps 0, every, 2 every, ... and always the final step.
std::vector<long> sampled_steps(long steps, long every);

/// Compares u0(x^k) with (t0^2 u0(x0) + 2 (alpha - 1) R) / t_k^2 at every
/// `every`-th step. Runs with alpha < 3 are reported not applicable.
BoundCertificate certify_bound(const TrajectoryRecord& traj, const FrontOracle& oracle,
                               const MOProblem& problem, long every = 100,
                               double eps = kDefaultCertEps);

struct LevelSetCheck {
  long violations = 0;
  double worst_excess;  // max over k, i of f_i(x^k) - f_i(x^0)
  bool pass = true;
};

LevelSetCheck check_level_set(const TrajectoryRecord& traj, const MOProblem& problem,
                              double eps = 1e-6);

struct EnergyOptions {
  double lambda = 2.0;
  std::optional<Vec> z;          // defaults to the front point attaining u0(x0)
  long merit_stride = 100;       // stride of the sampled u0 + |v|^2/2 series
  double energy_slack_c = 0.0;   // per-step W_i slack C h^2
  double lyapunov_slack_c = 0.0; // per-step slack C h^2 (1 + t_k^2) on the lambda-energy
  double lyapunov_min_fraction = 0.999;
  double tail_decade = 0.1;      // last fraction of steps used by the tail statistic
};

struct EnergyReport {
  RowMat objective_energy;  // (K+1) x m: f_i(x^k) + |v^k|^2 / 2
  Vec distance_energy;      // 1/2 |x^k - z|^2
  Vec lyapunov;             // min-over-i lambda-energy with xi* = lambda (alpha - 1 - lambda)
  Vec kinetic_integral;     // partial sums of h t_k |v^k|^2
  std::vector<long> merit_steps;
  Vec merit_energy;         // u0(x^k) + |v^k|^2 / 2 at merit_steps
  Vec z;
  double lambda = 0.0;
  double xi = 0.0;

  long energy_violations = 0;
  double energy_observed_c = 0.0;  // max (dW_i + h alpha/t_k |v^k|^2) / h^2
  bool energy_monotone = true;     // every W_i nonincreasing without slack

  long lyapunov_violations = 0;
  double lyapunov_observed_c = 0.0;
  double lyapunov_pass_fraction = 1.0;
  bool lyapunov_ok = true;

  double tail_fraction = 0.0;  // share of the kinetic integral in the last decade
};

/// Throws kConfig when lambda < 0 or lambda + 1 > alpha. `oracle` may be
/// null for problems without a front; then options.z is required and the
/// merit series stays empty.
EnergyReport energy_report(const TrajectoryRecord& traj, const MOProblem& problem,
                           const FrontOracle* oracle, const EnergyOptions& options = {});

}  // namespace mavd
