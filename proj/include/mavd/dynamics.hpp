#pragma once

// Time stepping for the inertial multiobjective system with vanishing
// damping alpha/t, plus the first-order steepest-descent flow and the
// single-objective damped system used as a reduction oracle.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "mavd/hullgeom.hpp"
#include "mavd/problems.hpp"

namespace mavd {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class SchemeVariant {
  kSemiImplicitDamping,  // face chosen from the incoming velocity
  kExplicitEuler,
  kCentralDifference,    // selection consistent with the outgoing velocity
};

std::string_view to_string(SchemeVariant scheme) noexcept;
std::optional<SchemeVariant> parse_scheme(std::string_view name) noexcept;

inline constexpr double kDivergenceRadius = 1e9;

struct IntegratorConfig {
  double alpha = 3.0;
  double t0 = 1.0;
  double h = 1e-3;
  long steps = 100'000;
  SchemeVariant scheme = SchemeVariant::kCentralDifference;
  double v_tol = kDefaultVelocityTol;
  double tie_tol = kDefaultTieTol;
  double qp_tol = kDefaultQpTol;

  /// Throws Error(kConfig) on non-positive alpha, t0, h or negative steps.
  void validate() const;
  /// h * alpha / t0 >= 1: the damping factor is no longer a small correction.
  bool coarse_damping() const noexcept { return h * alpha / t0 >= 1.0; }
};

struct State {
  double t = 0.0;
  Vec x;
  Vec v;
};

struct StepResult {
  State state;
  Selection selection;
};

/// Position/velocity at t_0..t_K; the weights and directions used by step k
/// sit in row k of `weights` / `directions` (K rows).
struct TrajectoryRecord {
  IntegratorConfig config;
  Vec times;
  RowMat positions;
  RowMat velocities;
  RowMat weights;
  RowMat directions;

  long steps() const noexcept { return static_cast<long>(times.size()) - 1; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(positions.cols()); }
  std::size_t num_objectives() const noexcept { return static_cast<std::size_t>(weights.cols()); }
  Vec position(long k) const { return positions.row(k).transpose(); }
  Vec velocity(long k) const { return velocities.row(k).transpose(); }
};

StepResult step_mavd(const MOProblem& problem, const State& s, const IntegratorConfig& cfg);

/// Integrates K steps from (x0, v0) at t0. v0 defaults to zero; the level-set
/// and energy certificates assume that default.
TrajectoryRecord integrate(const MOProblem& problem, const Vec& x0, const IntegratorConfig& cfg,
                           const std::optional<Vec>& v0 = std::nullopt);

/// Explicit Euler on x' = -proj_{C(x)}(0). The returned velocity is -proj.
State step_mog(const MOProblem& problem, const State& s, double h, double qp_tol = kDefaultQpTol);

/// Single-objective damped step, same semi-implicit update with g = grad f.
State step_avd(const ObjectiveSpec& f, const State& s, double alpha, double h);

}  // namespace mavd
