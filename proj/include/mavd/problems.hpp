#pragma once

// Multiobjective problem instances: smooth convex objectives on R^d with
// value/gradient evaluators and an optional closed-form Pareto curve.

#include <cstddef>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "mavd/hullgeom.hpp"

namespace mavd {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// x -> 1/2 (x - anchor)^T Q (x - anchor)
struct Quadratic {
  Mat Q;
  Vec anchor;
};

/// x -> log sum_j exp(a_j^T x - b_j), rows a_j of A.
struct LogSumExp {
  Mat A;
  Vec b;
};

/// Black-box objective. Convexity is only spot-checked by the tests.
struct Custom {
  std::size_t dim = 0;
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
};

class ObjectiveSpec {
 public:
  using Form = std::variant<Quadratic, LogSumExp, Custom>;

  // Validates shape, symmetry and positive semidefiniteness of Q.
  static ObjectiveSpec quadratic(Mat Q, Vec anchor);
  static ObjectiveSpec log_sum_exp(Mat A, Vec b);
  static ObjectiveSpec custom(Custom c);

  std::size_t dim() const noexcept { return dim_; }
  const Form& form() const noexcept { return form_; }

  double value(const Vec& x) const;
  Vec gradient(const Vec& x) const;

 private:
  ObjectiveSpec(Form form, std::size_t dim) : form_(std::move(form)), dim_(dim) {}

  Form form_;
  std::size_t dim_;
};

/// Closed-form curve lambda in [0,1] -> R^d covering the weak Pareto set.
struct ParetoParametrization {
  std::function<Vec(double)> map;
  // F is injective along the curve, so inf over F^{-1}(F*) is the curve point.
  bool injective_values = false;
};

class MOProblem {
 public:
  MOProblem(std::vector<ObjectiveSpec> objectives,
            std::optional<ParetoParametrization> front = std::nullopt);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t num_objectives() const noexcept { return objectives_.size(); }
  const std::vector<ObjectiveSpec>& objectives() const noexcept {
    return objectives_;
  }
  const ObjectiveSpec& objective(std::size_t i) const;
  const std::optional<ParetoParametrization>& front() const noexcept {
    return front_;
  }

 private:
  std::vector<ObjectiveSpec> objectives_;
  std::size_t dim_;
  std::optional<ParetoParametrization> front_;
};

struct BundleEval {
  Vec values;
  GradientBundle bundle;
};

// Objective indices are zero-based.
double eval_objective(const MOProblem& problem, std::size_t i, const Vec& x);
Vec eval_gradient(const MOProblem& problem, std::size_t i, const Vec& x);
BundleEval eval_bundle(const MOProblem& problem, const Vec& x);

Vec pareto_point(const ParetoParametrization& front, double lambda);

/// Two strongly convex quadratics on R^2 with a curved Pareto set.
MOProblem builtin_quadratic();
/// Two log-sum-exp objectives on R^2 (convex, not strongly convex); the
/// Pareto set is the segment from (-1, 1) to (1, -1).
MOProblem builtin_logsumexp();

/// Straight segment from `from` to `to`, used for inline configurations.
ParetoParametrization segment_front(Vec from, Vec to, bool injective);

}  // namespace mavd
