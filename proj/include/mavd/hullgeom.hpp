#pragma once

// Convex geometry on C = co{g_1, ..., g_m}: minimum-norm point, shifted
// projection, linear minimization over vertices and the selection rule that
// turns the implicit projection equation into an explicit step.

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace mavd {

inline constexpr double kDefaultQpTol = 1e-10;
inline constexpr double kDefaultTieTol = 1e-9;
inline constexpr double kDefaultVelocityTol = 1e-14;
inline constexpr int kQpIterationCap = 10'000;

/// d x m matrix, column i holds the i-th gradient.
class GradientBundle {
 public:
  GradientBundle() = default;
  explicit GradientBundle(Eigen::MatrixXd columns);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(cols_.rows()); }
  std::size_t size() const noexcept { return static_cast<std::size_t>(cols_.cols()); }
  const Eigen::MatrixXd& columns() const noexcept { return cols_; }
  auto column(std::size_t i) const { return cols_.col(static_cast<Eigen::Index>(i)); }

 private:
  Eigen::MatrixXd cols_;
};

struct Selection {
  Eigen::VectorXd theta;  // in the unit simplex
  Eigen::VectorXd g;      // sum_i theta_i * column_i
  std::vector<std::size_t> active_face;
};

struct ShiftedProjection {
  Selection selection;  // weights on the unshifted columns
  Eigen::VectorXd p;    // minimum-norm element of C + shift
};

/// Minimum-norm element of the hull. Closed form for m <= 2; away-step
/// conditional gradient with duality-gap stopping otherwise. Throws
/// ConvergenceError when the iteration cap is hit with gap > tol.
Selection min_norm_in_hull(const GradientBundle& bundle, double tol = kDefaultQpTol);

/// Duality gap max_i <g - g_i, g> of a hull element; zero at the optimum.
double hull_optimality_gap(const GradientBundle& bundle, const Eigen::VectorXd& g);

ShiftedProjection project_shifted(const GradientBundle& bundle,
                                  const Eigen::VectorXd& shift,
                                  double tol = kDefaultQpTol);

/// Indices whose value <g_i, w> is within tie_tol of the minimum. The
/// tolerance is relative to the largest |<g_j, w>|, so the face is invariant
/// under positive rescaling of w.
std::vector<std::size_t> linear_min_face(const GradientBundle& bundle,
                                         const Eigen::VectorXd& w,
                                         double tie_tol = kDefaultTieTol);

/// Element of argmin_{g in C} <g, -v>. At |v| <= v_tol the minimum-norm
/// element of the whole hull is returned; ties on a face resolve to the
/// face's minimum-norm element.
Selection di_selection(const GradientBundle& bundle, const Eigen::VectorXd& v,
                       double v_tol = kDefaultVelocityTol,
                       double tie_tol = kDefaultTieTol,
                       double qp_tol = kDefaultQpTol);

}  // namespace mavd
