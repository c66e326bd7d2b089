#include "mavd/hullgeom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mavd/error.hpp"

namespace mavd {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

GradientBundle::GradientBundle(MatrixXd columns) : cols_(std::move(columns)) {
  if (cols_.cols() < 1 || cols_.rows() < 1) {
    throw Error(ErrorCode::kInvalidArgument, "gradient bundle needs m >= 1 columns of dimension >= 1");
  }
  if (!cols_.allFinite()) {
    throw Error(ErrorCode::kDomain, "gradient bundle has non-finite entries");
  }
}

namespace {

std::vector<std::size_t> support_of(const VectorXd& theta) {
  std::vector<std::size_t> face;
  for (Index i = 0; i < theta.size(); ++i) {
    if (theta[i] > 0.0) face.push_back(static_cast<std::size_t>(i));
  }
  return face;
}

// Clips round-off negatives and restores sum = 1.
void normalize_simplex(VectorXd& theta) {
  theta = theta.cwiseMax(0.0);
  const double s = theta.sum();
  if (s > 0.0) {
    theta /= s;
  } else {
    theta.setConstant(1.0 / static_cast<double>(theta.size()));
  }
}

Selection make_selection(const MatrixXd& cols, VectorXd theta) {
  normalize_simplex(theta);
  VectorXd g = cols * theta;
  auto face = support_of(theta);
  return {std::move(theta), std::move(g), std::move(face)};
}

Selection min_norm_pair(const MatrixXd& cols) {
  const VectorXd a = cols.col(0);
  const VectorXd b = cols.col(1);
  const VectorXd diff = a - b;
  const double denom = diff.squaredNorm();
  // Minimizer of |b + s (a - b)|^2 over s in [0, 1].
  double s = 0.5;
  if (denom > 0.0) s = std::clamp(-b.dot(diff) / denom, 0.0, 1.0);
  VectorXd theta(2);
  theta << s, 1.0 - s;
  VectorXd g = s * a + (1.0 - s) * b;
  auto face = support_of(theta);
  return {std::move(theta), std::move(g), std::move(face)};
}

// Exact minimizer of |G mu|^2 on the affine hull of the support, or an empty
// vector when it leaves the simplex or the system is degenerate.
VectorXd affine_polish(const MatrixXd& cols, const VectorXd& theta) {
  const auto face = support_of(theta);
  const auto k = static_cast<Index>(face.size());
  if (k < 2) return {};
  MatrixXd kkt = MatrixXd::Zero(k + 1, k + 1);
  for (Index r = 0; r < k; ++r) {
    for (Index c = 0; c < k; ++c) {
      kkt(r, c) = cols.col(static_cast<Index>(face[r])).dot(cols.col(static_cast<Index>(face[c])));
    }
    kkt(r, k) = 1.0;
    kkt(k, r) = 1.0;
  }
  VectorXd rhs = VectorXd::Zero(k + 1);
  rhs[k] = 1.0;
  Eigen::ColPivHouseholderQR<MatrixXd> qr(kkt);
  if (qr.rank() < k + 1) return {};
  const VectorXd sol = qr.solve(rhs);
  if (!sol.allFinite() || sol.head(k).minCoeff() < 0.0) return {};
  VectorXd out = VectorXd::Zero(theta.size());
  for (Index r = 0; r < k; ++r) out[static_cast<Index>(face[r])] = sol[r];
  return out;
}

Selection min_norm_away_step(const MatrixXd& cols, double tol) {
  const Index m = cols.cols();
  Index start = 0;
  cols.colwise().squaredNorm().minCoeff(&start);
  VectorXd theta = VectorXd::Zero(m);
  theta[start] = 1.0;
  VectorXd g = cols.col(start);
  double gap = std::numeric_limits<double>::infinity();

  for (int it = 0; it < kQpIterationCap; ++it) {
    const VectorXd scores = cols.transpose() * g;
    Index fw = 0;
    const double fw_score = scores.minCoeff(&fw);
    const double current = g.squaredNorm();
    gap = current - fw_score;
    if (gap <= tol) return make_selection(cols, theta);

    Index away = -1;
    double away_score = -std::numeric_limits<double>::infinity();
    for (Index i = 0; i < m; ++i) {
      if (theta[i] > 0.0 && scores[i] > away_score) {
        away_score = scores[i];
        away = i;
      }
    }

    VectorXd dir_theta;
    VectorXd dir_g;
    double step_max = 1.0;
    const bool toward = gap >= away_score - current || theta[away] >= 1.0;
    if (toward) {
      dir_theta = -theta;
      dir_theta[fw] += 1.0;
      dir_g = cols.col(fw) - g;
    } else {
      dir_theta = theta;
      dir_theta[away] -= 1.0;
      dir_g = g - cols.col(away);
      step_max = theta[away] / (1.0 - theta[away]);
    }
    const double dd = dir_g.squaredNorm();
    if (dd <= 0.0) break;
    const double step = std::clamp(-g.dot(dir_g) / dd, 0.0, step_max);
    theta += step * dir_theta;
    if (!toward && step == step_max) theta[away] = 0.0;  // drop step
    normalize_simplex(theta);
    g = cols * theta;

    // Jump to the exact face minimizer once the support is right.
    VectorXd polished = affine_polish(cols, theta);
    if (polished.size() == m) {
      const VectorXd pg = cols * polished;
      if (pg.squaredNorm() <= g.squaredNorm()) {
        theta = std::move(polished);
        normalize_simplex(theta);
        g = cols * theta;
      }
    }
  }

  gap = hull_optimality_gap(GradientBundle(cols), g);
  if (gap <= tol) return make_selection(cols, theta);
  std::ostringstream os;
  os << "minimum-norm QP did not reach gap " << tol << " in " << kQpIterationCap
     << " iterations (gap " << gap << ")";
  throw ConvergenceError(os.str(), gap);
}

MatrixXd face_columns(const GradientBundle& bundle, const std::vector<std::size_t>& face) {
  MatrixXd sub(static_cast<Index>(bundle.dim()), static_cast<Index>(face.size()));
  for (std::size_t j = 0; j < face.size(); ++j) sub.col(static_cast<Index>(j)) = bundle.column(face[j]);
  return sub;
}

}  // namespace

double hull_optimality_gap(const GradientBundle& bundle, const VectorXd& g) {
  const VectorXd scores = bundle.columns().transpose() * g;
  return g.squaredNorm() - scores.minCoeff();
}

Selection min_norm_in_hull(const GradientBundle& bundle, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorCode::kInvalidArgument, "QP tolerance must be positive");
  const MatrixXd& cols = bundle.columns();
  switch (cols.cols()) {
    case 1: {
      VectorXd theta = VectorXd::Ones(1);
      return {std::move(theta), cols.col(0), {0}};
    }
    case 2:
      return min_norm_pair(cols);
    default:
      return min_norm_away_step(cols, tol);
  }
}

ShiftedProjection project_shifted(const GradientBundle& bundle, const VectorXd& shift, double tol) {
  if (static_cast<std::size_t>(shift.size()) != bundle.dim()) {
    throw Error(ErrorCode::kInvalidArgument, "shift dimension does not match the bundle");
  }
  const GradientBundle shifted(bundle.columns().colwise() + shift);
  Selection sel = min_norm_in_hull(shifted, tol);
  sel.g = bundle.columns() * sel.theta;
  VectorXd p = sel.g + shift;
  return {std::move(sel), std::move(p)};
}

std::vector<std::size_t> linear_min_face(const GradientBundle& bundle, const VectorXd& w,
                                         double tie_tol) {
  if (static_cast<std::size_t>(w.size()) != bundle.dim()) {
    throw Error(ErrorCode::kInvalidArgument, "direction dimension does not match the bundle");
  }
  if (!(tie_tol >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "tie tolerance must be >= 0");
  const VectorXd vals = bundle.columns().transpose() * w;
  const double lowest = vals.minCoeff();
  const double scale = vals.cwiseAbs().maxCoeff();
  std::vector<std::size_t> face;
  for (Index i = 0; i < vals.size(); ++i) {
    if (vals[i] - lowest <= tie_tol * scale) face.push_back(static_cast<std::size_t>(i));
  }
  return face;
}

Selection di_selection(const GradientBundle& bundle, const VectorXd& v, double v_tol,
                       double tie_tol, double qp_tol) {
  if (!(v_tol > 0.0) || !(tie_tol > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "selection tolerances must be positive");
  }
  if (static_cast<std::size_t>(v.size()) != bundle.dim()) {
    throw Error(ErrorCode::kInvalidArgument, "velocity dimension does not match the bundle");
  }
  if (v.norm() <= v_tol) return min_norm_in_hull(bundle, qp_tol);

  const auto face = linear_min_face(bundle, -v, tie_tol);
  VectorXd theta = VectorXd::Zero(static_cast<Index>(bundle.size()));
  if (face.size() == 1) {
    theta[static_cast<Index>(face[0])] = 1.0;
    return {std::move(theta), bundle.column(face[0]), face};
  }
  const Selection local = min_norm_in_hull(GradientBundle(face_columns(bundle, face)), qp_tol);
  for (std::size_t j = 0; j < face.size(); ++j) {
    theta[static_cast<Index>(face[j])] = local.theta[static_cast<Index>(j)];
  }
  return make_selection(bundle.columns(), std::move(theta));
}

}  // namespace mavd
