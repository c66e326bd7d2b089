#include "mavd/problems.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "mavd/error.hpp"

namespace mavd {

namespace {

void require_finite(const Vec& x, const char* what) {
  if (!x.allFinite()) {
    throw Error(ErrorCode::kDomain, std::string(what) + " has non-finite entries");
  }
}

void require_dim(const Vec& x, std::size_t dim) {
  if (static_cast<std::size_t>(x.size()) != dim) {
    std::ostringstream os;
    os << "point has dimension " << x.size() << ", expected " << dim;
    throw Error(ErrorCode::kInvalidArgument, os.str());
  }
}

struct ValueVisitor {
  const Vec& x;

  double operator()(const Quadratic& q) const {
    const Vec r = x - q.anchor;
    return 0.5 * r.dot(q.Q * r);
  }
  double operator()(const LogSumExp& l) const {
    const Vec z = l.A * x - l.b;
    const double shift = z.maxCoeff();
    return shift + std::log((z.array() - shift).exp().sum());
  }
  double operator()(const Custom& c) const { return c.value(x); }
};

struct GradientVisitor {
  const Vec& x;

  Vec operator()(const Quadratic& q) const { return q.Q * (x - q.anchor); }
  Vec operator()(const LogSumExp& l) const {
    const Vec z = l.A * x - l.b;
    // Max-shifted softmax; the b entries of the builtin problem reach +-20.
    const Vec w = (z.array() - z.maxCoeff()).exp().matrix();
    return l.A.transpose() * (w / w.sum());
  }
  Vec operator()(const Custom& c) const { return c.gradient(x); }
};

}  // namespace

ObjectiveSpec ObjectiveSpec::quadratic(Mat Q, Vec anchor) {
  const auto d = anchor.size();
  if (d == 0 || Q.rows() != d || Q.cols() != d) {
    throw Error(ErrorCode::kInvalidArgument, "quadratic: Q must be d x d with d = anchor size > 0");
  }
  if (!Q.allFinite() || !anchor.allFinite()) {
    throw Error(ErrorCode::kDomain, "quadratic: non-finite data");
  }
  const double scale = std::max(1.0, Q.cwiseAbs().maxCoeff());
  if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error(ErrorCode::kInvalidArgument, "quadratic: Q is not symmetric");
  }
  // Symmetric eigensolver; cheap at desk-scale dimensions.
  Eigen::SelfAdjointEigenSolver<Mat> eig(Q, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-12 * scale) {
    throw Error(ErrorCode::kInvalidArgument, "quadratic: Q is not positive semidefinite");
  }
  return ObjectiveSpec(Quadratic{std::move(Q), std::move(anchor)}, static_cast<std::size_t>(d));
}

ObjectiveSpec ObjectiveSpec::log_sum_exp(Mat A, Vec b) {
  if (A.rows() == 0 || A.cols() == 0 || A.rows() != b.size()) {
    throw Error(ErrorCode::kInvalidArgument, "log-sum-exp: A must be p x d with p = size of b > 0");
  }
  if (!A.allFinite() || !b.allFinite()) {
    throw Error(ErrorCode::kDomain, "log-sum-exp: non-finite data");
  }
  const auto d = static_cast<std::size_t>(A.cols());
  return ObjectiveSpec(LogSumExp{std::move(A), std::move(b)}, d);
}

ObjectiveSpec ObjectiveSpec::custom(Custom c) {
  if (c.dim == 0 || !c.value || !c.gradient) {
    throw Error(ErrorCode::kInvalidArgument, "custom objective needs dim > 0 and both evaluators");
  }
  const auto d = c.dim;
  return ObjectiveSpec(std::move(c), d);
}

double ObjectiveSpec::value(const Vec& x) const {
  require_dim(x, dim_);
  require_finite(x, "objective argument");
  return std::visit(ValueVisitor{x}, form_);
}

Vec ObjectiveSpec::gradient(const Vec& x) const {
  require_dim(x, dim_);
  require_finite(x, "gradient argument");
  Vec g = std::visit(GradientVisitor{x}, form_);
  if (static_cast<std::size_t>(g.size()) != dim_ || !g.allFinite()) {
    throw Error(ErrorCode::kNumericalOverflow, "gradient evaluation produced non-finite entries");
  }
  return g;
}

MOProblem::MOProblem(std::vector<ObjectiveSpec> objectives,
                     std::optional<ParetoParametrization> front)
    : objectives_(std::move(objectives)), dim_(0), front_(std::move(front)) {
  if (objectives_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "a problem needs at least one objective");
  }
  dim_ = objectives_.front().dim();
  for (const auto& f : objectives_) {
    if (f.dim() != dim_) {
      throw Error(ErrorCode::kInvalidArgument, "objectives disagree on dimension");
    }
  }
  if (front_ && !front_->map) {
    throw Error(ErrorCode::kInvalidArgument, "Pareto parametrization has no map");
  }
}

const ObjectiveSpec& MOProblem::objective(std::size_t i) const {
  if (i >= objectives_.size()) {
    std::ostringstream os;
    os << "objective index " << i << " out of range (m = " << objectives_.size() << ")";
    throw Error(ErrorCode::kIndexOutOfRange, os.str());
  }
  return objectives_[i];
}

double eval_objective(const MOProblem& problem, std::size_t i, const Vec& x) {
  return problem.objective(i).value(x);
}

Vec eval_gradient(const MOProblem& problem, std::size_t i, const Vec& x) {
  return problem.objective(i).gradient(x);
}

BundleEval eval_bundle(const MOProblem& problem, const Vec& x) {
  const auto m = problem.num_objectives();
  Vec values(static_cast<Eigen::Index>(m));
  Mat cols(static_cast<Eigen::Index>(problem.dim()), static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    values[static_cast<Eigen::Index>(i)] = eval_objective(problem, i, x);
    cols.col(static_cast<Eigen::Index>(i)) = eval_gradient(problem, i, x);
  }
  return {std::move(values), GradientBundle(std::move(cols))};
}

Vec pareto_point(const ParetoParametrization& front, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw Error(ErrorCode::kDomain, "front parameter must lie in [0, 1]");
  }
  return front.map(lambda);
}

MOProblem builtin_quadratic() {
  Mat q1 = Eigen::Vector2d(2.0, 1.0).asDiagonal();
  Mat q2 = Eigen::Vector2d(1.0, 2.0).asDiagonal();
  std::vector<ObjectiveSpec> objs;
  objs.push_back(ObjectiveSpec::quadratic(q1, Eigen::Vector2d(1.0, 0.0)));
  objs.push_back(ObjectiveSpec::quadratic(q2, Eigen::Vector2d(0.0, 1.0)));
  ParetoParametrization front{
      [](double l) -> Vec {
        return Eigen::Vector2d(2.0 * l / (1.0 + l), 2.0 * (1.0 - l) / (2.0 - l));
      },
      true};
  return MOProblem(std::move(objs), std::move(front));
}

MOProblem builtin_logsumexp() {
  Mat a(4, 2);
  a << 10, 10,
       10, -10,
      -10, -10,
      -10, 10;
  Vec b1(4), b2(4);
  b1 << 0, -20, 0, 20;
  b2 << 0, 20, 0, -20;
  std::vector<ObjectiveSpec> objs;
  objs.push_back(ObjectiveSpec::log_sum_exp(a, b1));
  objs.push_back(ObjectiveSpec::log_sum_exp(a, b2));
  ParetoParametrization front{
      [](double l) -> Vec { return Eigen::Vector2d(-1.0 + 2.0 * l, 1.0 - 2.0 * l); }, true};
  return MOProblem(std::move(objs), std::move(front));
}

ParetoParametrization segment_front(Vec from, Vec to, bool injective) {
  if (from.size() != to.size() || from.size() == 0) {
    throw Error(ErrorCode::kInvalidArgument, "segment endpoints must share a positive dimension");
  }
  return {[from = std::move(from), to = std::move(to)](double l) -> Vec {
            return (1.0 - l) * from + l * to;
          },
          injective};
}

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kIndexOutOfRange: return "index out of range";
    case ErrorCode::kDomain: return "domain error";
    case ErrorCode::kNumericalOverflow: return "numerical overflow";
    case ErrorCode::kConvergence: return "convergence failure";
    case ErrorCode::kUnsupported: return "unsupported";
    case ErrorCode::kAssumptionViolated: return "assumption violated";
    case ErrorCode::kConfig: return "configuration error";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kSchema: return "schema mismatch";
    case ErrorCode::kDiverged: return "diverged";
  }
  return "unknown";
}

}  // namespace mavd
