#include "mavd/dynamics.hpp"

#include <cmath>
#include <sstream>

#include "mavd/error.hpp"

namespace mavd {

std::string_view to_string(SchemeVariant scheme) noexcept {
  switch (scheme) {
    case SchemeVariant::kSemiImplicitDamping: return "semi-implicit";
    case SchemeVariant::kExplicitEuler: return "explicit-euler";
    case SchemeVariant::kCentralDifference: return "central-difference";
  }
  return "unknown";
}

std::optional<SchemeVariant> parse_scheme(std::string_view name) noexcept {
  if (name == "semi-implicit") return SchemeVariant::kSemiImplicitDamping;
  if (name == "explicit-euler") return SchemeVariant::kExplicitEuler;
  if (name == "central-difference") return SchemeVariant::kCentralDifference;
  return std::nullopt;
}

void IntegratorConfig::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(alpha)) throw Error(ErrorCode::kConfig, "alpha must be positive");
  if (!positive(t0)) throw Error(ErrorCode::kConfig, "t0 must be positive (alpha/t is singular at 0)");
  if (!positive(h)) throw Error(ErrorCode::kConfig, "step size h must be positive");
  if (steps < 0) throw Error(ErrorCode::kConfig, "steps must be non-negative");
  if (!positive(v_tol) || !positive(tie_tol) || !positive(qp_tol)) {
    throw Error(ErrorCode::kConfig, "tolerances must be positive");
  }
}

StepResult step_mavd(const MOProblem& problem, const State& s, const IntegratorConfig& cfg) {
  if (s.t < cfg.t0) throw Error(ErrorCode::kDomain, "state time precedes t0");
  const double h = cfg.h;
  const double damping = 1.0 + h * cfg.alpha / s.t;
  const GradientBundle bundle = eval_bundle(problem, s.x).bundle;

  StepResult out;
  out.state.t = s.t + h;
  switch (cfg.scheme) {
    case SchemeVariant::kSemiImplicitDamping: {
      out.selection = di_selection(bundle, s.v, cfg.v_tol, cfg.tie_tol, cfg.qp_tol);
      out.state.v = (s.v - h * out.selection.g) / damping;
      break;
    }
    case SchemeVariant::kExplicitEuler: {
      out.selection = di_selection(bundle, s.v, cfg.v_tol, cfg.tie_tol, cfg.qp_tol);
      out.state.v = s.v + h * (-(cfg.alpha / s.t) * s.v - out.selection.g);
      break;
    }
    case SchemeVariant::kCentralDifference: {
      // With the outgoing velocity w = (v - h g) / damping inside the
      // selection, g must maximize <mu, v - h g> over C, i.e. g = proj_C(v / h).
      ShiftedProjection pr = project_shifted(bundle, -s.v / h, cfg.qp_tol);
      out.selection = std::move(pr.selection);
      out.state.v = (s.v - h * out.selection.g) / damping;
      break;
    }
  }
  out.state.x = s.x + h * out.state.v;
  return out;
}

TrajectoryRecord integrate(const MOProblem& problem, const Vec& x0, const IntegratorConfig& cfg,
                           const std::optional<Vec>& v0) {
  cfg.validate();
  const auto d = static_cast<Eigen::Index>(problem.dim());
  const auto m = static_cast<Eigen::Index>(problem.num_objectives());
  if (x0.size() != d) throw Error(ErrorCode::kInvalidArgument, "x0 dimension does not match the problem");
  if (!x0.allFinite()) throw Error(ErrorCode::kDomain, "x0 has non-finite entries");
  if (v0 && (v0->size() != d || !v0->allFinite())) {
    throw Error(ErrorCode::kInvalidArgument, "v0 must be finite with the problem dimension");
  }

  const long K = cfg.steps;
  TrajectoryRecord rec;
  rec.config = cfg;
  rec.times.resize(K + 1);
  rec.positions.resize(K + 1, d);
  rec.velocities.resize(K + 1, d);
  rec.weights.resize(K, m);
  rec.directions.resize(K, d);

  State s{cfg.t0, x0, v0 ? *v0 : Vec::Zero(d)};
  rec.times[0] = s.t;
  rec.positions.row(0) = s.x.transpose();
  rec.velocities.row(0) = s.v.transpose();
  for (long k = 0; k < K; ++k) {
    StepResult r = step_mavd(problem, s, cfg);
    if (!r.state.x.allFinite() || !r.state.v.allFinite() ||
        r.state.x.norm() > kDivergenceRadius) {
      std::ostringstream os;
      os << "trajectory diverged at step " << k + 1;
      throw DivergenceError(os.str(), k + 1);
    }
    // Equidistant grid t_k = t0 + k h, not accumulated sums.
    r.state.t = cfg.t0 + static_cast<double>(k + 1) * cfg.h;
    rec.weights.row(k) = r.selection.theta.transpose();
    rec.directions.row(k) = r.selection.g.transpose();
    rec.times[k + 1] = r.state.t;
    rec.positions.row(k + 1) = r.state.x.transpose();
    rec.velocities.row(k + 1) = r.state.v.transpose();
    s = std::move(r.state);
  }
  return rec;
}

State step_mog(const MOProblem& problem, const State& s, double h, double qp_tol) {
  const Selection sel = min_norm_in_hull(eval_bundle(problem, s.x).bundle, qp_tol);
  State out;
  out.t = s.t + h;
  out.x = s.x - h * sel.g;
  out.v = -sel.g;
  return out;
}

State step_avd(const ObjectiveSpec& f, const State& s, double alpha, double h) {
  const Vec grad = f.gradient(s.x);
  State out;
  out.t = s.t + h;
  out.v = (s.v - h * grad) / (1.0 + h * alpha / s.t);
  out.x = s.x + h * out.v;
  return out;
}

}  // namespace mavd
