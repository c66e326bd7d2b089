#include "mavd/mavd.h"

#include <iostream>
#include <string>

#include "mavd/error.hpp"
#include "mavd/harness.hpp"

struct mavd_problem {
  mavd::MOProblem problem;
  mavd::harness::Tolerances tol;
};

struct mavd_trajectory {
  mavd::TrajectoryRecord record;
};

namespace {

thread_local std::string g_last_error;

mavd_status map_code(mavd::ErrorCode code) {
  using mavd::ErrorCode;
  switch (code) {
    case ErrorCode::kInvalidArgument: return MAVD_ERR_INVALID_ARGUMENT;
    case ErrorCode::kIndexOutOfRange: return MAVD_ERR_INDEX_OUT_OF_RANGE;
    case ErrorCode::kDomain: return MAVD_ERR_DOMAIN;
    case ErrorCode::kNumericalOverflow: return MAVD_ERR_NUMERICAL_OVERFLOW;
    case ErrorCode::kConvergence: return MAVD_ERR_CONVERGENCE;
    case ErrorCode::kUnsupported: return MAVD_ERR_UNSUPPORTED;
    case ErrorCode::kAssumptionViolated: return MAVD_ERR_ASSUMPTION_VIOLATED;
    case ErrorCode::kConfig: return MAVD_ERR_CONFIG;
    case ErrorCode::kIo: return MAVD_ERR_IO;
    case ErrorCode::kSchema: return MAVD_ERR_SCHEMA;
    case ErrorCode::kDiverged: return MAVD_ERR_DIVERGED;
  }
  return MAVD_ERR_INTERNAL;
}

template <class F>
mavd_status guard(F&& f) {
  try {
    f();
    return MAVD_OK;
  } catch (const mavd::Error& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MAVD_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown exception";
    return MAVD_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw mavd::Error(mavd::ErrorCode::kInvalidArgument, what);
}

mavd::Vec vec_in(const double* p, std::size_t n) {
  return Eigen::Map<const mavd::Vec>(p, static_cast<Eigen::Index>(n));
}

void vec_out(const mavd::Vec& v, double* p) {
  Eigen::Map<mavd::Vec>(p, v.size()) = v;
}

mavd::FrontOracle oracle(const mavd_problem* p) {
  return mavd::make_front_oracle(p->problem, p->tol.u0_grid, p->tol.refine_tol);
}

}  // namespace

extern "C" {

const char* mavd_version(void) { return "0.1.0"; }

const char* mavd_status_string(mavd_status status) {
  switch (status) {
    case MAVD_OK: return "ok";
    case MAVD_ERR_INVALID_ARGUMENT: return "invalid argument";
    case MAVD_ERR_INDEX_OUT_OF_RANGE: return "index out of range";
    case MAVD_ERR_DOMAIN: return "domain error";
    case MAVD_ERR_NUMERICAL_OVERFLOW: return "numerical overflow";
    case MAVD_ERR_CONVERGENCE: return "convergence failure";
    case MAVD_ERR_UNSUPPORTED: return "unsupported";
    case MAVD_ERR_ASSUMPTION_VIOLATED: return "assumption violated";
    case MAVD_ERR_CONFIG: return "configuration error";
    case MAVD_ERR_IO: return "i/o error";
    case MAVD_ERR_SCHEMA: return "schema error";
    case MAVD_ERR_DIVERGED: return "diverged";
    case MAVD_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* mavd_last_error(void) { return g_last_error.c_str(); }

mavd_status mavd_problem_builtin(const char* name, mavd_problem** out) {
  return guard([&] {
    require(name && out, "null argument");
    const std::string n(name);
    if (n == "quadratic") *out = new mavd_problem{mavd::builtin_quadratic(), {}};
    else if (n == "logsumexp") *out = new mavd_problem{mavd::builtin_logsumexp(), {}};
    else throw mavd::Error(mavd::ErrorCode::kInvalidArgument, "unknown builtin problem '" + n + "'");
  });
}

mavd_status mavd_problem_from_config(const char* path, mavd_problem** out) {
  return guard([&] {
    require(path && out, "null argument");
    const auto cfg = mavd::harness::load_config(path);
    *out = new mavd_problem{mavd::harness::build_problem(cfg), cfg.tol};
  });
}

void mavd_problem_free(mavd_problem* problem) { delete problem; }

mavd_status mavd_problem_dims(const mavd_problem* problem, size_t* dim, size_t* objectives) {
  return guard([&] {
    require(problem, "null problem");
    if (dim) *dim = problem->problem.dim();
    if (objectives) *objectives = problem->problem.num_objectives();
  });
}

mavd_status mavd_eval_objective(const mavd_problem* problem, size_t i, const double* x, double* value) {
  return guard([&] {
    require(problem && x && value, "null argument");
    *value = mavd::eval_objective(problem->problem, i, vec_in(x, problem->problem.dim()));
  });
}

mavd_status mavd_eval_gradient(const mavd_problem* problem, size_t i, const double* x, double* grad) {
  return guard([&] {
    require(problem && x && grad, "null argument");
    vec_out(mavd::eval_gradient(problem->problem, i, vec_in(x, problem->problem.dim())), grad);
  });
}

mavd_status mavd_pareto_point(const mavd_problem* problem, double lambda, double* z) {
  return guard([&] {
    require(problem && z, "null argument");
    const auto& front = problem->problem.front();
    if (!front) throw mavd::Error(mavd::ErrorCode::kUnsupported, "problem has no front parametrization");
    vec_out(mavd::pareto_point(*front, lambda), z);
  });
}

mavd_status mavd_min_norm_in_hull(const double* gradients, size_t d, size_t m, double tol,
                                  double* theta, double* g) {
  return guard([&] {
    require(gradients && d > 0 && m > 0, "invalid bundle");
    const Eigen::Map<const Eigen::MatrixXd> cols(gradients, static_cast<Eigen::Index>(d),
                                                 static_cast<Eigen::Index>(m));
    const mavd::Selection s = mavd::min_norm_in_hull(mavd::GradientBundle(cols), tol);
    if (theta) vec_out(s.theta, theta);
    if (g) vec_out(s.g, g);
  });
}

mavd_integrator_config mavd_integrator_defaults(void) {
  const mavd::IntegratorConfig c;
  return {c.alpha, c.t0, c.h, c.steps, static_cast<mavd_scheme>(c.scheme), c.v_tol, c.tie_tol, c.qp_tol};
}

mavd_status mavd_integrate(const mavd_problem* problem, const double* x0, const mavd_integrator_config* cfg,
                           mavd_trajectory** out) {
  return guard([&] {
    require(problem && x0 && cfg && out, "null argument");
    require(cfg->scheme >= MAVD_SCHEME_SEMI_IMPLICIT && cfg->scheme <= MAVD_SCHEME_CENTRAL_DIFFERENCE,
            "unknown scheme");
    mavd::IntegratorConfig c;
    c.alpha = cfg->alpha;
    c.t0 = cfg->t0;
    c.h = cfg->h;
    c.steps = cfg->steps;
    c.scheme = static_cast<mavd::SchemeVariant>(cfg->scheme);
    c.v_tol = cfg->v_tol;
    c.tie_tol = cfg->tie_tol;
    c.qp_tol = cfg->qp_tol;
    *out = new mavd_trajectory{mavd::integrate(problem->problem, vec_in(x0, problem->problem.dim()), c)};
  });
}

void mavd_trajectory_free(mavd_trajectory* traj) { delete traj; }

long mavd_trajectory_steps(const mavd_trajectory* traj) { return traj ? traj->record.steps() : -1; }

mavd_status mavd_trajectory_state(const mavd_trajectory* traj, long k, double* t, double* x, double* v) {
  return guard([&] {
    require(traj, "null trajectory");
    if (k < 0 || k > traj->record.steps()) {
      throw mavd::Error(mavd::ErrorCode::kIndexOutOfRange, "step index out of range");
    }
    if (t) *t = traj->record.times[k];
    if (x) vec_out(traj->record.position(k), x);
    if (v) vec_out(traj->record.velocity(k), v);
  });
}

mavd_status mavd_write_trajectory_csv(const mavd_trajectory* traj, const char* path) {
  return guard([&] {
    require(traj && path, "null argument");
    mavd::harness::write_trajectory_csv(traj->record, path);
  });
}

mavd_status mavd_eval_u0(const mavd_problem* problem, const double* x, double* u0) {
  return guard([&] {
    require(problem && x && u0, "null argument");
    *u0 = mavd::eval_u0(oracle(problem), problem->problem, vec_in(x, problem->problem.dim()));
  });
}

mavd_status mavd_compute_R(const mavd_problem* problem, const double* x0, double* R) {
  return guard([&] {
    require(problem && x0 && R, "null argument");
    *R = mavd::compute_R(oracle(problem), problem->problem, vec_in(x0, problem->problem.dim()));
  });
}

mavd_status mavd_certify_bound(const mavd_problem* problem, const mavd_trajectory* traj, long every,
                               double eps, const char* cert_csv, mavd_bound_summary* out) {
  return guard([&] {
    require(problem && traj && out, "null argument");
    const auto cert = mavd::certify_bound(traj->record, oracle(problem), problem->problem, every, eps);
    out->status = cert.status == mavd::CertificateStatus::kPass   ? MAVD_CERT_PASS
                  : cert.status == mavd::CertificateStatus::kFail ? MAVD_CERT_FAIL
                                                                  : MAVD_CERT_NOT_APPLICABLE;
    out->u0_initial = cert.u0_initial;
    out->R = cert.R;
    out->constant = cert.constant;
    out->worst_slack = cert.worst_slack;
    out->first_violation = cert.first_violation ? *cert.first_violation : -1;
    out->rows = cert.rows.size();
    if (cert_csv && cert.status != mavd::CertificateStatus::kNotApplicable) {
      mavd::harness::write_cert_csv(cert, cert_csv);
    }
  });
}

mavd_status mavd_emit_plot(const char* csv, mavd_plot_kind kind, const char* svg) {
  return guard([&] {
    require(csv && svg, "null argument");
    require(kind == MAVD_PLOT_TRAJECTORY_2D || kind == MAVD_PLOT_U0_VS_BOUND_LOGLOG, "unknown plot kind");
    mavd::harness::emit_plot(csv, kind == MAVD_PLOT_TRAJECTORY_2D ? mavd::harness::PlotKind::kTrajectory2d
                                                                  : mavd::harness::PlotKind::kU0VsBoundLogLog,
                             svg);
  });
}

int mavd_cmd_run(const char* config_path) {
  if (!config_path) return mavd::harness::kExitBadInput;
  return mavd::harness::run_command(config_path, std::cout, std::cerr);
}

int mavd_cmd_verify(const char* cert_path) {
  if (!cert_path) return mavd::harness::kExitBadInput;
  return mavd::harness::verify_command(cert_path, std::cout, std::cerr);
}

int mavd_cmd_reproduce(const char* out_dir) {
  std::optional<std::filesystem::path> dir;
  if (out_dir) dir = out_dir;
  return mavd::harness::reproduce_command(dir, std::cout, std::cerr);
}

int mavd_cmd_compare_schemes(const char* config_path) {
  if (!config_path) return mavd::harness::kExitBadInput;
  return mavd::harness::compare_schemes_command(config_path, std::cout, std::cerr);
}

int mavd_cmd_plot(const char* csv, const char* kind, const char* svg) {
  if (!csv || !kind || !svg) return mavd::harness::kExitBadInput;
  return mavd::harness::plot_command(csv, kind, svg, std::cerr);
}

}  // extern "C"
