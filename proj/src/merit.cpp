#include "mavd/merit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mavd/error.hpp"

namespace mavd {

namespace {

constexpr double kInvPhi = 0.6180339887498948482;  // (sqrt(5) - 1) / 2
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Peak {
  double lambda;
  double value;
  double lo;  // final bracket
  double hi;
};

// Golden-section search for the maximum of a unimodal function on [a, b].
template <typename F>
Peak golden_max(F&& fn, double a, double b, double tol) {
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = fn(c);
  double fd = fn(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = fn(d);
    }
  }
  return fc >= fd ? Peak{c, fc, a, b} : Peak{d, fd, a, b};
}

Vec objective_values(const MOProblem& problem, const Vec& x) {
  Vec out(static_cast<Eigen::Index>(problem.num_objectives()));
  for (std::size_t i = 0; i < problem.num_objectives(); ++i) {
    out[static_cast<Eigen::Index>(i)] = eval_objective(problem, i, x);
  }
  return out;
}

double grid_lambda(std::size_t j, std::size_t n) {
  return static_cast<double>(j) / static_cast<double>(n - 1);
}

void require_grid(std::size_t n) {
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, "lambda grid needs at least 2 points");
}

void require_injective(const FrontOracle& oracle) {
  if (!oracle.front.injective_values) {
    throw Error(ErrorCode::kUnsupported,
                "front is not flagged injective; the inner infimum over F^-1(F*) is not implemented");
  }
}

}  // namespace

FrontOracle make_front_oracle(const MOProblem& problem, std::size_t coarse_grid, double refine_tol) {
  if (!problem.front()) {
    throw Error(ErrorCode::kUnsupported, "problem has no Pareto parametrization");
  }
  require_grid(coarse_grid);
  if (!(refine_tol > 0.0)) throw Error(ErrorCode::kInvalidArgument, "refine_tol must be positive");
  FrontOracle oracle{*problem.front(), coarse_grid, refine_tol};
  require_injective(oracle);
  return oracle;
}

MeritValue eval_u0_detail(const FrontOracle& oracle, const MOProblem& problem, const Vec& x) {
  require_injective(oracle);
  require_grid(oracle.coarse_grid);
  const Vec fx = objective_values(problem, x);
  auto phi = [&](double lambda) {
    const Vec fz = objective_values(problem, pareto_point(oracle.front, lambda));
    return (fx - fz).minCoeff();
  };

  const std::size_t n = oracle.coarse_grid;
  MeritValue best{kNegInf, 0.0};
  std::size_t best_j = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const double l = grid_lambda(j, n);
    const double v = phi(l);
    if (v > best.value) {
      best = {v, l};
      best_j = j;
    }
  }
  const double lo = grid_lambda(best_j == 0 ? 0 : best_j - 1, n);
  const double hi = grid_lambda(std::min(best_j + 1, n - 1), n);
  const Peak refined = golden_max(phi, lo, hi, oracle.refine_tol);
  if (refined.value > best.value) best = {refined.value, refined.lambda};

  // The maximum usually sits on a kink where two gaps f_i(x) - f_i(z) cross;
  // bisect that crossing to machine precision inside the final bracket.
  auto gaps = [&](double lambda) {
    return Vec(fx - objective_values(problem, pareto_point(oracle.front, lambda)));
  };
  double a = refined.lo, b = refined.hi;
  Vec ga = gaps(a), gb = gaps(b);
  Eigen::Index ia = 0, ib = 0;
  ga.minCoeff(&ia);
  gb.minCoeff(&ib);
  if (ia != ib) {
    auto split = [&](const Vec& g) { return g[ia] - g[ib]; };
    const bool sa = split(ga) < 0.0;
    if (sa != (split(gb) < 0.0)) {
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        if (!(mid > a && mid < b)) break;
        const Vec gm = gaps(mid);
        if ((split(gm) < 0.0) == sa) {
          a = mid;
          ga = gm;
        } else {
          b = mid;
          gb = gm;
        }
      }
    }
    if (ga.minCoeff() > best.value) best = {ga.minCoeff(), a};
    if (gb.minCoeff() > best.value) best = {gb.minCoeff(), b};
  }
  return best;
}

double eval_u0(const FrontOracle& oracle, const MOProblem& problem, const Vec& x) {
  return eval_u0_detail(oracle, problem, x).value;
}

FrontSamples sample_front(const FrontOracle& oracle, const MOProblem& problem, std::size_t grid) {
  require_injective(oracle);
  require_grid(grid);
  FrontSamples s;
  s.lambdas.resize(static_cast<Eigen::Index>(grid));
  s.values.resize(static_cast<Eigen::Index>(problem.num_objectives()), static_cast<Eigen::Index>(grid));
  for (std::size_t j = 0; j < grid; ++j) {
    const double l = grid_lambda(j, grid);
    s.lambdas[static_cast<Eigen::Index>(j)] = l;
    s.values.col(static_cast<Eigen::Index>(j)) = objective_values(problem, pareto_point(oracle.front, l));
  }
  return s;
}

double eval_u0_bruteforce(const FrontOracle& oracle, const MOProblem& problem, const Vec& x,
                          std::size_t grid) {
  return eval_u0_bruteforce(sample_front(oracle, problem, grid), problem, x);
}

double eval_u0_bruteforce(const FrontSamples& samples, const MOProblem& problem, const Vec& x) {
  const Vec fx = objective_values(problem, x);
  double best = kNegInf;
  for (Eigen::Index j = 0; j < samples.values.cols(); ++j) {
    best = std::max(best, (fx - samples.values.col(j)).minCoeff());
  }
  return best;
}

double compute_R(const FrontOracle& oracle, const MOProblem& problem, const Vec& x0) {
  require_injective(oracle);
  require_grid(oracle.coarse_grid);
  const Vec f0 = objective_values(problem, x0);
  auto feasible = [&](double l) {
    const Vec fz = objective_values(problem, pareto_point(oracle.front, l));
    return (fz.array() <= f0.array()).all();
  };
  auto spread = [&](double l) { return 0.5 * (pareto_point(oracle.front, l) - x0).squaredNorm(); };

  const std::size_t n = oracle.coarse_grid;
  std::vector<char> ok(n);
  double best = kNegInf;
  std::size_t best_j = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const double l = grid_lambda(j, n);
    ok[j] = feasible(l);
    if (ok[j]) {
      const double v = spread(l);
      if (v > best) {
        best = v;
        best_j = j;
      }
    }
  }
  if (best == kNegInf) {
    throw Error(ErrorCode::kAssumptionViolated,
                "no front point is dominated by F(x0); the initial-distance constant is undefined");
  }

  // Pull each bracket end onto the feasibility boundary, then refine inside.
  auto boundary = [&](double infeasible, double inside) {
    while (std::abs(inside - infeasible) > oracle.refine_tol) {
      const double mid = 0.5 * (inside + infeasible);
      (feasible(mid) ? inside : infeasible) = mid;
    }
    return inside;
  };
  const double center = grid_lambda(best_j, n);
  double lo = center;
  double hi = center;
  if (best_j > 0) {
    lo = grid_lambda(best_j - 1, n);
    if (!ok[best_j - 1]) lo = boundary(lo, center);
  }
  if (best_j + 1 < n) {
    hi = grid_lambda(best_j + 1, n);
    if (!ok[best_j + 1]) hi = boundary(hi, center);
  }
  best = std::max({best, spread(lo), spread(hi)});
  if (hi - lo > oracle.refine_tol) {
    const Peak p = golden_max([&](double l) { return feasible(l) ? spread(l) : kNegInf; }, lo, hi,
                              oracle.refine_tol);
    best = std::max(best, p.value);
  }
  return best;
}

const char* to_string(CertificateStatus status) noexcept {
  switch (status) {
    case CertificateStatus::kPass: return "pass";
    case CertificateStatus::kFail: return "fail";
    case CertificateStatus::kNotApplicable: return "not-applicable";
  }
  return "unknown";
}

std::vector<long> sampled_steps(long steps, long every) {
  if (every < 1) throw Error(ErrorCode::kConfig, "sampling stride must be >= 1");
  std::vector<long> out;
  for (long k = 0; k <= steps; k += every) out.push_back(k);
  if (out.back() != steps) out.push_back(steps);
  return out;
}

BoundCertificate certify_bound(const TrajectoryRecord& traj, const FrontOracle& oracle,
                               const MOProblem& problem, long every, double eps) {
  BoundCertificate cert;
  cert.alpha = traj.config.alpha;
  cert.t0 = traj.times[0];
  if (cert.alpha < 3.0) {
    cert.status = CertificateStatus::kNotApplicable;
    return cert;
  }
  const Vec x0 = traj.position(0);
  cert.u0_initial = eval_u0(oracle, problem, x0);
  cert.R = compute_R(oracle, problem, x0);
  cert.constant = cert.t0 * cert.t0 * cert.u0_initial + 2.0 * (cert.alpha - 1.0) * cert.R;

  cert.status = CertificateStatus::kPass;
  cert.worst_slack = std::numeric_limits<double>::infinity();
  for (long k : sampled_steps(traj.steps(), every)) {
    BoundRow row;
    row.k = k;
    row.t = traj.times[k];
    row.u0 = eval_u0(oracle, problem, traj.position(k));
    row.bound = cert.constant / (row.t * row.t);
    row.slack = row.bound - row.u0;
    row.pass = row.u0 <= row.bound + bound_tolerance(row.bound, eps);
    cert.worst_slack = std::min(cert.worst_slack, row.slack);
    if (!row.pass && !cert.first_violation) {
      cert.first_violation = k;
      cert.status = CertificateStatus::kFail;
    }
    cert.rows.push_back(row);
  }
  return cert;
}

LevelSetCheck check_level_set(const TrajectoryRecord& traj, const MOProblem& problem, double eps) {
  LevelSetCheck out;
  out.worst_excess = kNegInf;
  const Vec f0 = objective_values(problem, traj.position(0));
  for (long k = 0; k <= traj.steps(); ++k) {
    const double excess = (objective_values(problem, traj.position(k)) - f0).maxCoeff();
    out.worst_excess = std::max(out.worst_excess, excess);
    if (excess > eps) ++out.violations;
  }
  out.pass = out.violations == 0;
  return out;
}

EnergyReport energy_report(const TrajectoryRecord& traj, const MOProblem& problem,
                           const FrontOracle* oracle, const EnergyOptions& options) {
  const auto& cfg = traj.config;
  const double lambda = options.lambda;
  if (!(lambda >= 0.0) || lambda + 1.0 > cfg.alpha) {
    std::ostringstream os;
    os << "energy parameter lambda = " << lambda << " needs 0 <= lambda <= alpha - 1 (alpha = "
       << cfg.alpha << ")";
    throw Error(ErrorCode::kConfig, os.str());
  }
  if (!(options.tail_decade > 0.0 && options.tail_decade < 1.0)) {
    throw Error(ErrorCode::kConfig, "tail_decade must lie in (0, 1)");
  }

  EnergyReport r;
  r.lambda = lambda;
  r.xi = lambda * (cfg.alpha - 1.0 - lambda);
  const Vec x0 = traj.position(0);
  if (options.z) {
    r.z = *options.z;
  } else if (oracle) {
    r.z = pareto_point(oracle->front, eval_u0_detail(*oracle, problem, x0).lambda);
  } else {
    throw Error(ErrorCode::kConfig, "energy report needs a reference point z or a front oracle");
  }
  if (static_cast<std::size_t>(r.z.size()) != problem.dim()) {
    throw Error(ErrorCode::kInvalidArgument, "reference point z has the wrong dimension");
  }
  const Vec fz = objective_values(problem, r.z);

  const long K = traj.steps();
  const auto m = static_cast<Eigen::Index>(problem.num_objectives());
  const double h = cfg.h;
  r.objective_energy.resize(K + 1, m);
  r.distance_energy.resize(K + 1);
  r.lyapunov.resize(K + 1);
  r.kinetic_integral.resize(K + 1);
  Vec gap_min(K + 1);  // min_i (f_i(x^k) - f_i(z))

  double running = 0.0;
  for (long k = 0; k <= K; ++k) {
    const Vec x = traj.position(k);
    const Vec v = traj.velocity(k);
    const double t = traj.times[k];
    const double kinetic = 0.5 * v.squaredNorm();
    const Vec fx = objective_values(problem, x);
    r.objective_energy.row(k) = (fx.array() + kinetic).matrix().transpose();
    const Vec offset = x - r.z;
    r.distance_energy[k] = 0.5 * offset.squaredNorm();
    gap_min[k] = (fx - fz).minCoeff();
    r.lyapunov[k] = t * t * gap_min[k] + 0.5 * (lambda * offset + t * v).squaredNorm() +
                    0.5 * r.xi * offset.squaredNorm();
    running += h * t * v.squaredNorm();
    r.kinetic_integral[k] = running;
  }

  long lyap_pass = 0;
  for (long k = 0; k < K; ++k) {
    const double t = traj.times[k];
    const double speed2 = traj.velocities.row(k).squaredNorm();
    const double dissipation = h * (cfg.alpha / t) * speed2;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double dw = r.objective_energy(k + 1, i) - r.objective_energy(k, i);
      if (dw > 0.0) r.energy_monotone = false;
      r.energy_observed_c = std::max(r.energy_observed_c, (dw + dissipation) / (h * h));
      if (dw > -dissipation + options.energy_slack_c * h * h) ++r.energy_violations;
    }

    const double de = r.lyapunov[k + 1] - r.lyapunov[k];
    const double rate = (2.0 - lambda) * t * gap_min[k] - (cfg.alpha - lambda - 1.0) * t * speed2;
    const double weight = h * h * (1.0 + t * t);
    r.lyapunov_observed_c = std::max(r.lyapunov_observed_c, (de - h * rate) / weight);
    if (de <= h * rate + options.lyapunov_slack_c * weight) {
      ++lyap_pass;
    } else {
      ++r.lyapunov_violations;
    }
  }
  r.lyapunov_pass_fraction = K > 0 ? static_cast<double>(lyap_pass) / static_cast<double>(K) : 1.0;
  r.lyapunov_ok = r.lyapunov_pass_fraction >= options.lyapunov_min_fraction;

  if (oracle) {
    r.merit_steps = sampled_steps(K, options.merit_stride);
    r.merit_energy.resize(static_cast<Eigen::Index>(r.merit_steps.size()));
    for (std::size_t j = 0; j < r.merit_steps.size(); ++j) {
      const long k = r.merit_steps[j];
      r.merit_energy[static_cast<Eigen::Index>(j)] =
          eval_u0(*oracle, problem, traj.position(k)) + 0.5 * traj.velocities.row(k).squaredNorm();
    }
  }

  const double total = r.kinetic_integral[K];
  const auto split = static_cast<long>(std::floor((1.0 - options.tail_decade) * static_cast<double>(K)));
  r.tail_fraction = total > 0.0 ? (total - r.kinetic_integral[split]) / total : 0.0;
  return r;
}

}  // namespace mavd
