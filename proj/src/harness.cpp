#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "mavd/error.hpp"
#include "mavd/harness.hpp"

namespace mavd::harness {

namespace {

std::string alpha_tag(double alpha) {
  std::ostringstream os;
  os << alpha;
  std::string s = os.str();
  std::replace(s.begin(), s.end(), '.', 'p');
  return s;
}

std::string run_stem(const ExperimentConfig& cfg, double alpha) {
  return cfg.name + "_alpha" + alpha_tag(alpha);
}

std::optional<FrontOracle> oracle_for(const MOProblem& problem, const Tolerances& tol) {
  if (!problem.front() || !problem.front()->injective_values) return std::nullopt;
  return make_front_oracle(problem, tol.u0_grid, tol.refine_tol);
}

RunSummary run_one(const ExperimentConfig& config, const MOProblem& problem, double alpha) {
  const auto started = std::chrono::steady_clock::now();
  const auto& tol = config.tol;
  RunSummary s;
  s.name = config.name;
  s.alpha = alpha;
  s.steps = config.steps;

  const TrajectoryRecord traj = integrate(problem, config.x0, config.integrator(alpha));
  const auto oracle = oracle_for(problem, tol);
  const std::string stem = run_stem(config, alpha);
  s.trajectory_csv = config.output_dir / (stem + ".csv");
  write_trajectory_csv(traj, s.trajectory_csv);

  if (oracle) {
    const BoundCertificate cert = certify_bound(traj, *oracle, problem, config.stride, tol.cert_eps);
    s.bound = cert.status;
    if (cert.status != CertificateStatus::kNotApplicable) {
      s.worst_slack = cert.worst_slack;
      s.first_violation = cert.first_violation;
      s.u0_initial = cert.u0_initial;
      s.R = cert.R;
      s.final_u0 = cert.rows.back().u0;
      s.cert_csv = config.output_dir / (stem + "_cert.csv");
      write_cert_csv(cert, s.cert_csv);
    } else {
      s.u0_initial = eval_u0(*oracle, problem, config.x0);
      s.final_u0 = eval_u0(*oracle, problem, traj.position(traj.steps()));
    }
  }

  const LevelSetCheck level = check_level_set(traj, problem, tol.level_eps);
  s.level_set = level.pass;
  s.level_worst = level.worst_excess;

  // The lambda-energy needs 0 <= lambda <= alpha - 1.
  if (alpha >= 1.0) {
    EnergyOptions eo;
    eo.lambda = std::min(tol.lyapunov_lambda, alpha - 1.0);
    eo.merit_stride = config.stride;
    eo.energy_slack_c = tol.energy_slack_c;
    eo.lyapunov_slack_c = tol.lyapunov_slack_c;
    if (!oracle) eo.z = traj.position(traj.steps());
    const EnergyReport er = energy_report(traj, problem, oracle ? &*oracle : nullptr, eo);
    s.energy_violations = er.energy_violations;
    s.energy_decay = er.energy_violations == 0;
    s.energy_observed_c = er.energy_observed_c;
    s.lyapunov = er.lyapunov_ok ? CertificateStatus::kPass : CertificateStatus::kFail;
    s.lyapunov_pass_fraction = er.lyapunov_pass_fraction;
    s.tail_fraction = er.tail_fraction;
    if (er.merit_energy.size() > 0) s.final_merit_energy = er.merit_energy[er.merit_energy.size() - 1];
    if (alpha > 3.0) {
      s.integrability = er.tail_fraction < tol.tail_threshold ? CertificateStatus::kPass
                                                              : CertificateStatus::kFail;
    }
  }

  if (config.emit_plots) {
    if (traj.dim() == 2) {
      const auto p = config.output_dir / (stem + "_trajectory.svg");
      emit_plot(s.trajectory_csv, PlotKind::kTrajectory2d, p, problem.front());
      s.plots.push_back(p);
    }
    if (!s.cert_csv.empty()) {
      const auto p = config.output_dir / (stem + "_bound.svg");
      emit_plot(s.cert_csv, PlotKind::kU0VsBoundLogLog, p);
      s.plots.push_back(p);
    }
  }

  s.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return s;
}

nlohmann::json to_json(const RunSummary& s) {
  nlohmann::json j;
  j["name"] = s.name;
  j["alpha"] = s.alpha;
  j["steps"] = s.steps;
  j["final_u0"] = s.final_u0 ? nlohmann::json(*s.final_u0) : nlohmann::json(nullptr);
  j["final_merit_energy"] =
      s.final_merit_energy ? nlohmann::json(*s.final_merit_energy) : nlohmann::json(nullptr);
  j["u0_initial"] = s.u0_initial;
  j["R"] = s.R;
  j["bound"] = to_string(s.bound);
  j["worst_slack"] = s.worst_slack;
  j["first_violation"] = s.first_violation ? nlohmann::json(*s.first_violation) : nlohmann::json(nullptr);
  j["level_set"] = s.level_set;
  j["level_worst_excess"] = s.level_worst;
  j["energy_decay"] = s.energy_decay;
  j["energy_violations"] = s.energy_violations;
  j["energy_observed_c"] = s.energy_observed_c;
  j["lyapunov"] = to_string(s.lyapunov);
  j["lyapunov_pass_fraction"] = s.lyapunov_pass_fraction;
  j["integrability"] = to_string(s.integrability);
  j["tail_fraction"] = s.tail_fraction;
  j["wall_seconds"] = s.wall_seconds;
  j["passed"] = s.passed();
  j["trajectory_csv"] = s.trajectory_csv.string();
  j["cert_csv"] = s.cert_csv.empty() ? nlohmann::json(nullptr) : nlohmann::json(s.cert_csv.string());
  j["plots"] = nlohmann::json::array();
  for (const auto& p : s.plots) j["plots"].push_back(p.string());
  return j;
}

void report(std::ostream& log, const RunSummary& s) {
  log << s.name << " alpha=" << s.alpha << " bound=" << to_string(s.bound);
  if (s.bound != CertificateStatus::kNotApplicable) log << " worst_slack=" << s.worst_slack;
  if (s.final_u0) log << " final_u0=" << *s.final_u0;
  log << " level_set=" << (s.level_set ? "pass" : "fail")
      << " energy=" << (s.energy_decay ? "pass" : "fail")
      << " lyapunov=" << to_string(s.lyapunov)
      << " integrability=" << to_string(s.integrability) << " tail=" << s.tail_fraction
      << " wall=" << std::fixed << std::setprecision(2) << s.wall_seconds << "s"
      << std::defaultfloat << std::setprecision(6) << '\n';
  if (s.first_violation) log << "  bound violated at step " << *s.first_violation << '\n';
  if (!s.level_set) log << "  level set exceeded by " << s.level_worst << '\n';
  if (!s.energy_decay) log << "  energy increase above slack at " << s.energy_violations << " steps\n";
  if (s.integrability == CertificateStatus::kFail) log << "  kinetic tail above threshold\n";
}

std::filesystem::path env_output_dir(const std::filesystem::path& fallback) {
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  return fallback;
}

int report_error(std::ostream& err, const std::exception& e) {
  if (const auto* d = dynamic_cast<const DivergenceError*>(&e)) {
    err << "error: " << d->what() << '\n';
    return kExitViolation;
  }
  err << "error: " << e.what() << '\n';
  return kExitBadInput;
}

}  // namespace

bool RunSummary::passed() const noexcept {
  return bound != CertificateStatus::kFail && level_set && energy_decay &&
         integrability != CertificateStatus::kFail;
}

std::vector<RunSummary> run(const ExperimentConfig& config, std::ostream& log) {
  const MOProblem problem = build_problem(config);
  for (double a : config.alphas) config.integrator(a).validate();
  std::filesystem::create_directories(config.output_dir);

  std::vector<RunSummary> out(config.alphas.size());
  std::vector<std::exception_ptr> errors(config.alphas.size());
  std::vector<std::thread> workers;
  for (std::size_t i = 0; i < config.alphas.size(); ++i) {
    workers.emplace_back([&, i] {
      try {
        out[i] = run_one(config, problem, config.alphas[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  nlohmann::json j;
  j["name"] = config.name;
  j["problem"] = config.problem;
  j["scheme"] = std::string(to_string(config.scheme));
  j["t0"] = config.t0;
  j["h"] = config.h;
  j["steps"] = config.steps;
  j["stride"] = config.stride;
  j["runs"] = nlohmann::json::array();
  for (const auto& s : out) {
    j["runs"].push_back(to_json(s));
    report(log, s);
  }
  std::ofstream f(config.output_dir / (config.name + "_summary.json"), std::ios::trunc);
  if (!f) throw Error(ErrorCode::kIo, "cannot write summary json");
  f << j.dump(2) << '\n';
  return out;
}

int exit_code(const std::vector<RunSummary>& summaries) noexcept {
  for (const auto& s : summaries) {
    if (!s.passed()) return kExitViolation;
  }
  return kExitOk;
}

int run_command(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err) {
  try {
    ExperimentConfig cfg = load_config(config_path);
    cfg.output_dir = env_output_dir(cfg.output_dir);
    const int code = exit_code(run(cfg, out));
    out << (code == kExitOk ? "all certificates passed" : "certificate violation") << " ("
        << cfg.output_dir.string() << ")\n";
    return code;
  } catch (const std::exception& e) {
    return report_error(err, e);
  }
}

int verify_command(const std::filesystem::path& cert_path, std::ostream& out, std::ostream& err,
                   double eps) {
  const VerifyReport rep = verify_cert(cert_path, eps);
  for (const auto& p : rep.problems) err << p << '\n';
  if (rep.exit == kExitOk) out << cert_path.string() << ": ok\n";
  return rep.exit;
}

int reproduce_command(const std::optional<std::filesystem::path>& out_dir, std::ostream& out,
                      std::ostream& err) {
  const std::filesystem::path dir = out_dir ? *out_dir : env_output_dir("mavd-paper-out");
  int code = kExitOk;
  try {
    for (const auto& cfg : paper_preset(dir)) code = std::max(code, exit_code(run(cfg, out)));
  } catch (const std::exception& e) {
    return report_error(err, e);
  }
  out << (code == kExitOk ? "all certificates passed" : "certificate violation") << " ("
      << dir.string() << ")\n";
  return code;
}

int compare_schemes_command(const std::filesystem::path& config_path, std::ostream& out,
                            std::ostream& err) {
  try {
    ExperimentConfig cfg = load_config(config_path);
    cfg.output_dir = env_output_dir(cfg.output_dir);
    const MOProblem problem = build_problem(cfg);
    const auto oracle = oracle_for(problem, cfg.tol);
    const SchemeVariant schemes[] = {SchemeVariant::kCentralDifference,
                                     SchemeVariant::kSemiImplicitDamping,
                                     SchemeVariant::kExplicitEuler};

    struct Cell {
      RowMat positions;
      std::optional<double> final_u0;
      CertificateStatus bound = CertificateStatus::kNotApplicable;
      double worst_slack = 0.0;
      std::string error;
    };
    const std::size_t na = cfg.alphas.size();
    std::vector<Cell> cells(3 * na);
    std::vector<std::thread> workers;
    for (std::size_t s = 0; s < 3; ++s) {
      for (std::size_t a = 0; a < na; ++a) {
        workers.emplace_back([&, s, a] {
          Cell& c = cells[s * na + a];
          try {
            IntegratorConfig ic = cfg.integrator(cfg.alphas[a]);
            ic.scheme = schemes[s];
            const TrajectoryRecord traj = integrate(problem, cfg.x0, ic);
            c.positions = traj.positions;
            if (oracle) {
              const auto cert = certify_bound(traj, *oracle, problem, cfg.stride, cfg.tol.cert_eps);
              c.bound = cert.status;
              c.worst_slack = cert.worst_slack;
              c.final_u0 = eval_u0(*oracle, problem, traj.position(traj.steps()));
            }
          } catch (const std::exception& e) {
            c.error = e.what();
          }
        });
      }
    }
    for (auto& w : workers) w.join();

    std::filesystem::create_directories(cfg.output_dir);
    const auto csv_path = cfg.output_dir / (cfg.name + "_schemes.csv");
    std::ofstream csv(csv_path, std::ios::trunc);
    if (!csv) throw Error(ErrorCode::kIo, "cannot write " + csv_path.string());
    csv << "alpha,scheme,final_u0,bound,worst_slack,max_dev_x,final_dev_x\n";
    out << "reference scheme: " << to_string(schemes[0]) << '\n';
    for (std::size_t a = 0; a < na; ++a) {
      const Cell& ref = cells[a];
      for (std::size_t s = 0; s < 3; ++s) {
        const Cell& c = cells[s * na + a];
        const std::string name(to_string(schemes[s]));
        out << "alpha=" << cfg.alphas[a] << ' ' << name;
        if (!c.error.empty()) {
          out << " error: " << c.error << '\n';
          csv << format_double(cfg.alphas[a]) << ',' << name << ",,error,,,\n";
          continue;
        }
        double max_dev = 0.0, final_dev = 0.0;
        if (ref.error.empty()) {
          const RowMat diff = c.positions - ref.positions;
          max_dev = diff.rowwise().norm().maxCoeff();
          final_dev = diff.row(diff.rows() - 1).norm();
        }
        out << " bound=" << to_string(c.bound);
        if (c.final_u0) out << " final_u0=" << *c.final_u0;
        out << " max_dev_x=" << max_dev << " final_dev_x=" << final_dev << '\n';
        csv << format_double(cfg.alphas[a]) << ',' << name << ','
            << (c.final_u0 ? format_double(*c.final_u0) : "") << ',' << to_string(c.bound) << ','
            << format_double(c.worst_slack) << ',' << format_double(max_dev) << ','
            << format_double(final_dev) << '\n';
      }
    }
    out << "written " << csv_path.string() << '\n';
    return kExitOk;
  } catch (const std::exception& e) {
    return report_error(err, e);
  }
}

int plot_command(const std::filesystem::path& csv, std::string_view kind,
                 const std::filesystem::path& out_svg, std::ostream& err) {
  const auto k = parse_plot_kind(kind);
  if (!k) {
    err << "error: unknown plot kind '" << kind << "'\n";
    return kExitBadInput;
  }
  try {
    emit_plot(csv, *k, out_svg);
    return kExitOk;
  } catch (const std::exception& e) {
    return report_error(err, e);
  }
}

}  // namespace mavd::harness
