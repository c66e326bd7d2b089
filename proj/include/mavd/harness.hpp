#pragma once

// Experiment configuration, orchestration, CSV serialization, SVG plots and
// the command implementations behind the CLI.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mavd/dynamics.hpp"
#include "mavd/merit.hpp"
#include "mavd/problems.hpp"

namespace mavd::harness {

enum ExitCode : int { kExitOk = 0, kExitViolation = 1, kExitBadInput = 2 };

/// Output directory override, consulted by `run` and `reproduce-paper`.
inline constexpr const char* kOutputDirEnv = "MAVD_OUTPUT_DIR";

struct InlineObjective {
  std::string kind;  // "quadratic" | "logsumexp"
  Mat matrix;        // Q or A
  Vec vector;        // anchor or b
};

struct Tolerances {
  double v_tol = kDefaultVelocityTol;
  double tie_tol = kDefaultTieTol;
  double qp_tol = kDefaultQpTol;
  double cert_eps = kDefaultCertEps;
  double level_eps = 1e-6;
  double energy_slack_c = 10.0;
  double lyapunov_slack_c = 2.0;
  double lyapunov_lambda = 2.0;
  double tail_threshold = 0.01;
  std::size_t u0_grid = 2048;
  double refine_tol = 1e-10;
};

struct ExperimentConfig {
  std::string name;
  std::string problem = "quadratic";  // quadratic | logsumexp | inline
  std::vector<InlineObjective> objectives;
  std::optional<std::pair<Vec, Vec>> front_segment;
  bool front_injective = true;
  Vec x0;
  std::vector<double> alphas;
  double t0 = 1.0;
  double h = 1e-3;
  long steps = 100'000;
  SchemeVariant scheme = SchemeVariant::kCentralDifference;
  long stride = 100;
  Tolerances tol;
  std::filesystem::path output_dir = "mavd-out";
  bool emit_plots = false;

  IntegratorConfig integrator(double alpha) const;
};

/// Flat `key = value` text, `#` comments. Unknown keys are errors.
/// Throws Error(kConfig) with the offending line.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

MOProblem build_problem(const ExperimentConfig& config);

/// Both builtin problems with alpha in {3, 10, 50, 100} and the calibrated
/// slack constants.
std::vector<ExperimentConfig> paper_preset(const std::filesystem::path& output_dir);

struct RunSummary {
  std::string name;
  double alpha = 0.0;
  long steps = 0;
  std::optional<double> final_u0;
  std::optional<double> final_merit_energy;
  CertificateStatus bound = CertificateStatus::kNotApplicable;
  double worst_slack = 0.0;
  std::optional<long> first_violation;
  double u0_initial = 0.0;
  double R = 0.0;
  bool level_set = true;
  double level_worst = 0.0;
  bool energy_decay = true;
  long energy_violations = 0;
  double energy_observed_c = 0.0;
  CertificateStatus lyapunov = CertificateStatus::kNotApplicable;
  double lyapunov_pass_fraction = 1.0;
  CertificateStatus integrability = CertificateStatus::kNotApplicable;
  double tail_fraction = 0.0;
  double wall_seconds = 0.0;
  std::filesystem::path trajectory_csv;
  std::filesystem::path cert_csv;  // empty when the bound is not applicable
  std::vector<std::filesystem::path> plots;

  bool passed() const noexcept;
};

/// Integrates every alpha (concurrently), evaluates certificates and writes
/// `<name>_alpha<a>.csv`, `<name>_alpha<a>_cert.csv`, optional SVGs and
/// `<name>_summary.json` into the output directory.
std::vector<RunSummary> run(const ExperimentConfig& config, std::ostream& log);

int exit_code(const std::vector<RunSummary>& summaries) noexcept;

// --- serialization -----------------------------------------------------------

/// 17 significant digits, round-trips exactly.
std::string format_double(double value);

void write_trajectory_csv(const TrajectoryRecord& traj, const std::filesystem::path& path);

struct TrajectoryTable {
  std::vector<long> k;
  Vec t;
  RowMat x;
  RowMat v;
  RowMat theta;  // K rows; the final state has no step
  RowMat g;
};

TrajectoryTable read_trajectory_csv(const std::filesystem::path& path);

void write_cert_csv(const BoundCertificate& cert, const std::filesystem::path& path);

struct CertTable {
  std::vector<BoundRow> rows;
};

/// Throws Error(kSchema) on header/field/row-termination problems.
CertTable read_cert_csv(const std::filesystem::path& path);

struct VerifyReport {
  int exit = kExitOk;
  std::vector<std::string> problems;
};

/// Recomputes slack and pass from the raw u0/bound/t columns and checks that
/// bound * t^2 is constant; exit 1 on any violation or inconsistency.
VerifyReport verify_cert(const std::filesystem::path& path, double eps = kDefaultCertEps);

// --- plots -------------------------------------------------------------------

enum class PlotKind { kTrajectory2d, kU0VsBoundLogLog };
std::optional<PlotKind> parse_plot_kind(std::string_view name) noexcept;

/// Writes a standalone SVG. For kU0VsBoundLogLog `csv` may be the trajectory
/// file (its `_cert.csv` sibling is read) or the certificate file itself.
void emit_plot(const std::filesystem::path& csv, PlotKind kind, const std::filesystem::path& out,
               const std::optional<ParetoParametrization>& front = std::nullopt);

// --- commands ----------------------------------------------------------------

int run_command(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err);
int verify_command(const std::filesystem::path& cert_path, std::ostream& out, std::ostream& err,
                   double eps = kDefaultCertEps);
int reproduce_command(const std::optional<std::filesystem::path>& out_dir, std::ostream& out,
                      std::ostream& err);
int compare_schemes_command(const std::filesystem::path& config_path, std::ostream& out,
                            std::ostream& err);
int plot_command(const std::filesystem::path& csv, std::string_view kind,
                 const std::filesystem::path& out_svg, std::ostream& err);

}  // namespace mavd::harness
