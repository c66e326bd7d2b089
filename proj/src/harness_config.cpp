#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "mavd/error.hpp"
#include "mavd/harness.hpp"

namespace mavd::harness {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
  std::ostringstream os;
  os << "config line " << line << ": " << msg;
  throw Error(ErrorCode::kConfig, os.str());
}

double parse_real(std::string_view s, std::size_t line) {
  s = trim(s);
  double v = 0.0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || s.empty()) {
    fail(line, "expected a number, got '" + std::string(s) + "'");
  }
  return v;
}

long parse_int(std::string_view s, std::size_t line) {
  s = trim(s);
  long v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || s.empty()) {
    fail(line, "expected an integer, got '" + std::string(s) + "'");
  }
  return v;
}

bool parse_bool(std::string_view s, std::size_t line) {
  s = trim(s);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  fail(line, "expected a boolean, got '" + std::string(s) + "'");
}

// "1, 2, 3" or "1 2 3"
std::vector<double> parse_list(std::string_view s, std::size_t line) {
  std::vector<double> out;
  std::string buf(s);
  std::replace(buf.begin(), buf.end(), ',', ' ');
  std::istringstream is(buf);
  std::string tok;
  while (is >> tok) out.push_back(parse_real(tok, line));
  if (out.empty()) fail(line, "empty list");
  return out;
}

Vec parse_vec(std::string_view s, std::size_t line) {
  const auto xs = parse_list(s, line);
  return Eigen::Map<const Vec>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

// rows separated by ';'
Mat parse_mat(std::string_view s, std::size_t line) {
  std::vector<std::vector<double>> rows;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t semi = s.find(';', start);
    const auto piece = s.substr(start, semi == std::string_view::npos ? s.npos : semi - start);
    if (!trim(piece).empty()) rows.push_back(parse_list(piece, line));
    if (semi == std::string_view::npos) break;
    start = semi + 1;
  }
  if (rows.empty()) fail(line, "empty matrix");
  const std::size_t cols = rows.front().size();
  Mat M(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) fail(line, "ragged matrix rows");
    for (std::size_t c = 0; c < cols; ++c) M(r, c) = rows[r][c];
  }
  return M;
}

struct InlineDraft {
  std::optional<std::string> kind;
  std::optional<Mat> matrix;
  std::optional<Vec> vector;
  std::size_t line = 0;
};

}  // namespace

IntegratorConfig ExperimentConfig::integrator(double alpha) const {
  IntegratorConfig c;
  c.alpha = alpha;
  c.t0 = t0;
  c.h = h;
  c.steps = steps;
  c.scheme = scheme;
  c.v_tol = tol.v_tol;
  c.tie_tol = tol.tie_tol;
  c.qp_tol = tol.qp_tol;
  return c;
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  std::map<long, InlineDraft> drafts;
  std::optional<Vec> front_from, front_to;
  std::optional<std::string> front_kind;
  std::map<std::string, std::size_t> seen;

  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const auto line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(lineno, "expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view val = trim(line.substr(eq + 1));
    if (key.empty()) fail(lineno, "empty key");
    if (!seen.emplace(key, lineno).second) fail(lineno, "duplicate key '" + key + "'");

    if (key.rfind("objective.", 0) == 0) {
      const std::string rest = key.substr(10);
      const auto dot = rest.find('.');
      if (dot == std::string::npos) fail(lineno, "unknown key '" + key + "'");
      const long idx = parse_int(rest.substr(0, dot), lineno);
      if (idx < 0) fail(lineno, "objective index must be non-negative");
      const std::string field = rest.substr(dot + 1);
      InlineDraft& d = drafts[idx];
      d.line = lineno;
      if (field == "kind") {
        if (val != "quadratic" && val != "logsumexp") fail(lineno, "objective kind must be quadratic or logsumexp");
        d.kind = std::string(val);
      } else if (field == "Q" || field == "A") {
        d.matrix = parse_mat(val, lineno);
      } else if (field == "anchor" || field == "b") {
        d.vector = parse_vec(val, lineno);
      } else {
        fail(lineno, "unknown key '" + key + "'");
      }
      continue;
    }

    if (key == "name") cfg.name = std::string(val);
    else if (key == "problem") {
      if (val != "quadratic" && val != "logsumexp" && val != "inline") {
        fail(lineno, "problem must be quadratic, logsumexp or inline");
      }
      cfg.problem = std::string(val);
    }
    else if (key == "front") {
      if (val != "segment" && val != "none") fail(lineno, "front must be segment or none");
      front_kind = std::string(val);
    }
    else if (key == "front.from") front_from = parse_vec(val, lineno);
    else if (key == "front.to") front_to = parse_vec(val, lineno);
    else if (key == "front.injective") cfg.front_injective = parse_bool(val, lineno);
    else if (key == "x0") cfg.x0 = parse_vec(val, lineno);
    else if (key == "alphas") cfg.alphas = parse_list(val, lineno);
    else if (key == "t0") cfg.t0 = parse_real(val, lineno);
    else if (key == "h") cfg.h = parse_real(val, lineno);
    else if (key == "steps") cfg.steps = parse_int(val, lineno);
    else if (key == "scheme") {
      const auto s = parse_scheme(val);
      if (!s) fail(lineno, "scheme must be semi-implicit, explicit-euler or central-difference");
      cfg.scheme = *s;
    }
    else if (key == "stride") cfg.stride = parse_int(val, lineno);
    else if (key == "v_tol") cfg.tol.v_tol = parse_real(val, lineno);
    else if (key == "tie_tol") cfg.tol.tie_tol = parse_real(val, lineno);
    else if (key == "qp_tol") cfg.tol.qp_tol = parse_real(val, lineno);
    else if (key == "cert_eps") cfg.tol.cert_eps = parse_real(val, lineno);
    else if (key == "level_eps") cfg.tol.level_eps = parse_real(val, lineno);
    else if (key == "energy_slack_c") cfg.tol.energy_slack_c = parse_real(val, lineno);
    else if (key == "lyapunov_slack_c") cfg.tol.lyapunov_slack_c = parse_real(val, lineno);
    else if (key == "lyapunov_lambda") cfg.tol.lyapunov_lambda = parse_real(val, lineno);
    else if (key == "tail_threshold") cfg.tol.tail_threshold = parse_real(val, lineno);
    else if (key == "u0_grid") {
      const long g = parse_int(val, lineno);
      if (g < 2) fail(lineno, "u0_grid must be at least 2");
      cfg.tol.u0_grid = static_cast<std::size_t>(g);
    }
    else if (key == "refine_tol") cfg.tol.refine_tol = parse_real(val, lineno);
    else if (key == "output") cfg.output_dir = std::string(val);
    else if (key == "emit_plots") cfg.emit_plots = parse_bool(val, lineno);
    else fail(lineno, "unknown key '" + key + "'");
  }

  long expect = 0;
  for (auto& [idx, d] : drafts) {
    if (idx != expect++) fail(d.line, "objective indices must be contiguous from 0");
    if (!d.kind || !d.matrix || !d.vector) {
      fail(d.line, "objective." + std::to_string(idx) + " needs kind, a matrix and a vector");
    }
    cfg.objectives.push_back({*d.kind, *d.matrix, *d.vector});
  }
  if (cfg.problem == "inline" && cfg.objectives.empty()) fail(lineno, "inline problem without objectives");
  if (cfg.problem != "inline" && !cfg.objectives.empty()) fail(lineno, "objective.* keys require problem = inline");

  if (front_kind && *front_kind == "segment") {
    if (!front_from || !front_to) fail(lineno, "segment front needs front.from and front.to");
    cfg.front_segment = std::make_pair(*front_from, *front_to);
  } else if (front_from || front_to) {
    fail(lineno, "front.from/front.to require front = segment");
  }

  if (cfg.problem == "logsumexp") {
    if (!seen.count("energy_slack_c")) cfg.tol.energy_slack_c = 2000.0;
    if (!seen.count("lyapunov_slack_c")) cfg.tol.lyapunov_slack_c = 500.0;
  }

  if (cfg.x0.size() == 0) {
    if (cfg.problem == "quadratic") cfg.x0 = (Vec(2) << -0.2, -0.1).finished();
    else if (cfg.problem == "logsumexp") cfg.x0 = (Vec(2) << 0.0, 3.0).finished();
    else fail(lineno, "x0 is required for inline problems");
  }
  if (cfg.alphas.empty()) fail(lineno, "alphas must be non-empty");
  for (double a : cfg.alphas) {
    if (!(a > 0.0) || !std::isfinite(a)) fail(lineno, "alphas must be positive");
  }
  if (!(cfg.t0 > 0.0)) fail(lineno, "t0 must be positive");
  if (!(cfg.h > 0.0)) fail(lineno, "h must be positive");
  if (cfg.steps < 0) fail(lineno, "steps must be non-negative");
  if (cfg.stride < 1) fail(lineno, "stride must be positive");
  const auto& t = cfg.tol;
  for (double v : {t.v_tol, t.tie_tol, t.qp_tol, t.cert_eps, t.level_eps, t.tail_threshold, t.refine_tol}) {
    if (!(v > 0.0)) fail(lineno, "tolerances must be positive");
  }
  if (t.energy_slack_c < 0.0 || t.lyapunov_slack_c < 0.0) fail(lineno, "slack constants must be non-negative");
  if (cfg.name.empty()) cfg.name = cfg.problem;
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

MOProblem build_problem(const ExperimentConfig& config) {
  if (config.problem == "quadratic") return builtin_quadratic();
  if (config.problem == "logsumexp") return builtin_logsumexp();
  std::vector<ObjectiveSpec> objs;
  for (const auto& o : config.objectives) {
    objs.push_back(o.kind == "quadratic" ? ObjectiveSpec::quadratic(o.matrix, o.vector)
                                         : ObjectiveSpec::log_sum_exp(o.matrix, o.vector));
  }
  std::optional<ParetoParametrization> front;
  if (config.front_segment) {
    front = segment_front(config.front_segment->first, config.front_segment->second,
                          config.front_injective);
  }
  MOProblem p(std::move(objs), std::move(front));
  if (config.x0.size() != static_cast<Eigen::Index>(p.dim())) {
    throw Error(ErrorCode::kConfig, "x0 dimension does not match the objectives");
  }
  return p;
}

std::vector<ExperimentConfig> paper_preset(const std::filesystem::path& output_dir) {
  std::vector<ExperimentConfig> out;
  for (const char* problem : {"quadratic", "logsumexp"}) {
    ExperimentConfig c;
    c.problem = problem;
    c.name = problem;
    c.alphas = {3.0, 10.0, 50.0, 100.0};
    c.output_dir = output_dir;
    c.emit_plots = true;
    if (c.problem == "quadratic") {
      c.x0 = (Vec(2) << -0.2, -0.1).finished();
      c.tol.energy_slack_c = 10.0;
      c.tol.lyapunov_slack_c = 2.0;
    } else {
      c.x0 = (Vec(2) << 0.0, 3.0).finished();
      c.tol.energy_slack_c = 2000.0;
      c.tol.lyapunov_slack_c = 500.0;
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace mavd::harness
