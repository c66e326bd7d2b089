#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mavd/error.hpp"
#include "mavd/harness.hpp"

namespace mavd::harness {

namespace {

constexpr const char* kCertHeader = "k,t,u0,bound,slack,pass";

void append(std::string& out, double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  (void)ec;
  out.append(buf, end);
}

void append(std::string& out, long v) {
  char buf[24];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  out.append(buf, end);
}

std::string trajectory_header(std::size_t d, std::size_t m) {
  std::string h = "k,t";
  for (std::size_t i = 0; i < d; ++i) h += ",x" + std::to_string(i);
  for (std::size_t i = 0; i < d; ++i) h += ",v" + std::to_string(i);
  for (std::size_t i = 0; i < m; ++i) h += ",theta" + std::to_string(i);
  for (std::size_t i = 0; i < d; ++i) h += ",g" + std::to_string(i);
  return h;
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

[[noreturn]] void schema(const std::filesystem::path& path, std::size_t line, const std::string& msg) {
  std::ostringstream os;
  os << path.string() << ":" << line << ": " << msg;
  throw Error(ErrorCode::kSchema, os.str());
}

// Every line, the last one included, must end in '\n'; a missing terminator
// means the file was cut off mid-write.
std::vector<std::string_view> split_lines(const std::filesystem::path& path, std::string_view text) {
  if (text.empty()) schema(path, 1, "empty file");
  if (text.back() != '\n') schema(path, 0, "file does not end with a newline (truncated?)");
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view l = text.substr(pos, nl - pos);
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
    lines.push_back(l);
    pos = nl + 1;
  }
  return lines;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t c = line.find(',', pos);
    out.push_back(line.substr(pos, c == std::string_view::npos ? line.npos : c - pos));
    if (c == std::string_view::npos) break;
    pos = c + 1;
  }
  return out;
}

double field_real(const std::filesystem::path& path, std::size_t line, std::string_view f) {
  double v = 0.0;
  auto [end, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
  if (f.empty() || ec != std::errc() || end != f.data() + f.size()) {
    schema(path, line, "bad numeric field '" + std::string(f) + "'");
  }
  return v;
}

long field_int(const std::filesystem::path& path, std::size_t line, std::string_view f) {
  long v = 0;
  auto [end, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
  if (f.empty() || ec != std::errc() || end != f.data() + f.size()) {
    schema(path, line, "bad integer field '" + std::string(f) + "'");
  }
  return v;
}

}  // namespace

std::string format_double(double value) {
  std::string s;
  append(s, value);
  return s;
}

void write_trajectory_csv(const TrajectoryRecord& traj, const std::filesystem::path& path) {
  const long K = traj.steps();
  if (K < 0) throw Error(ErrorCode::kInvalidArgument, "empty trajectory");
  const auto d = static_cast<Eigen::Index>(traj.dim());
  const auto m = static_cast<Eigen::Index>(traj.num_objectives());
  std::string out = trajectory_header(traj.dim(), traj.num_objectives());
  out += '\n';
  out.reserve(static_cast<std::size_t>(K + 1) * static_cast<std::size_t>(3 * d + m + 2) * 24);
  for (long k = 0; k <= K; ++k) {
    append(out, k);
    out += ',';
    append(out, traj.times[k]);
    for (Eigen::Index j = 0; j < d; ++j) { out += ','; append(out, traj.positions(k, j)); }
    for (Eigen::Index j = 0; j < d; ++j) { out += ','; append(out, traj.velocities(k, j)); }
    if (k < K) {
      for (Eigen::Index j = 0; j < m; ++j) { out += ','; append(out, traj.weights(k, j)); }
      for (Eigen::Index j = 0; j < d; ++j) { out += ','; append(out, traj.directions(k, j)); }
    } else {
      out.append(static_cast<std::size_t>(m + d), ',');
    }
    out += '\n';
  }
  write_file(path, out);
}

TrajectoryTable read_trajectory_csv(const std::filesystem::path& path) {
  const std::string text = slurp(path);
  const auto lines = split_lines(path, text);
  const auto head = split_fields(lines[0]);
  std::size_t d = 0, m = 0;
  for (const auto& f : head) {
    if (f.rfind("x", 0) == 0) ++d;
    else if (f.rfind("theta", 0) == 0) ++m;
  }
  if (lines[0] != trajectory_header(d, m)) schema(path, 1, "unexpected trajectory header");
  if (d == 0 || m == 0) schema(path, 1, "trajectory header has no coordinates or weights");
  const std::size_t rows = lines.size() - 1;
  if (rows == 0) schema(path, 1, "no data rows");

  const auto D = static_cast<Eigen::Index>(d);
  const auto M = static_cast<Eigen::Index>(m);
  TrajectoryTable t;
  t.k.resize(rows);
  t.t.resize(static_cast<Eigen::Index>(rows));
  t.x.resize(static_cast<Eigen::Index>(rows), D);
  t.v.resize(static_cast<Eigen::Index>(rows), D);
  t.theta.resize(static_cast<Eigen::Index>(rows - 1), M);
  t.g.resize(static_cast<Eigen::Index>(rows - 1), D);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t ln = r + 2;
    const auto f = split_fields(lines[r + 1]);
    if (f.size() != head.size()) schema(path, ln, "wrong number of fields");
    const auto R = static_cast<Eigen::Index>(r);
    t.k[r] = field_int(path, ln, f[0]);
    if (t.k[r] != static_cast<long>(r)) schema(path, ln, "step index out of sequence");
    t.t[R] = field_real(path, ln, f[1]);
    std::size_t c = 2;
    for (Eigen::Index j = 0; j < D; ++j) t.x(R, j) = field_real(path, ln, f[c++]);
    for (Eigen::Index j = 0; j < D; ++j) t.v(R, j) = field_real(path, ln, f[c++]);
    const bool last = r + 1 == rows;
    if (last) {
      for (; c < f.size(); ++c) {
        if (!f[c].empty()) schema(path, ln, "final row must leave theta and g empty");
      }
    } else {
      for (Eigen::Index j = 0; j < M; ++j) t.theta(R, j) = field_real(path, ln, f[c++]);
      for (Eigen::Index j = 0; j < D; ++j) t.g(R, j) = field_real(path, ln, f[c++]);
    }
  }
  return t;
}

void write_cert_csv(const BoundCertificate& cert, const std::filesystem::path& path) {
  std::string out = kCertHeader;
  out += '\n';
  for (const auto& r : cert.rows) {
    append(out, r.k);
    out += ',';
    append(out, r.t);
    out += ',';
    append(out, r.u0);
    out += ',';
    append(out, r.bound);
    out += ',';
    append(out, r.slack);
    out += r.pass ? ",1\n" : ",0\n";
  }
  write_file(path, out);
}

CertTable read_cert_csv(const std::filesystem::path& path) {
  const std::string text = slurp(path);
  const auto lines = split_lines(path, text);
  if (lines[0] != kCertHeader) schema(path, 1, std::string("expected header ") + kCertHeader);
  if (lines.size() < 2) schema(path, 1, "no data rows");
  CertTable table;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t ln = i + 1;
    const auto f = split_fields(lines[i]);
    if (f.size() != 6) schema(path, ln, "expected 6 fields");
    BoundRow r;
    r.k = field_int(path, ln, f[0]);
    r.t = field_real(path, ln, f[1]);
    r.u0 = field_real(path, ln, f[2]);
    r.bound = field_real(path, ln, f[3]);
    r.slack = field_real(path, ln, f[4]);
    if (f[5] != "0" && f[5] != "1") schema(path, ln, "pass must be 0 or 1");
    r.pass = f[5] == "1";
    if (!std::isfinite(r.t) || !(r.t > 0.0)) schema(path, ln, "t must be positive");
    table.rows.push_back(r);
  }
  return table;
}

VerifyReport verify_cert(const std::filesystem::path& path, double eps) {
  VerifyReport rep;
  CertTable table;
  try {
    table = read_cert_csv(path);
  } catch (const Error& e) {
    rep.exit = kExitBadInput;
    rep.problems.emplace_back(e.what());
    return rep;
  }
  auto flag = [&](const BoundRow& r, const std::string& what) {
    std::ostringstream os;
    os << "step " << r.k << " (t = " << format_double(r.t) << "): " << what;
    rep.problems.push_back(os.str());
    rep.exit = kExitViolation;
  };

  const double constant = table.rows.front().bound * table.rows.front().t * table.rows.front().t;
  for (const auto& r : table.rows) {
    const double slack = r.bound - r.u0;
    const bool pass = r.u0 <= r.bound + bound_tolerance(r.bound, eps);
    if (!pass) {
      flag(r, "u0 = " + format_double(r.u0) + " exceeds bound = " + format_double(r.bound));
    }
    if (std::abs(slack - r.slack) > 1e-12 * (1.0 + std::abs(r.bound) + std::abs(r.u0))) {
      flag(r, "slack column " + format_double(r.slack) + " disagrees with bound - u0 = " +
                  format_double(slack));
    }
    if (pass != r.pass) flag(r, "pass column disagrees with the recomputed comparison");
    const double c = r.bound * r.t * r.t;
    if (std::abs(c - constant) > 1e-12 * std::max(std::abs(constant), 1e-300)) {
      flag(r, "bound * t^2 = " + format_double(c) + " differs from " + format_double(constant));
    }
  }
  return rep;
}

}  // namespace mavd::harness
