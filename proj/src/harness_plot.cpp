#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mavd/error.hpp"
#include "mavd/harness.hpp"

namespace mavd::harness {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kMargin = 56.0;
constexpr long kMarkerEvery = 500;
constexpr long kMaxPolylinePoints = 20000;

struct Frame {
  double x_lo, x_hi, y_lo, y_hi;
  double px(double x) const { return kMargin + (x - x_lo) / (x_hi - x_lo) * (kWidth - 2 * kMargin); }
  double py(double y) const {
    return kHeight - kMargin - (y - y_lo) / (y_hi - y_lo) * (kHeight - 2 * kMargin);
  }
};

void pad(double& lo, double& hi) {
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double p = 0.05 * (hi - lo);
  lo -= p;
  hi += p;
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

void header(std::ostream& os, const std::string& title) {
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"14\">"
     << title << "</text>\n";
}

void axes(std::ostream& os, const Frame& f, const std::string& xlabel, const std::string& ylabel,
          bool log_scale) {
  os << "<g class=\"axes\" stroke=\"black\" fill=\"none\">\n"
     << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << kWidth - 2 * kMargin
     << "\" height=\"" << kHeight - 2 * kMargin << "\"/>\n</g>\n";
  os << "<g class=\"ticks\" font-family=\"sans-serif\" font-size=\"10\">\n";
  auto label = [&](double v) { return log_scale ? "1e" + num(v) : num(v); };
  auto ticks = [&](double lo, double hi) {
    std::vector<double> out;
    if (log_scale) {
      for (double e = std::ceil(lo); e <= hi; e += std::max(1.0, std::floor((hi - lo) / 8.0))) out.push_back(e);
    } else {
      for (int i = 0; i <= 4; ++i) out.push_back(lo + (hi - lo) * i / 4.0);
    }
    return out;
  };
  for (double v : ticks(f.x_lo, f.x_hi)) {
    os << "<text x=\"" << f.px(v) << "\" y=\"" << kHeight - kMargin + 14
       << "\" text-anchor=\"middle\">" << label(v) << "</text>\n";
  }
  for (double v : ticks(f.y_lo, f.y_hi)) {
    os << "<text x=\"" << kMargin - 4 << "\" y=\"" << f.py(v) + 3 << "\" text-anchor=\"end\">"
       << label(v) << "</text>\n";
  }
  os << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">"
     << xlabel << "</text>\n"
     << "<text x=\"14\" y=\"" << kHeight / 2 << "\" transform=\"rotate(-90 14 " << kHeight / 2
     << ")\" text-anchor=\"middle\">" << ylabel << "</text>\n</g>\n";
}

void save(const std::filesystem::path& out, const std::string& body) {
  if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
  std::ofstream f(out, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::kIo, "cannot write " + out.string());
  f << body;
}

void trajectory_plot(const std::filesystem::path& csv, const std::filesystem::path& out,
                     const std::optional<ParetoParametrization>& front) {
  const TrajectoryTable t = read_trajectory_csv(csv);
  if (t.x.cols() != 2) throw Error(ErrorCode::kUnsupported, "trajectory-2d plots need d = 2");
  const long n = t.x.rows();

  std::vector<std::pair<double, double>> curve;
  if (front) {
    for (int i = 0; i <= 400; ++i) {
      const Vec z = pareto_point(*front, i / 400.0);
      if (z.size() == 2) curve.emplace_back(z[0], z[1]);
    }
  }
  double xl = t.x.col(0).minCoeff(), xh = t.x.col(0).maxCoeff();
  double yl = t.x.col(1).minCoeff(), yh = t.x.col(1).maxCoeff();
  for (auto [a, b] : curve) {
    xl = std::min(xl, a); xh = std::max(xh, a);
    yl = std::min(yl, b); yh = std::max(yh, b);
  }
  pad(xl, xh);
  pad(yl, yh);
  const Frame f{xl, xh, yl, yh};

  std::ostringstream os;
  header(os, "trajectory " + csv.filename().string());
  axes(os, f, "x0", "x1", false);
  if (!curve.empty()) {
    os << "<polyline class=\"pareto\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\" points=\"";
    for (auto [a, b] : curve) os << f.px(a) << ',' << f.py(b) << ' ';
    os << "\"/>\n";
  }
  const long stride = std::max<long>(1, (n + kMaxPolylinePoints - 1) / kMaxPolylinePoints);
  os << "<polyline class=\"trajectory\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1\" points=\"";
  for (long k = 0; k < n; k += stride) os << f.px(t.x(k, 0)) << ',' << f.py(t.x(k, 1)) << ' ';
  os << f.px(t.x(n - 1, 0)) << ',' << f.py(t.x(n - 1, 1)) << "\"/>\n";
  os << "<g class=\"markers\" fill=\"none\" stroke=\"#1f77b4\">\n";
  for (long k = 0; k < n; k += kMarkerEvery) {
    os << "<circle cx=\"" << f.px(t.x(k, 0)) << "\" cy=\"" << f.py(t.x(k, 1)) << "\" r=\"3\"/>\n";
  }
  os << "</g>\n</svg>\n";
  save(out, os.str());
}

void bound_plot(const std::filesystem::path& csv, const std::filesystem::path& out) {
  std::filesystem::path cert = csv;
  const std::string stem = csv.stem().string();
  if (stem.size() < 5 || stem.substr(stem.size() - 5) != "_cert") {
    cert = csv.parent_path() / (stem + "_cert.csv");
  }
  const CertTable table = read_cert_csv(cert);

  // log-log: rows with t or values <= 0 cannot be drawn and are skipped
  std::vector<std::pair<double, double>> u0, bound;
  for (const auto& r : table.rows) {
    if (r.u0 > 0.0) u0.emplace_back(std::log10(r.t), std::log10(r.u0));
    if (r.bound > 0.0) bound.emplace_back(std::log10(r.t), std::log10(r.bound));
  }
  double xl = std::log10(table.rows.front().t), xh = std::log10(table.rows.back().t);
  double yl = 0.0, yh = 0.0;
  bool first = true;
  for (const auto* s : {&u0, &bound}) {
    for (auto [a, b] : *s) {
      if (first) { yl = yh = b; first = false; }
      yl = std::min(yl, b);
      yh = std::max(yh, b);
    }
  }
  pad(xl, xh);
  pad(yl, yh);
  const Frame f{xl, xh, yl, yh};

  std::ostringstream os;
  header(os, "u0 and bound " + cert.filename().string());
  axes(os, f, "t", "value", true);
  auto series = [&](const std::vector<std::pair<double, double>>& s, const char* name, const char* colour) {
    os << "<polyline class=\"series\" data-name=\"" << name << "\" fill=\"none\" stroke=\"" << colour
       << "\" stroke-width=\"1.5\" points=\"";
    for (auto [a, b] : s) os << f.px(a) << ',' << f.py(b) << ' ';
    os << "\"/>\n";
  };
  series(u0, "u0", "#1f77b4");
  series(bound, "bound", "#d62728");
  os << "</svg>\n";
  save(out, os.str());
}

}  // namespace

std::optional<PlotKind> parse_plot_kind(std::string_view name) noexcept {
  if (name == "trajectory-2d") return PlotKind::kTrajectory2d;
  if (name == "u0-vs-bound-loglog") return PlotKind::kU0VsBoundLogLog;
  return std::nullopt;
}

void emit_plot(const std::filesystem::path& csv, PlotKind kind, const std::filesystem::path& out,
               const std::optional<ParetoParametrization>& front) {
  switch (kind) {
    case PlotKind::kTrajectory2d: trajectory_plot(csv, out, front); return;
    case PlotKind::kU0VsBoundLogLog: bound_plot(csv, out); return;
  }
}

}  // namespace mavd::harness
