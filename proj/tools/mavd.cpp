#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "mavd/mavd.h"

int main(int argc, char** argv) {
  CLI::App app{"Inertial multiobjective gradient dynamics: simulation and certificate checks"};
  app.set_version_flag("--version", std::string(mavd_version()));
  app.require_subcommand(1);

  std::string config, cert, out_dir, csv, kind, svg;

  auto* run = app.add_subcommand("run", "integrate every alpha of a config and certify the runs");
  run->add_option("config", config, "experiment config file")->required();

  auto* verify = app.add_subcommand("verify", "re-check a serialized *_cert.csv");
  verify->add_option("cert", cert, "certificate CSV")->required();

  auto* reproduce = app.add_subcommand("reproduce-paper", "run both builtin problems for alpha in {3, 10, 50, 100}");
  reproduce->add_option("--out", out_dir, "output directory (overrides MAVD_OUTPUT_DIR)");

  auto* compare = app.add_subcommand("compare-schemes", "integrate a config under every scheme and report differences");
  compare->add_option("config", config, "experiment config file")->required();

  auto* plot = app.add_subcommand("plot", "render an SVG from a trajectory or certificate CSV");
  plot->add_option("csv", csv, "trajectory or certificate CSV")->required();
  plot->add_option("--kind", kind, "trajectory-2d | u0-vs-bound-loglog")->required();
  plot->add_option("--out", svg, "output SVG path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*run) return mavd_cmd_run(config.c_str());
  if (*verify) return mavd_cmd_verify(cert.c_str());
  if (*reproduce) return mavd_cmd_reproduce(out_dir.empty() ? nullptr : out_dir.c_str());
  if (*compare) return mavd_cmd_compare_schemes(config.c_str());
  if (*plot) return mavd_cmd_plot(csv.c_str(), kind.c_str(), svg.c_str());
  return 2;
}
