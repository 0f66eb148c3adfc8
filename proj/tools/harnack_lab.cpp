#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "harnack/errors.hpp"
#include "lab.hpp"

namespace {

std::map<std::string, double> parse_params(const std::vector<std::string>& items) {
  std::map<std::string, double> out;
  for (const auto& it : items) {
    const auto eq = it.find('=');
    if (eq == std::string::npos || eq == 0)
      harnack::fail(harnack::ErrorKind::ConfigParse, "parameter '" + it + "' is not key=value");
    try {
      out[it.substr(0, eq)] = std::stod(it.substr(eq + 1));
    } catch (const std::exception&) {
      harnack::fail(harnack::ErrorKind::ConfigParse, "parameter '" + it + "' has a non-numeric value");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"harnack-lab: Harnack and boundary Harnack checks on weighted graphs"};
  app.require_subcommand(1);

  std::string config, out_dir = "harnack-out";
  int jobs = 1;
  auto* run = app.add_subcommand("run", "run every task of a config and write report.json and CSVs");
  run->add_option("config", config, "config JSON (schema harnack-lab/1)")->required();
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

  std::string report, what, task, plot_out;
  auto* plot = app.add_subcommand("plot", "render an SVG from a report");
  plot->add_option("report", report, "report.json")->required();
  plot->add_option("--what", what, "green-heatmap | kernel-heatmap | constants-vs-scale")
      ->required()
      ->check(CLI::IsMember({"green-heatmap", "kernel-heatmap", "constants-vs-scale"}));
  plot->add_option("--task", task, "task name (default: first suitable task)");
  plot->add_option("--out", plot_out, "output SVG path");

  std::string builder, emit;
  std::vector<std::string> params;
  auto* gallery = app.add_subcommand("gallery", "build a gallery instance and emit it as JSON");
  gallery->add_option("builder", builder, "path | grid | half_plane | slit_grid | alpha_lattice | interval")
      ->required();
  gallery->add_option("params", params, "key=value parameters");
  gallery->add_option("--emit", emit, "output file (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto res = harnack::lab::run_config(config, {out_dir, jobs});
      std::printf("%zu passed, %zu failed, %zu rejected -> %s\n", res.passed, res.failed, res.rejected,
                  res.report.string().c_str());
      return res.exit_code;
    }
    if (*plot) {
      for (const auto& p : harnack::lab::plot_report(report, what, task, plot_out)) std::printf("%s\n", p.c_str());
      return 0;
    }
    const std::string text = harnack::lab::emit_gallery(builder, parse_params(params));
    if (emit.empty()) {
      std::cout << text << "\n";
    } else {
      std::ofstream os(emit);
      if (!os || !(os << text << "\n")) harnack::fail(harnack::ErrorKind::IoError, "cannot write " + emit);
    }
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "harnack-lab: %s\n", e.what());
    return harnack::lab::exit_code_for(e);
  }
}
