#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace harnack::lab {

struct RunOptions {
  std::filesystem::path out_dir = ".";
  int jobs = 1;
};

struct RunOutcome {
  int exit_code = 0;  ///< 0 all passed, 2 rejections only, 1 any failure
  std::size_t passed = 0;
  std::size_t failed = 0;
  std::size_t rejected = 0;
  std::filesystem::path report;
};

/// Runs every task of a `harnack-lab/1` config and writes report.json plus
/// one CSV per table into out_dir. Throws Error(ConfigParse | IoError).
RunOutcome run_config(const std::filesystem::path& config, const RunOptions& options);

/// Writes the requested plot next to the report (or to `out` when given) and
/// returns the files written. `task` picks a task by name; default is the
/// first task that can produce the plot.
std::vector<std::filesystem::path> plot_report(const std::filesystem::path& report, const std::string& what,
                                               const std::string& task = {},
                                               const std::filesystem::path& out = {});

/// gallery_to_json of build_gallery(builder, params).
std::string emit_gallery(const std::string& builder, const std::map<std::string, double>& params);

/// Exit code for a library error: 2 for precondition rejections, 1 otherwise.
int exit_code_for(const std::exception& e);

}  // namespace harnack::lab
