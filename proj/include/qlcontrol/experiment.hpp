#pragma once

#include <string>
#include <vector>

#include "qlcontrol/config.hpp"

namespace qlc {

struct ExperimentOutcome {
  /// 0 success, 1 usage or configuration error, 2 failed certificate.
  int exit_code = 0;
  std::string report_json;
  std::string summary;
  /// Field and measure dumps: file name and CSV contents.
  std::vector<std::pair<std::string, std::string>> files;
  std::string error;
};

/// Runs one experiment in memory. Configuration and hypothesis errors are
/// reported through exit code 1 and `error`, never thrown.
ExperimentOutcome run_experiment(const ExperimentConfig &config);

/// Writes report.json, summary.txt and the CSV dumps into `config.out`.
void write_outcome(const ExperimentConfig &config, const ExperimentOutcome &outcome);

/// Copy of a JSON report with every "wall_time_s" member removed.
std::string strip_wall_time(const std::string &report_json);

}  // namespace qlc
