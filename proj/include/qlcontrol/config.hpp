#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qlcontrol/instances.hpp"

namespace qlc {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind { State, Control, Relax, GapDemo, VerifyHypotheses };

const char *to_string(ExperimentKind k);
ExperimentKind parse_kind(const std::string &s);

struct SolverConfig {
  double tolerance = 1e-9;            ///< state solver tolerance
  std::size_t max_iterations = 10000; ///< state solver cap
  std::size_t outer_iterations = 500;
  std::size_t line_search = 30;
  std::size_t samples = 8;     ///< classical control samples for certificates
  std::size_t starts = 1;      ///< random starts of the classical optimizer
  std::size_t trials = 100;    ///< hypothesis / minimality trials
  double control_value = 0.0;  ///< constant control of the state experiment
  std::vector<int> j_list{2, 4, 8, 16, 32};

  bool operator==(const SolverConfig &) const = default;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::State;
  std::string instance = "sin-gradient-1d";
  std::uint64_t seed = 1;
  std::string out = "out";
  InstanceSpec spec;
  SolverConfig solver;

  bool operator==(const ExperimentConfig &) const = default;
};

/// Parses `[section]` blocks of `key = value` lines (`;` and `#` start
/// comments). `[experiment] instance` selects the built-in the other keys
/// override; unknown sections and keys are rejected. Overrides are
/// `section.key=value` strings applied on top of the text.
ExperimentConfig parse_config(const std::string &text,
                              const std::vector<std::string> &overrides = {});
ExperimentConfig load_config(const std::string &path,
                             const std::vector<std::string> &overrides = {});

/// Canonical text with every key written out; parse_config inverts it.
std::string serialize_config(const ExperimentConfig &c);

}  // namespace qlc
