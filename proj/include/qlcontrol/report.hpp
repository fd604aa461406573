#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace qlc {

/// Outcome of an iterative solve or optimization.
struct SolveReport {
  std::size_t iterations = 0;
  bool converged = false;
  /// Final residual (state solvers) or stationarity measure (optimizers).
  double residual = 0.0;
  /// Final energy / cost when the method has one.
  double cost = 0.0;
  /// Per-iteration energy or cost.
  std::vector<double> trace;
  /// Per-iteration norm of the update.
  std::vector<double> increments;
  std::vector<std::string> warnings;
  double wall_time_s = 0.0;
};

class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string &what, std::size_t iterations, double last_residual)
      : std::runtime_error(what + " (iterations " + std::to_string(iterations) +
                           ", last residual " + std::to_string(last_residual) + ")"),
        iterations_(iterations),
        last_residual_(last_residual) {}
  std::size_t iterations() const { return iterations_; }
  double last_residual() const { return last_residual_; }

 private:
  std::size_t iterations_;
  double last_residual_;
};

}  // namespace qlc
