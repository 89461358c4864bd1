#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rocfit/fitting.hpp"
#include "rocfit/models.hpp"

namespace rocfit::cli {

enum class Command { fit, gof, compare, band, pav, plot };

struct RunConfig {
  Command command = Command::fit;
  std::vector<std::string> inputs;
  Family family = Family::beta2;
  Constraint constraint = Constraint::unrestricted;
  std::size_t M = 999;
  std::uint64_t seed = 1;
  double level = 0.95;
  std::size_t draws = 1000;
  int restarts = 5;
  std::string out_dir;  // empty: $ROCFIT_OUTPUT_DIR, else the working directory
  bool replicates_csv = false;

  /// Throws ValidationError.
  void validate() const;
  std::string output_dir() const;
};

/// Executes one subcommand; exit code 0 on success, 2 on validation errors, 3 on numerical failures.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv and runs.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rocfit::cli
