#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fwbt/analysis.hpp"
#include "fwbt/reduction.hpp"

namespace fwbt::cli {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class CliMethod { Enns, GenBT, ExtBT, ExtBTCT };

std::string to_string(CliMethod method);
/// Comma-separated list: enns, genbt, extbt, extbt_ct.
std::vector<CliMethod> parse_methods(const std::string& list);

/// "a:b:lin[:k]" or "a:b:log10[:k]"; k defaults to 10.
std::vector<double> parse_t_grid(const std::string& spec);

struct RunConfig {
  /// 1, 2 or 3; ignored when custom_model is set.
  int example = 1;
  std::optional<std::filesystem::path> custom_model;
  std::vector<CliMethod> methods;
  std::vector<double> t_grid;
  int loop_max = 10;
  std::uint64_t seed = 1;
  /// Example 3 only: seeds seed, seed + 1, ...
  int trials = 1;
  unsigned workers = 1;
  std::filesystem::path output_dir = ".";
  bool measure_errors = true;
};

/// Throws ConfigError on an unusable configuration.
void validate(const RunConfig& config);

// Rows of the emitted tables. Reading a file written by the matching writer
// reproduces the rows exactly.
struct SigmaRow {
  std::string method;
  int i = 0;
  double sigma = 0.0;
  friend bool operator==(const SigmaRow&, const SigmaRow&) = default;
};

struct IterationRow {
  std::string method;
  int index = 0;
  std::string step;
  double sigma_sum = 0.0;
  double nuclear_norm = 0.0;
  double solve_time = 0.0;
  int solver_iterations = 0;
  friend bool operator==(const IterationRow&, const IterationRow&) = default;
};

struct TsweepRow {
  double t = 0.0;
  /// Empty when this t failed.
  std::optional<double> full_bound;
  std::string error;
  friend bool operator==(const TsweepRow&, const TsweepRow&) = default;
};

struct TrialRow {
  std::uint64_t seed = 0;
  std::string method;
  int r = 0;
  std::optional<double> bound;
  std::optional<double> error;
  friend bool operator==(const TrialRow&, const TrialRow&) = default;
};

void write_sigma_csv(const std::vector<SigmaRow>& rows, std::ostream& out);
std::vector<SigmaRow> read_sigma_csv(std::istream& in);
void write_iterations_csv(const std::vector<IterationRow>& rows, std::ostream& out);
std::vector<IterationRow> read_iterations_csv(std::istream& in);
void write_tsweep_csv(const std::vector<TsweepRow>& rows, std::ostream& out);
std::vector<TsweepRow> read_tsweep_csv(std::istream& in);
void write_trials_csv(const std::vector<TrialRow>& rows, std::ostream& out);
std::vector<TrialRow> read_trials_csv(std::istream& in);

struct RunResult {
  /// One report per method (per trial mean tables are in `table`).
  std::vector<ReductionReport> reports;
  ComparisonTable table;
  std::vector<SigmaRow> sigma;
  std::vector<IterationRow> iterations;
  std::vector<TsweepRow> tsweep;
  std::vector<TrialRow> trials;
  std::vector<std::string> summary;
  bool verified = true;
};

/// Runs the configured methods and builds every table without touching disk.
RunResult execute(const RunConfig& config);

/// execute() plus the files in output_dir. Exit code 0 when every report
/// verifies, 1 on violations or solver failures, 2 on configuration errors.
int run(const RunConfig& config, std::ostream& log);

}  // namespace fwbt::cli
