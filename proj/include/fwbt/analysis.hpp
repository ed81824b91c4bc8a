#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fwbt/reduction.hpp"
#include "fwbt/statespace.hpp"

namespace fwbt {

enum class NormMethod { GridRefine, Bisection };

struct NormResult {
  double value = 0.0;
  /// omega (rad/s) or theta (rad/sample); infinity when the peak is at omega -> inf.
  double peak_frequency = 0.0;
  NormMethod method = NormMethod::GridRefine;
  double certified_tolerance = 0.0;
};

/// Grid plus golden-section refinement of the three largest grid peaks.
/// Throws DomainError for unstable models.
NormResult hinf_norm(const StateSpaceModel& model, double rel_tol = 1e-6);

/// ||W_o (G - G_r) W_i||_inf.
double weighted_error(const StateSpaceModel& plant, const StateSpaceModel& reduced,
                      const std::optional<StateSpaceModel>& w_in, const std::optional<StateSpaceModel>& w_out);

struct Violation {
  enum class Kind { BoundExceeded, UnstableReduced, IterationIncrease, MissingError };
  Kind kind;
  int r = -1;
  std::string message;
};

std::string to_string(Violation::Kind kind);

/// Empty iff every bound holds, every reduced model is stable and the
/// iteration trace is nonincreasing (all up to rel_tol).
std::vector<Violation> verify_report(const ReductionReport& report, double rel_tol = 1e-6);

struct MethodEntry {
  std::string method;
  std::optional<double> bound;
  std::optional<double> error;
};

struct ComparisonRow {
  int r = 0;
  std::vector<MethodEntry> entries;
  /// Extended bound above generalized bound beyond tolerance at this r.
  bool dominance_violated = false;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;
  std::vector<int> flagged;
};

/// Per-r alignment of several reports; throws std::invalid_argument when
/// the reports cover different orders.
ComparisonTable compare_methods(const std::vector<const ReductionReport*>& reports, double tol = 1e-6);

/// CSV with columns r,method,bound,error (empty field when not available).
void write_comparison_csv(const ComparisonTable& table, std::ostream& out);
ComparisonTable read_comparison_csv(std::istream& in);

}  // namespace fwbt
