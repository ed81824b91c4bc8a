#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fwbt/lmi.hpp"
#include "fwbt/statespace.hpp"

namespace fwbt {

struct BalancingResult {
  Matrix s;
  Matrix s_inv;
  /// Descending, nonnegative.
  Vector sigma;
  double cond_s = 1.0;
};

enum class Method { Enns, GenBT, GenBTCT, ExtBT, ExtBTCT };

std::string to_string(Method method);
std::optional<Method> parse_method(std::string_view name);

/// One recorded point of the alternating scheme. `step` is "init", "N" or "R".
struct IterationRecord {
  int index = 0;
  std::string step;
  /// sum_i sqrt(lambda_i(R N)) for the pair at this point.
  double sigma_sum = 0.0;
  /// ||R N||_*.
  double nuclear_norm = 0.0;
  double solve_time = 0.0;
  int solver_iterations = 0;
};

struct ReductionReport {
  Method method = Method::GenBT;
  /// Bilinear parameter for the continuous-time extended method.
  std::optional<double> t;
  /// Balanced realization (discrete for ExtBTCT, since truncation happens there).
  StateSpaceModel balanced = StateSpaceModel::static_gain(Matrix(0, 0), TimeDomain::continuous());
  /// Truncated models r = 0..n, in the domain of the original plant.
  std::map<int, StateSpaceModel> reduced;
  Vector sigma;
  /// 2 sum_{i>r} sigma_i; empty for Enns (no a-priori bound).
  std::map<int, double> bound;
  /// Measured weighted H-infinity error per r.
  std::map<int, double> measured_error;
  std::vector<IterationRecord> iterations;
  std::vector<std::string> warnings;
  /// Plant blocks used in balancing (P, Q or R, N).
  Matrix reach_gramian;
  Matrix obs_gramian;
  double total_solve_time = 0.0;
  /// True when the alternating loop stopped on a solver failure.
  bool degraded = false;

  int order() const { return static_cast<int>(sigma.size()); }
};

struct GramianPair {
  Matrix p;  // full block-diagonal P~
  Matrix q;  // full block-diagonal Q~
  BlockDims dims;
  double solve_time = 0.0;

  Matrix plant_p() const { return p.bottomRightCorner(dims.plant, dims.plant); }
  Matrix plant_q() const { return q.bottomRightCorner(dims.plant, dims.plant); }
};

/// Block-diagonal min-trace solutions of the generalized Lyapunov inequalities.
/// Throws std::runtime_error when either problem is infeasible or fails.
GramianPair min_trace_gramians(const AugmentedPlant& aug);

/// Continuous-time counterpart of min_trace_gramians.
GramianPair min_trace_gramians_ct(const AugmentedPlant& aug_ct);

/// S with S^{-1} R S^{-T} = diag(sigma) = S^T N S.
BalancingResult balance(const Matrix& r, const Matrix& n);

/// (S^{-1} A S, S^{-1} B, C S, D).
StateSpaceModel apply_transformation(const StateSpaceModel& model, const BalancingResult& bal);

/// Leading r states. When sigma is given, a warning is appended if the cut
/// splits a cluster (sigma_r - sigma_{r+1} < 1e-9).
StateSpaceModel truncate(const StateSpaceModel& balanced, int r, std::span<const double> sigma = {},
                         std::vector<std::string>* warnings = nullptr);

/// 2 sum_{i>r} sigma_i.
double error_bound(std::span<const double> sigma, int r);
inline double error_bound(const Vector& sigma, int r) {
  return error_bound(std::span<const double>(sigma.data(), static_cast<std::size_t>(sigma.size())), r);
}

/// sum_i sqrt(lambda_i(R N)).
double sigma_sum(const Matrix& r, const Matrix& n);

struct ExtendedOptions {
  int loop_max = 10;
  /// Early stop when a full iteration improves sum(sigma) by less than this (relative).
  double rel_stop = 1e-6;
  /// Measure weighted errors for every r (costly for large n).
  bool measure_errors = true;
};

struct CommonOptions {
  bool measure_errors = true;
};

ReductionReport generalized_fw_bt(const StateSpaceModel& plant, const std::optional<StateSpaceModel>& w_in,
                                  const std::optional<StateSpaceModel>& w_out, CommonOptions options = {});

/// Continuous-time generalized baseline: CT Lyapunov inequalities, CT truncation.
ReductionReport generalized_fw_bt_ct(const StateSpaceModel& plant_ct, const std::optional<StateSpaceModel>& w_in_ct,
                                     const std::optional<StateSpaceModel>& w_out_ct, CommonOptions options = {});

ReductionReport extended_fw_bt(const StateSpaceModel& plant, const std::optional<StateSpaceModel>& w_in,
                               const std::optional<StateSpaceModel>& w_out, ExtendedOptions options = {});

ReductionReport extended_fw_bt_ct(const StateSpaceModel& plant_ct, const std::optional<StateSpaceModel>& w_in_ct,
                                  const std::optional<StateSpaceModel>& w_out_ct, double t,
                                  ExtendedOptions options = {});

struct SweepPoint {
  double t = 0.0;
  std::optional<ReductionReport> report;
  /// 2 sum_i sigma_i (bound at r = 0).
  double full_bound = 0.0;
  std::string error;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  /// Index into points of the smallest full-sum bound.
  std::optional<std::size_t> best;
};

/// Independent extended_fw_bt_ct runs over a t grid, `workers` at a time.
/// Failing t values are kept with their error message and skipped in the selection.
SweepResult sweep_t(const StateSpaceModel& plant_ct, const std::optional<StateSpaceModel>& w_in_ct,
                    const std::optional<StateSpaceModel>& w_out_ct, std::span<const double> t_grid,
                    ExtendedOptions options = {}, unsigned workers = 1);

/// Output-weighted CT baseline from Lyapunov equations (no a-priori bound).
ReductionReport enns_ct_baseline(const StateSpaceModel& plant_ct, const std::optional<StateSpaceModel>& w_out_ct,
                                 CommonOptions options = {});
/// Throws DomainError when an input weight is supplied.
ReductionReport enns_ct_baseline(const StateSpaceModel& plant_ct, const std::optional<StateSpaceModel>& w_in_ct,
                                 const std::optional<StateSpaceModel>& w_out_ct, CommonOptions options = {});

}  // namespace fwbt
