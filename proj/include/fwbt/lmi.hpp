#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fwbt/statespace.hpp"

namespace fwbt::lmi {

struct VarId {
  int index = -1;
  friend bool operator==(VarId, VarId) = default;
};

struct ConstraintId {
  int index = -1;
};

/// Places a variable inside a block-diagonal parent, e.g. P_oi at offset 0
/// and P at offset n_o + n_i of P~ = diag(P_oi, P).
struct BlockOf {
  std::string parent;
  int offset = 0;
};

struct SymmetricVar {
  std::string name;
  int dim = 0;
  std::optional<BlockOf> block_of;
};

/// One affine contribution U X V^T + V X U^T to a constraint matrix, with U
/// and V spanning the full constraint size.
struct Term {
  VarId var;
  Matrix u;
  Matrix v;
};

/// Block-partitioned symmetric affine matrix expression F(x) required to be
/// >= margin * I (strict) or >= 0 (non-strict).
struct LinearMatrixInequality {
  std::string name;
  std::vector<int> block_sizes;
  std::vector<int> block_offsets;
  bool strict = true;
  Matrix constant;
  std::vector<Term> terms;

  int size() const { return static_cast<int>(constant.rows()); }
};

enum class ObjectiveKind { None, Trace, NuclearNorm };

using Assignment = std::map<std::string, Matrix, std::less<>>;

class LmiProblem {
 public:
  explicit LmiProblem(double margin);

  VarId add_variable(std::string name, int dim, std::optional<BlockOf> block_of = std::nullopt);
  ConstraintId add_constraint(std::string name, std::vector<int> block_sizes, bool strict = true);

  /// Adds left * X * right to block (row, col) and its transpose to (col, row).
  /// On a diagonal block the symmetric part of left * X * right is added.
  void add_term(ConstraintId id, int row, int col, const Matrix& left, VarId var, const Matrix& right);
  void add_constant(ConstraintId id, int row, int col, const Matrix& value);

  /// objective += <weight, X>
  void add_objective_term(VarId var, const Matrix& weight);
  void set_objective_kind(ObjectiveKind kind) { objective_kind_ = kind; }

  /// Pins a variable to a value; the solver treats it as a constant.
  void fix(VarId var, Matrix value);

  double margin() const { return margin_; }
  const std::vector<SymmetricVar>& variables() const { return variables_; }
  const std::vector<LinearMatrixInequality>& constraints() const { return constraints_; }
  const SymmetricVar& variable(VarId id) const { return variables_.at(id.index); }
  const LinearMatrixInequality& constraint(ConstraintId id) const { return constraints_.at(id.index); }
  ObjectiveKind objective_kind() const { return objective_kind_; }
  const std::vector<std::pair<VarId, Matrix>>& objective_terms() const { return objective_; }
  const std::map<int, Matrix>& fixed() const { return fixed_; }
  bool is_fixed(VarId id) const { return fixed_.contains(id.index); }

  std::optional<VarId> find(std::string_view name) const;
  VarId at(std::string_view name) const;

  /// F(x) without the strictness margin.
  Matrix evaluate(const LinearMatrixInequality& lmi, const Assignment& values) const;
  Matrix evaluate(ConstraintId id, const Assignment& values) const {
    return evaluate(constraint(id), values);
  }
  double objective_value(const Assignment& values) const;

  /// Smallest of lambda_min(F_c(x)) - required_margin_c over all constraints.
  double min_constraint_slack(const Assignment& values) const;

  /// Reassembles diag(parts...) of a block-diagonal parent from its members.
  Matrix block_diagonal(std::string_view parent, const Assignment& values) const;

 private:
  const Matrix& value_of(VarId id, const Assignment& values) const;

  double margin_;
  std::vector<SymmetricVar> variables_;
  std::vector<LinearMatrixInequality> constraints_;
  std::vector<std::pair<VarId, Matrix>> objective_;
  ObjectiveKind objective_kind_ = ObjectiveKind::None;
  std::map<int, Matrix> fixed_;
};

/// Scale-aware strictness margin 1e-7 * (1 + ||A~||_F).
double default_margin(const AugmentedPlant& aug);

/// diag(weights, plant) pair of variables (the weight part may be empty).
struct BlockDiagVar {
  std::string name;
  std::optional<VarId> weights;
  VarId plant;
  int weight_dim = 0;
  int plant_dim = 0;

  int dim() const { return weight_dim + plant_dim; }
};

BlockDiagVar add_block_diag_variable(LmiProblem& problem, const std::string& stem, const BlockDims& dims);

/// Adds left * diag(X_w, X_p) * right to block (row, col).
void add_term(LmiProblem& problem, ConstraintId id, int row, int col, const Matrix& left,
              const BlockDiagVar& var, const Matrix& right);

/// (P~, R~, Q~, N~) variable handles produced by the builders.
struct GramianLmi {
  LmiProblem problem;
  BlockDiagVar gramian;
  std::optional<BlockDiagVar> slack;
};

/// P~ - A~ P~ A~^T - B~ B~^T >= eps I and P~ >= eps I, P~ = diag(P_oi, P).
GramianLmi build_gen_reach_li(const AugmentedPlant& aug, double eps);
/// Q~ - A~^T Q~ A~ - C~^T C~ >= eps I and Q~ >= eps I, Q~ = diag(Q_oi, Q).
GramianLmi build_gen_obs_li(const AugmentedPlant& aug, double eps);

/// [[P~, A~R~, B~], [R~A~^T, 2R~ - P~, 0], [B~^T, 0, I]] >= eps I.
GramianLmi build_ext_reach_li(const AugmentedPlant& aug, double eps);
/// [[2N~ - Q~, N~A~, 0], [A~^T N~, Q~, C~^T], [0, C~, I]] >= eps I.
GramianLmi build_ext_obs_li(const AugmentedPlant& aug, double eps);

/// Continuous-time counterpart of build_ext_obs_li for the bilinear image
/// with kappa = t/2, written without inverting I - kappa A~_c.
GramianLmi build_ct_ext_obs_li(const AugmentedPlant& aug_ct, double kappa, double eps);
/// Continuous-time counterpart of build_ext_reach_li; the (2,2) block is
/// 2R_c - P_c and the identity block is scaled by 1/t^2.
GramianLmi build_ct_ext_reach_li(const AugmentedPlant& aug_ct, double kappa, double t, double eps);

/// -(A~P~ + P~A~^T) - B~B~^T >= eps I, P~ >= eps I (continuous-time Lyapunov).
GramianLmi build_ct_gen_reach_li(const AugmentedPlant& aug_ct, double eps);
GramianLmi build_ct_gen_obs_li(const AugmentedPlant& aug_ct, double eps);

/// Minimizes the sum of traces of the listed variables.
void add_trace_objective(LmiProblem& problem, std::span<const VarId> vars);
void add_trace_objective(LmiProblem& problem, const BlockDiagVar& var);

/// Minimizes ||fixed * X||_* through the epigraph
///   [[W1, fixed X], [(fixed X)^T, W2]] >= 0,  objective (tr W1 + tr W2) / 2.
void add_nuclear_objective(LmiProblem& problem, const Matrix& fixed, VarId var);

/// bound - X >= 0 (non-strict Loewner upper bound).
void add_loewner_upper_bound(LmiProblem& problem, VarId var, const Matrix& bound);

// ---------------------------------------------------------------------------
// Solving

enum class SolverStatus { Optimal, Feasible, Infeasible, NumericalFailure };

std::string to_string(SolverStatus status);

struct SolverReport {
  SolverStatus status = SolverStatus::NumericalFailure;
  Assignment assignments;
  double objective_value = 0.0;
  double solve_time = 0.0;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double relative_gap = 0.0;
  /// min over constraints of lambda_min(F_c(x)) - margin_c at the returned point.
  double min_constraint_slack = 0.0;
  std::string message;

  bool ok() const { return status == SolverStatus::Optimal || status == SolverStatus::Feasible; }
};

struct SolverOptions {
  double feasibility_tol = 1e-8;
  double gap_tol = 1e-8;
  int max_iterations = 120;
  double step_fraction = 0.99;
  /// Print one line per iteration to stderr (FWEBT_SOLVER_VERBOSE=1).
  bool verbose = false;

  /// Defaults, with FWEBT_SOLVER_TOL (if set) overriding both tolerances.
  static SolverOptions from_environment();
};

/// Conic backend contract: PSD cones and linear objectives.
class ConicBackend {
 public:
  virtual ~ConicBackend() = default;
  virtual SolverReport solve(const LmiProblem& problem) const = 0;
};

/// Homogeneous self-dual primal-dual interior-point method with Nesterov-Todd
/// scaling and Mehrotra correction.
class InteriorPointBackend final : public ConicBackend {
 public:
  InteriorPointBackend() : options_(SolverOptions::from_environment()) {}
  explicit InteriorPointBackend(SolverOptions options) : options_(options) {}

  SolverReport solve(const LmiProblem& problem) const override;
  const SolverOptions& options() const { return options_; }

 private:
  SolverOptions options_;
};

const ConicBackend& default_backend();

SolverReport solve(const LmiProblem& problem);

/// Sparse SDPA text dump: min c^T x s.t. sum_k x_k F_k - F_0 >= 0. Fixed
/// variables are folded into F_0 and strict margins subtracted from it.
void write_sdpa(const LmiProblem& problem, std::ostream& out);

}  // namespace fwbt::lmi
