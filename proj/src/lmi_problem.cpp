#include <algorithm>
#include <numeric>

#include "fwbt/lmi.hpp"

namespace fwbt::lmi {

LmiProblem::LmiProblem(double margin) : margin_(margin) {
  if (!(margin >= 0.0)) throw std::invalid_argument("LMI strictness margin must be nonnegative");
}

VarId LmiProblem::add_variable(std::string name, int dim, std::optional<BlockOf> block_of) {
  if (dim <= 0) throw DimensionError("variable '" + name + "' must have positive dimension");
  if (find(name)) throw std::invalid_argument("duplicate variable name '" + name + "'");
  variables_.push_back(SymmetricVar{std::move(name), dim, std::move(block_of)});
  return VarId{static_cast<int>(variables_.size()) - 1};
}

ConstraintId LmiProblem::add_constraint(std::string name, std::vector<int> block_sizes, bool strict) {
  LinearMatrixInequality lmi;
  lmi.name = std::move(name);
  lmi.strict = strict;
  int offset = 0;
  for (int s : block_sizes) {
    if (s < 0) throw DimensionError("negative block size in constraint '" + lmi.name + "'");
    lmi.block_offsets.push_back(offset);
    offset += s;
  }
  lmi.block_sizes = std::move(block_sizes);
  lmi.constant = Matrix::Zero(offset, offset);
  constraints_.push_back(std::move(lmi));
  return ConstraintId{static_cast<int>(constraints_.size()) - 1};
}

void LmiProblem::add_term(ConstraintId id, int row, int col, const Matrix& left, VarId var,
                          const Matrix& right) {
  auto& lmi = constraints_.at(id.index);
  const auto& x = variable(var);
  const int nb = static_cast<int>(lmi.block_sizes.size());
  if (row < 0 || col < 0 || row >= nb || col >= nb) throw DimensionError("block index out of range");
  const int rs = lmi.block_sizes[row], cs = lmi.block_sizes[col];
  if (left.rows() != rs || left.cols() != x.dim || right.rows() != x.dim || right.cols() != cs) {
    throw DimensionError("term for '" + x.name + "' in '" + lmi.name + "' has incompatible coefficients");
  }
  if (rs == 0 || cs == 0) return;
  const int size = lmi.size();
  Term t{var, Matrix::Zero(size, x.dim), Matrix::Zero(size, x.dim)};
  // U X V^T places left X right at (row, col); the mirrored part lands at (col, row).
  const double half = row == col ? 0.5 : 1.0;
  t.u.middleRows(lmi.block_offsets[row], rs) = half * left;
  t.v.middleRows(lmi.block_offsets[col], cs) = right.transpose();
  lmi.terms.push_back(std::move(t));
}

void LmiProblem::add_constant(ConstraintId id, int row, int col, const Matrix& value) {
  auto& lmi = constraints_.at(id.index);
  const int nb = static_cast<int>(lmi.block_sizes.size());
  if (row < 0 || col < 0 || row >= nb || col >= nb) throw DimensionError("block index out of range");
  const int rs = lmi.block_sizes[row], cs = lmi.block_sizes[col];
  if (value.rows() != rs || value.cols() != cs) throw DimensionError("constant block has wrong shape");
  const int r0 = lmi.block_offsets[row], c0 = lmi.block_offsets[col];
  if (row == col) {
    lmi.constant.block(r0, c0, rs, cs) += 0.5 * (value + value.transpose());
  } else {
    lmi.constant.block(r0, c0, rs, cs) += value;
    lmi.constant.block(c0, r0, cs, rs) += value.transpose();
  }
}

void LmiProblem::add_objective_term(VarId var, const Matrix& weight) {
  const auto& x = variable(var);
  if (weight.rows() != x.dim || weight.cols() != x.dim) throw DimensionError("objective weight shape mismatch");
  objective_.emplace_back(var, 0.5 * (weight + weight.transpose()));
}

void LmiProblem::fix(VarId var, Matrix value) {
  const auto& x = variable(var);
  if (value.rows() != x.dim || value.cols() != x.dim) throw DimensionError("fixed value shape mismatch");
  fixed_[var.index] = 0.5 * (value + value.transpose());
}

std::optional<VarId> LmiProblem::find(std::string_view name) const {
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (variables_[i].name == name) return VarId{static_cast<int>(i)};
  }
  return std::nullopt;
}

VarId LmiProblem::at(std::string_view name) const {
  if (auto id = find(name)) return *id;
  throw std::out_of_range("no variable named '" + std::string(name) + "'");
}

const Matrix& LmiProblem::value_of(VarId id, const Assignment& values) const {
  if (auto it = fixed_.find(id.index); it != fixed_.end()) return it->second;
  const auto& name = variable(id).name;
  auto it = values.find(name);
  if (it == values.end()) throw std::out_of_range("assignment lacks variable '" + name + "'");
  return it->second;
}

Matrix LmiProblem::evaluate(const LinearMatrixInequality& lmi, const Assignment& values) const {
  Matrix f = lmi.constant;
  for (const auto& t : lmi.terms) {
    const Matrix ux = t.u * value_of(t.var, values);
    f.noalias() += ux * t.v.transpose();
    f.noalias() += t.v * ux.transpose();
  }
  return f;
}

double LmiProblem::objective_value(const Assignment& values) const {
  double total = 0.0;
  for (const auto& [var, weight] : objective_) total += (weight.array() * value_of(var, values).array()).sum();
  return total;
}

double LmiProblem::min_constraint_slack(const Assignment& values) const {
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& lmi : constraints_) {
    if (lmi.size() == 0) continue;
    const Matrix f = evaluate(lmi, values);
    const double lo = Eigen::SelfAdjointEigenSolver<Matrix>(f, Eigen::EigenvaluesOnly).eigenvalues()(0);
    worst = std::min(worst, lo - (lmi.strict ? margin_ : 0.0));
  }
  return worst;
}

Matrix LmiProblem::block_diagonal(std::string_view parent, const Assignment& values) const {
  int dim = 0;
  for (const auto& v : variables_) {
    if (v.block_of && v.block_of->parent == parent) dim = std::max(dim, v.block_of->offset + v.dim);
  }
  if (dim == 0) throw std::out_of_range("no variables belong to '" + std::string(parent) + "'");
  Matrix out = Matrix::Zero(dim, dim);
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    const auto& v = variables_[i];
    if (!v.block_of || v.block_of->parent != parent) continue;
    out.block(v.block_of->offset, v.block_of->offset, v.dim, v.dim) =
        value_of(VarId{static_cast<int>(i)}, values);
  }
  return out;
}

double default_margin(const AugmentedPlant& aug) { return 1e-7 * (1.0 + aug.model.a().norm()); }

BlockDiagVar add_block_diag_variable(LmiProblem& problem, const std::string& stem, const BlockDims& dims) {
  BlockDiagVar out;
  out.name = stem + "~";
  out.weight_dim = dims.weights();
  out.plant_dim = dims.plant;
  if (dims.weights() > 0) out.weights = problem.add_variable(stem + "_oi", dims.weights(), BlockOf{out.name, 0});
  out.plant = problem.add_variable(stem, dims.plant, BlockOf{out.name, dims.weights()});
  return out;
}

void add_term(LmiProblem& problem, ConstraintId id, int row, int col, const Matrix& left,
              const BlockDiagVar& var, const Matrix& right) {
  if (left.cols() != var.dim() || right.rows() != var.dim()) {
    throw DimensionError("block-diagonal term for '" + var.name + "' has incompatible coefficients");
  }
  if (var.weights) {
    problem.add_term(id, row, col, left.leftCols(var.weight_dim), *var.weights, right.topRows(var.weight_dim));
  }
  problem.add_term(id, row, col, left.rightCols(var.plant_dim), var.plant, right.bottomRows(var.plant_dim));
}

void add_trace_objective(LmiProblem& problem, std::span<const VarId> vars) {
  for (VarId v : vars) {
    const int d = problem.variable(v).dim;
    problem.add_objective_term(v, Matrix::Identity(d, d));
  }
  problem.set_objective_kind(ObjectiveKind::Trace);
}

void add_trace_objective(LmiProblem& problem, const BlockDiagVar& var) {
  std::vector<VarId> ids;
  if (var.weights) ids.push_back(*var.weights);
  ids.push_back(var.plant);
  add_trace_objective(problem, ids);
}

void add_nuclear_objective(LmiProblem& problem, const Matrix& fixed, VarId var) {
  const auto& x = problem.variable(var);
  if (fixed.cols() != x.dim) {
    throw DimensionError("nuclear objective: fixed factor has " + std::to_string(fixed.cols()) +
                         " columns, variable '" + x.name + "' has dimension " + std::to_string(x.dim));
  }
  const int rows = static_cast<int>(fixed.rows());
  const int cols = x.dim;
  const std::string stem = x.name + "_nuc";
  const VarId w1 = problem.add_variable(stem + "_W1", rows);
  const VarId w2 = problem.add_variable(stem + "_W2", cols);
  const ConstraintId epi = problem.add_constraint(stem + "_epigraph", {rows, cols}, false);
  problem.add_term(epi, 0, 0, Matrix::Identity(rows, rows), w1, Matrix::Identity(rows, rows));
  problem.add_term(epi, 1, 1, Matrix::Identity(cols, cols), w2, Matrix::Identity(cols, cols));
  problem.add_term(epi, 0, 1, fixed, var, Matrix::Identity(cols, cols));
  problem.add_objective_term(w1, 0.5 * Matrix::Identity(rows, rows));
  problem.add_objective_term(w2, 0.5 * Matrix::Identity(cols, cols));
  problem.set_objective_kind(ObjectiveKind::NuclearNorm);
}

void add_loewner_upper_bound(LmiProblem& problem, VarId var, const Matrix& bound) {
  const auto& x = problem.variable(var);
  if (bound.rows() != x.dim || bound.cols() != x.dim) throw DimensionError("Loewner bound shape mismatch");
  const ConstraintId id = problem.add_constraint(x.name + "_upper_bound", {x.dim}, false);
  problem.add_term(id, 0, 0, -Matrix::Identity(x.dim, x.dim), var, Matrix::Identity(x.dim, x.dim));
  problem.add_constant(id, 0, 0, bound);
}

std::string to_string(SolverStatus status) {
  switch (status) {
    case SolverStatus::Optimal: return "optimal";
    case SolverStatus::Feasible: return "feasible";
    case SolverStatus::Infeasible: return "infeasible";
    case SolverStatus::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

}  // namespace fwbt::lmi
