#include "fwbt/lmi.hpp"

namespace fwbt::lmi {
namespace {

void require_discrete(const AugmentedPlant& aug, const char* who) {
  if (!aug.model.domain().is_discrete()) throw DomainError(std::string(who) + ": expects a discrete-time plant");
}

void require_continuous(const AugmentedPlant& aug, const char* who) {
  if (!aug.model.domain().is_continuous()) {
    throw DomainError(std::string(who) + ": expects a continuous-time plant");
  }
}

Matrix eye(int n) { return Matrix::Identity(n, n); }

// X >= eps I for each part of a block-diagonal variable.
void add_positivity(LmiProblem& problem, const BlockDiagVar& var) {
  if (var.weights) {
    const auto c = problem.add_constraint(var.name + "_oi_pos", {var.weight_dim});
    problem.add_term(c, 0, 0, eye(var.weight_dim), *var.weights, eye(var.weight_dim));
  }
  const auto c = problem.add_constraint(var.name + "_pos", {var.plant_dim});
  problem.add_term(c, 0, 0, eye(var.plant_dim), var.plant, eye(var.plant_dim));
}

// I - kappa A, checked for invertibility.
Matrix bilinear_factor(const Matrix& a, double kappa, const char* who) {
  if (!(kappa > 0.0)) throw std::invalid_argument(std::string(who) + ": kappa must be positive");
  const Matrix m = eye(static_cast<int>(a.rows())) - kappa * a;
  if (bilinear_singular(a, kappa)) {
    throw SingularityError(std::string(who) + ": I - kappa A is singular for t = " + std::to_string(2.0 * kappa));
  }
  return m;
}

}  // namespace

GramianLmi build_gen_reach_li(const AugmentedPlant& aug, double eps) {
  require_discrete(aug, "build_gen_reach_li");
  const Matrix& a = aug.model.a();
  const Matrix& b = aug.model.b();
  const int n = aug.dims.total();
  GramianLmi out{LmiProblem(eps), {}, std::nullopt};
  out.gramian = add_block_diag_variable(out.problem, "P", aug.dims);
  const auto c = out.problem.add_constraint("reach_lyapunov", {n});
  add_term(out.problem, c, 0, 0, eye(n), out.gramian, eye(n));
  add_term(out.problem, c, 0, 0, -a, out.gramian, a.transpose());
  out.problem.add_constant(c, 0, 0, -b * b.transpose());
  add_positivity(out.problem, out.gramian);
  return out;
}

GramianLmi build_gen_obs_li(const AugmentedPlant& aug, double eps) {
  require_discrete(aug, "build_gen_obs_li");
  const Matrix& a = aug.model.a();
  const Matrix& c_ = aug.model.c();
  const int n = aug.dims.total();
  GramianLmi out{LmiProblem(eps), {}, std::nullopt};
  out.gramian = add_block_diag_variable(out.problem, "Q", aug.dims);
  const auto c = out.problem.add_constraint("obs_lyapunov", {n});
  add_term(out.problem, c, 0, 0, eye(n), out.gramian, eye(n));
  add_term(out.problem, c, 0, 0, -a.transpose(), out.gramian, a);
  out.problem.add_constant(c, 0, 0, -c_.transpose() * c_);
  add_positivity(out.problem, out.gramian);
  return out;
}

GramianLmi build_ext_reach_li(const AugmentedPlant& aug, double eps) {
  require_discrete(aug, "build_ext_reach_li");
  const Matrix& a = aug.model.a();
  const Matrix& b = aug.model.b();
  const int n = aug.dims.total();
  const int m = aug.model.inputs();
  GramianLmi out{LmiProblem(eps), {}, std::nullopt};
  out.gramian = add_block_diag_variable(out.problem, "P", aug.dims);
  out.slack = add_block_diag_variable(out.problem, "R", aug.dims);
  auto& pb = out.problem;
  const auto c = pb.add_constraint("ext_reach", {n, n, m});
  add_term(pb, c, 0, 0, eye(n), out.gramian, eye(n));
  add_term(pb, c, 0, 1, a, *out.slack, eye(n));
  pb.add_constant(c, 0, 2, b);
  add_term(pb, c, 1, 1, 2.0 * eye(n), *out.slack, eye(n));
  add_term(pb, c, 1, 1, -eye(n), out.gramian, eye(n));
  pb.add_constant(c, 2, 2, eye(m));
  return out;
}

GramianLmi build_ext_obs_li(const AugmentedPlant& aug, double eps) {
  require_discrete(aug, "build_ext_obs_li");
  const Matrix& a = aug.model.a();
  const Matrix& c_ = aug.model.c();
  const int n = aug.dims.total();
  const int p = aug.model.outputs();
  GramianLmi out{LmiProblem(eps), {}, std::nullopt};
  out.gramian = add_block_diag_variable(out.problem, "Q", aug.dims);
  out.slack = add_block_diag_variable(out.problem, "N", aug.dims);
  auto& pb = out.problem;
  const auto c = pb.add_constraint("ext_obs", {n, n, p});
  add_term(pb, c, 0, 0, 2.0 * eye(n), *out.slack, eye(n));
  add_term(pb, c, 0, 0, -eye(n), out.gramian, eye(n));
  add_term(pb, c, 0, 1, eye(n), *out.slack, a);
  add_term(pb, c, 1, 1, eye(n), out.gramian, eye(n));
  pb.add_constant(c, 1, 2, c_.transpose());
  pb.add_constant(c, 2, 2, eye(p));
  return out;
}

GramianLmi build_ct_ext_obs_li(const AugmentedPlant& aug_ct, double kappa, double eps) {
  require_continuous(aug_ct, "build_ct_ext_obs_li");
  const Matrix& a = aug_ct.model.a();
  const Matrix& c_ = aug_ct.model.c();
  const int n = aug_ct.dims.total();
  const int p = aug_ct.model.outputs();
  const Matrix minus = bilinear_factor(a, kappa, "build_ct_ext_obs_li");
  const Matrix plus = eye(n) + kappa * a;
  GramianLmi out{LmiProblem(eps), {}, std::nullopt};
  out.gramian = add_block_diag_variable(out.problem, "Q", aug_ct.dims);
  out.slack = add_block_diag_variable(out.problem, "N", aug_ct.dims);
  auto& pb = out.problem;
  const auto c = pb.add_constraint("ct_ext_obs", {n, n, p});
  add_term(pb, c, 0, 0, 2.0 * eye(n), *out.slack, eye(n));
  add_term(pb, c, 0, 0, -eye(n), out.gramian, eye(n));
  add_term(pb, c, 0, 1, eye(n), *out.slack, plus);
  add_term(pb, c, 1, 1, minus.transpose(), out.gramian, minus);
  pb.add_constant(c, 1, 2, c_.transpose());
  pb.add_constant(c, 2, 2, eye(p));
  return out;
}

GramianLmi build_ct_ext_reach_li(const AugmentedPlant& aug_ct, double kappa, double t, double eps) {
  require_continuous(aug_ct, "build_ct_ext_reach_li");
  if (!(t > 0.0)) throw std::invalid_argument("build_ct_ext_reach_li: t must be positive");
  const Matrix& a = aug_ct.model.a();
  const Matrix& b = aug_ct.model.b();
  const int n = aug_ct.dims.total();
  const int m = aug_ct.model.inputs();
  const Matrix minus = bilinear_factor(a, kappa, "build_ct_ext_reach_li");
  const Matrix plus = eye(n) + kappa * a;
  GramianLmi out{LmiProblem(eps), {}, std::nullopt};
  out.gramian = add_block_diag_variable(out.problem, "P", aug_ct.dims);
  out.slack = add_block_diag_variable(out.problem, "R", aug_ct.dims);
  auto& pb = out.problem;
  const auto c = pb.add_constraint("ct_ext_reach", {n, n, m});
  add_term(pb, c, 0, 0, minus, out.gramian, minus.transpose());
  add_term(pb, c, 0, 1, plus, *out.slack, eye(n));
  pb.add_constant(c, 0, 2, b);
  add_term(pb, c, 1, 1, 2.0 * eye(n), *out.slack, eye(n));
  add_term(pb, c, 1, 1, -eye(n), out.gramian, eye(n));
  pb.add_constant(c, 2, 2, eye(m) / (t * t));
  return out;
}

GramianLmi build_ct_gen_reach_li(const AugmentedPlant& aug_ct, double eps) {
  require_continuous(aug_ct, "build_ct_gen_reach_li");
  const Matrix& a = aug_ct.model.a();
  const Matrix& b = aug_ct.model.b();
  const int n = aug_ct.dims.total();
  GramianLmi out{LmiProblem(eps), {}, std::nullopt};
  out.gramian = add_block_diag_variable(out.problem, "P", aug_ct.dims);
  const auto c = out.problem.add_constraint("ct_reach_lyapunov", {n});
  add_term(out.problem, c, 0, 0, -2.0 * a, out.gramian, eye(n));
  out.problem.add_constant(c, 0, 0, -b * b.transpose());
  add_positivity(out.problem, out.gramian);
  return out;
}

GramianLmi build_ct_gen_obs_li(const AugmentedPlant& aug_ct, double eps) {
  require_continuous(aug_ct, "build_ct_gen_obs_li");
  const Matrix& a = aug_ct.model.a();
  const Matrix& c_ = aug_ct.model.c();
  const int n = aug_ct.dims.total();
  GramianLmi out{LmiProblem(eps), {}, std::nullopt};
  out.gramian = add_block_diag_variable(out.problem, "Q", aug_ct.dims);
  const auto c = out.problem.add_constraint("ct_obs_lyapunov", {n});
  add_term(out.problem, c, 0, 0, -2.0 * a.transpose(), out.gramian, eye(n));
  out.problem.add_constant(c, 0, 0, -c_.transpose() * c_);
  add_positivity(out.problem, out.gramian);
  return out;
}

}  // namespace fwbt::lmi
