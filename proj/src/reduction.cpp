#include "fwbt/reduction.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

#include "fwbt/analysis.hpp"
#include "fwbt/lyapunov.hpp"

namespace fwbt {

std::string to_string(Method method) {
  switch (method) {
    case Method::Enns: return "enns";
    case Method::GenBT: return "genbt";
    case Method::GenBTCT: return "genbt_ct";
    case Method::ExtBT: return "extbt";
    case Method::ExtBTCT: return "extbt_ct";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
  for (Method m : {Method::Enns, Method::GenBT, Method::GenBTCT, Method::ExtBT, Method::ExtBTCT}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

namespace {

Matrix symmetric(const Matrix& m) { return 0.5 * (m + m.transpose()); }

std::runtime_error solver_error(const std::string& what, const lmi::SolverReport& rep) {
  return std::runtime_error(what + ": solver returned " + lmi::to_string(rep.status) +
                            (rep.message.empty() ? "" : " (" + rep.message + ")"));
}

bool pd_spread_ok(const Vector& ev) {
  return ev.size() == 0 || (ev(0) > 1e-10 * std::max(ev(ev.size() - 1), 0.0) && ev(ev.size() - 1) > 0.0);
}

// Same test balance() applies to its inputs.
bool balanceable(const Matrix& m) {
  return pd_spread_ok(Eigen::SelfAdjointEigenSolver<Matrix>(symmetric(m), Eigen::EigenvaluesOnly).eigenvalues());
}

void check_pd(const Matrix& m, const char* name) {
  if (m.rows() != m.cols()) throw DimensionError(std::string("balance: ") + name + " must be square");
  const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(symmetric(m), Eigen::EigenvaluesOnly).eigenvalues();
  if (!pd_spread_ok(ev)) {
    std::ostringstream os;
    os << "balance: " << name << " is not positive definite (eigenvalues in [" << ev(0) << ", "
       << ev(ev.size() - 1) << "])";
    throw std::invalid_argument(os.str());
  }
}

// Symmetric square root and its inverse.
std::pair<Matrix, Matrix> sqrt_and_inverse(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetric(m));
  const Vector root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Matrix& v = es.eigenvectors();
  return {v * root.asDiagonal() * v.transpose(), v * root.cwiseInverse().asDiagonal() * v.transpose()};
}

GramianPair solve_min_trace(lmi::GramianLmi reach, lmi::GramianLmi obs, const BlockDims& dims, const char* who) {
  lmi::add_trace_objective(reach.problem, reach.gramian);
  lmi::add_trace_objective(obs.problem, obs.gramian);
  const auto rp = lmi::solve(reach.problem);
  if (!rp.ok()) throw solver_error(std::string(who) + " (reachability)", rp);
  const auto rq = lmi::solve(obs.problem);
  if (!rq.ok()) throw solver_error(std::string(who) + " (observability)", rq);
  GramianPair out;
  out.p = reach.problem.block_diagonal(reach.gramian.name, rp.assignments);
  out.q = obs.problem.block_diagonal(obs.gramian.name, rq.assignments);
  out.dims = dims;
  out.solve_time = rp.solve_time + rq.solve_time;
  return out;
}

}  // namespace

GramianPair min_trace_gramians(const AugmentedPlant& aug) {
  const double eps = lmi::default_margin(aug);
  return solve_min_trace(lmi::build_gen_reach_li(aug, eps), lmi::build_gen_obs_li(aug, eps), aug.dims,
                         "min_trace_gramians");
}

GramianPair min_trace_gramians_ct(const AugmentedPlant& aug_ct) {
  const double eps = lmi::default_margin(aug_ct);
  return solve_min_trace(lmi::build_ct_gen_reach_li(aug_ct, eps), lmi::build_ct_gen_obs_li(aug_ct, eps), aug_ct.dims,
                         "min_trace_gramians_ct");
}

BalancingResult balance(const Matrix& r, const Matrix& n) {
  if (r.rows() != n.rows() || r.cols() != n.cols()) throw DimensionError("balance: R and N differ in size");
  check_pd(r, "R");
  check_pd(n, "N");
  const auto [f, f_inv] = sqrt_and_inverse(r);
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetric(f * n * f));
  const int dim = static_cast<int>(r.rows());
  // Eigen sorts ascending; flip to descending.
  const Vector lambda = es.eigenvalues().reverse().cwiseMax(0.0);
  const Matrix u = es.eigenvectors().rowwise().reverse();
  BalancingResult out;
  out.sigma = lambda.cwiseSqrt();
  const Vector quarter = out.sigma.cwiseSqrt();
  out.s = f * u * quarter.cwiseInverse().asDiagonal();
  out.s_inv = quarter.asDiagonal() * u.transpose() * f_inv;
  if (dim > 0) {
    const Vector sv = Eigen::JacobiSVD<Matrix>(out.s).singularValues();
    out.cond_s = sv(0) / sv(dim - 1);
  }
  return out;
}

StateSpaceModel apply_transformation(const StateSpaceModel& model, const BalancingResult& bal) {
  if (bal.s.rows() != model.order()) throw DimensionError("apply_transformation: S does not match the model order");
  return StateSpaceModel(bal.s_inv * model.a() * bal.s, bal.s_inv * model.b(), model.c() * bal.s, model.d(),
                         model.domain());
}

StateSpaceModel truncate(const StateSpaceModel& balanced, int r, std::span<const double> sigma,
                         std::vector<std::string>* warnings) {
  const int n = balanced.order();
  if (r < 0 || r > n) {
    throw std::out_of_range("truncate: order " + std::to_string(r) + " outside [0, " + std::to_string(n) + "]");
  }
  if (warnings && r > 0 && r < n && static_cast<int>(sigma.size()) == n && sigma[r - 1] - sigma[r] < 1e-9) {
    std::ostringstream os;
    os << "truncation at r = " << r << " splits a cluster (sigma_r - sigma_r+1 = " << sigma[r - 1] - sigma[r] << ")";
    warnings->push_back(os.str());
  }
  return StateSpaceModel(balanced.a().topLeftCorner(r, r), balanced.b().topRows(r), balanced.c().leftCols(r),
                         balanced.d(), balanced.domain());
}

double error_bound(std::span<const double> sigma, int r) {
  if (r < 0 || r > static_cast<int>(sigma.size())) throw std::out_of_range("error_bound: order out of range");
  double s = 0.0;
  for (std::size_t i = r; i < sigma.size(); ++i) s += sigma[i];
  return 2.0 * s;
}

double sigma_sum(const Matrix& r, const Matrix& n) {
  const Matrix f = sqrt_and_inverse(r).first;
  const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(symmetric(f * n * f), Eigen::EigenvaluesOnly).eigenvalues();
  return ev.cwiseMax(0.0).cwiseSqrt().sum();
}

namespace {

double nuclear_norm(const Matrix& m) { return Eigen::JacobiSVD<Matrix>(m).singularValues().sum(); }

IterationRecord make_record(int index, std::string step, const Matrix& r, const Matrix& n,
                            const lmi::SolverReport* rep = nullptr) {
  IterationRecord rec;
  rec.index = index;
  rec.step = std::move(step);
  rec.sigma_sum = sigma_sum(r, n);
  rec.nuclear_norm = nuclear_norm(r * n);
  if (rep) {
    rec.solve_time = rep->solve_time;
    rec.solver_iterations = rep->iterations;
  }
  return rec;
}

// Fills balanced/reduced/bound/errors from the balancing pair.
// `to_output` maps a truncated model to the domain of `plant_out`.
template <typename ToOutput>
void finish_report(ReductionReport& rep, const StateSpaceModel& plant_bal, const Matrix& r, const Matrix& n,
                   bool with_bound, const StateSpaceModel& plant_out, const std::optional<StateSpaceModel>& w_in,
                   const std::optional<StateSpaceModel>& w_out, bool measure, ToOutput to_output) {
  rep.reach_gramian = r;
  rep.obs_gramian = n;
  const BalancingResult bal = balance(r, n);
  rep.sigma = bal.sigma;
  rep.balanced = apply_transformation(plant_bal, bal);
  if (bal.cond_s > 1e10) {
    std::ostringstream os;
    os << "balancing transformation is ill-conditioned (cond(S) = " << bal.cond_s << ")";
    rep.warnings.push_back(os.str());
  }
  const std::span<const double> sig(rep.sigma.data(), static_cast<std::size_t>(rep.sigma.size()));
  const int order = rep.order();
  for (int k = 0; k <= order; ++k) {
    if (with_bound) rep.bound[k] = error_bound(sig, k);
    StateSpaceModel red = to_output(truncate(rep.balanced, k, sig, &rep.warnings));
    if (measure) {
      if (is_stable(red)) {
        rep.measured_error[k] = weighted_error(plant_out, red, w_in, w_out);
      } else {
        rep.measured_error[k] = std::numeric_limits<double>::infinity();
        rep.warnings.push_back("reduced model of order " + std::to_string(k) + " is unstable");
      }
    }
    rep.reduced.emplace(k, std::move(red));
  }
}

StateSpaceModel identity_map(StateSpaceModel m) { return m; }

// D cancels in W_o (G - G_r) W_i, so the gramians belong to G - D and the
// feedthrough is carried through truncation unchanged.
StateSpaceModel strictly_proper(const StateSpaceModel& g) {
  return StateSpaceModel(g.a(), g.b(), g.c(), Matrix::Zero(g.outputs(), g.inputs()), g.domain());
}

AugmentedPlant discretize_augmented(const AugmentedPlant& aug_ct, double t) {
  std::optional<StateSpaceModel> wi, wo;
  if (aug_ct.input_weight) wi = tustin_c2d(*aug_ct.input_weight, t);
  if (aug_ct.output_weight) wo = tustin_c2d(*aug_ct.output_weight, t);
  return AugmentedPlant{tustin_c2d(aug_ct.model, t), aug_ct.dims, tustin_c2d(aug_ct.plant, t), wi, wo};
}

double lambda_min(const Matrix& m) {
  if (m.size() == 0) return std::numeric_limits<double>::infinity();
  return Eigen::SelfAdjointEigenSolver<Matrix>(m, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

// Builders for one half-step; the DT and CT variants differ only here.
// B -> sqrt(c) B, C -> C / sqrt(c). The transfer function is unchanged and the
// gramians move as P -> c P, Q -> Q / c, so the products (and sigma) are too.
AugmentedPlant rescaled(const AugmentedPlant& aug, double c) {
  AugmentedPlant out = aug;
  const double k = std::sqrt(c);
  const auto& m = aug.model;
  out.model = StateSpaceModel(m.a(), k * m.b(), m.c() / k, m.d(), m.domain());
  return out;
}

struct ExtendedBuilders {
  std::function<lmi::GramianLmi(double eps, double c)> obs;
  std::function<lmi::GramianLmi(double eps, double c)> reach;
  double eps = 0.0;
};

// Value of the extended LMI (constraint 0) with slack = gramian = the given full matrix.
double achieved_margin(const lmi::GramianLmi& li, const Matrix& full) {
  lmi::Assignment values;
  const auto& g = li.gramian;
  const auto& s = *li.slack;
  const int w = g.weight_dim;
  if (g.weights) {
    values[li.problem.variable(*g.weights).name] = full.topLeftCorner(w, w);
    values[li.problem.variable(*s.weights).name] = full.topLeftCorner(w, w);
  }
  values[li.problem.variable(g.plant).name] = full.bottomRightCorner(g.plant_dim, g.plant_dim);
  values[li.problem.variable(s.plant).name] = full.bottomRightCorner(g.plant_dim, g.plant_dim);
  return lambda_min(li.problem.evaluate(lmi::ConstraintId{0}, values));
}

// Alternating nuclear-norm scheme. Returns the final (R, N) plant blocks.
std::pair<Matrix, Matrix> alternate(ReductionReport& rep, const GramianPair& gen_in, const ExtendedBuilders& b,
                                    const ExtendedOptions& opt) {
  // Work where both gramians have comparable size; the two can differ by many
  // orders of magnitude and the conic solver loses the small one to rounding.
  const double c = std::sqrt(std::max(gen_in.q.trace(), 1e-300) / std::max(gen_in.p.trace(), 1e-300));
  GramianPair gen = gen_in;
  gen.p *= c;
  gen.q /= c;

  Matrix p_bar = gen.plant_p();
  Matrix q_bar = gen.plant_q();
  rep.iterations.push_back(make_record(0, "init", p_bar, q_bar));
  double current = rep.iterations.back().sigma_sum;

  // Margins actually achieved by the current certificates; the next problem
  // asks for slightly less so the previous point stays strictly feasible,
  // down to a small floor.
  double obs_margin = achieved_margin(b.obs(0.0, c), gen.q);
  double reach_margin = achieved_margin(b.reach(0.0, c), gen.p);
  constexpr double kShrink = 0.9;
  // Certificates come back at the solver's accuracy, so a margin a few 1e-8
  // below zero is still a valid point; anything worse is a real violation.
  constexpr double kViolation = -1e-7;
  const auto next_margin = [&](double achieved) { return std::clamp(kShrink * achieved, 1e-2 * b.eps, b.eps); };

  // Weight blocks never enter the objective and can drift off to huge values,
  // where the certificate is lost to rounding. Cap them at a generous multiple
  // of the starting point.
  constexpr double kCap = 1e2;
  const auto cap = [&](lmi::GramianLmi& li, const Matrix& start) {
    if (!li.gramian.weights) return;
    const int w = li.gramian.weight_dim;
    const double beta = kCap * std::max(1.0, start.topLeftCorner(w, w).norm());
    const Matrix bound = beta * Matrix::Identity(w, w);
    lmi::add_loewner_upper_bound(li.problem, *li.gramian.weights, bound);
    lmi::add_loewner_upper_bound(li.problem, *li.slack->weights, bound);
  };

  const auto fail = [&](const std::string& what) {
    rep.degraded = true;
    rep.warnings.push_back(what + "; keeping the best iterate so far");
  };

  for (int loop = 0; loop < opt.loop_max; ++loop) {
    const double start_sum = current;

    if (!(obs_margin >= kViolation)) {
      fail("observability certificate violates its inequality");
      break;
    }
    const double m_obs = next_margin(obs_margin);
    auto obs = b.obs(m_obs, c);
    lmi::add_nuclear_objective(obs.problem, p_bar, obs.slack->plant);
    lmi::add_loewner_upper_bound(obs.problem, obs.slack->plant, q_bar);
    cap(obs, gen.q);
    const auto ro = lmi::solve(obs.problem);
    rep.total_solve_time += ro.solve_time;
    if (!ro.ok()) {
      fail("N-step " + std::to_string(loop + 1) + " failed: " + lmi::to_string(ro.status) + " " + ro.message);
      break;
    }
    const Matrix n_new = ro.assignments.at(obs.problem.variable(obs.slack->plant).name);
    if (!balanceable(n_new)) {
      fail("N-step " + std::to_string(loop + 1) + " returned a numerically singular N");
      break;
    }
    auto rec_n = make_record(loop + 1, "N", p_bar, n_new, &ro);
    if (rec_n.sigma_sum > current) {
      // N <= Q_bar only holds to solver tolerance; never accept a worse pair.
      rep.warnings.push_back("N-step " + std::to_string(loop + 1) + " did not improve sum(sigma); stopping");
      break;
    }
    q_bar = n_new;
    current = rec_n.sigma_sum;
    rep.iterations.push_back(rec_n);
    obs_margin = lambda_min(obs.problem.evaluate(lmi::ConstraintId{0}, ro.assignments));

    if (!(reach_margin >= kViolation)) {
      fail("reachability certificate violates its inequality");
      break;
    }
    const double m_reach = next_margin(reach_margin);
    auto reach = b.reach(m_reach, c);
    lmi::add_nuclear_objective(reach.problem, q_bar, reach.slack->plant);
    lmi::add_loewner_upper_bound(reach.problem, reach.slack->plant, p_bar);
    cap(reach, gen.p);
    const auto rr = lmi::solve(reach.problem);
    rep.total_solve_time += rr.solve_time;
    if (!rr.ok()) {
      fail("R-step " + std::to_string(loop + 1) + " failed: " + lmi::to_string(rr.status) + " " + rr.message);
      break;
    }
    const Matrix r_new = rr.assignments.at(reach.problem.variable(reach.slack->plant).name);
    if (!balanceable(r_new)) {
      fail("R-step " + std::to_string(loop + 1) + " returned a numerically singular R");
      break;
    }
    auto rec_r = make_record(loop + 1, "R", r_new, q_bar, &rr);
    if (rec_r.sigma_sum > current) {
      rep.warnings.push_back("R-step " + std::to_string(loop + 1) + " did not improve sum(sigma); stopping");
      break;
    }
    p_bar = r_new;
    current = rec_r.sigma_sum;
    rep.iterations.push_back(rec_r);
    reach_margin = lambda_min(reach.problem.evaluate(lmi::ConstraintId{0}, rr.assignments));

    if (start_sum - current < opt.rel_stop * start_sum) break;
  }
  return {p_bar / c, q_bar * c};
}

}  // namespace

ReductionReport generalized_fw_bt(const StateSpaceModel& plant, const std::optional<StateSpaceModel>& w_in,
                                  const std::optional<StateSpaceModel>& w_out, CommonOptions options) {
  if (!plant.domain().is_discrete()) throw DomainError("generalized_fw_bt expects a discrete-time plant");
  const AugmentedPlant aug = augment_weighted(strictly_proper(plant), w_in, w_out);
  const GramianPair gen = min_trace_gramians(aug);
  ReductionReport rep;
  rep.method = Method::GenBT;
  rep.total_solve_time = gen.solve_time;
  rep.iterations.push_back(make_record(0, "init", gen.plant_p(), gen.plant_q()));
  finish_report(rep, plant, gen.plant_p(), gen.plant_q(), true, plant, w_in, w_out, options.measure_errors,
                identity_map);
  return rep;
}

ReductionReport generalized_fw_bt_ct(const StateSpaceModel& plant_ct, const std::optional<StateSpaceModel>& w_in_ct,
                                     const std::optional<StateSpaceModel>& w_out_ct, CommonOptions options) {
  if (!plant_ct.domain().is_continuous()) throw DomainError("generalized_fw_bt_ct expects a continuous-time plant");
  const AugmentedPlant aug = augment_weighted(strictly_proper(plant_ct), w_in_ct, w_out_ct);
  const GramianPair gen = min_trace_gramians_ct(aug);
  ReductionReport rep;
  rep.method = Method::GenBTCT;
  rep.total_solve_time = gen.solve_time;
  rep.iterations.push_back(make_record(0, "init", gen.plant_p(), gen.plant_q()));
  finish_report(rep, plant_ct, gen.plant_p(), gen.plant_q(), true, plant_ct, w_in_ct, w_out_ct,
                options.measure_errors, identity_map);
  return rep;
}

ReductionReport extended_fw_bt(const StateSpaceModel& plant, const std::optional<StateSpaceModel>& w_in,
                               const std::optional<StateSpaceModel>& w_out, ExtendedOptions options) {
  if (!plant.domain().is_discrete()) throw DomainError("extended_fw_bt expects a discrete-time plant");
  if (options.loop_max < 0) throw std::invalid_argument("extended_fw_bt: loop_max must be nonnegative");
  const AugmentedPlant aug = augment_weighted(strictly_proper(plant), w_in, w_out);
  const GramianPair gen = min_trace_gramians(aug);
  ReductionReport rep;
  rep.method = Method::ExtBT;
  rep.total_solve_time = gen.solve_time;
  ExtendedBuilders b;
  b.eps = lmi::default_margin(aug);
  b.obs = [&aug](double eps, double c) { return lmi::build_ext_obs_li(rescaled(aug, c), eps); };
  b.reach = [&aug](double eps, double c) { return lmi::build_ext_reach_li(rescaled(aug, c), eps); };
  const auto [r, n] = alternate(rep, gen, b, options);
  finish_report(rep, plant, r, n, true, plant, w_in, w_out, options.measure_errors, identity_map);
  return rep;
}

ReductionReport extended_fw_bt_ct(const StateSpaceModel& plant_ct, const std::optional<StateSpaceModel>& w_in_ct,
                                  const std::optional<StateSpaceModel>& w_out_ct, double t,
                                  ExtendedOptions options) {
  if (!plant_ct.domain().is_continuous()) throw DomainError("extended_fw_bt_ct expects a continuous-time plant");
  if (!(t > 0.0)) throw std::invalid_argument("extended_fw_bt_ct: t must be positive");
  if (options.loop_max < 0) throw std::invalid_argument("extended_fw_bt_ct: loop_max must be nonnegative");
  const AugmentedPlant aug_ct = augment_weighted(strictly_proper(plant_ct), w_in_ct, w_out_ct);
  const double kappa = t / 2.0;
  AugmentedPlant aug_dt = [&] {
    try {
      return discretize_augmented(aug_ct, t);
    } catch (const SingularityError& e) {
      throw SingularityError("extended_fw_bt_ct: I - (t/2) A~ is singular for t = " + std::to_string(t));
    }
  }();
  const GramianPair gen = min_trace_gramians(aug_dt);
  ReductionReport rep;
  rep.method = Method::ExtBTCT;
  rep.t = t;
  rep.total_solve_time = gen.solve_time;
  ExtendedBuilders b;
  b.eps = lmi::default_margin(aug_ct);
  b.obs = [&aug_ct, kappa](double eps, double c) {
    return lmi::build_ct_ext_obs_li(rescaled(aug_ct, c), kappa, eps);
  };
  b.reach = [&aug_ct, kappa, t](double eps, double c) {
    return lmi::build_ct_ext_reach_li(rescaled(aug_ct, c), kappa, t, eps);
  };
  const auto [r, n] = alternate(rep, gen, b, options);
  finish_report(rep, aug_dt.plant, r, n, true, plant_ct, w_in_ct, w_out_ct, options.measure_errors,
                [t, &plant_ct](const StateSpaceModel& m) {
                  const auto c = tustin_d2c(m, t);
                  return StateSpaceModel(c.a(), c.b(), c.c(), c.d() + plant_ct.d(), c.domain());
                });
  return rep;
}

SweepResult sweep_t(const StateSpaceModel& plant_ct, const std::optional<StateSpaceModel>& w_in_ct,
                    const std::optional<StateSpaceModel>& w_out_ct, std::span<const double> t_grid,
                    ExtendedOptions options, unsigned workers) {
  SweepResult out;
  out.points.resize(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > 0.0)) throw std::invalid_argument("sweep_t: every t must be positive");
    out.points[i].t = t_grid[i];
  }
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < out.points.size(); i = next++) {
      auto& pt = out.points[i];
      try {
        pt.report = extended_fw_bt_ct(plant_ct, w_in_ct, w_out_ct, pt.t, options);
        pt.full_bound = pt.report->bound.at(0);
      } catch (const std::exception& e) {
        pt.error = e.what();
      }
    }
  };
  const unsigned count = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(t_grid.size())));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < count; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  for (std::size_t i = 0; i < out.points.size(); ++i) {
    if (!out.points[i].report) continue;
    if (!out.best || out.points[i].full_bound < out.points[*out.best].full_bound) out.best = i;
  }
  return out;
}

ReductionReport enns_ct_baseline(const StateSpaceModel& plant_ct, const std::optional<StateSpaceModel>& w_out_ct,
                                 CommonOptions options) {
  if (!plant_ct.domain().is_continuous()) throw DomainError("enns_ct_baseline expects a continuous-time plant");
  const AugmentedPlant aug = augment_weighted(strictly_proper(plant_ct), std::nullopt, w_out_ct);
  if (!is_stable(aug.model)) throw DomainError("enns_ct_baseline: weighted plant is not stable");
  const int n = aug.dims.plant;
  const Matrix p = reachability_gramian(aug.model).bottomRightCorner(n, n);
  const Matrix q = observability_gramian(aug.model).bottomRightCorner(n, n);
  ReductionReport rep;
  rep.method = Method::Enns;
  finish_report(rep, plant_ct, p, q, false, plant_ct, std::nullopt, w_out_ct, options.measure_errors, identity_map);
  return rep;
}

ReductionReport enns_ct_baseline(const StateSpaceModel& plant_ct, const std::optional<StateSpaceModel>& w_in_ct,
                                 const std::optional<StateSpaceModel>& w_out_ct, CommonOptions options) {
  if (w_in_ct) throw DomainError("enns_ct_baseline supports output weighting only");
  return enns_ct_baseline(plant_ct, w_out_ct, options);
}

}  // namespace fwbt
