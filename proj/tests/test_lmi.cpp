#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "fwbt/examples.hpp"
#include "fwbt/lmi.hpp"
#include "fwbt/lyapunov.hpp"
#include "support.hpp"

using namespace fwbt;
using fwbt::testing::lambda_min;
using fwbt::testing::min_raw_eigenvalue;

namespace {

Matrix m1(double x) { return Matrix::Constant(1, 1, x); }

AugmentedPlant scalar_aug(double a, double b, double c, TimeDomain td = TimeDomain::discrete(1.0)) {
  return augment_weighted(StateSpaceModel(m1(a), m1(b), m1(c), m1(0), td), std::nullopt, std::nullopt);
}

AugmentedPlant example2_aug() {
  const auto ex = examples::gen_example2();
  return augment_weighted(*ex.plant_dt, ex.w_in_dt, ex.w_out_dt);
}

}  // namespace

TEST_CASE("problem construction and evaluation") {
  lmi::LmiProblem pb(0.5);
  const auto x = pb.add_variable("X", 2);
  const auto c = pb.add_constraint("c", {2, 1});
  Matrix u(2, 2);
  u << 1, 2, 0, 1;
  pb.add_term(c, 0, 0, u, x, Matrix::Identity(2, 2));
  pb.add_term(c, 1, 0, Matrix::Ones(1, 2), x, Matrix::Identity(2, 2));
  pb.add_constant(c, 1, 1, m1(3));
  Matrix xv(2, 2);
  xv << 2, 1, 1, 3;
  const Matrix f = pb.evaluate(c, {{"X", xv}});
  const Matrix ux = u * xv;
  CHECK((f.topLeftCorner(2, 2) - 0.5 * (ux + ux.transpose())).norm() < 1e-14);
  CHECK((f.bottomLeftCorner(1, 2) - Matrix::Ones(1, 2) * xv).norm() < 1e-14);
  CHECK((f.topRightCorner(2, 1) - (Matrix::Ones(1, 2) * xv).transpose()).norm() < 1e-14);
  CHECK(f(2, 2) == 3.0);
  CHECK(pb.find("X").has_value());
  CHECK_FALSE(pb.find("Y").has_value());
  CHECK_THROWS(pb.add_term(c, 0, 0, Matrix::Ones(3, 3), x, Matrix::Identity(2, 2)));
  CHECK_THROWS(pb.add_constraint("bad", {-1}));
}

TEST_CASE("gen reach LI on a scalar plant") {
  const auto aug = scalar_aug(0.5, 1, 1);
  const double eps = 1e-6;
  auto g = lmi::build_gen_reach_li(aug, eps);
  CHECK(g.problem.variables().size() == 1);
  lmi::add_trace_objective(g.problem, g.gramian);
  const auto rep = lmi::solve(g.problem);
  REQUIRE(rep.ok());
  const double p = rep.assignments.at("P")(0, 0);
  CHECK(p >= (1 + eps) / 0.75 - 1e-7);
  CHECK(p == doctest::Approx((1 + eps) / 0.75).epsilon(1e-6));
  CHECK(rep.min_constraint_slack >= -1e-7);
}

TEST_CASE("gen obs LI on a scalar plant and duality") {
  const auto aug = scalar_aug(0.5, 1, 1);
  auto g = lmi::build_gen_obs_li(aug, 1e-6);
  lmi::add_trace_objective(g.problem, g.gramian);
  const auto rep = lmi::solve(g.problem);
  REQUIRE(rep.ok());
  CHECK(rep.assignments.at("Q")(0, 0) == doctest::Approx((1 + 1e-6) / 0.75).epsilon(1e-6));

  // Observability LI of (A, C) equals the reachability LI of (A^T, C^T).
  examples::SplitMix64 rng(8);
  const auto plant = testing::random_stable_dt(rng, 4, 2, 3);
  const StateSpaceModel dual(plant.a().transpose(), plant.c().transpose(), plant.b().transpose(),
                             plant.d().transpose(), plant.domain());
  const auto obs = lmi::build_gen_obs_li(augment_weighted(plant, std::nullopt, std::nullopt), 1e-6);
  const auto reach = lmi::build_gen_reach_li(augment_weighted(dual, std::nullopt, std::nullopt), 1e-6);
  const Matrix x0 = testing::random_matrix(rng, 4, 4);
  const Matrix x = x0 * x0.transpose();
  REQUIRE(obs.problem.constraints().size() == reach.problem.constraints().size());
  for (std::size_t i = 0; i < obs.problem.constraints().size(); ++i) {
    const Matrix fo = obs.problem.evaluate(obs.problem.constraints()[i], {{"Q", x}});
    const Matrix fr = reach.problem.evaluate(reach.problem.constraints()[i], {{"P", x}});
    CHECK((fo - fr).norm() < 1e-12);
  }
}

TEST_CASE("unstable plant is infeasible") {
  auto g = lmi::build_gen_reach_li(scalar_aug(2.0, 1, 1), 1e-6);
  lmi::add_trace_objective(g.problem, g.gramian);
  const auto rep = lmi::solve(g.problem);
  CHECK(rep.status == lmi::SolverStatus::Infeasible);
  CHECK(rep.assignments.empty());
}

TEST_CASE("block structure of the weighted problems") {
  const auto aug2 = example2_aug();
  const auto g = lmi::build_gen_reach_li(aug2, lmi::default_margin(aug2));
  REQUIRE(g.problem.variables().size() == 2);
  CHECK(g.problem.variables()[0].dim == 3);
  CHECK(g.problem.variables()[1].dim == 16);
  CHECK(g.problem.variables()[0].block_of->parent == "P~");
  CHECK(g.problem.variables()[1].block_of->offset == 3);

  const auto ex1 = examples::gen_example1();
  const auto aug1 = augment_weighted(tustin_c2d(ex1.plant_ct, 0.2), std::nullopt, tustin_c2d(*ex1.w_out_ct, 0.2));
  const auto o = lmi::build_gen_obs_li(aug1, 1e-6);
  CHECK(o.gramian.weight_dim == 2);
  CHECK(o.gramian.plant_dim == 12);
}

TEST_CASE("ext reach LI: scalar certificate and the R = P construction") {
  const auto aug = scalar_aug(0.5, 1, 1);
  const auto g = lmi::build_ext_reach_li(aug, 0.0);
  const Matrix f = g.problem.evaluate(g.problem.constraints().front(), {{"P", m1(2)}, {"R", m1(2)}});
  Matrix expected(3, 3);
  expected << 2, 1, 1, 1, 2, 0, 1, 0, 1;
  CHECK((f - expected).norm() < 1e-14);
  CHECK(lambda_min(f) == doctest::Approx(0.198062264).epsilon(1e-8));

  // Any generalized solution gives an extended one with R = P.
  const auto aug2 = example2_aug();
  const double eps = lmi::default_margin(aug2);
  auto gen = lmi::build_gen_reach_li(aug2, eps);
  lmi::add_trace_objective(gen.problem, gen.gramian);
  const auto rep = lmi::solve(gen.problem);
  REQUIRE(rep.ok());
  const auto ext = lmi::build_ext_reach_li(aug2, eps);
  lmi::Assignment values = rep.assignments;
  values["R_oi"] = values.at("P_oi");
  values["R"] = values.at("P");
  CHECK(min_raw_eigenvalue(ext.problem, values) >= -1e-7);

  // Same for the observability side with N = Q.
  auto geno = lmi::build_gen_obs_li(aug2, eps);
  lmi::add_trace_objective(geno.problem, geno.gramian);
  const auto repo = lmi::solve(geno.problem);
  REQUIRE(repo.ok());
  const auto exto = lmi::build_ext_obs_li(aug2, eps);
  values = repo.assignments;
  values["N_oi"] = values.at("Q_oi");
  values["N"] = values.at("Q");
  CHECK(min_raw_eigenvalue(exto.problem, values) >= -1e-7);
}

TEST_CASE("ext LIs: contraction with B = 0") {
  Matrix a(2, 2);
  a << 0.3, 0.2, -0.1, 0.4;
  const auto aug = augment_weighted(StateSpaceModel(a, Matrix::Zero(2, 1), Matrix::Zero(1, 2), m1(0),
                                                    TimeDomain::discrete(1.0)),
                                    std::nullopt, std::nullopt);
  const lmi::Assignment eye{{"P", Matrix::Identity(2, 2)}, {"R", Matrix::Identity(2, 2)},
                            {"Q", Matrix::Identity(2, 2)}, {"N", Matrix::Identity(2, 2)}};
  CHECK(min_raw_eigenvalue(lmi::build_ext_reach_li(aug, 0).problem, eye) > 0.0);
  CHECK(min_raw_eigenvalue(lmi::build_ext_obs_li(aug, 0).problem, eye) > 0.0);
}

TEST_CASE("CT extended LIs: scalar cases") {
  const auto aug = scalar_aug(-1, 1, 1, TimeDomain::continuous());
  const auto obs = lmi::build_ct_ext_obs_li(aug, 0.1, 0.0);
  const Matrix f = obs.problem.evaluate(obs.problem.constraints().front(), {{"Q", m1(1)}, {"N", m1(1)}});
  Matrix expected(3, 3);
  expected << 1, 0.9, 0, 0.9, 1.21, 1, 0, 1, 1;
  CHECK((f - expected).norm() < 1e-14);
  // Eigenvalue oracle: this pair is not a certificate, the solver must find one.
  CHECK(lambda_min(f) < 0.0);
  auto o = lmi::build_ct_ext_obs_li(aug, 0.1, 1e-6);
  const auto ro = testing::solve_min_trace(o);
  REQUIRE(ro.ok());
  CHECK(min_raw_eigenvalue(o.problem, ro.assignments) >= 1e-6 - 1e-7);

  auto r = lmi::build_ct_ext_reach_li(aug, 0.1, 0.2, 1e-6);
  const auto rr = testing::solve_min_trace(r);
  REQUIRE(rr.ok());
  CHECK(min_raw_eigenvalue(r.problem, rr.assignments) >= 1e-6 - 1e-7);

  // Margin zero still has interior points.
  auto z = lmi::build_ct_ext_reach_li(aug, 0.1, 0.2, 0.0);
  CHECK(testing::solve_min_trace(z).ok());
  CHECK_THROWS(lmi::build_ct_ext_reach_li(aug, 0.1, 0.0, 0.0));
  CHECK_THROWS(lmi::build_ct_ext_obs_li(scalar_aug(10, 1, 1, TimeDomain::continuous()), 0.1, 0.0));
}

namespace {

int negative_count(const Matrix& m) {
  const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly).eigenvalues();
  return static_cast<int>((ev.array() < 0.0).count());
}

lmi::Assignment random_point(const lmi::LmiProblem& pb, examples::SplitMix64& rng) {
  lmi::Assignment x;
  for (const auto& v : pb.variables()) {
    const Matrix m = testing::random_matrix(rng, v.dim, v.dim);
    x[v.name] = m + m.transpose() + 2.0 * v.dim * Matrix::Identity(v.dim, v.dim);
  }
  return x;
}

// Congruent matrices share inertia, so CT and DT feasibility coincide point by point.
void check_same_inertia(const lmi::LmiProblem& ct, const lmi::LmiProblem& dt, std::uint64_t seed) {
  REQUIRE(ct.constraints().size() == dt.constraints().size());
  examples::SplitMix64 rng(seed);
  for (int k = 0; k < 50; ++k) {
    const auto x = random_point(ct, rng);
    for (std::size_t c = 0; c < ct.constraints().size(); ++c) {
      CAPTURE(c);
      CHECK(negative_count(ct.evaluate(ct.constraints()[c], x)) == negative_count(dt.evaluate(dt.constraints()[c], x)));
    }
  }
}

}  // namespace

TEST_CASE("CT extended LIs match the DT LIs of the Tustin image") {
  const auto ex1 = examples::gen_example1();
  const auto aug_ct = augment_weighted(ex1.plant_ct, ex1.w_in_ct, ex1.w_out_ct);
  const double eps = lmi::default_margin(aug_ct);
  for (double t : {0.01, 0.1, 1.0}) {
    CAPTURE(t);
    const auto aug_dt = testing::discretize_augmented(aug_ct, t);
    check_same_inertia(lmi::build_ct_ext_obs_li(aug_ct, t / 2, eps).problem, lmi::build_ext_obs_li(aug_dt, eps).problem, 11);
    check_same_inertia(lmi::build_ct_ext_reach_li(aug_ct, t / 2, t, eps).problem,
                       lmi::build_ext_reach_li(aug_dt, eps).problem, 12);
  }

  // A CT solution is feasible for the DT problem.
  const double t = 1.0;
  const auto aug_dt = testing::discretize_augmented(aug_ct, t);
  auto ct = lmi::build_ct_ext_obs_li(aug_ct, t / 2, eps);
  const auto rep = testing::solve_min_trace(ct);
  REQUIRE(rep.ok());
  CHECK(min_raw_eigenvalue(lmi::build_ext_obs_li(aug_dt, eps).problem, rep.assignments) >= -1e-6);
  auto ctr = lmi::build_ct_ext_reach_li(aug_ct, t / 2, t, eps);
  const auto repr = testing::solve_min_trace(ctr);
  REQUIRE(repr.ok());
  CHECK(min_raw_eigenvalue(lmi::build_ext_reach_li(aug_dt, eps).problem, repr.assignments) >= -1e-6);
}

TEST_CASE("CT generalized LIs give the Lyapunov solution") {
  const auto aug = scalar_aug(-1, 1, 1, TimeDomain::continuous());
  auto g = lmi::build_ct_gen_reach_li(aug, 1e-7);
  lmi::add_trace_objective(g.problem, g.gramian);
  const auto rep = lmi::solve(g.problem);
  REQUIRE(rep.ok());
  CHECK(rep.assignments.at("P")(0, 0) == doctest::Approx(0.5).epsilon(1e-5));
}

TEST_CASE("trace objective: analytic limit and monotone in the margin") {
  const auto aug = scalar_aug(0.5, 1, 1);
  double prev = 0.0;
  for (double eps : {1e-9, 1e-3, 1e-1, 0.5}) {
    auto g = lmi::build_gen_reach_li(aug, eps);
    lmi::add_trace_objective(g.problem, g.gramian);
    const auto rep = lmi::solve(g.problem);
    REQUIRE(rep.ok());
    CHECK(rep.objective_value >= prev - 1e-9);
    prev = rep.objective_value;
    if (eps == 1e-9) CHECK(rep.objective_value == doctest::Approx(4.0 / 3.0).epsilon(1e-6));
  }
  auto plain = lmi::build_gen_reach_li(aug, 1e-3);
  CHECK(lmi::solve(plain.problem).ok());
}

TEST_CASE("nuclear epigraph") {
  SUBCASE("identity times diag(2, 1)") {
    lmi::LmiProblem pb(0.0);
    const auto x = pb.add_variable("X", 2);
    Matrix d = Matrix::Zero(2, 2);
    d.diagonal() << 2, 1;
    pb.fix(x, d);
    lmi::add_nuclear_objective(pb, Matrix::Identity(2, 2), x);
    const auto rep = lmi::solve(pb);
    REQUIRE(rep.ok());
    CHECK(rep.objective_value == doctest::Approx(3.0).epsilon(1e-7));
  }
  SUBCASE("rank-one fixed factor") {
    lmi::LmiProblem pb(0.0);
    const auto x = pb.add_variable("X", 2);
    pb.fix(x, Matrix::Identity(2, 2));
    Matrix f = Matrix::Zero(2, 2);
    f(0, 0) = 1;
    lmi::add_nuclear_objective(pb, f, x);
    const auto rep = lmi::solve(pb);
    REQUIRE(rep.ok());
    CHECK(rep.objective_value == doctest::Approx(1.0).epsilon(1e-7));
  }
  SUBCASE("random PSD pair against the SVD") {
    examples::SplitMix64 rng(31);
    for (int trial = 0; trial < 4; ++trial) {
      const Matrix f0 = testing::random_matrix(rng, 3, 3), x0 = testing::random_matrix(rng, 3, 3);
      const Matrix f = f0 * f0.transpose(), x = x0 * x0.transpose();
      lmi::LmiProblem pb(0.0);
      const auto xv = pb.add_variable("X", 3);
      pb.fix(xv, x);
      lmi::add_nuclear_objective(pb, f, xv);
      const auto rep = lmi::solve(pb);
      REQUIRE(rep.ok());
      const double oracle = Eigen::JacobiSVD<Matrix>(f * x).singularValues().sum();
      CHECK(std::abs(rep.objective_value - oracle) <= 1e-6 * std::max(1.0, oracle));
    }
  }
  SUBCASE("free variable: minimized nuclear norm matches the returned point") {
    lmi::LmiProblem pb(0.0);
    const auto x = pb.add_variable("X", 2);
    const auto c = pb.add_constraint("lower", {2}, false);
    pb.add_term(c, 0, 0, Matrix::Identity(2, 2), x, Matrix::Identity(2, 2));
    Matrix lo(2, 2);
    lo << 2, 0.5, 0.5, 1;
    pb.add_constant(c, 0, 0, -lo);
    Matrix f(2, 2);
    f << 1, 0.3, 0.3, 2;
    lmi::add_nuclear_objective(pb, f, x);
    const auto rep = lmi::solve(pb);
    REQUIRE(rep.ok());
    const Matrix xs = rep.assignments.at("X");
    const double nuc = Eigen::JacobiSVD<Matrix>(f * xs).singularValues().sum();
    CHECK(rep.objective_value == doctest::Approx(nuc).epsilon(1e-6));
    CHECK(lambda_min(xs - lo) >= -1e-7);
  }
  lmi::LmiProblem bad(0.0);
  const auto x = bad.add_variable("X", 2);
  CHECK_THROWS(lmi::add_nuclear_objective(bad, Matrix::Identity(3, 3), x));
}

TEST_CASE("solver status") {
  SUBCASE("x >= 1 and -x >= 1 is infeasible") {
    lmi::LmiProblem pb(0.0);
    const auto x = pb.add_variable("x", 1);
    const auto a = pb.add_constraint("a", {1}, false);
    pb.add_term(a, 0, 0, m1(1), x, m1(1));
    pb.add_constant(a, 0, 0, m1(-1));
    const auto b = pb.add_constraint("b", {1}, false);
    pb.add_term(b, 0, 0, m1(-1), x, m1(1));
    pb.add_constant(b, 0, 0, m1(-1));
    const auto rep = lmi::solve(pb);
    CHECK(rep.status == lmi::SolverStatus::Infeasible);
    CHECK(rep.assignments.empty());
  }
  SUBCASE("feasibility without objective") {
    auto g = lmi::build_gen_reach_li(scalar_aug(0.5, 1, 1), 1e-6);
    const auto rep = lmi::solve(g.problem);
    REQUIRE(rep.ok());
    CHECK(rep.assignments.at("P")(0, 0) >= 4.0 / 3.0 - 1e-6);
    CHECK(min_raw_eigenvalue(g.problem, rep.assignments) >= -1e-7);
  }
  SUBCASE("residual check on example 2") {
    const auto aug = example2_aug();
    for (int k = 0; k < 4; ++k) {
      const double eps = lmi::default_margin(aug);
      auto g = k == 0   ? lmi::build_gen_reach_li(aug, eps)
               : k == 1 ? lmi::build_gen_obs_li(aug, eps)
               : k == 2 ? lmi::build_ext_reach_li(aug, eps)
                        : lmi::build_ext_obs_li(aug, eps);
      const auto rep = testing::solve_min_trace(g);
      REQUIRE(rep.ok());
      CHECK(rep.min_constraint_slack >= -1e-7);
      for (const auto& [name, value] : rep.assignments) CHECK((value - value.transpose()).norm() == 0.0);
    }
  }
}

TEST_CASE("SDPA export") {
  auto g = lmi::build_gen_reach_li(scalar_aug(0.5, 1, 1), 1e-6);
  lmi::add_trace_objective(g.problem, g.gramian);
  std::ostringstream os;
  lmi::write_sdpa(g.problem, os);
  std::istringstream in(os.str());
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '"' && line[0] != '*') lines.push_back(line);
  }
  REQUIRE(lines.size() >= 4);
  CHECK(lines[0] == "1");  // one scalar unknown
  CHECK(lines[1] == "2");  // two blocks
}
