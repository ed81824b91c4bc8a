#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "fwbt/analysis.hpp"
#include "fwbt/examples.hpp"
#include "support.hpp"

using namespace fwbt;

namespace {

Matrix m1(double x) { return Matrix::Constant(1, 1, x); }

StateSpaceModel scalar(double a, double b, double c, double d, TimeDomain td) {
  return StateSpaceModel(m1(a), m1(b), m1(c), m1(d), td);
}

// Frozen: H-infinity norm of the example 1 plant.
constexpr double kEx1PlantNorm = 8.66251874543382;

const ReductionReport& gen2() {
  static const auto ex = examples::gen_example2();
  static const auto rep = generalized_fw_bt(*ex.plant_dt, ex.w_in_dt, ex.w_out_dt);
  return rep;
}

}  // namespace

TEST_CASE("hinf_norm on first-order systems") {
  const auto c = hinf_norm(scalar(-1, 1, 1, 0, TimeDomain::continuous()));
  CHECK(c.value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(c.peak_frequency == doctest::Approx(0.0).epsilon(1e-3));
  const auto d = hinf_norm(scalar(0.5, 1, 1, 0, TimeDomain::discrete(1.0)));
  CHECK(d.value == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(d.peak_frequency == doctest::Approx(0.0).epsilon(1e-3));
  // Feedthrough dominates at high frequency.
  const auto hf = hinf_norm(scalar(-1, 1, -1, 1, TimeDomain::continuous()));
  CHECK(hf.value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(hinf_norm(scalar(1, 1, 1, 0, TimeDomain::continuous())), DomainError);
  CHECK_THROWS_AS(hinf_norm(scalar(1.5, 1, 1, 0, TimeDomain::discrete(1.0))), DomainError);
}

TEST_CASE("hinf_norm of the resonant example against a dense grid") {
  const auto g = examples::gen_example1().plant_ct;
  const FrequencyEvaluator fe(g);
  double grid_max = 0.0;
  const int points = 1000000;
  for (int i = 0; i < points; ++i) grid_max = std::max(grid_max, fe.max_singular_value(std::pow(10.0, -2.0 + 5.0 * i / (points - 1.0))));
  const auto n = hinf_norm(g);
  CHECK(n.value >= grid_max * (1 - 1e-12));
  CHECK(n.value <= grid_max * (1 + 1e-5));
  CHECK(n.value == doctest::Approx(kEx1PlantNorm).epsilon(1e-8));
  CHECK(fe.max_singular_value(n.peak_frequency) == doctest::Approx(n.value).epsilon(1e-12));
}

TEST_CASE("submultiplicative on weighted compositions") {
  const auto ex = examples::gen_example2();
  const auto aug = augment_weighted(ex.plant_ct, ex.w_in_ct, ex.w_out_ct);
  const double lhs = hinf_norm(aug.model).value;
  const double rhs = hinf_norm(*ex.w_out_ct).value * hinf_norm(ex.plant_ct).value * hinf_norm(*ex.w_in_ct).value;
  CHECK(lhs <= rhs * (1 + 1e-9));
}

TEST_CASE("Tustin keeps the norm") {
  const auto ex = examples::gen_example1();
  const double nc = hinf_norm(ex.plant_ct, 1e-9).value;
  for (double t : {0.05, 0.2, 1.0}) {
    CAPTURE(t);
    const double nd = hinf_norm(tustin_c2d(ex.plant_ct, t), 1e-9).value;
    CHECK(std::abs(nc - nd) <= 2e-6 * nc);
  }
}

TEST_CASE("weighted_error") {
  const auto g = scalar(0.5, 1, 1, 0, TimeDomain::discrete(1.0));
  CHECK(weighted_error(g, g, std::nullopt, std::nullopt) <= 1e-10);
  const auto zero = StateSpaceModel::static_gain(m1(0), TimeDomain::discrete(1.0));
  CHECK(weighted_error(g, zero, std::nullopt, std::nullopt) == doctest::Approx(2.0).epsilon(1e-9));
  // A static output weight scales the error.
  const auto w = StateSpaceModel::static_gain(m1(3), TimeDomain::discrete(1.0));
  CHECK(weighted_error(g, zero, std::nullopt, w) == doctest::Approx(6.0).epsilon(1e-9));
}

TEST_CASE("verify_report") {
  const auto& rep = gen2();
  CHECK(verify_report(rep).empty());

  auto broken = rep;
  broken.bound[5] = 0.0;
  const auto v = verify_report(broken);
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == Violation::Kind::BoundExceeded);
  CHECK(v[0].r == 5);

  auto missing = rep;
  missing.measured_error.erase(3);
  const auto vm = verify_report(missing);
  REQUIRE_FALSE(vm.empty());
  CHECK(vm[0].kind == Violation::Kind::MissingError);

  auto rising = rep;
  rising.iterations.push_back(IterationRecord{1, "N", rep.iterations.back().sigma_sum * 2, 0, 0, 0});
  bool found = false;
  for (const auto& x : verify_report(rising)) found = found || x.kind == Violation::Kind::IterationIncrease;
  CHECK(found);

  auto unstable = rep;
  unstable.reduced.insert_or_assign(2, StateSpaceModel(Matrix::Identity(2, 2) * 1.5, Matrix::Ones(2, 1), Matrix::Ones(1, 2),
                                                       m1(0), TimeDomain::discrete(0.1)));
  found = false;
  for (const auto& x : verify_report(unstable)) found = found || (x.kind == Violation::Kind::UnstableReduced && x.r == 2);
  CHECK(found);

  // r = n: both sides are (numerically) zero.
  CHECK(rep.bound.at(rep.order()) == 0.0);
  CHECK(rep.measured_error.at(rep.order()) <= 1e-8);
}

TEST_CASE("compare_methods and the CSV table") {
  const auto& g = gen2();
  const auto single = compare_methods({&g});
  REQUIRE(single.rows.size() == static_cast<std::size_t>(g.order() + 1));
  for (const auto& row : single.rows) {
    REQUIRE(row.entries.size() == 1);
    CHECK(row.entries[0].method == "genbt");
    CHECK(*row.entries[0].bound == g.bound.at(row.r));
    CHECK(*row.entries[0].error == g.measured_error.at(row.r));
  }
  CHECK(single.flagged.empty());

  // An extended report with a larger bound is flagged.
  auto fake = g;
  fake.method = Method::ExtBT;
  fake.bound[4] += 1.0;
  const auto pair = compare_methods({&g, &fake});
  REQUIRE(pair.flagged.size() == 1);
  CHECK(pair.flagged[0] == 4);

  auto shorter = g;
  shorter.method = Method::ExtBT;
  shorter.bound.erase(shorter.order());
  shorter.reduced.erase(shorter.order());
  shorter.measured_error.erase(shorter.order());
  CHECK_THROWS_AS(compare_methods({&g, &shorter}), std::invalid_argument);

  std::ostringstream out;
  write_comparison_csv(pair, out);
  CHECK(out.str().rfind("r,method,bound,error\n", 0) == 0);
  std::istringstream in(out.str());
  const auto back = read_comparison_csv(in);
  REQUIRE(back.rows.size() == pair.rows.size());
  for (std::size_t i = 0; i < back.rows.size(); ++i) {
    CHECK(back.rows[i].r == pair.rows[i].r);
    REQUIRE(back.rows[i].entries.size() == pair.rows[i].entries.size());
    for (std::size_t k = 0; k < back.rows[i].entries.size(); ++k) {
      CHECK(back.rows[i].entries[k].method == pair.rows[i].entries[k].method);
      CHECK(back.rows[i].entries[k].bound == pair.rows[i].entries[k].bound);
      CHECK(back.rows[i].entries[k].error == pair.rows[i].entries[k].error);
    }
  }

  // Enns has no bound: the field is empty and reads back as missing.
  const auto ex1 = examples::gen_example1();
  const auto enns = enns_ct_baseline(ex1.plant_ct, ex1.w_out_ct);
  std::ostringstream eo;
  write_comparison_csv(compare_methods({&enns}), eo);
  std::istringstream ei(eo.str());
  const auto eb = read_comparison_csv(ei);
  CHECK_FALSE(eb.rows.at(1).entries.at(0).bound.has_value());
  CHECK(eb.rows.at(1).entries.at(0).error.has_value());
}
