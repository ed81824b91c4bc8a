#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fwbt/examples.hpp"
#include "fwbt/lyapunov.hpp"
#include "fwbt/statespace.hpp"
#include "support.hpp"

using namespace fwbt;
using fwbt::testing::random_matrix;

namespace {

Matrix m1(double x) { return Matrix::Constant(1, 1, x); }

StateSpaceModel scalar(double a, double b, double c, double d, TimeDomain td = TimeDomain::discrete(1.0)) {
  return StateSpaceModel(m1(a), m1(b), m1(c), m1(d), td);
}

double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

// Horner evaluation of the rational function p(s)/q(s) with q = det(sI - A).
std::complex<double> horner(const Vector& coeffs, std::complex<double> s) {
  std::complex<double> v = 0.0;
  for (Eigen::Index i = coeffs.size() - 1; i >= 0; --i) v = v * s + coeffs(i);
  return v;
}

}  // namespace

TEST_CASE("augment_weighted with scalar blocks") {
  const auto aug = augment_weighted(scalar(0.5, 1, 1, 0), scalar(0.2, 1, 0.5, 0.1), scalar(0.3, 1, 2, 1));
  Matrix a(3, 3), b(3, 1), c(1, 3);
  // W_o = (A, B, C, D) = (0.3, 1, 2, 1): B_o C = 1 and [C_o, 0, D_o C] = [2, 0, 1].
  a << 0.3, 0, 1, 0, 0.2, 0, 0, 0.5, 0.5;
  b << 0, 1, 0.1;
  c << 2, 0, 1;
  CHECK((aug.model.a() - a).norm() == doctest::Approx(0.0));
  CHECK((aug.model.b() - b).norm() == doctest::Approx(0.0));
  CHECK((aug.model.c() - c).norm() == doctest::Approx(0.0));
  CHECK(aug.model.d()(0, 0) == doctest::Approx(0.0));
  CHECK(aug.dims.output_weight == 1);
  CHECK(aug.dims.input_weight == 1);
  CHECK(aug.dims.plant == 1);
}

TEST_CASE("augment_weighted carries the plant feedthrough") {
  const auto aug = augment_weighted(scalar(0.5, 1, 1, 3), scalar(0.2, 1, 0.5, 0.1), scalar(0.3, 1, 2, 1));
  CHECK(aug.model.a()(0, 1) == doctest::Approx(1.5));
  CHECK(aug.model.b()(0, 0) == doctest::Approx(0.3));
  CHECK(aug.model.c()(0, 1) == doctest::Approx(1.5));
  CHECK(aug.model.d()(0, 0) == doctest::Approx(0.3));
}

TEST_CASE("augment_weighted without weights is the plant") {
  examples::SplitMix64 rng(3);
  const auto g = testing::random_stable_dt(rng, 4, 2, 3);
  const auto aug = augment_weighted(g, std::nullopt, std::nullopt);
  CHECK(aug.model.a() == g.a());
  CHECK(aug.model.b() == g.b());
  CHECK(aug.model.c() == g.c());
  CHECK(aug.dims.weights() == 0);
}

TEST_CASE("augmented frequency response is W_o G W_i") {
  examples::SplitMix64 rng(11);
  const auto g = testing::random_stable_dt(rng, 5, 2, 2);
  const auto wi = testing::random_stable_dt(rng, 2, 2, 2, 0.5);
  const auto wo = testing::random_stable_dt(rng, 3, 2, 2, 0.5);
  const auto aug = augment_weighted(g, wi, wo);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const double th = 0.05 + 3.0 * k / 19.0;
    const auto z = std::polar(1.0, th);
    const ComplexMatrix direct = evaluate_at(aug.model, z);
    const ComplexMatrix factors = evaluate_at(wo, z) * evaluate_at(g, z) * evaluate_at(wi, z);
    worst = std::max(worst, max_abs(direct - factors));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("augment_weighted rejects mismatched channels") {
  const auto g = scalar(0.5, 1, 1, 0);
  examples::SplitMix64 rng(1);
  const auto w2 = testing::random_stable_dt(rng, 1, 2, 2);
  CHECK_THROWS_AS(augment_weighted(g, w2, std::nullopt), DimensionError);
  CHECK_THROWS_AS(augment_weighted(g, scalar(0.5, 1, 1, 0, TimeDomain::continuous()), std::nullopt), DomainError);
}

TEST_CASE("is_stable") {
  CHECK(is_stable(scalar(0, 1, 1, 0)));
  CHECK_FALSE(is_stable(scalar(1, 1, 1, 0)));
  CHECK(is_stable(scalar(-1, 1, 1, 0, TimeDomain::continuous())));
  CHECK_FALSE(is_stable(scalar(0, 1, 1, 0, TimeDomain::continuous())));

  // Power iteration oracle; symmetric so the dominant eigenvalue is real.
  examples::SplitMix64 rng(5);
  Matrix a = random_matrix(rng, 10, 10);
  a = a + a.transpose().eval();
  Vector v = Vector::Ones(10);
  double lambda = 0.0;
  for (int i = 0; i < 2000; ++i) {
    Vector w = a * v;
    lambda = w.norm() / v.norm();
    v = w / w.norm();
  }
  a *= 0.9 / lambda;
  CHECK(spectral_radius(a) == doctest::Approx(0.9).epsilon(1e-8));
  CHECK(is_stable(StateSpaceModel(a, Matrix::Ones(10, 1), Matrix::Ones(1, 10), m1(0), TimeDomain::discrete(1.0))));
}

TEST_CASE("tustin_c2d scalar") {
  const auto d = tustin_c2d(scalar(-1, 1, 1, 0, TimeDomain::continuous()), 0.2);
  CHECK(d.a()(0, 0) == doctest::Approx(0.9 / 1.1).epsilon(1e-14));
  CHECK(d.b()(0, 0) == doctest::Approx(0.2 / 1.1).epsilon(1e-14));
  CHECK(d.c()(0, 0) == doctest::Approx(1.0 / 1.1).epsilon(1e-14));
  CHECK(d.d()(0, 0) == doctest::Approx(0.1 / 1.1).epsilon(1e-14));
  CHECK(d.domain().is_discrete());
  CHECK(d.domain().sample_time() == 0.2);
}

TEST_CASE("tustin_d2c scalar and round trips") {
  const auto c = tustin_d2c(scalar(9.0 / 11, 2.0 / 11, 10.0 / 11, 1.0 / 11, TimeDomain::discrete(0.2)), 0.2);
  CHECK(c.a()(0, 0) == doctest::Approx(-1.0).epsilon(1e-13));
  CHECK(c.b()(0, 0) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(c.c()(0, 0) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(std::abs(c.d()(0, 0)) < 1e-14);

  const auto ex1 = examples::gen_example1();
  const auto back = tustin_d2c(tustin_c2d(ex1.plant_ct, 0.2), 0.2);
  CHECK((back.a() - ex1.plant_ct.a()).cwiseAbs().maxCoeff() < 1e-12 * (1 + ex1.plant_ct.a().norm()));
  CHECK((back.b() - ex1.plant_ct.b()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((back.c() - ex1.plant_ct.c()).cwiseAbs().maxCoeff() < 1e-12);

  examples::SplitMix64 rng(9);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const auto g = testing::random_stable_dt(rng, 1 + i % 6, 1 + i % 2, 1 + i % 3);
    const auto rt = tustin_c2d(tustin_d2c(g, 0.5), 0.5);
    worst = std::max({worst, (rt.a() - g.a()).cwiseAbs().maxCoeff(), (rt.b() - g.b()).cwiseAbs().maxCoeff(),
                      (rt.c() - g.c()).cwiseAbs().maxCoeff(), (rt.d() - g.d()).cwiseAbs().maxCoeff()});
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("tustin_d2c rejects a pole at -1") {
  CHECK_THROWS_AS(tustin_d2c(scalar(-1, 1, 1, 0), 0.1), SingularityError);
  CHECK_THROWS_AS(tustin_c2d(scalar(-1, 1, 1, 0), 0.1), DomainError);
}

TEST_CASE("evaluate_at and freq_response") {
  const auto gc = scalar(-1, 1, 1, 0, TimeDomain::continuous());
  const double w0 = 0.0;
  CHECK(std::abs(freq_response(gc, std::span(&w0, 1))[0](0, 0) - 1.0) < 1e-15);
  const auto gd = scalar(0.5, 1, 1, 0);
  CHECK(std::abs(freq_response(gd, std::span(&w0, 1))[0](0, 0) - 2.0) < 1e-15);
}

TEST_CASE("frequency response matches the transfer polynomial") {
  // 4-state companion form: G(s) = (b0 + b1 s + b2 s^2 + b3 s^3) / (a0 + a1 s + a2 s^2 + a3 s^3 + s^4).
  Vector den(5), num(4);
  den << 24, 50, 35, 10, 1;  // (s+1)(s+2)(s+3)(s+4)
  num << 1, -2, 0.5, 3;
  Matrix a = Matrix::Zero(4, 4);
  a.topRightCorner(3, 3).setIdentity();
  for (int i = 0; i < 4; ++i) a(3, i) = -den(i);
  Matrix b = Matrix::Zero(4, 1);
  b(3, 0) = 1;
  Matrix c = num.transpose();
  const StateSpaceModel g(a, b, c, m1(0), TimeDomain::continuous());
  const FrequencyEvaluator fe(g);
  double worst = 0.0;
  for (double w : {0.0, 0.1, 0.7, 1.5, 4.0, 30.0, 200.0}) {
    const std::complex<double> s(0.0, w);
    const auto oracle = horner(num, s) / horner(den, s);
    worst = std::max({worst, std::abs(evaluate_at(g, s)(0, 0) - oracle), std::abs(fe.at(w)(0, 0) - oracle)});
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("error_system") {
  examples::SplitMix64 rng(21);
  const auto g = testing::random_stable_dt(rng, 5, 1, 1);
  const auto wi = testing::random_stable_dt(rng, 2, 1, 1, 0.5);
  const auto wo = testing::random_stable_dt(rng, 1, 1, 1, 0.5);
  const auto same = error_system(g, g, wi, wo);
  CHECK(same.order() == 5 + 5 + 2 + 1);
  for (int k = 0; k < 16; ++k) CHECK(max_abs(evaluate_at(same, std::polar(1.0, 0.2 * k))) < 1e-12);

  const auto gr = testing::random_stable_dt(rng, 2, 1, 1);
  const auto diff = error_system(g, gr, std::nullopt, std::nullopt);
  for (int k = 0; k < 16; ++k) {
    const auto z = std::polar(1.0, 0.2 * k);
    CHECK(max_abs(evaluate_at(diff, z) - (evaluate_at(g, z) - evaluate_at(gr, z))) < 1e-10);
  }

  const auto zero = StateSpaceModel::static_gain(m1(0), TimeDomain::discrete(1.0));
  const auto e = error_system(scalar(0.5, 1, 1, 0), zero, std::nullopt, std::nullopt);
  CHECK(std::abs(evaluate_at(e, 1.0)(0, 0)) == doctest::Approx(2.0));
}

TEST_CASE("Lyapunov solvers") {
  CHECK(solve_discrete_lyapunov(m1(0.5), m1(1))(0, 0) == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  CHECK(solve_continuous_lyapunov(m1(-1), m1(1))(0, 0) == doctest::Approx(0.5).epsilon(1e-14));

  examples::SplitMix64 rng(4);
  const auto g = testing::random_stable_dt(rng, 7, 2, 2);
  const Matrix p = reachability_gramian(g);
  CHECK((g.a() * p * g.a().transpose() - p + g.b() * g.b().transpose()).norm() < 1e-11 * (1 + p.norm()));

  Matrix ac = random_matrix(rng, 6, 6);
  ac -= (spectral_abscissa(ac) + 0.5) * Matrix::Identity(6, 6);
  const Matrix q = random_matrix(rng, 6, 6);
  const Matrix qs = q * q.transpose();
  const Matrix x = solve_continuous_lyapunov(ac, qs);
  CHECK((ac * x + x * ac.transpose() + qs).norm() < 1e-10 * (1 + x.norm()));
}

TEST_CASE("example generators") {
  const auto ex1 = examples::gen_example1();
  CHECK(ex1.plant_ct.order() == 12);
  CHECK(ex1.w_out_ct->order() == 2);
  CHECK_FALSE(ex1.w_in_ct.has_value());
  Eigen::EigenSolver<Matrix> es(ex1.plant_ct.a());
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const auto l = es.eigenvalues()(i);
    CHECK(-l.real() / std::abs(l) == doctest::Approx(0.1).epsilon(1e-12));
  }
  // Six sections with unit DC gain.
  CHECK(std::abs(evaluate_at(ex1.plant_ct, 0.0)(0, 0)) == doctest::Approx(6.0).epsilon(1e-12));

  const auto ex2 = examples::gen_example2();
  const auto aug2 = augment_weighted(*ex2.plant_dt, ex2.w_in_dt, ex2.w_out_dt);
  CHECK(aug2.dims.total() == 19);
  CHECK(is_stable(aug2.model));
  CHECK(ex2.sample_time == 0.1);
  CHECK(std::abs(evaluate_at(*ex2.w_in_ct, 0.0)(0, 0)) == doctest::Approx(0.1).epsilon(1e-14));

  const auto a = examples::gen_example3(7), b = examples::gen_example3(7), c = examples::gen_example3(8);
  CHECK(a.plant_ct.order() == 40);
  CHECK(a.plant_ct.inputs() == 1);
  CHECK(a.plant_ct.outputs() == 1);
  CHECK(a.plant_ct.a().triangularView<Eigen::StrictlyLower>().toDenseMatrix().norm() == 0.0);
  CHECK(a.plant_ct.a().diagonal().maxCoeff() < 0.0);
  CHECK(a.plant_ct.a() == b.plant_ct.a());
  CHECK(a.plant_dt->b() == b.plant_dt->b());
  CHECK(a.plant_ct.a() != c.plant_ct.a());
}

TEST_CASE("SplitMix64 stream is frozen") {
  examples::SplitMix64 rng(1);
  const std::uint64_t first = rng.next();
  examples::SplitMix64 again(1);
  CHECK(again.next() == first);
  examples::SplitMix64 u(42);
  for (int i = 0; i < 1000; ++i) {
    const double x = u.uniform();
    CHECK((x >= 0.0 && x < 1.0));
  }
}

TEST_CASE("FOH agrees with Tustin on a slow system") {
  const auto g = scalar(-0.1, 1, 1, 0, TimeDomain::continuous());
  const double t = 1e-3;
  const auto f = examples::foh_c2d(g, t);
  const auto z = tustin_c2d(g, t);
  for (double th : {1e-5, 1e-4, 1e-3}) {
    const auto zz = std::polar(1.0, th);
    CHECK(std::abs(evaluate_at(f, zz)(0, 0) - evaluate_at(z, zz)(0, 0)) < 1e-4 * std::abs(evaluate_at(z, zz)(0, 0)));
  }
  // DC gain is exact for FOH.
  CHECK(std::abs(evaluate_at(f, 1.0)(0, 0)) == doctest::Approx(10.0).epsilon(1e-10));
}
