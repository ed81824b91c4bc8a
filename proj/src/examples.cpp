#include "fwbt/examples.hpp"

#include <array>
#include <unsupported/Eigen/MatrixFunctions>

namespace fwbt::examples {

std::uint64_t SplitMix64::next() {
  std::uint64_t z = seed_ + (++counter_) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

StateSpaceModel resonant_section(double omega, double zeta) {
  Matrix a(2, 2), b(2, 1), c(1, 2);
  a << 0.0, 1.0, -omega * omega, -2.0 * zeta * omega;
  b << 0.0, omega;
  c << omega, 0.0;
  return StateSpaceModel(a, b, c, Matrix::Zero(1, 1), TimeDomain::continuous());
}

StateSpaceModel resonant_sum(std::span<const double> omegas, double zeta) {
  const int n = 2 * static_cast<int>(omegas.size());
  Matrix a = Matrix::Zero(n, n), b(n, 1), c(1, n);
  for (std::size_t k = 0; k < omegas.size(); ++k) {
    const auto sec = resonant_section(omegas[k], zeta);
    const int o = 2 * static_cast<int>(k);
    a.block(o, o, 2, 2) = sec.a();
    b.middleRows(o, 2) = sec.b();
    c.middleCols(o, 2) = sec.c();
  }
  return StateSpaceModel(a, b, c, Matrix::Zero(1, 1), TimeDomain::continuous());
}

StateSpaceModel band_pass_weight() {
  Matrix a(2, 2), b(2, 1), c(1, 2);
  a << 0.0, 1.0, -25.0, -10.0;
  b << 0.0, 1.0;
  c << 0.0, 25.0;
  return StateSpaceModel(a, b, c, Matrix::Zero(1, 1), TimeDomain::continuous());
}

StateSpaceModel low_pass_weight() {
  return StateSpaceModel(Matrix::Constant(1, 1, -10.0), Matrix::Ones(1, 1), Matrix::Ones(1, 1), Matrix::Zero(1, 1),
                         TimeDomain::continuous());
}

ExampleSystem gen_example1() {
  constexpr std::array omegas{1.0, 2.0, 10.0, 20.0, 35.0, 50.0};
  ExampleSystem ex;
  ex.name = "example1";
  ex.plant_ct = resonant_sum(omegas, 0.1);
  ex.w_out_ct = band_pass_weight();
  return ex;
}

ExampleSystem gen_example2() {
  constexpr std::array omegas{1.0, 2.0, 3.0, 5.0, 10.0, 20.0, 50.0, 80.0};
  ExampleSystem ex;
  ex.name = "example2";
  ex.plant_ct = resonant_sum(omegas, 0.1);
  ex.w_in_ct = low_pass_weight();
  ex.w_out_ct = band_pass_weight();
  ex.sample_time = 0.1;
  ex.plant_dt = tustin_c2d(ex.plant_ct, ex.sample_time);
  ex.w_in_dt = tustin_c2d(*ex.w_in_ct, ex.sample_time);
  ex.w_out_dt = tustin_c2d(*ex.w_out_ct, ex.sample_time);
  return ex;
}

ExampleSystem gen_example3(std::uint64_t seed) {
  constexpr int n = 40;
  SplitMix64 rng(seed);
  Matrix a = Matrix::Zero(n, n), b(n, 1), c(1, n);
  for (int i = 0; i < n; ++i) a(i, i) = rng.uniform(-0.15, -0.1);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) a(i, j) = rng.uniform(0.0, 0.001);
  }
  for (int i = 0; i < n; ++i) b(i, 0) = rng.uniform();
  for (int j = 0; j < n; ++j) c(0, j) = rng.uniform();
  ExampleSystem ex;
  ex.name = "example3";
  ex.plant_ct = StateSpaceModel(a, b, c, Matrix::Zero(1, 1), TimeDomain::continuous());
  ex.w_in_ct = StateSpaceModel(Matrix::Constant(1, 1, -0.1), Matrix::Ones(1, 1), Matrix::Constant(1, 1, 0.1),
                               Matrix::Zero(1, 1), TimeDomain::continuous());
  ex.sample_time = 0.1;
  ex.plant_dt = foh_c2d(ex.plant_ct, ex.sample_time);
  ex.w_in_dt = foh_c2d(*ex.w_in_ct, ex.sample_time);
  return ex;
}

StateSpaceModel foh_c2d(const StateSpaceModel& model, double t) {
  if (!model.domain().is_continuous()) throw DomainError("foh_c2d expects a continuous-time model");
  if (!(t > 0.0)) throw DomainError("foh_c2d: sample time must be positive");
  const int n = model.order(), m = model.inputs();
  Matrix big = Matrix::Zero(n + 2 * m, n + 2 * m);
  big.topLeftCorner(n, n) = model.a() * t;
  big.block(0, n, n, m) = model.b() * t;
  big.block(n, n + m, m, m) = Matrix::Identity(m, m) * t;
  const Matrix e = big.exp();
  const Matrix phi = e.topLeftCorner(n, n);
  const Matrix gamma1 = e.block(0, n, n, m);
  const Matrix gamma2 = e.block(0, n + m, n, m) / t;
  Matrix b_d = gamma1 + (phi - Matrix::Identity(n, n)) * gamma2;
  Matrix d_d = model.d() + model.c() * gamma2;
  return StateSpaceModel(phi, std::move(b_d), model.c(), std::move(d_d), TimeDomain::discrete(t));
}

}  // namespace fwbt::examples
