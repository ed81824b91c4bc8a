#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "fwbt/statespace.hpp"

namespace fwbt::examples {

/// Counter-based generator: value k is splitmix64(seed + (k + 1) * golden).
/// Draw k depends only on (seed, k), so streams are reproducible.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

/// Continuous sources plus the discrete-time versions used by the DT algorithms.
struct ExampleSystem {
  std::string name;
  StateSpaceModel plant_ct = StateSpaceModel::static_gain(Matrix(0, 0), TimeDomain::continuous());
  std::optional<StateSpaceModel> w_in_ct;
  std::optional<StateSpaceModel> w_out_ct;
  std::optional<StateSpaceModel> plant_dt;
  std::optional<StateSpaceModel> w_in_dt;
  std::optional<StateSpaceModel> w_out_dt;
  double sample_time = 0.0;
};

/// omega^2 / (s^2 + 2 zeta omega s + omega^2) as [[0, 1], [-omega^2, -2 zeta omega]].
StateSpaceModel resonant_section(double omega, double zeta);
/// Parallel sum of resonant sections with zeta = 0.1.
StateSpaceModel resonant_sum(std::span<const double> omegas, double zeta);

/// s / (s/5 + 1)^2.
StateSpaceModel band_pass_weight();
/// 1 / (s + 10).
StateSpaceModel low_pass_weight();

/// 12-state resonant plant, output band-pass weight, continuous time only.
ExampleSystem gen_example1();
/// 16-state resonant plant, both weights, Tustin at 0.1 s.
ExampleSystem gen_example2();
/// Random 40-state upper-triangular plant with W_i = 1/(10 s + 1), FOH at 0.1 s.
/// Draw order: diagonal of A, strict upper triangle row by row, B, C.
ExampleSystem gen_example3(std::uint64_t seed);

/// First-order-hold discretization via the exponential of
/// [[A T, B T, 0], [0, 0, I T], [0, 0, 0]].
StateSpaceModel foh_c2d(const StateSpaceModel& model, double t);

}  // namespace fwbt::examples
