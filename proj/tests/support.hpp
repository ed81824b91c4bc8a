#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Eigenvalues>

#include "fwbt/examples.hpp"
#include "fwbt/lmi.hpp"
#include "fwbt/statespace.hpp"

namespace fwbt::testing {

struct WeightedPlant {
  StateSpaceModel plant;
  std::optional<StateSpaceModel> w_in;
  std::optional<StateSpaceModel> w_out;
};

inline Matrix random_matrix(examples::SplitMix64& rng, int rows, int cols, double lo = -1.0, double hi = 1.0) {
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = rng.uniform(lo, hi);
  }
  return m;
}

// Random stable discrete model with spectral radius `rho`.
inline StateSpaceModel random_stable_dt(examples::SplitMix64& rng, int n, int m, int p, double rho = 0.8) {
  Matrix a = random_matrix(rng, n, n);
  const double r = spectral_radius(a);
  if (r > 0.0) a *= rho / r;
  return StateSpaceModel(a, random_matrix(rng, n, m), random_matrix(rng, p, n), random_matrix(rng, p, m),
                         TimeDomain::discrete(1.0));
}

/// Plant of order 2..12 with a one- or two-state weight on each side; SISO.
inline WeightedPlant random_weighted_dt(std::uint64_t seed) {
  examples::SplitMix64 rng(seed);
  const int n = 2 + static_cast<int>(rng.next() % 11);
  const int ni = 1 + static_cast<int>(rng.next() % 2);
  const int no = 1 + static_cast<int>(rng.next() % 2);
  WeightedPlant out{random_stable_dt(rng, n, 1, 1, 0.85), random_stable_dt(rng, ni, 1, 1, 0.6),
                    random_stable_dt(rng, no, 1, 1, 0.6)};
  return out;
}

inline AugmentedPlant discretize_augmented(const AugmentedPlant& aug_ct, double t) {
  std::optional<StateSpaceModel> wi, wo;
  if (aug_ct.input_weight) wi = tustin_c2d(*aug_ct.input_weight, t);
  if (aug_ct.output_weight) wo = tustin_c2d(*aug_ct.output_weight, t);
  return AugmentedPlant{tustin_c2d(aug_ct.model, t), aug_ct.dims, tustin_c2d(aug_ct.plant, t), wi, wo};
}

inline double lambda_min(const Matrix& m) {
  return Eigen::SelfAdjointEigenSolver<Matrix>(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly).eigenvalues()(0);
}

/// Smallest eigenvalue over every constraint of the raw F(x), margin ignored.
inline double min_raw_eigenvalue(const lmi::LmiProblem& problem, const lmi::Assignment& values) {
  double worst = INFINITY;
  for (const auto& c : problem.constraints()) worst = std::min(worst, lambda_min(problem.evaluate(c, values)));
  return worst;
}

/// Minimizes the traces of every free variable; keeps the problem bounded.
inline lmi::SolverReport solve_min_trace(lmi::GramianLmi& g) {
  lmi::add_trace_objective(g.problem, g.gramian);
  if (g.slack) lmi::add_trace_objective(g.problem, *g.slack);
  return lmi::solve(g.problem);
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace fwbt::testing
