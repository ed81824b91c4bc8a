#pragma once

#include "fwbt/statespace.hpp"

namespace fwbt {

/// X with A X + X A^T + Q = 0 (A Hurwitz). Bartels-Stewart on the complex Schur form.
Matrix solve_continuous_lyapunov(const Matrix& a, const Matrix& q);

/// X with A X A^T - X + Q = 0 (A Schur stable).
Matrix solve_discrete_lyapunov(const Matrix& a, const Matrix& q);

/// Reachability and observability gramians of a stable model.
Matrix reachability_gramian(const StateSpaceModel& model);
Matrix observability_gramian(const StateSpaceModel& model);

}  // namespace fwbt
