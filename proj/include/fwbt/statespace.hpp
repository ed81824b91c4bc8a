#pragma once

#include <complex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fwbt {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a matrix that has to be inverted is (numerically) singular,
/// e.g. a bilinear pole at -1 or a frequency sitting on an eigenvalue.
class SingularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Continuous time, or discrete time with a positive sample period.
class TimeDomain {
 public:
  static TimeDomain continuous() { return TimeDomain(0.0); }
  static TimeDomain discrete(double sample_time);

  bool is_discrete() const { return sample_time_ > 0.0; }
  bool is_continuous() const { return !is_discrete(); }
  /// Zero for continuous-time models.
  double sample_time() const { return sample_time_; }

  friend bool operator==(const TimeDomain&, const TimeDomain&) = default;

 private:
  explicit TimeDomain(double ts) : sample_time_(ts) {}
  double sample_time_;
};

std::string to_string(const TimeDomain& domain);

/// Dense real realization (A, B, C, D).
class StateSpaceModel {
 public:
  StateSpaceModel(Matrix a, Matrix b, Matrix c, Matrix d, TimeDomain domain);

  /// Memoryless gain D with zero states.
  static StateSpaceModel static_gain(const Matrix& d, TimeDomain domain);
  static StateSpaceModel identity(int channels, TimeDomain domain);

  const Matrix& a() const { return a_; }
  const Matrix& b() const { return b_; }
  const Matrix& c() const { return c_; }
  const Matrix& d() const { return d_; }
  const TimeDomain& domain() const { return domain_; }

  int order() const { return static_cast<int>(a_.rows()); }
  int inputs() const { return static_cast<int>(b_.cols()); }
  int outputs() const { return static_cast<int>(c_.rows()); }

 private:
  Matrix a_, b_, c_, d_;
  TimeDomain domain_;
};

/// Order of each block of the weighted realization: output-weight states
/// first, then input-weight states, then plant states.
struct BlockDims {
  int output_weight = 0;
  int input_weight = 0;
  int plant = 0;

  int weights() const { return output_weight + input_weight; }
  int total() const { return weights() + plant; }
};

/// Realization of W_o * G * W_i with the block layout
///   A~ = [[A_o, 0, B_o C], [0, A_i, 0], [0, B C_i, A]]
///   B~ = [0; B_i; B D_i],  C~ = [C_o, 0, D_o C],  D~ = D_o D D_i.
struct AugmentedPlant {
  StateSpaceModel model;
  BlockDims dims;
  StateSpaceModel plant;
  std::optional<StateSpaceModel> input_weight;
  std::optional<StateSpaceModel> output_weight;
};

/// Absent weights behave as zero-state identities.
AugmentedPlant augment_weighted(const StateSpaceModel& plant,
                                const std::optional<StateSpaceModel>& w_in,
                                const std::optional<StateSpaceModel>& w_out);

double spectral_radius(const Matrix& a);
double spectral_abscissa(const Matrix& a);

/// rho(A) < 1 - margin (discrete) or max Re(lambda) < -margin (continuous).
bool is_stable(const StateSpaceModel& model, double margin = 0.0);

/// True when I - kappa A has an eigenvalue within 1e-12 * max(1, kappa ||A||) of zero.
bool bilinear_singular(const Matrix& a, double kappa);

/// Bilinear map with kappa = t/2; all of the t scaling lands on B.
StateSpaceModel tustin_c2d(const StateSpaceModel& model, double t);
StateSpaceModel tustin_d2c(const StateSpaceModel& model, double t);

/// Series connection: the output of `first` drives `second`.
StateSpaceModel series(const StateSpaceModel& first, const StateSpaceModel& second);
/// Realization of lhs - rhs.
StateSpaceModel parallel_difference(const StateSpaceModel& lhs, const StateSpaceModel& rhs);

/// Realization of W_o (G - G_r) W_i; state dimension n + r + n_i + n_o.
StateSpaceModel error_system(const StateSpaceModel& plant, const StateSpaceModel& reduced,
                             const std::optional<StateSpaceModel>& w_in,
                             const std::optional<StateSpaceModel>& w_out);

/// Transfer matrix evaluated at a complex point sigma (s or z).
ComplexMatrix evaluate_at(const StateSpaceModel& model, std::complex<double> sigma);

/// Frequency grid entries are omega (rad/s) for continuous models and the
/// angle theta (z = e^{j theta}) for discrete ones.
std::vector<ComplexMatrix> freq_response(const StateSpaceModel& model,
                                         std::span<const double> grid);

/// Reusable frequency-response evaluator. A is reduced to upper Hessenberg
/// form once, after which each point costs O(n^2) per input column.
class FrequencyEvaluator {
 public:
  explicit FrequencyEvaluator(const StateSpaceModel& model);

  ComplexMatrix at_point(std::complex<double> sigma) const;
  /// Frequency variable for a grid value (j omega or e^{j theta}).
  std::complex<double> point(double frequency) const;
  ComplexMatrix at(double frequency) const { return at_point(point(frequency)); }
  double max_singular_value(double frequency) const;

  const StateSpaceModel& model() const { return model_; }

 private:
  StateSpaceModel model_;
  Matrix hessenberg_;
  ComplexMatrix qt_b_;
  ComplexMatrix c_q_;
  double scale_ = 1.0;
};

}  // namespace fwbt
