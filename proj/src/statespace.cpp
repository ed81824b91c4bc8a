#include "fwbt/statespace.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace fwbt {

namespace {

void require_same_domain(const StateSpaceModel& a, const StateSpaceModel& b, const char* what) {
  if (!(a.domain() == b.domain())) {
    throw DomainError(std::string(what) + ": mixed domains " + to_string(a.domain()) + " and " +
                      to_string(b.domain()));
  }
}

std::string shape(const Matrix& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

}  // namespace

TimeDomain TimeDomain::discrete(double sample_time) {
  if (!(sample_time > 0.0) || !std::isfinite(sample_time)) {
    throw DomainError("discrete-time sample period must be positive and finite");
  }
  return TimeDomain(sample_time);
}

std::string to_string(const TimeDomain& domain) {
  if (domain.is_continuous()) return "continuous";
  std::ostringstream os;
  os << "discrete(dt=" << domain.sample_time() << ")";
  return os.str();
}

StateSpaceModel::StateSpaceModel(Matrix a, Matrix b, Matrix c, Matrix d, TimeDomain domain)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)), domain_(domain) {
  const auto n = a_.rows();
  if (a_.cols() != n) throw DimensionError("A must be square, got " + shape(a_));
  if (b_.rows() != n) throw DimensionError("B must have " + std::to_string(n) + " rows, got " + shape(b_));
  if (c_.cols() != n) throw DimensionError("C must have " + std::to_string(n) + " columns, got " + shape(c_));
  if (d_.rows() != c_.rows() || d_.cols() != b_.cols()) {
    throw DimensionError("D must be " + std::to_string(c_.rows()) + "x" + std::to_string(b_.cols()) +
                         ", got " + shape(d_));
  }
}

StateSpaceModel StateSpaceModel::static_gain(const Matrix& d, TimeDomain domain) {
  return StateSpaceModel(Matrix(0, 0), Matrix(0, d.cols()), Matrix(d.rows(), 0), d, domain);
}

StateSpaceModel StateSpaceModel::identity(int channels, TimeDomain domain) {
  return static_gain(Matrix::Identity(channels, channels), domain);
}

AugmentedPlant augment_weighted(const StateSpaceModel& plant,
                                const std::optional<StateSpaceModel>& w_in,
                                const std::optional<StateSpaceModel>& w_out) {
  const StateSpaceModel wi = w_in.value_or(StateSpaceModel::identity(plant.inputs(), plant.domain()));
  const StateSpaceModel wo = w_out.value_or(StateSpaceModel::identity(plant.outputs(), plant.domain()));
  require_same_domain(plant, wi, "augment_weighted");
  require_same_domain(plant, wo, "augment_weighted");
  if (wi.outputs() != plant.inputs()) {
    throw DimensionError("input weight has " + std::to_string(wi.outputs()) + " outputs, plant has " +
                         std::to_string(plant.inputs()) + " inputs");
  }
  if (wo.inputs() != plant.outputs()) {
    throw DimensionError("output weight has " + std::to_string(wo.inputs()) + " inputs, plant has " +
                         std::to_string(plant.outputs()) + " outputs");
  }

  const int no = wo.order(), ni = wi.order(), n = plant.order();
  const int total = no + ni + n;
  const int m = wi.inputs(), p = wo.outputs();

  // The plant feedthrough couples the two weights directly.
  const Matrix& dg = plant.d();
  Matrix a = Matrix::Zero(total, total);
  a.block(0, 0, no, no) = wo.a();
  a.block(0, no, no, ni) = wo.b() * dg * wi.c();
  a.block(0, no + ni, no, n) = wo.b() * plant.c();
  a.block(no, no, ni, ni) = wi.a();
  a.block(no + ni, no, n, ni) = plant.b() * wi.c();
  a.block(no + ni, no + ni, n, n) = plant.a();

  Matrix b = Matrix::Zero(total, m);
  b.block(0, 0, no, m) = wo.b() * dg * wi.d();
  b.block(no, 0, ni, m) = wi.b();
  b.block(no + ni, 0, n, m) = plant.b() * wi.d();

  Matrix c = Matrix::Zero(p, total);
  c.block(0, 0, p, no) = wo.c();
  c.block(0, no, p, ni) = wo.d() * dg * wi.c();
  c.block(0, no + ni, p, n) = wo.d() * plant.c();

  Matrix d = wo.d() * plant.d() * wi.d();

  return AugmentedPlant{StateSpaceModel(std::move(a), std::move(b), std::move(c), std::move(d), plant.domain()),
                        BlockDims{no, ni, n}, plant, w_in, w_out};
}

double spectral_radius(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return Eigen::EigenSolver<Matrix>(a, false).eigenvalues().cwiseAbs().maxCoeff();
}

double spectral_abscissa(const Matrix& a) {
  if (a.size() == 0) return -std::numeric_limits<double>::infinity();
  return Eigen::EigenSolver<Matrix>(a, false).eigenvalues().real().maxCoeff();
}

bool is_stable(const StateSpaceModel& model, double margin) {
  if (model.order() == 0) return true;
  if (model.domain().is_discrete()) return spectral_radius(model.a()) < 1.0 - margin;
  return spectral_abscissa(model.a()) < -margin;
}

bool bilinear_singular(const Matrix& a, double kappa) {
  if (a.rows() == 0) return false;
  const double tol = 1e-12 * std::max(1.0, kappa * a.norm());
  for (const auto& lambda : Eigen::EigenSolver<Matrix>(a, false).eigenvalues()) {
    if (!(std::abs(1.0 - kappa * lambda) >= tol)) return true;
  }
  return false;
}

StateSpaceModel tustin_c2d(const StateSpaceModel& model, double t) {
  if (!model.domain().is_continuous()) throw DomainError("tustin_c2d expects a continuous-time model");
  if (!(t > 0.0)) throw DomainError("tustin_c2d: sample time must be positive");
  const double kappa = t / 2.0;
  const int n = model.order();
  const Matrix eye = Matrix::Identity(n, n);
  Eigen::PartialPivLU<Matrix> lu(eye - kappa * model.a());
  if (bilinear_singular(model.a(), kappa)) {
    throw SingularityError("tustin_c2d: I - (t/2) A is singular for t = " + std::to_string(t));
  }
  const Matrix c_inv = model.c() * lu.inverse();
  const Matrix inv_b = lu.solve(model.b());
  Matrix a_d = lu.solve(eye + kappa * model.a());
  Matrix b_d = inv_b * t;
  Matrix d_d = model.d() + kappa * model.c() * inv_b;
  return StateSpaceModel(std::move(a_d), std::move(b_d), c_inv, std::move(d_d), TimeDomain::discrete(t));
}

StateSpaceModel tustin_d2c(const StateSpaceModel& model, double t) {
  if (!model.domain().is_discrete()) throw DomainError("tustin_d2c expects a discrete-time model");
  if (!(t > 0.0)) throw DomainError("tustin_d2c: sample time must be positive");
  const double kappa = t / 2.0;
  const int n = model.order();
  const Matrix eye = Matrix::Identity(n, n);
  const Matrix a_plus = model.a() + eye;
  if (n > 0) {
    const auto eig = Eigen::EigenSolver<Matrix>(model.a(), false).eigenvalues();
    for (const auto& lambda : eig) {
      if (std::abs(lambda + 1.0) < 1e-12 * std::max(1.0, model.a().norm())) {
        throw SingularityError("tustin_d2c: bilinear pole at -1");
      }
    }
  }
  Eigen::PartialPivLU<Matrix> lu_plus(a_plus.transpose());
  // (A_d - I)(A_d + I)^-1 = ((A_d + I)^-T (A_d - I)^T)^T
  Matrix a_c = lu_plus.solve((model.a() - eye).transpose()).transpose() / kappa;
  const Matrix m = eye - kappa * a_c;
  Matrix b_c = m * model.b() / t;
  Matrix c_c = model.c() * m;
  Matrix d_c = model.d() - kappa * c_c * Eigen::PartialPivLU<Matrix>(m).solve(b_c);
  return StateSpaceModel(std::move(a_c), std::move(b_c), std::move(c_c), std::move(d_c),
                         TimeDomain::continuous());
}

StateSpaceModel series(const StateSpaceModel& first, const StateSpaceModel& second) {
  require_same_domain(first, second, "series");
  if (first.outputs() != second.inputs()) {
    throw DimensionError("series: " + std::to_string(first.outputs()) + " outputs feed " +
                         std::to_string(second.inputs()) + " inputs");
  }
  const int n1 = first.order(), n2 = second.order();
  Matrix a = Matrix::Zero(n1 + n2, n1 + n2);
  a.topLeftCorner(n1, n1) = first.a();
  a.bottomLeftCorner(n2, n1) = second.b() * first.c();
  a.bottomRightCorner(n2, n2) = second.a();
  Matrix b(n1 + n2, first.inputs());
  b.topRows(n1) = first.b();
  b.bottomRows(n2) = second.b() * first.d();
  Matrix c(second.outputs(), n1 + n2);
  c.leftCols(n1) = second.d() * first.c();
  c.rightCols(n2) = second.c();
  return StateSpaceModel(std::move(a), std::move(b), std::move(c), second.d() * first.d(), first.domain());
}

StateSpaceModel parallel_difference(const StateSpaceModel& lhs, const StateSpaceModel& rhs) {
  require_same_domain(lhs, rhs, "parallel_difference");
  if (lhs.inputs() != rhs.inputs() || lhs.outputs() != rhs.outputs()) {
    throw DimensionError("parallel_difference: I/O dimensions differ");
  }
  const int n1 = lhs.order(), n2 = rhs.order();
  Matrix a = Matrix::Zero(n1 + n2, n1 + n2);
  a.topLeftCorner(n1, n1) = lhs.a();
  a.bottomRightCorner(n2, n2) = rhs.a();
  Matrix b(n1 + n2, lhs.inputs());
  b.topRows(n1) = lhs.b();
  b.bottomRows(n2) = rhs.b();
  Matrix c(lhs.outputs(), n1 + n2);
  c.leftCols(n1) = lhs.c();
  c.rightCols(n2) = -rhs.c();
  return StateSpaceModel(std::move(a), std::move(b), std::move(c), lhs.d() - rhs.d(), lhs.domain());
}

StateSpaceModel error_system(const StateSpaceModel& plant, const StateSpaceModel& reduced,
                             const std::optional<StateSpaceModel>& w_in,
                             const std::optional<StateSpaceModel>& w_out) {
  StateSpaceModel sys = parallel_difference(plant, reduced);
  if (w_in) sys = series(*w_in, sys);
  if (w_out) sys = series(sys, *w_out);
  return sys;
}

namespace {

// Solves (sigma I - H) X = Y in place for upper Hessenberg H using
// Gaussian elimination with adjacent-row pivoting.
void solve_shifted_hessenberg(const Matrix& h, std::complex<double> sigma, ComplexMatrix& y, double scale) {
  const int n = static_cast<int>(h.rows());
  ComplexMatrix m = (-h).cast<std::complex<double>>();
  m.diagonal().array() += sigma;
  const double tiny = 1e-14 * (scale + std::abs(sigma));
  for (int k = 0; k + 1 < n; ++k) {
    if (std::abs(m(k + 1, k)) > std::abs(m(k, k))) {
      m.row(k).tail(n - k).swap(m.row(k + 1).tail(n - k));
      y.row(k).swap(y.row(k + 1));
    }
    if (std::abs(m(k, k)) <= tiny) throw SingularityError("frequency point coincides with an eigenvalue of A");
    const std::complex<double> l = m(k + 1, k) / m(k, k);
    if (l != 0.0) {
      m.row(k + 1).tail(n - k) -= l * m.row(k).tail(n - k);
      y.row(k + 1) -= l * y.row(k);
    }
  }
  for (int k = n - 1; k >= 0; --k) {
    if (std::abs(m(k, k)) <= tiny) throw SingularityError("frequency point coincides with an eigenvalue of A");
    if (k + 1 < n) y.row(k) -= m.row(k).tail(n - k - 1) * y.bottomRows(n - k - 1);
    y.row(k) /= m(k, k);
  }
}

}  // namespace

FrequencyEvaluator::FrequencyEvaluator(const StateSpaceModel& model) : model_(model) {
  const int n = model.order();
  if (n == 0) return;
  Eigen::HessenbergDecomposition<Matrix> hess(model.a());
  hessenberg_ = hess.matrixH();
  const Matrix q = hess.matrixQ();
  qt_b_ = (q.transpose() * model.b()).cast<std::complex<double>>();
  c_q_ = (model.c() * q).cast<std::complex<double>>();
  scale_ = hessenberg_.lpNorm<Eigen::Infinity>();
}

std::complex<double> FrequencyEvaluator::point(double frequency) const {
  if (model_.domain().is_discrete()) return std::polar(1.0, frequency);
  return {0.0, frequency};
}

ComplexMatrix FrequencyEvaluator::at_point(std::complex<double> sigma) const {
  ComplexMatrix g = model_.d().cast<std::complex<double>>();
  if (model_.order() == 0) return g;
  ComplexMatrix x = qt_b_;
  solve_shifted_hessenberg(hessenberg_, sigma, x, scale_);
  g.noalias() += c_q_ * x;
  return g;
}

double FrequencyEvaluator::max_singular_value(double frequency) const {
  const ComplexMatrix g = at(frequency);
  if (g.size() == 0) return 0.0;
  if (g.size() == 1) return std::abs(g(0, 0));
  return Eigen::JacobiSVD<ComplexMatrix>(g).singularValues()(0);
}

ComplexMatrix evaluate_at(const StateSpaceModel& model, std::complex<double> sigma) {
  return FrequencyEvaluator(model).at_point(sigma);
}

std::vector<ComplexMatrix> freq_response(const StateSpaceModel& model, std::span<const double> grid) {
  if (grid.empty()) throw std::invalid_argument("freq_response: empty frequency grid");
  FrequencyEvaluator eval(model);
  std::vector<ComplexMatrix> out;
  out.reserve(grid.size());
  for (double w : grid) out.push_back(eval.at(w));
  return out;
}

}  // namespace fwbt
