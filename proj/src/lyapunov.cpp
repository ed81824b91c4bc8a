#include "fwbt/lyapunov.hpp"

#include <Eigen/Eigenvalues>

namespace fwbt {
namespace {

using Complex = std::complex<double>;

void check_square(const Matrix& a, const Matrix& q, const char* who) {
  if (a.rows() != a.cols() || q.rows() != a.rows() || q.cols() != a.rows()) {
    throw DimensionError(std::string(who) + ": A and Q must be square of equal size");
  }
}

Matrix back_transform(const ComplexMatrix& u, const ComplexMatrix& y) {
  const Matrix x = (u * y * u.adjoint()).real();
  return 0.5 * (x + x.transpose());
}

}  // namespace

Matrix solve_continuous_lyapunov(const Matrix& a, const Matrix& q) {
  check_square(a, q, "solve_continuous_lyapunov");
  const int n = static_cast<int>(a.rows());
  if (n == 0) return Matrix(0, 0);
  Eigen::ComplexSchur<ComplexMatrix> schur(a.cast<Complex>());
  const ComplexMatrix& t = schur.matrixT();
  const ComplexMatrix& u = schur.matrixU();
  const ComplexMatrix c = u.adjoint() * q.cast<Complex>() * u;
  // T Y + Y T^H = -C, last column first since T^H is lower triangular.
  ComplexMatrix y = ComplexMatrix::Zero(n, n);
  for (int j = n - 1; j >= 0; --j) {
    Eigen::VectorXcd rhs = -c.col(j);
    for (int k = j + 1; k < n; ++k) rhs -= std::conj(t(j, k)) * y.col(k);
    ComplexMatrix m = t;
    m.diagonal().array() += std::conj(t(j, j));
    for (int i = 0; i < n; ++i) {
      if (std::abs(m(i, i)) < 1e-300) throw SingularityError("solve_continuous_lyapunov: A is not Hurwitz");
    }
    y.col(j) = m.triangularView<Eigen::Upper>().solve(rhs);
  }
  return back_transform(u, y);
}

Matrix solve_discrete_lyapunov(const Matrix& a, const Matrix& q) {
  check_square(a, q, "solve_discrete_lyapunov");
  const int n = static_cast<int>(a.rows());
  if (n == 0) return Matrix(0, 0);
  Eigen::ComplexSchur<ComplexMatrix> schur(a.cast<Complex>());
  const ComplexMatrix& t = schur.matrixT();
  const ComplexMatrix& u = schur.matrixU();
  const ComplexMatrix c = u.adjoint() * q.cast<Complex>() * u;
  // T Y T^H - Y = -C.
  ComplexMatrix y = ComplexMatrix::Zero(n, n);
  for (int j = n - 1; j >= 0; --j) {
    Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(n);
    for (int k = j + 1; k < n; ++k) acc += std::conj(t(j, k)) * y.col(k);
    const Eigen::VectorXcd rhs = -c.col(j) - t * acc;
    ComplexMatrix m = std::conj(t(j, j)) * t;
    m.diagonal().array() -= 1.0;
    for (int i = 0; i < n; ++i) {
      if (std::abs(m(i, i)) < 1e-14) throw SingularityError("solve_discrete_lyapunov: A is not Schur stable");
    }
    y.col(j) = m.triangularView<Eigen::Upper>().solve(rhs);
  }
  return back_transform(u, y);
}

Matrix reachability_gramian(const StateSpaceModel& model) {
  const Matrix bb = model.b() * model.b().transpose();
  return model.domain().is_discrete() ? solve_discrete_lyapunov(model.a(), bb)
                                      : solve_continuous_lyapunov(model.a(), bb);
}

Matrix observability_gramian(const StateSpaceModel& model) {
  const Matrix cc = model.c().transpose() * model.c();
  const Matrix at = model.a().transpose();
  return model.domain().is_discrete() ? solve_discrete_lyapunov(at, cc) : solve_continuous_lyapunov(at, cc);
}

}  // namespace fwbt
