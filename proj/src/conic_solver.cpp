#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <ostream>

#include "fwbt/lmi.hpp"

namespace fwbt::lmi {
namespace {

using Blocks = std::vector<Matrix>;

constexpr double kSqrt2 = 1.4142135623730951;

int svec_size(int d) { return d * (d + 1) / 2; }

// Orthonormal svec basis, column-wise over the upper triangle.
Vector svec(const Matrix& m) {
  const int d = static_cast<int>(m.rows());
  Vector out(svec_size(d));
  int l = 0;
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < j; ++i) out(l++) = kSqrt2 * 0.5 * (m(i, j) + m(j, i));
    out(l++) = m(j, j);
  }
  return out;
}

Matrix smat(const Eigen::Ref<const Vector>& x, int d) {
  Matrix m(d, d);
  int l = 0;
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < j; ++i) m(i, j) = m(j, i) = x(l++) / kSqrt2;
    m(j, j) = x(l++);
  }
  return m;
}

double dot(const Blocks& a, const Blocks& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i].array() * b[i].array()).sum();
  return s;
}

double norm(const Blocks& a) { return std::sqrt(dot(a, a)); }

struct FreeVar {
  int var = 0;
  int dim = 0;
  int offset = 0;
};

struct TermRef {
  int slot = 0;  // index into the free-variable layout
  const Matrix* u = nullptr;
  const Matrix* v = nullptr;
};

struct Block {
  int size = 0;
  std::vector<TermRef> terms;
};

// Scaling W with R^T Z R = Lambda = R^{-1} S R^{-T}.
struct Scaling {
  Matrix r;
  Matrix rinv;
  Vector lambda;
  Matrix t;     // R R^T
  Matrix tinv;  // R^{-T} R^{-1}
};

class Solver {
 public:
  Solver(const LmiProblem& problem, const SolverOptions& options) : problem_(problem), options_(options) {
    std::map<int, int> slot_of;
    for (std::size_t i = 0; i < problem.variables().size(); ++i) {
      if (problem.is_fixed(VarId{static_cast<int>(i)})) continue;
      slot_of[static_cast<int>(i)] = static_cast<int>(layout_.size());
      layout_.push_back(FreeVar{static_cast<int>(i), problem.variables()[i].dim, m_});
      m_ += svec_size(problem.variables()[i].dim);
    }
    c_ = Vector::Zero(m_);
    for (const auto& [var, weight] : problem.objective_terms()) {
      if (problem.is_fixed(var)) continue;
      const auto& fv = layout_[slot_of.at(var.index)];
      c_.segment(fv.offset, svec_size(fv.dim)) += svec(weight);
    }
    for (const auto& lmi : problem.constraints()) {
      if (lmi.size() == 0) continue;
      Block blk;
      blk.size = lmi.size();
      Matrix h = lmi.constant;
      for (const auto& t : lmi.terms) {
        if (auto it = problem.fixed().find(t.var.index); it != problem.fixed().end()) {
          const Matrix ux = t.u * it->second;
          h.noalias() += ux * t.v.transpose();
          h.noalias() += t.v * ux.transpose();
        } else {
          blk.terms.push_back(TermRef{slot_of.at(t.var.index), &t.u, &t.v});
        }
      }
      if (lmi.strict) h.diagonal().array() -= problem.margin();
      h_.push_back(std::move(h));
      blocks_.push_back(std::move(blk));
      nu_ += lmi.size();
    }
  }

  SolverReport run() const;

 private:
  // F(x): the linear part of every constraint.
  Blocks apply(const Vector& x) const {
    Blocks out(blocks_.size());
    std::vector<Matrix> xs(layout_.size());
    for (std::size_t i = 0; i < layout_.size(); ++i) {
      xs[i] = smat(x.segment(layout_[i].offset, svec_size(layout_[i].dim)), layout_[i].dim);
    }
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      Matrix f = Matrix::Zero(blocks_[b].size, blocks_[b].size);
      for (const auto& t : blocks_[b].terms) {
        const Matrix ux = *t.u * xs[t.slot];
        f.noalias() += ux * t.v->transpose();
      }
      out[b] = f + f.transpose();
    }
    return out;
  }

  // F^*(Y).
  Vector adjoint(const Blocks& y) const {
    std::vector<Matrix> grads(layout_.size());
    for (std::size_t i = 0; i < layout_.size(); ++i) grads[i] = Matrix::Zero(layout_[i].dim, layout_[i].dim);
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      for (const auto& t : blocks_[b].terms) {
        const Matrix k = t.u->transpose() * (y[b] * *t.v);
        grads[t.slot] += k + k.transpose();
      }
    }
    Vector out(m_);
    for (std::size_t i = 0; i < layout_.size(); ++i) {
      out.segment(layout_[i].offset, svec_size(layout_[i].dim)) = svec(grads[i]);
    }
    return out;
  }

  Matrix schur_complement(const std::vector<Scaling>& w) const;

  const LmiProblem& problem_;
  SolverOptions options_;
  std::vector<FreeVar> layout_;
  std::vector<Block> blocks_;
  Blocks h_;
  Vector c_;
  int m_ = 0;
  int nu_ = 0;
};

// H = F^* (T^{-1} F(.) T^{-1}), upper triangle only. Each term pair
// contributes 2 [tr(E_k A1 E_l B1) + tr(E_k A2 E_l B2)].
Matrix Solver::schur_complement(const std::vector<Scaling>& w) const {
  Matrix h = Matrix::Zero(m_, m_);
  using Pair = std::pair<Matrix, Matrix>;
  std::map<std::pair<int, int>, std::vector<Pair>> pairs;
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const auto& terms = blocks_[b].terms;
    std::vector<Matrix> tu(terms.size()), tv(terms.size());
    for (std::size_t i = 0; i < terms.size(); ++i) {
      tu[i] = w[b].tinv * *terms[i].u;
      tv[i] = w[b].tinv * *terms[i].v;
    }
    for (std::size_t i = 0; i < terms.size(); ++i) {
      for (std::size_t j = 0; j < terms.size(); ++j) {
        const int si = terms[i].slot, sj = terms[j].slot;
        if (si > sj) continue;
        auto& list = pairs[{si, sj}];
        list.emplace_back(terms[i].v->transpose() * tu[j], terms[j].v->transpose() * tu[i]);
        list.emplace_back(terms[i].v->transpose() * tv[j], terms[j].u->transpose() * tu[i]);
      }
    }
  }
  const double inv_sqrt2 = 1.0 / kSqrt2;
  for (const auto& [key, list] : pairs) {
    const auto& rows = layout_[key.first];
    const auto& cols = layout_[key.second];
    const int dr = rows.dim, dc = cols.dim;
    Matrix mt(dr, dr);
    int l = 0;
    for (int e = 0; e < dc; ++e) {
      for (int c = 0; c <= e; ++c, ++l) {
        mt.setZero();
        for (const auto& [a_mat, b_mat] : list) {
          mt.noalias() += a_mat.col(c) * b_mat.row(e);
          mt.noalias() += a_mat.col(e) * b_mat.row(c);
        }
        const double alpha_l = c == e ? 0.5 : inv_sqrt2;
        auto col = h.col(cols.offset + l);
        int k = 0;
        for (int bb = 0; bb < dr; ++bb) {
          for (int a = 0; a < bb; ++a, ++k) col(rows.offset + k) += 2.0 * inv_sqrt2 * alpha_l * (mt(bb, a) + mt(a, bb));
          col(rows.offset + k) += 2.0 * 0.5 * alpha_l * 2.0 * mt(bb, bb);
          ++k;
        }
      }
    }
  }
  return h;
}

std::optional<Scaling> nt_scaling(const Matrix& s, const Matrix& z) {
  Eigen::LLT<Matrix> ls(s), lz(z);
  if (ls.info() != Eigen::Success || lz.info() != Eigen::Success) return std::nullopt;
  const Matrix lsm = ls.matrixL();
  const Matrix lzm = lz.matrixL();
  Eigen::JacobiSVD<Matrix> svd(lzm.transpose() * lsm, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector lambda = svd.singularValues();
  if (lambda.minCoeff() <= 0.0 || !lambda.allFinite()) return std::nullopt;
  const Vector isq = lambda.cwiseSqrt().cwiseInverse();
  Scaling w;
  w.lambda = lambda;
  w.r = lsm * svd.matrixV() * isq.asDiagonal();
  w.rinv = isq.asDiagonal() * svd.matrixU().transpose() * lzm.transpose();
  w.t = w.r * w.r.transpose();
  w.tinv = w.rinv.transpose() * w.rinv;
  return w;
}

// Scaling after the step, computed in the scaled space so tiny eigenvalues of S
// and Z keep their relative accuracy.
std::optional<Scaling> update_scaling(const Scaling& w, const Matrix& ds_scaled, const Matrix& dz_scaled, double alpha) {
  Matrix st = alpha * ds_scaled;
  Matrix zt = alpha * dz_scaled;
  st.diagonal() += w.lambda;
  zt.diagonal() += w.lambda;
  Eigen::LLT<Matrix> ls(0.5 * (st + st.transpose())), lz(0.5 * (zt + zt.transpose()));
  if (ls.info() != Eigen::Success || lz.info() != Eigen::Success) return std::nullopt;
  const Matrix lsm = ls.matrixL();
  const Matrix lzm = lz.matrixL();
  Eigen::JacobiSVD<Matrix> svd(lzm.transpose() * lsm, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector lambda = svd.singularValues();
  if (lambda.minCoeff() <= 0.0 || !lambda.allFinite()) return std::nullopt;
  const Vector isq = lambda.cwiseSqrt().cwiseInverse();
  Scaling out;
  out.lambda = lambda;
  out.r = w.r * lsm * svd.matrixV() * isq.asDiagonal();
  out.rinv = isq.asDiagonal() * svd.matrixU().transpose() * lzm.transpose() * w.rinv;
  out.t = out.r * out.r.transpose();
  out.tinv = out.rinv.transpose() * out.rinv;
  return out;
}

// Largest alpha with lambda + alpha * d_scaled >= 0 (infinity if unbounded).
double max_step(const Vector& lambda, const Matrix& d_scaled) {
  const Vector isq = lambda.cwiseSqrt().cwiseInverse();
  const Matrix m = isq.asDiagonal() * d_scaled * isq.asDiagonal();
  const double lo = Eigen::SelfAdjointEigenSolver<Matrix>(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly)
                        .eigenvalues()(0);
  return lo < 0.0 ? -1.0 / lo : std::numeric_limits<double>::infinity();
}

double step_scalar(double v, double dv) {
  return dv < 0.0 ? -v / dv : std::numeric_limits<double>::infinity();
}

// Solution of Lambda o X = K for diagonal Lambda (o: symmetrized product).
Matrix lambda_divide(const Vector& lambda, const Matrix& k) {
  Matrix x(k.rows(), k.cols());
  for (int j = 0; j < k.cols(); ++j) {
    for (int i = 0; i < k.rows(); ++i) x(i, j) = 2.0 * k(i, j) / (lambda(i) + lambda(j));
  }
  return x;
}

SolverReport Solver::run() const {
  const auto start = std::chrono::steady_clock::now();
  SolverReport report;
  const auto finish = [&](SolverReport& r) {
    r.solve_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
  };

  const std::size_t nb = blocks_.size();
  if (m_ == 0) {
    // Nothing to optimize: just check the fixed point.
    Assignment empty;
    report.min_constraint_slack = problem_.min_constraint_slack(empty);
    report.objective_value = problem_.objective_value(empty);
    report.status = report.min_constraint_slack >= -options_.feasibility_tol ? SolverStatus::Feasible
                                                                             : SolverStatus::Infeasible;
    return finish(report);
  }

  const double h_norm = std::max(1.0, norm(h_));
  const double c_norm = c_.norm() > 0.0 ? c_.norm() : 1.0;

  Vector x = Vector::Zero(m_);
  Blocks s(nb), z(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    s[b] = Matrix::Identity(blocks_[b].size, blocks_[b].size);
    z[b] = s[b];
  }
  double tau = 1.0, kappa = 1.0;
  std::vector<Scaling> w(nb);
  for (std::size_t b = 0; b < nb; ++b) w[b] = *nt_scaling(s[b], z[b]);

  // Least-squares start: x minimizes ||F x + h||, z is the least-norm dual
  // solution; both shifted into the cone interior.
  {
    Eigen::LLT<Matrix, Eigen::Upper> chol0(schur_complement(w));
    if (chol0.info() == Eigen::Success) {
      x = -chol0.solve(adjoint(h_));
      const Blocks fx0 = apply(x);
      const Blocks fy0 = apply(chol0.solve(c_));
      const auto shift = [](Matrix& m) {
        const double top = Eigen::SelfAdjointEigenSolver<Matrix>(m, Eigen::EigenvaluesOnly).eigenvalues()(0);
        const double step = -top;
        if (step >= -1e-8 * std::max(m.norm(), 1.0)) m.diagonal().array() += 1.0 + step;
      };
      bool ok = true;
      for (std::size_t b = 0; b < nb && ok; ++b) {
        s[b] = h_[b] + fx0[b];
        s[b] = 0.5 * (s[b] + s[b].transpose()).eval();
        z[b] = 0.5 * (fy0[b] + fy0[b].transpose());
        shift(s[b]);
        shift(z[b]);
        auto sc = nt_scaling(s[b], z[b]);
        if (!sc) ok = false;
        else w[b] = std::move(*sc);
      }
      if (!ok) {
        x.setZero();
        for (std::size_t b = 0; b < nb; ++b) {
          s[b] = Matrix::Identity(blocks_[b].size, blocks_[b].size);
          z[b] = s[b];
          w[b] = *nt_scaling(s[b], z[b]);
        }
      }
    }
  }

  struct Snapshot {
    Vector x;
    double tau = 1.0;
    double score = std::numeric_limits<double>::infinity();
    double pres = 0.0, dres = 0.0, gap = 0.0;
  } best;

  std::string failure;
  int best_it = 0;
  int tiny_steps = 0;
  constexpr int kStall = 10;
  for (int it = 0; it <= options_.max_iterations; ++it) {
    const Blocks fx = apply(x);
    Blocks rz(nb);
    for (std::size_t b = 0; b < nb; ++b) rz[b] = -fx[b] + s[b] - tau * h_[b];
    const Vector rx = -adjoint(z) + tau * c_;
    const double cx = c_.dot(x);
    const double hz = dot(h_, z);
    const double rt = kappa + cx + hz;
    const double sz = dot(s, z);
    const double mu = (sz + tau * kappa) / (nu_ + 1);

    const double pres = norm(rz) / tau / h_norm;
    const double dres = rx.norm() / tau / c_norm;
    const double pcost = cx / tau;
    const double dcost = -hz / tau;
    const double gap = sz / (tau * tau);
    // Scale-free; falls back to the absolute gap when both costs vanish.
    const double cost_scale = std::max(std::abs(pcost), std::abs(dcost));
    const double relgap = cost_scale > 0.0 ? gap / cost_scale : gap;
    report.iterations = it;

    if (options_.verbose) {
      std::cerr << std::scientific << std::setprecision(3) << "ipm " << std::setw(3) << it << " pcost " << pcost
                << " dcost " << dcost << " pres " << pres << " dres " << dres << " gap " << relgap << " tau " << tau
                << " kappa " << kappa << "\n";
    }
    const double score = std::max({pres, dres, relgap});
    if (score < best.score) {
      best = Snapshot{x, tau, score, pres, dres, relgap};
      best_it = it;
    }

    if (pres <= options_.feasibility_tol && dres <= options_.feasibility_tol && relgap <= options_.gap_tol) {
      report.status = problem_.objective_kind() == ObjectiveKind::None ? SolverStatus::Feasible
                                                                       : SolverStatus::Optimal;
      report.message = "converged";
      break;
    }
    if (hz < 0.0) {
      const double pinf = adjoint(z).norm() / c_norm / (-hz);
      if (pinf <= options_.feasibility_tol) {
        report.status = SolverStatus::Infeasible;
        report.message = "primal infeasibility certificate found";
        report.primal_residual = pres;
        report.dual_residual = dres;
        report.relative_gap = relgap;
        return finish(report);
      }
    }
    if (cx < 0.0) {
      double dinf = 0.0;
      for (std::size_t b = 0; b < nb; ++b) dinf += (s[b] - fx[b]).squaredNorm();
      if (std::sqrt(dinf) / h_norm / (-cx) <= options_.feasibility_tol) {
        report.status = SolverStatus::NumericalFailure;
        report.message = "problem appears unbounded (dual infeasible)";
        return finish(report);
      }
    }
    if (it == options_.max_iterations) {
      failure = "iteration limit reached";
      break;
    }
    if (tiny_steps >= 5 || (best.score < 1e-4 && it - best_it >= kStall)) {
      failure = "stalled";
      break;
    }

    Matrix hmat = schur_complement(w);
    Eigen::LLT<Matrix, Eigen::Upper> chol(hmat);
    if (chol.info() != Eigen::Success) {
      const double reg = 1e-13 * std::max(1.0, hmat.diagonal().maxCoeff());
      hmat.diagonal().array() += reg;
      chol.compute(hmat);
      if (chol.info() != Eigen::Success) {
        failure = "Schur complement factorization failed";
        break;
      }
    }

    // (dx, dz) with G^T dz = bx, G dx - T dz T = bz, G = -F.
    const auto inner = [&](const Vector& bx, const Blocks& bz, Vector& dx, Blocks& dz) {
      Blocks tb(nb);
      for (std::size_t b = 0; b < nb; ++b) tb[b] = w[b].tinv * bz[b] * w[b].tinv;
      dx = chol.solve(bx - adjoint(tb));
      const Blocks fdx = apply(dx);
      dz.resize(nb);
      for (std::size_t b = 0; b < nb; ++b) {
        dz[b] = w[b].tinv * (-fdx[b] - bz[b]) * w[b].tinv;
        dz[b] = 0.5 * (dz[b] + dz[b].transpose()).eval();
      }
      // Refine on the dual equation itself; the reduced right-hand side cancels badly near the optimum.
      const double scale = std::max(bx.norm(), 1e-300);
      double last = std::numeric_limits<double>::infinity();
      for (int pass = 0; pass < 8; ++pass) {
        const Vector res = bx + adjoint(dz);
        const double rn = res.norm();
        if (rn <= 1e-15 * scale || rn > 0.5 * last) break;
        last = rn;
        const Vector ddx = chol.solve(res);
        const Blocks fd = apply(ddx);
        dx += ddx;
        for (std::size_t b = 0; b < nb; ++b) {
          dz[b] -= w[b].tinv * fd[b] * w[b].tinv;
          dz[b] = 0.5 * (dz[b] + dz[b].transpose()).eval();
        }
      }
    };

    Vector xb;
    Blocks zb;
    {
      Vector minus_c = -c_;
      inner(minus_c, h_, xb, zb);
    }
    const double denom_b = c_.dot(xb) + dot(h_, zb) - kappa / tau;

    struct Direction {
      Vector dx;
      Blocks ds, dz, ds_scaled, dz_scaled;
      double dtau = 0.0, dkappa = 0.0;
    };

    const auto direction = [&](double sigma, const Blocks* corr, double corr_scalar) {
      Direction d;
      const double f = 1.0 - sigma;
      const Vector r1 = -f * rx;
      Blocks r4(nb), r2(nb);
      for (std::size_t b = 0; b < nb; ++b) {
        const int n = blocks_[b].size;
        Matrix k = sigma * mu * Matrix::Identity(n, n);
        k.diagonal() -= w[b].lambda.cwiseAbs2();
        if (corr) k -= (*corr)[b];
        r4[b] = lambda_divide(w[b].lambda, k);
        r2[b] = -f * rz[b] - w[b].r * r4[b] * w[b].r.transpose();
      }
      const double r3 = -f * rt;
      const double r5 = sigma * mu - tau * kappa - corr_scalar;
      Vector xa;
      Blocks za;
      inner(r1, r2, xa, za);
      d.dtau = (r3 - r5 / tau - c_.dot(xa) - dot(h_, za)) / denom_b;
      d.dx = xa + d.dtau * xb;
      d.dz.resize(nb);
      d.ds.resize(nb);
      d.ds_scaled.resize(nb);
      d.dz_scaled.resize(nb);
      // ds from the primal equation keeps the residual contraction exact.
      const Blocks fdx = apply(d.dx);
      for (std::size_t b = 0; b < nb; ++b) {
        d.dz[b] = za[b] + d.dtau * zb[b];
        d.dz_scaled[b] = w[b].r.transpose() * d.dz[b] * w[b].r;
        d.ds[b] = -f * rz[b] + fdx[b] + d.dtau * h_[b];
        d.ds_scaled[b] = w[b].rinv * d.ds[b] * w[b].rinv.transpose();
      }
      d.dkappa = (r5 - kappa * d.dtau) / tau;
      return d;
    };

    const auto boundary_step = [&](const Direction& d) {
      double a = std::min(step_scalar(tau, d.dtau), step_scalar(kappa, d.dkappa));
      for (std::size_t b = 0; b < nb; ++b) {
        a = std::min(a, max_step(w[b].lambda, d.ds_scaled[b]));
        a = std::min(a, max_step(w[b].lambda, d.dz_scaled[b]));
      }
      return a;
    };

    const Direction aff = direction(0.0, nullptr, 0.0);
    const double alpha_aff = std::min(1.0, boundary_step(aff));
    const double sigma = std::pow(1.0 - alpha_aff, 3);

    Blocks corr(nb);
    for (std::size_t b = 0; b < nb; ++b) {
      const Matrix p = aff.ds_scaled[b] * aff.dz_scaled[b];
      corr[b] = 0.5 * (p + p.transpose());
    }
    const Direction d = direction(sigma, &corr, aff.dtau * aff.dkappa);
    double alpha = std::min(1.0, options_.step_fraction * boundary_step(d));
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
      failure = "step length collapsed";
      break;
    }

    std::vector<Scaling> next(nb);
    bool accepted = false;
    for (int cut = 0; cut < 40 && !accepted; ++cut) {
      if (cut > 0) alpha *= 0.8;
      accepted = tau + alpha * d.dtau > 0.0;
      for (std::size_t b = 0; b < nb && accepted; ++b) {
        auto sc = update_scaling(w[b], d.ds_scaled[b], d.dz_scaled[b], alpha);
        accepted = sc.has_value();
        if (accepted) next[b] = std::move(*sc);
      }
    }
    if (!accepted) {
      failure = "lost positive definiteness of the iterates";
      break;
    }
    tiny_steps = alpha < 1e-4 ? tiny_steps + 1 : 0;
    w = std::move(next);
    x += alpha * d.dx;
    // s comes back from the scaling so the certificate never leaves the cone;
    // z is summed directly, rebuilding it too costs dual accuracy.
    for (std::size_t b = 0; b < nb; ++b) {
      s[b] = w[b].r * w[b].lambda.asDiagonal() * w[b].r.transpose();
      z[b] += alpha * d.dz[b];
      s[b] = 0.5 * (s[b] + s[b].transpose()).eval();
      z[b] = 0.5 * (z[b] + z[b].transpose()).eval();
    }
    tau += alpha * d.dtau;
    kappa += alpha * d.dkappa;
  }

  Vector sol = x / tau;
  if (!failure.empty()) {
    sol = best.x / best.tau;
    report.primal_residual = best.pres;
    report.dual_residual = best.dres;
    report.relative_gap = best.gap;
    // Accept a slightly inaccurate answer rather than discard it.
    const double loose = 1e2 * std::max(options_.feasibility_tol, options_.gap_tol);
    if (best.score <= loose) {
      report.status = problem_.objective_kind() == ObjectiveKind::None ? SolverStatus::Feasible
                                                                       : SolverStatus::Optimal;
      report.message = failure + "; returning reduced-accuracy solution";
    } else {
      report.status = SolverStatus::NumericalFailure;
      report.message = failure;
    }
  } else {
    report.primal_residual = best.pres;
    report.dual_residual = best.dres;
    report.relative_gap = best.gap;
  }

  if (report.ok() || report.status == SolverStatus::NumericalFailure) {
    for (const auto& fv : layout_) {
      report.assignments[problem_.variables()[fv.var].name] =
          smat(sol.segment(fv.offset, svec_size(fv.dim)), fv.dim);
    }
    for (const auto& [index, value] : problem_.fixed()) report.assignments[problem_.variables()[index].name] = value;
    report.objective_value = problem_.objective_value(report.assignments);
    report.min_constraint_slack = problem_.min_constraint_slack(report.assignments);
  }
  return finish(report);
}

}  // namespace

SolverOptions SolverOptions::from_environment() {
  SolverOptions options;
  if (const char* env = std::getenv("FWEBT_SOLVER_TOL")) {
    char* end = nullptr;
    const double tol = std::strtod(env, &end);
    if (end != env && tol > 0.0 && std::isfinite(tol)) {
      options.feasibility_tol = tol;
      options.gap_tol = tol;
    }
  }
  if (const char* env = std::getenv("FWEBT_SOLVER_VERBOSE")) options.verbose = std::string(env) == "1";
  return options;
}

SolverReport InteriorPointBackend::solve(const LmiProblem& problem) const {
  return Solver(problem, options_).run();
}

const ConicBackend& default_backend() {
  static const InteriorPointBackend backend;
  return backend;
}

SolverReport solve(const LmiProblem& problem) {
  return default_backend().solve(problem);
}

void write_sdpa(const LmiProblem& problem, std::ostream& out) {
  // Elementwise basis: variable k sets entries (i, j) and (j, i) of one matrix.
  struct Entry {
    int var;
    int i;
    int j;
  };
  std::vector<Entry> basis;
  for (std::size_t v = 0; v < problem.variables().size(); ++v) {
    if (problem.is_fixed(VarId{static_cast<int>(v)})) continue;
    const int d = problem.variables()[v].dim;
    for (int j = 0; j < d; ++j) {
      for (int i = 0; i <= j; ++i) basis.push_back({static_cast<int>(v), i, j});
    }
  }
  std::vector<const LinearMatrixInequality*> lmis;
  for (const auto& lmi : problem.constraints()) {
    if (lmi.size() > 0) lmis.push_back(&lmi);
  }

  out << "\"fwbt LMI problem: " << basis.size() << " scalar variables\"\n";
  out << basis.size() << "\n" << lmis.size() << "\n";
  for (std::size_t b = 0; b < lmis.size(); ++b) out << (b ? " " : "") << lmis[b]->size();
  out << "\n";

  std::map<int, Matrix> weights;
  for (const auto& [var, weight] : problem.objective_terms()) {
    auto [it, inserted] = weights.try_emplace(var.index, weight);
    if (!inserted) it->second += weight;
  }
  out << std::setprecision(17);
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const auto& e = basis[k];
    double ck = 0.0;
    if (auto it = weights.find(e.var); it != weights.end()) {
      ck = e.i == e.j ? it->second(e.i, e.i) : it->second(e.i, e.j) + it->second(e.j, e.i);
    }
    out << (k ? " " : "") << ck;
  }
  out << "\n";

  const auto emit = [&](int k, std::size_t block, const Matrix& f) {
    for (int j = 0; j < f.cols(); ++j) {
      for (int i = 0; i <= j; ++i) {
        if (f(i, j) != 0.0) out << k << " " << block + 1 << " " << i + 1 << " " << j + 1 << " " << f(i, j) << "\n";
      }
    }
  };
  Assignment fixed_values;
  for (const auto& [index, value] : problem.fixed()) fixed_values[problem.variables()[index].name] = value;
  for (std::size_t b = 0; b < lmis.size(); ++b) {
    const auto& lmi = *lmis[b];
    Matrix f0 = lmi.constant;
    for (const auto& t : lmi.terms) {
      if (auto it = problem.fixed().find(t.var.index); it != problem.fixed().end()) {
        const Matrix ux = t.u * it->second;
        f0 += ux * t.v.transpose() + t.v * ux.transpose();
      }
    }
    if (lmi.strict) f0.diagonal().array() -= problem.margin();
    emit(0, b, -f0);
    for (std::size_t k = 0; k < basis.size(); ++k) {
      const auto& e = basis[k];
      Matrix f = Matrix::Zero(lmi.size(), lmi.size());
      bool touched = false;
      for (const auto& t : lmi.terms) {
        if (t.var.index != e.var) continue;
        touched = true;
        Matrix k1 = t.u.col(e.i) * t.v.col(e.j).transpose();
        if (e.i != e.j) k1 += t.u.col(e.j) * t.v.col(e.i).transpose();
        f += k1 + k1.transpose();
      }
      if (touched) emit(static_cast<int>(k) + 1, b, f);
    }
  }
}

}  // namespace fwbt::lmi
