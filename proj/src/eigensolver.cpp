#include "hypspec/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/SparseCholesky>

#include "hypspec/errors.hpp"

namespace hypspec::eig {

double residual(const SpMat& K, const SpMat& M, double lambda, const Eigen::VectorXd& u) {
  const Eigen::VectorXd mu = M * u;
  const double denom = mu.norm();
  if (denom == 0.0) return 0.0;
  return (K * u - lambda * mu).norm() / denom;
}

void normalize_signs(Eigen::MatrixXd& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    auto col = vectors.col(c);
    const double scale = col.cwiseAbs().maxCoeff();
    if (scale == 0.0) continue;
    double sign = 0.0;
    if (c == 0 && std::abs(col.sum()) > 1e-8 * col.cwiseAbs().sum()) {
      sign = col.sum() > 0 ? 1.0 : -1.0;
    } else {
      for (Eigen::Index i = 0; i < col.size(); ++i)
        if (std::abs(col[i]) > 1e-10 * scale) {
          sign = col[i] > 0 ? 1.0 : -1.0;
          break;
        }
    }
    if (sign < 0) col = -col;
  }
}

Pairs dense_smallest(const Eigen::MatrixXd& K, const Eigen::MatrixXd& M, int count) {
  const auto n = K.rows();
  require(n > 0 && K.cols() == n && M.rows() == n && M.cols() == n, "pencil shape mismatch");
  require(count >= 1 && count <= n, "requested more eigenpairs than unknowns");
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(K, M);
  if (es.info() != Eigen::Success) throw NumericalError("dense generalized eigensolve failed");
  Pairs out;
  out.dense = true;
  out.vectors = es.eigenvectors().leftCols(count);
  normalize_signs(out.vectors);
  for (int i = 0; i < count; ++i) {
    out.values.push_back(es.eigenvalues()[i]);
    const Eigen::VectorXd u = out.vectors.col(i);
    const Eigen::VectorXd mu = M * u;
    out.residuals.push_back((K * u - out.values.back() * mu).norm() / mu.norm());
  }
  return out;
}

namespace {

// M-orthonormalises the columns of W against Q and among themselves. Columns
// that collapse are replaced by fresh random directions.
void m_orthonormalize(const SpMat& M, const Eigen::MatrixXd& Q, Eigen::MatrixXd& W,
                      std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  for (Eigen::Index c = 0; c < W.cols(); ++c) {
    for (int attempt = 0;; ++attempt) {
      Eigen::VectorXd w = W.col(c);
      const double before = std::sqrt(std::max(0.0, w.dot(M * w)));
      for (int pass = 0; pass < 2; ++pass) {
        if (Q.cols() > 0) w -= Q * (Q.transpose() * (M * w));
        if (c > 0) w -= W.leftCols(c) * (W.leftCols(c).transpose() * (M * w));
      }
      const double after = std::sqrt(std::max(0.0, w.dot(M * w)));
      if (after > 1e-10 * before && after > 0.0) {
        W.col(c) = w / after;
        break;
      }
      if (attempt > 5) throw NumericalError("eigensolver basis collapsed");
      for (Eigen::Index i = 0; i < w.size(); ++i) W(i, c) = gauss(rng);
    }
  }
}

}  // namespace

Pairs smallest(const SpMat& K, const SpMat& M, const Options& opts) {
  const auto n = K.rows();
  require(n > 0 && K.cols() == n && M.rows() == n && M.cols() == n, "pencil shape mismatch");
  require(opts.count >= 1 && opts.count <= n, "requested more eigenpairs than unknowns");
  if (n < opts.dense_cutoff) {
    return dense_smallest(Eigen::MatrixXd(K), Eigen::MatrixXd(M), opts.count);
  }

  const SpMat shifted = K - opts.shift * M;
  Eigen::SimplicialLDLT<SpMat> factor(shifted);
  if (factor.info() != Eigen::Success) throw NumericalError("factorization of K - sigma M failed");

  const int p = std::min<int>(opts.count + 2, static_cast<int>(n));
  const int max_basis = std::min<int>(std::max(4 * p, 24), static_cast<int>(n));

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd X(n, p);
  for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = gauss(rng);
  m_orthonormalize(M, Eigen::MatrixXd(n, 0), X, rng);

  Pairs out;
  double worst = 0.0;
  for (int restart = 0; restart < opts.max_restarts; ++restart) {
    Eigen::MatrixXd basis = X;
    Eigen::MatrixXd block = X;
    while (basis.cols() + p <= max_basis) {
      Eigen::MatrixXd next = factor.solve(M * block);
      if (factor.info() != Eigen::Success) throw NumericalError("shift-invert solve failed");
      m_orthonormalize(M, basis, next, rng);
      basis.conservativeResize(Eigen::NoChange, basis.cols() + next.cols());
      basis.rightCols(next.cols()) = next;
      block = next;
    }
    Eigen::MatrixXd H = basis.transpose() * (K * basis);
    H = 0.5 * (H + H.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    X = basis * es.eigenvectors().leftCols(p);

    worst = 0.0;
    out.values.assign(opts.count, 0.0);
    out.residuals.assign(opts.count, 0.0);
    for (int i = 0; i < opts.count; ++i) {
      out.values[i] = es.eigenvalues()[i];
      out.residuals[i] = residual(K, M, out.values[i], X.col(i));
      worst = std::max(worst, out.residuals[i]);
    }
    out.iterations = restart + 1;
    if (worst <= opts.tol) {
      // Final M-orthonormalisation of the converged block.
      Eigen::MatrixXd V = X.leftCols(opts.count);
      const Eigen::MatrixXd G = V.transpose() * (M * V);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gs(0.5 * (G + G.transpose()));
      const Eigen::MatrixXd inv_sqrt = gs.operatorInverseSqrt();
      V = V * inv_sqrt;
      // Re-diagonalise inside the block so vectors stay eigenvectors.
      Eigen::MatrixXd Hs = V.transpose() * (K * V);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> hs(0.5 * (Hs + Hs.transpose()));
      out.vectors = V * hs.eigenvectors();
      for (int i = 0; i < opts.count; ++i) {
        out.values[i] = hs.eigenvalues()[i];
        out.residuals[i] = residual(K, M, out.values[i], out.vectors.col(i));
      }
      normalize_signs(out.vectors);
      return out;
    }
  }
  std::ostringstream msg;
  msg << "eigensolver did not converge after " << opts.max_restarts
      << " restarts (worst residual " << worst << ", n = " << n << ")";
  throw NumericalError(msg.str());
}

}  // namespace hypspec::eig
