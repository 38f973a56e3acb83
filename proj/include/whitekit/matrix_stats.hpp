#pragma once

// Dense statistics and decompositions shared by the whitening, isotropy and
// evaluation code. Everything here is a pure function of its arguments.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "whitekit/errors.hpp"

namespace whitekit {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// N x d, one sentence per row. Row order is preserved by every operation.
using EmbeddingMatrix = Matrix;

enum class Normalization { population, sample };

struct CovarianceMatrix {
  Matrix values;
  Normalization normalization = Normalization::population;
};

struct CorrelationMatrix {
  Matrix values;
  Vector source_stddevs;
};

// Columns of `eigenvectors` are orthonormal; `eigenvalues` sorted descending.
struct SymmetricEigen {
  Matrix eigenvectors;
  Vector eigenvalues;
};

struct CholeskyFactor {
  Matrix lower;
};

inline void require_embeddings(const Matrix& x, const char* who) {
  if (x.rows() < 1 || x.cols() < 1) {
    throw InvalidInput(std::string(who) + ": empty matrix");
  }
  if (!x.allFinite()) {
    throw InvalidInput(std::string(who) + ": non-finite entry");
  }
}

inline Vector compute_mean(const EmbeddingMatrix& x) {
  require_embeddings(x, "compute_mean");
  return x.colwise().mean().transpose();
}

inline Matrix center(const EmbeddingMatrix& x, const Vector& mean) {
  return x.rowwise() - mean.transpose();
}

inline CovarianceMatrix compute_covariance(
    const EmbeddingMatrix& x,
    Normalization normalization = Normalization::population) {
  require_embeddings(x, "compute_covariance");
  const Index n = x.rows();
  if (normalization == Normalization::sample && n < 2) {
    throw InvalidInput("compute_covariance: sample normalization needs N >= 2");
  }
  const double denom = normalization == Normalization::sample
                           ? static_cast<double>(n - 1)
                           : static_cast<double>(n);
  const Matrix xc = center(x, compute_mean(x));
  Matrix cov = (xc.transpose() * xc) / denom;
  // The product is symmetric only up to rounding; make it exact.
  cov = 0.5 * (cov + cov.transpose()).eval();
  return {std::move(cov), normalization};
}

inline CorrelationMatrix correlation_from_covariance(const Matrix& cov) {
  const Index d = cov.rows();
  Vector sd = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
  const double max_sd = sd.maxCoeff();
  for (Index j = 0; j < d; ++j) {
    if (!(sd(j) > 0.0) || sd(j) < 1e-12 * max_sd) {
      throw DegenerateDimension(static_cast<std::size_t>(j));
    }
  }
  Matrix p(d, d);
  for (Index j = 0; j < d; ++j) {
    for (Index i = 0; i < d; ++i) {
      p(i, j) = i == j ? 1.0 : std::clamp(cov(i, j) / (sd(i) * sd(j)), -1.0, 1.0);
    }
  }
  return {std::move(p), std::move(sd)};
}

inline CorrelationMatrix compute_correlation(const EmbeddingMatrix& x) {
  return correlation_from_covariance(compute_covariance(x).values);
}

inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline SymmetricEigen sym_eig(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw InvalidInput("sym_eig: matrix must be square and non-empty");
  }
  if (!m.allFinite()) {
    throw InvalidInput("sym_eig: non-finite entry");
  }
  const double scale = std::max(1.0, max_abs(m));
  if (max_abs(m - m.transpose()) > 1e-8 * scale) {
    throw InvalidInput("sym_eig: matrix is not symmetric");
  }

  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  if (solver.info() != Eigen::Success) {
    throw InternalError("sym_eig: eigensolver did not converge");
  }
  const Index d = m.rows();
  // Eigen returns ascending order; flip to descending.
  SymmetricEigen out{Matrix(d, d), Vector(d)};
  for (Index k = 0; k < d; ++k) {
    out.eigenvalues(k) = solver.eigenvalues()(d - 1 - k);
    out.eigenvectors.col(k) = solver.eigenvectors().col(d - 1 - k);
  }
  // Sign convention: the largest-magnitude entry of each eigenvector is
  // non-negative (first such entry on ties).
  for (Index k = 0; k < d; ++k) {
    Index arg = 0;
    out.eigenvectors.col(k).cwiseAbs().maxCoeff(&arg);
    if (out.eigenvectors(arg, k) < 0.0) out.eigenvectors.col(k) *= -1.0;
  }
  return out;
}

// Plain left-looking Cholesky so that a failure can name its pivot.
inline CholeskyFactor cholesky_spd(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw InvalidInput("cholesky_spd: matrix must be square and non-empty");
  }
  if (!m.allFinite()) {
    throw InvalidInput("cholesky_spd: non-finite entry");
  }
  const double scale = std::max(1.0, max_abs(m));
  if (max_abs(m - m.transpose()) > 1e-8 * scale) {
    throw InvalidInput("cholesky_spd: matrix is not symmetric");
  }
  const Index d = m.rows();
  Matrix l = Matrix::Zero(d, d);
  for (Index j = 0; j < d; ++j) {
    double diag = m(j, j);
    for (Index k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
    if (!(diag > 0.0)) {
      throw NotPositiveDefinite(static_cast<std::size_t>(j));
    }
    const double ljj = std::sqrt(diag);
    l(j, j) = ljj;
    for (Index i = j + 1; i < d; ++i) {
      double s = m(i, j);
      for (Index k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return {std::move(l)};
}

// Projects centered data onto the leading k principal axes of its
// population covariance.
inline EmbeddingMatrix pca_project(const EmbeddingMatrix& x, Index k) {
  require_embeddings(x, "pca_project");
  if (k < 1 || k > x.cols()) {
    throw InvalidInput("pca_project: k must be in [1, d], got " +
                       std::to_string(k));
  }
  const Vector mu = compute_mean(x);
  const SymmetricEigen eig = sym_eig(compute_covariance(x).values);
  return center(x, mu) * eig.eigenvectors.leftCols(k);
}

}  // namespace whitekit
