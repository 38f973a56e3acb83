#pragma once

// Generators and brute-force oracles for the test suites. Nothing here calls
// into the library's decomposition code, so the checks stay independent of
// the implementation they verify.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace whitekit::testing {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = n(rng);
  return m;
}

// Haar-ish orthogonal matrix from the QR of a Gaussian matrix.
inline MatrixXd random_orthogonal(Eigen::Index d, std::mt19937_64& rng) {
  Eigen::HouseholderQR<MatrixXd> qr(gaussian(d, d, rng));
  MatrixXd q = qr.householderQ();
  return q;
}

// Q diag(lambda) Q^T with lambda log-uniform in [lo, hi].
inline MatrixXd random_spd(Eigen::Index d, std::mt19937_64& rng, double lo = 0.1,
                           double hi = 10.0) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  VectorXd lambda(d);
  for (Eigen::Index i = 0; i < d; ++i) lambda(i) = std::exp(u(rng));
  const MatrixXd q = random_orthogonal(d, rng);
  MatrixXd s = q * lambda.asDiagonal() * q.transpose();
  return 0.5 * (s + s.transpose());
}

// Rows drawn from N(mean, cov) using Eigen's own LLT.
inline MatrixXd sample_gaussian(Eigen::Index n, const MatrixXd& cov,
                                std::mt19937_64& rng, double offset = 0.0) {
  const MatrixXd a = cov.llt().matrixL();
  MatrixXd x = gaussian(n, cov.rows(), rng) * a.transpose();
  x.array() += offset;
  return x;
}

inline VectorXd naive_mean(const MatrixXd& x) {
  VectorXd m = VectorXd::Zero(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    long double s = 0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) s += x(i, j);
    m(j) = static_cast<double>(s / x.rows());
  }
  return m;
}

// Population covariance by explicit double loops in long double.
inline MatrixXd naive_cov(const MatrixXd& x) {
  const VectorXd m = naive_mean(x);
  const Eigen::Index d = x.cols();
  MatrixXd c(d, d);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) {
      long double s = 0;
      for (Eigen::Index i = 0; i < x.rows(); ++i) {
        s += static_cast<long double>(x(i, a) - m(a)) * (x(i, b) - m(b));
      }
      c(a, b) = static_cast<double>(s / x.rows());
    }
  }
  return c;
}

inline double max_abs_diff(const MatrixXd& a, const MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

// Rank by counting: 1 + #smaller + (#equal - 1) / 2.
inline std::vector<double> brute_force_ranks(const std::vector<double>& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double less = 0, equal = 0;
    for (double w : v) {
      less += w < v[i];
      equal += w == v[i];
    }
    r[i] = 1.0 + less + (equal - 1.0) / 2.0;
  }
  return r;
}

inline double brute_force_pearson(const std::vector<double>& a,
                                  const std::vector<double>& b) {
  long double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= a.size();
  mb /= b.size();
  long double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return static_cast<double>(sab / std::sqrt(saa * sbb));
}

inline double brute_force_spearman(const std::vector<double>& a,
                                   const std::vector<double>& b) {
  return brute_force_pearson(brute_force_ranks(a), brute_force_ranks(b));
}

// Least-squares Q minimizing ||za * Q - zb||, solved by column-pivoted QR.
inline MatrixXd least_squares_map(const MatrixXd& za, const MatrixXd& zb) {
  return za.colPivHouseholderQr().solve(zb);
}

inline double orthogonality_defect(const MatrixXd& q) {
  return (q.transpose() * q - MatrixXd::Identity(q.cols(), q.cols()))
      .cwiseAbs()
      .maxCoeff();
}

inline std::filesystem::path fresh_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("whitekit_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace whitekit::testing
