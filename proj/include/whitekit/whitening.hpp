#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "whitekit/errors.hpp"
#include "whitekit/matrix_stats.hpp"

namespace whitekit {

enum class WhiteningKind { pca, zca, cholesky, zca_cor, pca_cor };

inline constexpr std::array<WhiteningKind, 5> kAllWhiteningKinds = {
    WhiteningKind::pca, WhiteningKind::zca, WhiteningKind::cholesky,
    WhiteningKind::zca_cor, WhiteningKind::pca_cor};

inline std::string_view to_string(WhiteningKind kind) {
  switch (kind) {
    case WhiteningKind::pca: return "pca";
    case WhiteningKind::zca: return "zca";
    case WhiteningKind::cholesky: return "chol";
    case WhiteningKind::zca_cor: return "zca-cor";
    case WhiteningKind::pca_cor: return "pca-cor";
  }
  return "?";
}

inline std::optional<WhiteningKind> parse_whitening_kind(std::string_view s) {
  for (WhiteningKind k : kAllWhiteningKinds) {
    if (s == to_string(k)) return k;
  }
  return std::nullopt;
}

enum class FitScope { train_only, all_data };

inline std::string_view to_string(FitScope scope) {
  return scope == FitScope::train_only ? "train" : "all";
}

inline std::optional<FitScope> parse_fit_scope(std::string_view s) {
  if (s == "train") return FitScope::train_only;
  if (s == "all") return FitScope::all_data;
  return std::nullopt;
}

// Which transform, fitted on what, produced an evaluation result.
struct WhiteningTag {
  WhiteningKind kind;
  FitScope fit_scope;
};

struct WhiteningConfig {
  WhiteningKind kind = WhiteningKind::zca;
  // Eigenvalue floor as a fraction of the mean eigenvalue.
  double eps_relative = 1e-8;
  FitScope fit_scope = FitScope::all_data;
};

// z = (x - mean) * w, one row at a time. For the correlation kinds the
// per-dimension standardization is already folded into w.
struct WhiteningModel {
  WhiteningKind kind = WhiteningKind::zca;
  Vector mean;
  Matrix w;
  // Absolute eigenvalue floor that was actually applied; 0 when no
  // eigenvalue needed lifting.
  double eps_used = 0.0;
  double eps_relative = 0.0;
  Index fit_rows = 0;
  Index fit_cols = 0;
};

namespace detail {

// Smallest relative floor ever used, so that eps_relative = 0 on singular
// input still produces a finite transform.
inline constexpr double kMinRelativeFloor = 1e-15;

struct FlooredSpectrum {
  Vector values;
  double floor_applied = 0.0;
};

inline FlooredSpectrum floor_spectrum(const Vector& eigenvalues,
                                      double eps_relative) {
  const double mean = eigenvalues.mean();
  const double rel = std::max(eps_relative, kMinRelativeFloor);
  const double floor = rel * mean;
  FlooredSpectrum out{eigenvalues, 0.0};
  for (Index i = 0; i < out.values.size(); ++i) {
    if (!(out.values(i) >= floor)) {
      out.values(i) = floor;
      out.floor_applied = floor;
    }
  }
  return out;
}

inline Matrix symmetrized(const Matrix& m) {
  return 0.5 * (m + m.transpose());
}

}  // namespace detail

inline WhiteningModel fit_whitening(const EmbeddingMatrix& x,
                                    const WhiteningConfig& cfg) {
  require_embeddings(x, "fit_whitening");
  if (x.rows() < 2) {
    throw InvalidInput("fit_whitening: need at least 2 rows");
  }
  if (!(cfg.eps_relative >= 0.0) || !std::isfinite(cfg.eps_relative)) {
    throw InvalidInput("fit_whitening: eps_relative must be >= 0");
  }

  WhiteningModel model;
  model.kind = cfg.kind;
  model.eps_relative = cfg.eps_relative;
  model.fit_rows = x.rows();
  model.fit_cols = x.cols();
  model.mean = compute_mean(x);

  const Matrix xc = center(x, model.mean);
  const double spread = max_abs(xc);
  if (spread == 0.0 || spread <= 1e-12 * max_abs(x)) {
    throw DegenerateData("fit_whitening: input has no variance");
  }
  const Matrix cov = compute_covariance(x).values;

  switch (cfg.kind) {
    case WhiteningKind::pca:
    case WhiteningKind::zca:
    case WhiteningKind::cholesky: {
      const SymmetricEigen eig = sym_eig(cov);
      const auto spec = detail::floor_spectrum(eig.eigenvalues, cfg.eps_relative);
      model.eps_used = spec.floor_applied;
      const Matrix& u = eig.eigenvectors;
      if (cfg.kind == WhiteningKind::pca) {
        model.w = u * spec.values.cwiseSqrt().cwiseInverse().asDiagonal();
      } else if (cfg.kind == WhiteningKind::zca) {
        model.w = detail::symmetrized(
            u * spec.values.cwiseSqrt().cwiseInverse().asDiagonal() *
            u.transpose());
      } else {
        // L with L L^T = inverse of the floored covariance; then
        // L^T cov L = I, so L is the right factor for row vectors.
        const Matrix inv = detail::symmetrized(
            u * spec.values.cwiseInverse().asDiagonal() * u.transpose());
        model.w = cholesky_spd(inv).lower;
      }
      break;
    }
    case WhiteningKind::zca_cor:
    case WhiteningKind::pca_cor: {
      const CorrelationMatrix corr = correlation_from_covariance(cov);
      const SymmetricEigen eig = sym_eig(corr.values);
      const auto spec = detail::floor_spectrum(eig.eigenvalues, cfg.eps_relative);
      model.eps_used = spec.floor_applied;
      const Matrix& v = eig.eigenvectors;
      const Vector inv_sd = corr.source_stddevs.cwiseInverse();
      Matrix core = v * spec.values.cwiseSqrt().cwiseInverse().asDiagonal();
      if (cfg.kind == WhiteningKind::zca_cor) {
        core = detail::symmetrized(core * v.transpose());
      }
      model.w = inv_sd.asDiagonal() * core;
      break;
    }
  }

  if (!model.w.allFinite()) {
    throw InternalError("fit_whitening: non-finite transform");
  }
  return model;
}

inline EmbeddingMatrix apply_whitening(const WhiteningModel& model,
                                       const EmbeddingMatrix& x) {
  require_embeddings(x, "apply_whitening");
  if (x.cols() != model.w.rows()) {
    throw InvalidInput("apply_whitening: expected " +
                       std::to_string(model.w.rows()) + " columns, got " +
                       std::to_string(x.cols()));
  }
  return center(x, model.mean) * model.w;
}

// Inverse of apply_whitening: z * w^{-1} + mean.
inline EmbeddingMatrix whitening_round_trip(const WhiteningModel& model,
                                            const EmbeddingMatrix& z) {
  if (z.cols() != model.w.cols()) {
    throw InvalidInput("whitening_round_trip: dimension mismatch");
  }
  Eigen::FullPivLU<Matrix> lu(model.w.transpose());
  if (!lu.isInvertible()) {
    throw InternalError("whitening_round_trip: transform is singular");
  }
  Matrix x = lu.solve(z.transpose()).transpose();
  return x.rowwise() + model.mean.transpose();
}

}  // namespace whitekit
