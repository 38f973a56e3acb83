#pragma once

#include <algorithm>
#include <cmath>

#include "whitekit/errors.hpp"
#include "whitekit/matrix_stats.hpp"

namespace whitekit {

struct IsoScoreReport {
  double score = 0.0;
  double defect = 0.0;
  Index n_dims = 0;
  Index n_points = 0;
};

// IsoScore: reorient by PCA, normalize the per-axis variance vector to norm
// sqrt(d), and measure its distance from the all-ones vector.
inline IsoScoreReport isoscore(const EmbeddingMatrix& x) {
  require_embeddings(x, "isoscore");
  if (x.rows() < 2) throw InvalidInput("isoscore: need at least 2 points");
  if (x.cols() < 2) throw InvalidInput("isoscore: need at least 2 dimensions");

  const Index d_index = x.cols();
  const double d = static_cast<double>(d_index);
  const Matrix reoriented = pca_project(x, d_index);
  const Vector variances = compute_covariance(reoriented).values.diagonal();

  const double norm = variances.norm();
  if (!(norm > 0.0)) throw DegenerateData("isoscore: all variances are zero");

  const double sqrt_d = std::sqrt(d);
  const Vector normalized = variances * (sqrt_d / norm);
  const double raw_defect =
      (normalized - Vector::Ones(d_index)).norm() / std::sqrt(2.0 * (d - sqrt_d));
  const double defect = std::clamp(raw_defect, 0.0, 1.0);

  const double k = d - defect * defect * (d - sqrt_d);
  const double score = std::clamp((k * k - d) / (d * (d - 1.0)), 0.0, 1.0);
  return {score, defect, d_index, x.rows()};
}

}  // namespace whitekit
