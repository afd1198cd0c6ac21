#pragma once

#include <Eigen/Dense>

namespace drivestyle {

/// Principal axes of standardized feature data.
struct PcaModel {
  /// Column j is the j-th principal axis (unit norm, descending variance).
  Eigen::MatrixXd components;
  /// Covariance eigenvalues, descending; non-negative.
  Eigen::VectorXd eigenvalues;
  /// eigenvalue / trace per component.
  Eigen::VectorXd explained_variance_ratio;
  int n_kept = 2;

  int dimensions() const { return static_cast<int>(components.rows()); }
};

inline constexpr int kDefaultKeptComponents = 2;

/// Fits PCA on an n x d matrix (one observation per row) through the
/// eigendecomposition of the sample covariance. Needs n >= d. Each axis is
/// signed so its largest-magnitude entry is positive.
PcaModel fit_pca(const Eigen::MatrixXd& standardized, int n_kept = kDefaultKeptComponents);

/// Coordinates of `point` on the first n_kept axes.
Eigen::VectorXd project(const PcaModel& model, const Eigen::VectorXd& point);

/// Coordinates on the first `count` axes.
Eigen::VectorXd project(const PcaModel& model, const Eigen::VectorXd& point, int count);

/// Row-wise projection onto the first n_kept axes.
Eigen::MatrixXd project_rows(const PcaModel& model, const Eigen::MatrixXd& points);

/// Maps coordinates on the leading axes back into the original space.
Eigen::VectorXd reconstruct(const PcaModel& model, const Eigen::VectorXd& coordinates);

}  // namespace drivestyle
