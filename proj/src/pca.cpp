#include "drivestyle/pca.hpp"

#include <string>

#include "drivestyle/errors.hpp"

namespace drivestyle {

PcaModel fit_pca(const Eigen::MatrixXd& standardized, int n_kept) {
  const Eigen::Index n = standardized.rows();
  const Eigen::Index d = standardized.cols();
  if (d == 0) throw DataError("PCA input has no columns");
  if (n < d) {
    throw DataError("PCA needs at least as many observations as dimensions (" + std::to_string(n) + " < " +
                    std::to_string(d) + ")");
  }
  if (n_kept < 1 || n_kept > d) throw ConfigError("number of kept components out of range");
  if (!standardized.allFinite()) throw DataError("PCA input contains non-finite values");

  const Eigen::RowVectorXd mean = standardized.colwise().mean();
  const Eigen::MatrixXd centered = standardized.rowwise() - mean;
  const Eigen::MatrixXd covariance = (centered.transpose() * centered) / static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(covariance);
  if (solver.info() != Eigen::Success) throw NumericalError("covariance eigendecomposition failed");

  PcaModel model;
  model.n_kept = n_kept;
  model.components.resize(d, d);
  model.eigenvalues.resize(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const Eigen::Index src = d - 1 - j;  // the solver sorts ascending
    Eigen::VectorXd axis = solver.eigenvectors().col(src);
    Eigen::Index pivot = 0;
    axis.cwiseAbs().maxCoeff(&pivot);
    if (axis(pivot) < 0.0) axis = -axis;
    model.components.col(j) = axis;
    model.eigenvalues(j) = std::max(0.0, solver.eigenvalues()(src));
  }
  const double trace = model.eigenvalues.sum();
  model.explained_variance_ratio =
      trace > 0.0 ? Eigen::VectorXd(model.eigenvalues / trace) : Eigen::VectorXd::Zero(d);
  return model;
}

Eigen::VectorXd project(const PcaModel& model, const Eigen::VectorXd& point, int count) {
  if (point.size() != model.dimensions()) throw DataError("projection dimension mismatch");
  return model.components.leftCols(count).transpose() * point;
}

Eigen::VectorXd project(const PcaModel& model, const Eigen::VectorXd& point) {
  return project(model, point, model.n_kept);
}

Eigen::MatrixXd project_rows(const PcaModel& model, const Eigen::MatrixXd& points) {
  if (points.cols() != model.dimensions()) throw DataError("projection dimension mismatch");
  return points * model.components.leftCols(model.n_kept);
}

Eigen::VectorXd reconstruct(const PcaModel& model, const Eigen::VectorXd& coordinates) {
  return model.components.leftCols(coordinates.size()) * coordinates;
}

}  // namespace drivestyle
