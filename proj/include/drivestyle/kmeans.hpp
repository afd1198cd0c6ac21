#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace drivestyle {

struct KmeansOptions {
  int restarts = 20;
  std::uint64_t seed = 0;
  int max_iterations = 300;
  unsigned workers = 0;  // 0: hardware concurrency
};

struct KmeansModel {
  int k = 0;
  Eigen::MatrixXd centroids;  // k x d
  std::vector<int> labels;    // per training point
  double sse = 0.0;
  /// SSE after every assignment step of the winning restart.
  std::vector<double> sse_trace;
  int iterations = 0;
  bool converged = false;
};

/// Lloyd's algorithm with k-means++ seeding, best of `restarts` by SSE.
/// A cluster that empties is re-seeded at the point farthest from its
/// assigned centroid. Deterministic for a given seed and any worker count.
KmeansModel kmeans_fit(const Eigen::MatrixXd& points, int k, const KmeansOptions& options = {});

/// Index of the nearest centroid; ties go to the lowest index.
int assign(const Eigen::MatrixXd& centroids, const Eigen::VectorXd& point);
int assign(const KmeansModel& model, const Eigen::VectorXd& point);

/// Sum of squared distances of points to their labelled centroids.
double compute_sse(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centroids, std::span<const int> labels);

struct ElbowPoint {
  int k = 0;
  double sse = 0.0;
};

/// Best SSE for each k in [k_min, k_max].
std::vector<ElbowPoint> elbow_scan(const Eigen::MatrixXd& points, int k_min, int k_max,
                                   const KmeansOptions& options = {});

/// The k with the largest discrete second difference of the SSE curve
/// (SSE(k-1) - 2 SSE(k) + SSE(k+1)). Curves shorter than three points
/// return their first k.
int elbow_k(std::span<const ElbowPoint> curve);

}  // namespace drivestyle
