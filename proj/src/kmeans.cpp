#include "drivestyle/kmeans.hpp"

#include <limits>
#include <string>

#include "drivestyle/errors.hpp"
#include "drivestyle/parallel.hpp"
#include "drivestyle/rng.hpp"

namespace drivestyle {

namespace {

double squared_distance(const Eigen::MatrixXd& points, Eigen::Index row, const Eigen::MatrixXd& centroids,
                        Eigen::Index c) {
  return (points.row(row) - centroids.row(c)).squaredNorm();
}

int nearest(const Eigen::MatrixXd& points, Eigen::Index row, const Eigen::MatrixXd& centroids) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
    const double d = squared_distance(points, row, centroids, c);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

Eigen::MatrixXd plus_plus_seeds(const Eigen::MatrixXd& points, int k, Rng& rng) {
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd centroids(k, points.cols());
  centroids.row(0) = points.row(static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n))));
  std::vector<double> d2(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      auto& d = d2[static_cast<std::size_t>(i)];
      d = std::min(d, squared_distance(points, i, centroids, c - 1));
      total += d;
    }
    Eigen::Index chosen = n - 1;
    if (total > 0.0) {
      double target = rng.uniform() * total;
      for (Eigen::Index i = 0; i < n; ++i) {
        target -= d2[static_cast<std::size_t>(i)];
        if (target < 0.0) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
    }
    centroids.row(c) = points.row(chosen);
  }
  return centroids;
}

KmeansModel lloyd(const Eigen::MatrixXd& points, Eigen::MatrixXd centroids, int max_iterations) {
  const Eigen::Index n = points.rows();
  const int k = static_cast<int>(centroids.rows());
  KmeansModel model;
  model.k = k;
  model.labels.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) model.labels[static_cast<std::size_t>(i)] = nearest(points, i, centroids);
  model.sse_trace.push_back(compute_sse(points, centroids, model.labels));

  std::vector<int> next(model.labels.size());
  for (int iter = 1; iter <= max_iterations; ++iter) {
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, points.cols());
    std::vector<Eigen::Index> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int c = model.labels[static_cast<std::size_t>(i)];
      sums.row(c) += points.row(i);
      ++counts[static_cast<std::size_t>(c)];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        centroids.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
      }
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) continue;
      Eigen::Index farthest = -1;
      double far_d = -1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const int owner = model.labels[static_cast<std::size_t>(i)];
        if (counts[static_cast<std::size_t>(owner)] < 2) continue;
        const double d = squared_distance(points, i, centroids, owner);
        if (d > far_d) {
          far_d = d;
          farthest = i;
        }
      }
      if (farthest < 0) break;
      centroids.row(c) = points.row(farthest);
      --counts[static_cast<std::size_t>(model.labels[static_cast<std::size_t>(farthest)])];
      model.labels[static_cast<std::size_t>(farthest)] = c;
      counts[static_cast<std::size_t>(c)] = 1;
    }

    for (Eigen::Index i = 0; i < n; ++i) next[static_cast<std::size_t>(i)] = nearest(points, i, centroids);
    model.sse_trace.push_back(compute_sse(points, centroids, next));
    model.iterations = iter;
    const bool stable = next == model.labels;
    model.labels.swap(next);
    if (stable) {
      model.converged = true;
      break;
    }
  }
  model.centroids = std::move(centroids);
  model.sse = model.sse_trace.back();
  return model;
}

}  // namespace

double compute_sse(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centroids, std::span<const int> labels) {
  double sse = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    sse += squared_distance(points, i, centroids, labels[static_cast<std::size_t>(i)]);
  }
  return sse;
}

KmeansModel kmeans_fit(const Eigen::MatrixXd& points, int k, const KmeansOptions& options) {
  if (k < 1) throw ConfigError("k must be at least 1");
  if (points.rows() < k) {
    throw DataError("k-means with k=" + std::to_string(k) + " needs at least k points, got " +
                    std::to_string(points.rows()));
  }
  if (!points.allFinite()) throw DataError("k-means input contains non-finite values");
  const int restarts = std::max(1, options.restarts);

  std::vector<KmeansModel> runs(static_cast<std::size_t>(restarts));
  parallel_for(runs.size(), options.workers, [&](std::size_t r) {
    Rng rng(mix_seed(options.seed, r));
    runs[r] = lloyd(points, plus_plus_seeds(points, k, rng), options.max_iterations);
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r) {
    if (runs[r].sse < runs[best].sse) best = r;
  }
  return std::move(runs[best]);
}

int assign(const Eigen::MatrixXd& centroids, const Eigen::VectorXd& point) {
  if (centroids.rows() == 0) throw DataError("model has no centroids");
  if (point.size() != centroids.cols()) throw DataError("point dimension does not match centroids");
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
    const double d = (centroids.row(c).transpose() - point).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

int assign(const KmeansModel& model, const Eigen::VectorXd& point) { return assign(model.centroids, point); }

std::vector<ElbowPoint> elbow_scan(const Eigen::MatrixXd& points, int k_min, int k_max,
                                   const KmeansOptions& options) {
  if (k_min < 1 || k_max < k_min) throw ConfigError("invalid k range for elbow scan");
  if (k_max > points.rows()) {
    throw DataError("elbow scan up to k=" + std::to_string(k_max) + " needs at least that many points");
  }
  std::vector<ElbowPoint> curve;
  for (int k = k_min; k <= k_max; ++k) {
    KmeansOptions per_k = options;
    per_k.seed = mix_seed(options.seed, static_cast<std::uint64_t>(k) + 1000);
    curve.push_back({k, kmeans_fit(points, k, per_k).sse});
  }
  return curve;
}

int elbow_k(std::span<const ElbowPoint> curve) {
  if (curve.empty()) throw DataError("empty SSE curve");
  if (curve.size() < 3) return curve.front().k;
  std::size_t best = 1;
  double best_curv = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < curve.size(); ++i) {
    const double curv = curve[i - 1].sse - 2.0 * curve[i].sse + curve[i + 1].sse;
    if (curv > best_curv) {
      best_curv = curv;
      best = i;
    }
  }
  return curve[best].k;
}

}  // namespace drivestyle
