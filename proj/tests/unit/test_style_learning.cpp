#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "drivestyle/errors.hpp"
#include "drivestyle/kmeans.hpp"
#include "drivestyle/pca.hpp"
#include "drivestyle/rng.hpp"

using namespace drivestyle;

namespace {

Eigen::MatrixXd random_matrix(int n, int d, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd m(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) m(i, j) = rng.normal() * (1.0 + j);
  }
  // Correlate a few columns so the spectrum is not flat.
  if (d > 1) m.col(1) += 0.8 * m.col(0);
  if (d > 3) m.col(2) -= 0.5 * m.col(3);
  return m;
}

Eigen::MatrixXd blobs(std::vector<int>& truth, std::uint64_t seed) {
  const double centres[3][2] = {{0, 0}, {10, 0}, {0, 10}};
  Rng rng(seed);
  Eigen::MatrixXd m(90, 2);
  truth.clear();
  for (int i = 0; i < 90; ++i) {
    const int b = i % 3;
    m(i, 0) = centres[b][0] + 0.2 * rng.normal();
    m(i, 1) = centres[b][1] + 0.2 * rng.normal();
    truth.push_back(b);
  }
  return m;
}

}  // namespace

TEST_CASE("rank-one data has a single component") {
  Eigen::MatrixXd m(20, 13);
  Eigen::VectorXd dir = Eigen::VectorXd::LinSpaced(13, 1.0, 2.0).normalized();
  for (int i = 0; i < 20; ++i) m.row(i) = (i - 9.5) * dir.transpose();
  const auto model = fit_pca(m);
  CHECK(model.explained_variance_ratio(0) == doctest::Approx(1.0).epsilon(1e-12));
  for (int j = 1; j < 13; ++j) CHECK(std::abs(model.explained_variance_ratio(j)) < 1e-12);
}

TEST_CASE("components are orthonormal and sorted; reconstruction is exact") {
  const Eigen::MatrixXd m = random_matrix(80, 13, 3);
  const auto model = fit_pca(m);
  const Eigen::MatrixXd gram = model.components.transpose() * model.components;
  CHECK((gram - Eigen::MatrixXd::Identity(13, 13)).cwiseAbs().maxCoeff() < 1e-9);
  for (int j = 1; j < 13; ++j) CHECK(model.eigenvalues(j - 1) >= model.eigenvalues(j));
  CHECK(model.explained_variance_ratio.sum() == doctest::Approx(1.0).epsilon(1e-12));
  for (int j = 0; j < 13; ++j) {
    Eigen::Index arg;
    model.components.col(j).cwiseAbs().maxCoeff(&arg);
    CHECK(model.components(arg, j) > 0.0);
  }

  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd x(13);
    for (int j = 0; j < 13; ++j) x(j) = rng.normal(0, 3);
    const Eigen::VectorXd back = reconstruct(model, project(model, x, 13));
    CHECK((back - x).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(project(model, x).squaredNorm() <= x.squaredNorm() + 1e-12);
  }
  CHECK(project(model, Eigen::VectorXd::Zero(13)).isZero());
  const Eigen::VectorXd first = project(model, Eigen::VectorXd(model.components.col(0)));
  CHECK(first(0) == doctest::Approx(1.0));
  CHECK(std::abs(first(1)) < 1e-12);
}

TEST_CASE("PCA needs at least as many rows as columns") {
  CHECK_THROWS_AS(fit_pca(random_matrix(5, 13, 1)), DataError);
}

TEST_CASE("three blobs are recovered") {
  std::vector<int> truth;
  const Eigen::MatrixXd m = blobs(truth, 8);
  KmeansOptions opts;
  opts.seed = 12;
  const auto model = kmeans_fit(m, 3, opts);
  std::set<std::pair<int, int>> mapping;
  for (std::size_t i = 0; i < truth.size(); ++i) mapping.insert({truth[i], model.labels[i]});
  CHECK(mapping.size() == 3);
  CHECK(model.sse < 90 * 2 * 0.2 * 0.2 * 2.0);
  CHECK(kmeans_fit(m, 1, opts).sse > 50.0 * model.sse);
  CHECK(model.converged);
}

TEST_CASE("k = 1 gives the mean and the total scatter") {
  const Eigen::MatrixXd m = random_matrix(40, 3, 2);
  const auto model = kmeans_fit(m, 1);
  const Eigen::RowVectorXd mean = m.colwise().mean();
  CHECK((model.centroids.row(0) - mean).cwiseAbs().maxCoeff() < 1e-12);
  const double scatter = (m.rowwise() - mean).squaredNorm();
  CHECK(model.sse == doctest::Approx(scatter).epsilon(1e-12));
}

TEST_CASE("Lloyd iterations never increase the SSE") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    KmeansOptions opts;
    opts.seed = seed;
    opts.restarts = 1;
    const auto model = kmeans_fit(random_matrix(60, 2, seed), 4, opts);
    REQUIRE(!model.sse_trace.empty());
    for (std::size_t i = 1; i < model.sse_trace.size(); ++i) CHECK(model.sse_trace[i] <= model.sse_trace[i - 1] + 1e-12);
  }
}

TEST_CASE("assignment matches a brute-force scan; ties go low") {
  Rng rng(21);
  Eigen::MatrixXd centroids(5, 2);
  for (int i = 0; i < 5; ++i) centroids.row(i) << rng.normal(), rng.normal();
  for (int trial = 0; trial < 500; ++trial) {
    Eigen::VectorXd p(2);
    p << rng.normal(0, 2), rng.normal(0, 2);
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 5; ++i) {
      const double d = (centroids.row(i).transpose() - p).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    CHECK(assign(centroids, p) == best);
  }
  for (int i = 0; i < 5; ++i) CHECK(assign(centroids, Eigen::VectorXd(centroids.row(i).transpose())) == i);

  Eigen::MatrixXd tie(3, 1);
  tie << -1.0, 5.0, 1.0;
  CHECK(assign(tie, Eigen::VectorXd::Zero(1)) == 0);
}

TEST_CASE("elbow curve is non-increasing and finds the blob count") {
  std::vector<int> truth;
  const Eigen::MatrixXd m = blobs(truth, 9);
  KmeansOptions opts;
  opts.seed = 5;
  const auto curve = elbow_scan(m, 1, 8, opts);
  REQUIRE(curve.size() == 8);
  double running = std::numeric_limits<double>::infinity();
  for (const auto& p : curve) {
    running = std::min(running, p.sse);
    CHECK(p.sse <= running + 1e-9);
  }
  CHECK(elbow_k(curve) == 3);
  CHECK_THROWS_AS(elbow_scan(m.topRows(4), 1, 5, opts), DataError);
}

TEST_CASE("k-means is deterministic across worker counts") {
  const Eigen::MatrixXd m = random_matrix(70, 2, 31);
  KmeansOptions a;
  a.seed = 77;
  a.workers = 1;
  KmeansOptions b = a;
  b.workers = 4;
  const auto ma = kmeans_fit(m, 3, a);
  const auto mb = kmeans_fit(m, 3, b);
  CHECK(ma.labels == mb.labels);
  CHECK(ma.centroids == mb.centroids);
  CHECK(ma.sse == mb.sse);
}

TEST_CASE("reflecting one feature leaves the clustering unchanged") {
  // Flipping the sign convention of an indicator is an orthogonal map of the
  // standardized space, so distances and hence clusters are preserved.
  Eigen::MatrixXd m = random_matrix(60, 13, 41);
  m.col(11).array() += 4.0 * (Eigen::ArrayXd::LinSpaced(60, 0, 59) > 30).cast<double>();
  Eigen::MatrixXd flipped = m;
  flipped.col(11) *= -1.0;
  KmeansOptions opts;
  opts.seed = 3;
  const auto pa = fit_pca(m);
  const auto pb = fit_pca(flipped);
  for (int j = 0; j < 13; ++j) CHECK(pa.eigenvalues(j) == doctest::Approx(pb.eigenvalues(j)).epsilon(1e-9));
  const auto ka = kmeans_fit(project_rows(pa, m), 3, opts);
  const auto kb = kmeans_fit(project_rows(pb, flipped), 3, opts);
  CHECK(ka.sse == doctest::Approx(kb.sse).epsilon(1e-9));
  std::set<std::pair<int, int>> mapping;
  for (std::size_t i = 0; i < ka.labels.size(); ++i) mapping.insert({ka.labels[i], kb.labels[i]});
  CHECK(mapping.size() == 3);
}
