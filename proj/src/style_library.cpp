#include "drivestyle/style_library.hpp"

#include <fstream>
#include <sstream>

#include "drivestyle/errors.hpp"

namespace drivestyle {

void StyleLibrary::validate() const {
  const int k = clusters();
  if (k < 1) throw DataError("style library has no clusters");
  if (kmeans.centroids.rows() != k) throw DataError("centroid count does not match k");
  if (pca.components.rows() != static_cast<Eigen::Index>(kFeatureCount) ||
      pca.components.cols() != static_cast<Eigen::Index>(kFeatureCount)) {
    throw DataError("PCA model must have 13 components of dimension 13");
  }
  if (kmeans.centroids.cols() != pca.n_kept) throw DataError("centroid dimension does not match kept components");
  if (prototypes.size() != static_cast<std::size_t>(k)) throw DataError("prototypes must cover every cluster");
  if (style_names.size() != prototypes.size()) throw DataError("style names must cover every cluster");
  for (const auto& p : prototypes) p.validate();
  literature.validate();
  aggregate.validate();
  if (!(sigma_default > 0.0 && sigma_default <= 0.5)) throw DataError("default sigma must lie in (0, 0.5]");
  for (double s : standardizer.stds) {
    if (!(s > 0.0)) throw DataError("standardizer has a non-positive scale");
  }
}

namespace {

nlohmann::json matrix_rows(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXd matrix_from_rows(const nlohmann::json& rows) {
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = r == 0 ? 0 : static_cast<Eigen::Index>(rows[0].size());
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != c) throw DataError("ragged matrix");
    for (Eigen::Index j = 0; j < c; ++j) {
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].get<double>();
    }
  }
  return m;
}

nlohmann::json vector_json(const Eigen::VectorXd& v) {
  return nlohmann::json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace

nlohmann::json library_to_json(const StyleLibrary& lib) {
  nlohmann::json prototypes = nlohmann::json::array();
  for (std::size_t c = 0; c < lib.prototypes.size(); ++c) {
    prototypes.push_back({{"cluster", c}, {"style", lib.style_names[c]}, {"params", params_to_json(lib.prototypes[c])}});
  }
  // Components are stored one axis per row.
  const Eigen::MatrixXd axes = lib.pca.components.transpose();
  return nlohmann::json{
      {"schema", "drivestyle.style_library/1"},
      {"standardizer",
       {{"means", std::vector<double>(lib.standardizer.means.begin(), lib.standardizer.means.end())},
        {"stds", std::vector<double>(lib.standardizer.stds.begin(), lib.standardizer.stds.end())}}},
      {"pca",
       {{"components", matrix_rows(axes)},
        {"eigenvalues", vector_json(lib.pca.eigenvalues)},
        {"explained_variance_ratio", vector_json(lib.pca.explained_variance_ratio)},
        {"n_kept", lib.pca.n_kept}}},
      {"kmeans",
       {{"k", lib.kmeans.k},
        {"centroids", matrix_rows(lib.kmeans.centroids)},
        {"labels", lib.kmeans.labels},
        {"sse", lib.kmeans.sse},
        {"iterations", lib.kmeans.iterations},
        {"converged", lib.kmeans.converged}}},
      {"prototypes", prototypes},
      {"baselines", {{"lit", params_to_json(lib.literature)}, {"aggregate", params_to_json(lib.aggregate)}}},
      {"sigma_default", lib.sigma_default},
      {"metadata", lib.metadata}};
}

StyleLibrary library_from_json(const nlohmann::json& j) {
  try {
    StyleLibrary lib;
    const auto means = j.at("standardizer").at("means").get<std::vector<double>>();
    const auto stds = j.at("standardizer").at("stds").get<std::vector<double>>();
    if (means.size() != kFeatureCount || stds.size() != kFeatureCount) throw DataError("standardizer must have 13 entries");
    std::copy(means.begin(), means.end(), lib.standardizer.means.begin());
    std::copy(stds.begin(), stds.end(), lib.standardizer.stds.begin());

    const auto& pca = j.at("pca");
    lib.pca.components = matrix_from_rows(pca.at("components")).transpose();
    lib.pca.eigenvalues = vector_from_json(pca.at("eigenvalues"));
    lib.pca.explained_variance_ratio = vector_from_json(pca.at("explained_variance_ratio"));
    lib.pca.n_kept = pca.at("n_kept").get<int>();

    const auto& km = j.at("kmeans");
    lib.kmeans.k = km.at("k").get<int>();
    lib.kmeans.centroids = matrix_from_rows(km.at("centroids"));
    lib.kmeans.labels = km.value("labels", std::vector<int>{});
    lib.kmeans.sse = km.value("sse", 0.0);
    lib.kmeans.iterations = km.value("iterations", 0);
    lib.kmeans.converged = km.value("converged", false);

    const auto& protos = j.at("prototypes");
    lib.prototypes.resize(protos.size());
    lib.style_names.resize(protos.size());
    for (const auto& p : protos) {
      const auto c = p.at("cluster").get<std::size_t>();
      if (c >= protos.size()) throw DataError("prototype cluster index out of range");
      lib.prototypes[c] = params_from_json(p.at("params"));
      lib.style_names[c] = p.at("style").get<std::string>();
    }
    lib.literature = params_from_json(j.at("baselines").at("lit"));
    lib.aggregate = params_from_json(j.at("baselines").at("aggregate"));
    lib.sigma_default = j.value("sigma_default", kDefaultSigma);
    lib.metadata = j.value("metadata", nlohmann::json::object());
    lib.validate();
    return lib;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed style library: ") + e.what());
  }
}

StyleLibrary load_library(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open style library: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("style library is not valid JSON: " + std::string(e.what()));
  }
  return library_from_json(j);
}

void save_library(const StyleLibrary& lib, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write style library: " + path);
  out << dump_json(library_to_json(lib));
}

std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace drivestyle
