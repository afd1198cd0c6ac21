#include "drivestyle/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "drivestyle/errors.hpp"
#include "drivestyle/features.hpp"
#include "drivestyle/ingest.hpp"
#include "drivestyle/pairs.hpp"
#include "drivestyle/parallel.hpp"
#include "drivestyle/pca.hpp"
#include "drivestyle/text_format.hpp"

namespace drivestyle {

namespace {

// Re-raises library errors with the pipeline stage prepended, keeping the type.
template <typename Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
  const std::string prefix = std::string("[") + name + "] ";
  try {
    return fn();
  } catch (const ConfigError& e) {
    throw ConfigError(prefix + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(prefix + e.what());
  } catch (const DataError& e) {
    throw DataError(prefix + e.what());
  }
}

Eigen::MatrixXd to_matrix(const std::vector<std::array<double, kFeatureCount>>& rows) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(kFeatureCount));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t d = 0; d < kFeatureCount; ++d) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = rows[i][d];
  }
  return m;
}

Standardizer identity_standardizer() {
  Standardizer s;
  s.means.fill(0.0);
  s.stds.fill(1.0);
  return s;
}

std::vector<std::size_t> cluster_sizes(const std::vector<int>& labels, int k) {
  std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
  for (int l : labels) ++sizes[static_cast<std::size_t>(l)];
  return sizes;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

}  // namespace

PreparedData prepare_data(std::span<const TrajectorySample> samples, const PipelineConfig& config,
                          std::string dataset_hash) {
  PreparedData data;
  data.dataset_hash = std::move(dataset_hash);
  auto pairs = stage("extract_pairs", [&] { return extract_pairs(samples, config.min_duration); });
  std::sort(pairs.begin(), pairs.end(), pair_order);
  data.extracted = pairs.size();
  data.split = stage("split", [&] {
    return split_dataset(std::move(pairs), config.split_fraction, split_seed(config), config.split_strategy);
  });
  return data;
}

PreparedData prepare_data(const PipelineConfig& config) {
  if (config.input_path.empty()) throw ConfigError("[load] no input path configured");
  const auto samples = stage("load", [&] { return load_trajectories(config.input_path, config.ingest); });
  const auto hash = stage("load", [&] { return file_fingerprint(config.input_path); });
  return prepare_data(samples, config, hash);
}

OfflineResult run_offline(const PipelineConfig& config) { return run_offline(prepare_data(config), config); }

OfflineResult run_offline(std::span<const TrajectorySample> samples, const PipelineConfig& config,
                          std::string dataset_hash) {
  return run_offline(prepare_data(samples, config, std::move(dataset_hash)), config);
}

OfflineResult run_offline(PreparedData data, const PipelineConfig& config) {
  config.validate();
  OfflineResult result;
  result.data = std::move(data);
  const auto& offline = result.data.split.offline_pairs;

  // Indicators over the first feature window of every long-enough pair.
  std::vector<std::size_t> used;
  std::vector<FeatureVector> features;
  stage("features", [&] {
    const std::size_t need = samples_for(config.feature_window);
    for (std::size_t i = 0; i < offline.size(); ++i) {
      if (offline[i].samples.size() < need) continue;
      used.push_back(i);
      features.push_back(extract_features(offline[i], config.feature_window));
    }
  });
  const std::size_t feature_excluded = offline.size() - used.size();
  result.clustered = used;

  StyleLibrary& lib = result.library;
  lib.standardizer = stage("features", [&] {
    return config.standardize_features ? fit_standardizer(features) : identity_standardizer();
  });
  std::vector<std::array<double, kFeatureCount>> z;
  z.reserve(features.size());
  for (const auto& f : features) z.push_back(standardize(lib.standardizer, f));
  const Eigen::MatrixXd zm = to_matrix(z);

  lib.pca = stage("pca", [&] { return fit_pca(zm, config.n_kept); });
  const Eigen::MatrixXd points = project_rows(lib.pca, zm);

  KmeansOptions km;
  km.restarts = config.restarts;
  km.seed = kmeans_seed(config);
  km.workers = config.workers;
  const int k_max = std::min<int>(config.k_max, static_cast<int>(points.rows()));
  result.elbow = stage("elbow", [&] { return elbow_scan(points, std::min(config.k_min, k_max), k_max, km); });
  const int elbow = elbow_k(result.elbow);
  lib.kmeans = stage("kmeans", [&] { return kmeans_fit(points, config.k, km); });

  const int k = lib.kmeans.k;
  std::vector<std::vector<CarFollowingPair>> members(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < used.size(); ++i) {
    members[static_cast<std::size_t>(lib.kmeans.labels[i])].push_back(offline[used[i]]);
  }

  stage("calibrate", [&] {
    for (int c = 0; c < k; ++c) {
      const auto problem = make_problem(members[static_cast<std::size_t>(c)], config.bounds, config.rmse_mode);
      CalibrateOptions opts;
      opts.budget = config.calibration_budget;
      opts.starts = config.calibration_starts;
      opts.seed = calibration_seed(config, c);
      opts.workers = config.workers;
      result.cluster_calibrations.push_back(calibrate(problem, opts));
    }
    const auto problem = make_problem(offline, config.bounds, config.rmse_mode);
    CalibrateOptions opts;
    opts.budget = config.calibration_budget;
    opts.starts = config.calibration_starts;
    opts.seed = calibration_seed(config, -1);
    opts.workers = config.workers;
    result.aggregate_calibration = calibrate(problem, opts);
  });

  for (const auto& r : result.cluster_calibrations) lib.prototypes.push_back(r.params);
  lib.aggregate = result.aggregate_calibration.params;
  lib.literature = kLiteratureParams;
  lib.sigma_default = config.sigma;

  lib.style_names = stage("label_styles", [&] {
    if (config.style_labels.empty()) return label_styles(lib.prototypes);
    std::vector<std::string> names(static_cast<std::size_t>(k));
    for (int c = 0; c < k; ++c) {
      const auto it = config.style_labels.find(c);
      if (it == config.style_labels.end()) throw ConfigError("style_labels must name every cluster");
      names[static_cast<std::size_t>(c)] = it->second;
    }
    return names;
  });

  lib.metadata = nlohmann::json{{"seed", config.seed},
                                {"k", k},
                                {"elbow_k", elbow},
                                {"dataset_hash", result.data.dataset_hash},
                                {"pairs_extracted", result.data.extracted},
                                {"pairs_offline", offline.size()},
                                {"pairs_online", result.data.split.online_pairs.size()},
                                {"pairs_clustered", used.size()},
                                {"standardized", config.standardize_features},
                                {"config", config_to_json(config)}};
  stage("library", [&] { lib.validate(); });

  // Literature preset on each cluster (in-sample dominance check), and the
  // objective around each prototype one parameter at a time (+-10%).
  std::vector<double> lit_rmse;
  std::vector<nlohmann::json> sensitivities;
  for (int c = 0; c < k; ++c) {
    const auto problem = make_problem(members[static_cast<std::size_t>(c)], config.bounds, config.rmse_mode);
    lit_rmse.push_back(mean_rmse(kLiteratureParams, problem.windows, config.rmse_mode));
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : sensitivity(problem, lib.prototypes[static_cast<std::size_t>(c)])) {
      rows.push_back({{"param", row.name}, {"minus_10pct", row.minus}, {"plus_10pct", row.plus}});
    }
    sensitivities.push_back(std::move(rows));
  }

  // Sensitivity of the cluster sizes to feature scaling.
  nlohmann::json scaling = nullptr;
  if (config.standardize_features) {
    try {
      std::vector<std::array<double, kFeatureCount>> raw;
      for (const auto& f : features) raw.push_back(f.values);
      const Eigen::MatrixXd raw_matrix = to_matrix(raw);
      const PcaModel raw_pca = fit_pca(raw_matrix, config.n_kept);
      const KmeansModel raw_km = kmeans_fit(project_rows(raw_pca, raw_matrix), config.k, km);
      const auto sizes = cluster_sizes(raw_km.labels, raw_km.k);
      scaling = nlohmann::json{{"cluster_sizes", sizes},
                               {"explained_variance_ratio",
                                std::vector<double>(raw_pca.explained_variance_ratio.data(),
                                                    raw_pca.explained_variance_ratio.data() + raw_pca.explained_variance_ratio.size())}};
    } catch (const Error& e) {
      scaling = nlohmann::json{{"error", e.what()}};
    }
  }

  // Report tables.
  const auto sizes = cluster_sizes(lib.kmeans.labels, k);
  nlohmann::json pca_rows = nlohmann::json::array();
  double accumulated = 0.0;
  for (Eigen::Index i = 0; i < std::min<Eigen::Index>(5, lib.pca.explained_variance_ratio.size()); ++i) {
    accumulated += lib.pca.explained_variance_ratio(i);
    pca_rows.push_back({{"component", "PC" + std::to_string(i + 1)},
                        {"ratio", lib.pca.explained_variance_ratio(i)},
                        {"accumulated", accumulated}});
  }
  nlohmann::json cluster_rows = nlohmann::json::array();
  for (int c = 0; c < k; ++c) {
    const auto& cal = result.cluster_calibrations[static_cast<std::size_t>(c)];
    cluster_rows.push_back({{"cluster", c},
                            {"style", lib.style_names[static_cast<std::size_t>(c)]},
                            {"size", sizes[static_cast<std::size_t>(c)]},
                            {"proportion", static_cast<double>(sizes[static_cast<std::size_t>(c)]) / static_cast<double>(used.size())},
                            {"calibration", calibration_to_json(cal)},
                            {"lit_mean_rmse", lit_rmse[static_cast<std::size_t>(c)]},
                            {"sensitivity", sensitivities[static_cast<std::size_t>(c)]}});
  }
  nlohmann::json elbow_rows = nlohmann::json::array();
  for (const auto& e : result.elbow) elbow_rows.push_back({{"k", e.k}, {"sse", e.sse}});

  result.report = nlohmann::json{{"schema", "drivestyle.offline_report/1"},
                                 {"pairs",
                                  {{"extracted", result.data.extracted},
                                   {"offline", offline.size()},
                                   {"online", result.data.split.online_pairs.size()},
                                   {"clustered", used.size()},
                                   {"excluded_short", feature_excluded}}},
                                 {"pca", pca_rows},
                                 {"elbow", {{"curve", elbow_rows}, {"elbow_k", elbow}, {"k", k}}},
                                 {"clusters", cluster_rows},
                                 {"aggregate", calibration_to_json(result.aggregate_calibration)},
                                 {"scaling_sensitivity", scaling},
                                 {"metadata", lib.metadata}};

  std::ostringstream text;
  text << "pairs: extracted " << result.data.extracted << ", offline " << offline.size() << ", online "
       << result.data.split.online_pairs.size() << ", clustered " << used.size() << "\n\n";
  text << "explained variance\n";
  accumulated = 0.0;
  for (Eigen::Index i = 0; i < std::min<Eigen::Index>(5, lib.pca.explained_variance_ratio.size()); ++i) {
    accumulated += lib.pca.explained_variance_ratio(i);
    text << "  PC" << (i + 1) << "  " << format_fixed(lib.pca.explained_variance_ratio(i), 3) << "  "
         << format_fixed(accumulated, 3) << "\n";
  }
  text << "\nelbow (k, SSE), elbow at k=" << elbow << ", using k=" << k << "\n";
  for (const auto& e : result.elbow) text << "  " << e.k << "  " << format_fixed(e.sse, 3) << "\n";
  text << "\nclusters\n";
  for (int c = 0; c < k; ++c) {
    const auto& p = lib.prototypes[static_cast<std::size_t>(c)];
    text << "  " << c << "  " << pad(lib.style_names[static_cast<std::size_t>(c)], 22) << sizes[static_cast<std::size_t>(c)]
         << "  " << format_fixed(100.0 * static_cast<double>(sizes[static_cast<std::size_t>(c)]) / static_cast<double>(used.size()), 1)
         << "%\n";
    text << "     v*=" << format_fixed(p.v_star, 2) << " T=" << format_fixed(p.t_headway, 2)
         << " d_min=" << format_fixed(p.d_min, 2) << " a_max=" << format_fixed(p.a_max, 2)
         << " b_comf=" << format_fixed(p.b_comf, 2) << "  mean RMSE " << format_fixed(result.cluster_calibrations[static_cast<std::size_t>(c)].objective_value, 3)
         << " m (lit " << format_fixed(lit_rmse[static_cast<std::size_t>(c)], 3) << " m)\n";
    text << "     +-10%:";
    for (const auto& row : sensitivities[static_cast<std::size_t>(c)]) {
      text << " " << row.at("param").get<std::string>() << " " << format_fixed(row.at("minus_10pct").get<double>(), 3) << "/"
           << format_fixed(row.at("plus_10pct").get<double>(), 3);
    }
    text << "\n";
  }
  const auto& agg = lib.aggregate;
  text << "  aggregate  v*=" << format_fixed(agg.v_star, 2) << " T=" << format_fixed(agg.t_headway, 2)
       << " d_min=" << format_fixed(agg.d_min, 2) << " a_max=" << format_fixed(agg.a_max, 2)
       << " b_comf=" << format_fixed(agg.b_comf, 2) << "  mean RMSE "
       << format_fixed(result.aggregate_calibration.objective_value, 3) << " m\n";

  // Figure data.
  std::ostringstream elbow_csv, pca_csv, clusters_csv, features_csv;
  elbow_csv << kCsvSchemaHeader << "\nk,sse\n";
  for (const auto& e : result.elbow) elbow_csv << e.k << ',' << format_double(e.sse) << '\n';
  pca_csv << kCsvSchemaHeader << "\ncomponent,ratio,accumulated\n";
  accumulated = 0.0;
  for (Eigen::Index i = 0; i < lib.pca.explained_variance_ratio.size(); ++i) {
    accumulated += lib.pca.explained_variance_ratio(i);
    pca_csv << "PC" << (i + 1) << ',' << format_double(lib.pca.explained_variance_ratio(i)) << ','
            << format_double(accumulated) << '\n';
  }
  clusters_csv << kCsvSchemaHeader << "\nfollower_id,leader_id,start_frame";
  for (int d = 0; d < lib.pca.n_kept; ++d) clusters_csv << ",PC" << (d + 1);
  clusters_csv << ",cluster\n";
  for (std::size_t i = 0; i < used.size(); ++i) {
    const auto& pair = offline[used[i]];
    clusters_csv << pair.follower_id << ',' << pair.leader_id << ',' << pair.start_frame();
    for (int d = 0; d < lib.pca.n_kept; ++d) clusters_csv << ',' << format_double(points(static_cast<Eigen::Index>(i), d));
    clusters_csv << ',' << lib.kmeans.labels[i] << '\n';
  }
  features_csv << kCsvSchemaHeader << "\n";
  write_features_csv(features_csv, features);

  result.artifacts["style_library.json"] = dump_json(library_to_json(lib));
  result.artifacts["offline_report.json"] = dump_json(result.report);
  result.artifacts["offline_report.txt"] = text.str();
  result.artifacts["elbow.csv"] = elbow_csv.str();
  result.artifacts["pca.csv"] = pca_csv.str();
  result.artifacts["clusters.csv"] = clusters_csv.str();
  result.artifacts["features.csv"] = features_csv.str();
  return result;
}

PairRecognition recognize_pair(const StyleLibrary& lib, const CarFollowingPair& pair, std::size_t samples,
                               double sigma) {
  // Only the first `samples` frames ever reach the recognisers.
  const ObservationWindow window = ObservationWindow::from_pair(pair, samples);
  return {recognize_m1(lib, window), recognize_m2(lib, window, sigma)};
}

namespace {

struct PairScores {
  bool usable = false;
  std::vector<double> m1, m2, lit, aggregate;
  std::vector<int> m1_cluster, m2_cluster;
};

std::size_t observed_samples(double t_dur) { return std::max<std::size_t>(1, samples_for(t_dur)); }

std::vector<CurvePoint> curve(const std::vector<PairScores>& scores, const std::vector<double>& t_durs,
                              std::vector<double> PairScores::*field) {
  std::vector<CurvePoint> out;
  for (std::size_t t = 0; t < t_durs.size(); ++t) {
    CurvePoint p{t_durs[t], 0.0, 0};
    double sum = 0.0;
    for (const auto& s : scores) {
      if (!s.usable) continue;
      sum += (s.*field)[t];
      ++p.samples;
    }
    p.mean_rmse = p.samples ? sum / static_cast<double>(p.samples) : 0.0;
    out.push_back(p);
  }
  return out;
}

Improvement improvement(const std::string& method, const std::string& baseline, const std::vector<CurvePoint>& m,
                        const std::vector<CurvePoint>& b) {
  Improvement imp{method, baseline, {}, -std::numeric_limits<double>::infinity(), 0.0};
  for (std::size_t t = 0; t < m.size(); ++t) {
    const double v = b[t].mean_rmse > 0.0 ? (b[t].mean_rmse - m[t].mean_rmse) / b[t].mean_rmse : 0.0;
    imp.by_t_dur.push_back(v);
    if (v > imp.best) {
      imp.best = v;
      imp.best_t_dur = m[t].t_dur;
    }
  }
  if (imp.by_t_dur.empty()) imp.best = 0.0;
  return imp;
}

}  // namespace

BenchmarkReport run_benchmark(const StyleLibrary& lib, std::span<const CarFollowingPair> online_pairs,
                              const BenchmarkOptions& options) {
  lib.validate();
  if (options.t_durs.empty()) throw ConfigError("benchmark needs at least one t_dur");
  if (!(options.sigma > 0.0)) throw ConfigError("sigma must be positive");
  const std::size_t horizon = samples_for(kPredictionHorizon);
  std::size_t max_obs = 0;
  for (double t : options.t_durs) max_obs = std::max(max_obs, observed_samples(t));

  const std::size_t nt = options.t_durs.size();
  std::vector<PairScores> scores(online_pairs.size());
  parallel_for(online_pairs.size(), options.workers, [&](std::size_t i) {
    const auto& pair = online_pairs[i];
    PairScores& s = scores[i];
    if (max_obs - 1 + horizon >= pair.samples.size()) return;
    s.usable = true;
    for (std::size_t t = 0; t < nt; ++t) {
      const std::size_t n_obs = observed_samples(options.t_durs[t]);
      const PairRecognition rec = recognize_pair(lib, pair, n_obs, options.sigma);
      const PredictionWindow window = prediction_window(pair, n_obs - 1);
      s.m1.push_back(score_prediction(rec.m1.params, window, options.mode).rmse);
      s.m2.push_back(score_prediction(rec.m2.params, window, options.mode).rmse);
      s.lit.push_back(score_prediction(lib.literature, window, options.mode).rmse);
      s.aggregate.push_back(score_prediction(lib.aggregate, window, options.mode).rmse);
      s.m1_cluster.push_back(rec.m1.cluster);
      s.m2_cluster.push_back(rec.m2.cluster);
    }
  });

  BenchmarkReport report;
  for (const auto& s : scores) (s.usable ? report.pairs : report.excluded) += 1;
  report.curves[kMethodM1] = curve(scores, options.t_durs, &PairScores::m1);
  report.curves[kMethodM2] = curve(scores, options.t_durs, &PairScores::m2);
  report.curves[kBaselineLit] = curve(scores, options.t_durs, &PairScores::lit);
  report.curves[kBaselineAggregate] = curve(scores, options.t_durs, &PairScores::aggregate);
  for (const char* m : {kMethodM1, kMethodM2}) {
    for (const char* b : {kBaselineLit, kBaselineAggregate}) {
      report.improvements.push_back(improvement(m, b, report.curves[m], report.curves[b]));
    }
  }
  const auto k = static_cast<std::size_t>(lib.clusters());
  for (const char* m : {kMethodM1, kMethodM2}) {
    auto& counts = report.cluster_counts[m];
    counts.assign(nt, std::vector<std::size_t>(k, 0));
    for (const auto& s : scores) {
      if (!s.usable) continue;
      const auto& clusters = std::string(m) == kMethodM1 ? s.m1_cluster : s.m2_cluster;
      for (std::size_t t = 0; t < nt; ++t) ++counts[t][static_cast<std::size_t>(clusters[t])];
    }
  }
  report.metadata = nlohmann::json{{"sigma", options.sigma},
                                   {"t_durs", options.t_durs},
                                   {"rmse_mode", options.mode == RmseMode::kWholeSeconds ? "whole_seconds" : "all_frames"},
                                   {"library", lib.metadata}};
  return report;
}

std::vector<SweepRow> run_sigma_sweep(const StyleLibrary& lib, std::span<const CarFollowingPair> online_pairs,
                                      std::span<const double> sigmas, std::span<const double> t_durs, RmseMode mode,
                                      unsigned workers) {
  lib.validate();
  const std::size_t horizon = samples_for(kPredictionHorizon);
  std::size_t max_obs = 0;
  for (double t : t_durs) max_obs = std::max(max_obs, observed_samples(t));
  for (double s : sigmas) {
    if (!(s > 0.0)) throw ConfigError("sweep sigmas must be positive");
  }

  const std::size_t ns = sigmas.size(), nt = t_durs.size();
  std::vector<std::vector<double>> per_pair(online_pairs.size());
  std::vector<bool> usable(online_pairs.size(), false);
  parallel_for(online_pairs.size(), workers, [&](std::size_t i) {
    const auto& pair = online_pairs[i];
    if (max_obs - 1 + horizon >= pair.samples.size()) return;
    usable[i] = true;
    auto& row = per_pair[i];
    row.resize(ns * nt);
    for (std::size_t t = 0; t < nt; ++t) {
      const std::size_t n_obs = observed_samples(t_durs[t]);
      const ObservationWindow window = ObservationWindow::from_pair(pair, n_obs);
      const PredictionWindow prediction = prediction_window(pair, n_obs - 1);
      for (std::size_t s = 0; s < ns; ++s) {
        const auto outcome = recognize_m2(lib, window, sigmas[s]);
        row[s * nt + t] = score_prediction(outcome.params, prediction, mode).rmse;
      }
    }
  });

  std::vector<SweepRow> rows;
  for (std::size_t s = 0; s < ns; ++s) {
    for (std::size_t t = 0; t < nt; ++t) {
      SweepRow r{sigmas[s], t_durs[t], 0.0, 0};
      double sum = 0.0;
      for (std::size_t i = 0; i < online_pairs.size(); ++i) {
        if (!usable[i]) continue;
        sum += per_pair[i][s * nt + t];
        ++r.samples;
      }
      r.mean_rmse = r.samples ? sum / static_cast<double>(r.samples) : 0.0;
      rows.push_back(r);
    }
  }
  return rows;
}

nlohmann::json benchmark_to_json(const BenchmarkReport& report) {
  nlohmann::json curves = nlohmann::json::object();
  for (const auto& [name, points] : report.curves) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& p : points) list.push_back({{"t_dur", p.t_dur}, {"mean_rmse", p.mean_rmse}, {"samples", p.samples}});
    curves[name] = list;
  }
  nlohmann::json improvements = nlohmann::json::array();
  for (const auto& i : report.improvements) {
    improvements.push_back({{"method", i.method},
                            {"baseline", i.baseline},
                            {"by_t_dur", i.by_t_dur},
                            {"best", i.best},
                            {"best_t_dur", i.best_t_dur}});
  }
  return nlohmann::json{{"schema", "drivestyle.benchmark_report/1"},
                        {"pairs", report.pairs},
                        {"excluded", report.excluded},
                        {"curves", curves},
                        {"improvements", improvements},
                        {"cluster_counts", report.cluster_counts},
                        {"metadata", report.metadata}};
}

std::string benchmark_curves_csv(const BenchmarkReport& report) {
  std::ostringstream out;
  out << kCsvSchemaHeader << "\nmethod,t_dur,mean_rmse,samples\n";
  for (const auto& [name, points] : report.curves) {
    for (const auto& p : points) {
      out << name << ',' << format_double(p.t_dur) << ',' << format_double(p.mean_rmse) << ',' << p.samples << '\n';
    }
  }
  return out.str();
}

std::string benchmark_text(const BenchmarkReport& report) {
  std::ostringstream out;
  out << "pairs scored " << report.pairs << ", excluded " << report.excluded << "\n\n";
  out << "t_dur   m1      m2      lit     aggregate   (mean RMSE, m)\n";
  const auto& t = report.curves.at(kMethodM2);
  for (std::size_t i = 0; i < t.size(); ++i) {
    out << pad(format_fixed(t[i].t_dur, 1), 8);
    for (const char* m : {kMethodM1, kMethodM2, kBaselineLit, kBaselineAggregate}) {
      out << pad(format_fixed(report.curves.at(m)[i].mean_rmse, 3), 8);
    }
    out << "\n";
  }
  out << "\n";
  for (const auto& imp : report.improvements) {
    out << imp.method << " vs " << imp.baseline << ": up to " << format_fixed(100.0 * imp.best, 1) << "% at t_dur="
        << format_fixed(imp.best_t_dur, 1) << " s\n";
  }
  return out.str();
}

std::string sweep_csv(std::span<const SweepRow> rows) {
  std::ostringstream out;
  out << kCsvSchemaHeader << "\nsigma,t_dur,mean_rmse,samples\n";
  for (const auto& r : rows) {
    out << format_double(r.sigma) << ',' << format_double(r.t_dur) << ',' << format_double(r.mean_rmse) << ','
        << r.samples << '\n';
  }
  return out.str();
}

std::map<std::string, std::string> benchmark_artifacts(const BenchmarkReport& report) {
  return {{"benchmark_report.json", dump_json(benchmark_to_json(report))},
          {"benchmark_curves.csv", benchmark_curves_csv(report)},
          {"benchmark_report.txt", benchmark_text(report)}};
}

}  // namespace drivestyle
