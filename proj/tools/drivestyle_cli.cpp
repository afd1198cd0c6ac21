// drivestyle: offline style learning, online recognition and the 5 s
// prediction benchmark from the command line.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "drivestyle/calibration.hpp"
#include "drivestyle/config.hpp"
#include "drivestyle/errors.hpp"
#include "drivestyle/features.hpp"
#include "drivestyle/ingest.hpp"
#include "drivestyle/pairs.hpp"
#include "drivestyle/pipeline.hpp"
#include "drivestyle/recognition.hpp"
#include "drivestyle/style_library.hpp"
#include "drivestyle/synth.hpp"

namespace fs = std::filesystem;
using namespace drivestyle;

namespace {

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::string output_dir = ".";
};

PipelineConfig resolve_config(const GlobalOptions& g) {
  PipelineConfig c = g.config_path.empty() ? PipelineConfig{} : load_config(g.config_path);
  if (g.seed) c.seed = *g.seed;
  if (g.workers) c.workers = *g.workers;
  c.validate();
  return c;
}

void write_file(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << contents;
  if (!out) throw ConfigError("failed writing " + path.string());
}

void write_artifacts(const GlobalOptions& g, const std::map<std::string, std::string>& artifacts) {
  for (const auto& [name, contents] : artifacts) {
    const fs::path path = fs::path(g.output_dir) / name;
    write_file(path, contents);
    std::cerr << "wrote " << path.string() << "\n";
  }
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
}

// Library from --library, or learned from the configured data.
StyleLibrary obtain_library(const std::string& library_path, const PreparedData& data, const PipelineConfig& c) {
  if (!library_path.empty()) return load_library(library_path);
  return run_offline(data, c).library;
}

ObservedFrame frame_from_json(const nlohmann::json& j) {
  auto vehicle = [](const nlohmann::json& v) {
    return VehicleKinematics{v.at("x").get<double>(), v.at("v").get<double>(), v.value("a", 0.0)};
  };
  ObservedFrame f;
  f.t = j.at("t").get<double>();
  f.follower = vehicle(j.at("follower"));
  f.leader = vehicle(j.at("leader"));
  f.gap = j.at("gap").get<double>();
  return f;
}

nlohmann::json stream_record(const nlohmann::json& vehicle_id, const ObservationWindow& w,
                             const RecognitionOutcome& o) {
  return {{"vehicle_id", vehicle_id},
          {"t_dur", w.t_dur()},
          {"cluster", o.cluster},
          {"style", o.style_name},
          {"scores", o.per_cluster_scores},
          {"params", params_to_json(o.params)}};
}

RecognitionOutcome run_method(const StyleLibrary& lib, const ObservationWindow& w, const std::string& method,
                              double sigma) {
  return method == "m1" ? recognize_m1(lib, w) : recognize_m2(lib, w, sigma);
}

void stream_recognize(const StyleLibrary& lib, std::istream& in, std::ostream& out, const std::string& method,
                      double sigma) {
  std::map<std::string, ObservationWindow> windows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json record;
    ObservedFrame frame;
    try {
      record = nlohmann::json::parse(line);
      frame = frame_from_json(record);
    } catch (const nlohmann::json::exception& e) {
      throw RecordError(line_no, e.what());
    }
    const nlohmann::json id = record.at("vehicle_id");
    const std::string key = id.dump();
    try {
      auto& w = windows[key];
      w = accumulate(std::move(w), std::span<const ObservedFrame>(&frame, 1));
      out << stream_record(id, w, run_method(lib, w, method, sigma)).dump() << "\n";
    } catch (const DataError& e) {
      throw RecordError(line_no, e.what());
    }
  }
  out.flush();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Driving-style learning, recognition and trajectory prediction benchmark"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--config", g.config_path, "JSON configuration file");
  app.add_option("--seed", g.seed, "Override the configured seed");
  app.add_option("--workers", g.workers, "Worker threads (0 = all cores)");
  app.add_option("--output-dir", g.output_dir, "Directory for artifacts");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic car-following corpus");
  SynthOptions synth_opts;
  double synth_duration = synth_opts.duration;
  std::vector<std::size_t> synth_counts = synth_opts.counts;
  synth->add_option("--duration", synth_duration, "Seconds per pair");
  synth->add_option("--counts", synth_counts, "Pairs per planted style")->expected(3);
  synth->add_option("--noise", synth_opts.noise_sigma, "Acceleration noise sigma");

  auto* extract = app.add_subcommand("extract-pairs", "Extract car-following pairs and the offline/online split");
  auto* features = app.add_subcommand("features", "Compute the 13 indicators of the offline pairs");

  auto* learn = app.add_subcommand("learn-styles", "Run the offline pipeline and write the style library");

  auto* calibrate_cmd = app.add_subcommand("calibrate", "Calibrate one IDM parameter set on a set of pairs");
  std::string calib_pairs;
  calibrate_cmd->add_option("--pairs", calib_pairs, "pairs JSON (default: offline pairs of the configured data)");

  auto* recognize = app.add_subcommand("recognize", "Recognise driving styles");
  std::string library_path, method = "m2", recog_pairs, recog_input;
  std::optional<double> recog_sigma;
  double recog_t_dur = 2.0;
  bool stream = false;
  recognize->add_option("--library", library_path, "style_library.json")->required();
  recognize->add_option("--method", method, "m1 (nearest centroid) or m2 (likelihood)")
      ->check(CLI::IsMember({"m1", "m2"}));
  recognize->add_option("--sigma", recog_sigma, "Noise sigma for m2");
  recognize->add_option("--pairs", recog_pairs, "Batch mode: pairs JSON");
  recognize->add_option("--t-dur", recog_t_dur, "Batch mode: observed seconds per pair");
  recognize->add_flag("--stream", stream, "Streaming mode: NDJSON frames in, one outcome per frame out");
  recognize->add_option("--input", recog_input, "Streaming input file (default stdin)");

  auto* bench = app.add_subcommand("benchmark", "Score m1, m2 and the baselines on the online pairs");
  std::string bench_library;
  bench->add_option("--library", bench_library, "Use this library instead of learning one");

  auto* sweep = app.add_subcommand("sigma-sweep", "Mean RMSE of m2 over a grid of sigma and t_dur");
  std::string sweep_library;
  sweep->add_option("--library", sweep_library, "Use this library instead of learning one");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (synth->parsed()) {
      const PipelineConfig base = resolve_config(g);
      synth_opts.duration = synth_duration;
      synth_opts.counts = synth_counts;
      synth_opts.seed = base.seed;
      const SynthCorpus corpus = generate_corpus(synth_opts);
      std::ostringstream csv;
      write_corpus_csv(csv, corpus.samples);
      PipelineConfig c = base;
      c.input_path = "corpus.csv";
      c.ingest.units = LengthUnit::kMeters;
      nlohmann::json planted = nlohmann::json::array();
      for (std::size_t p = 0; p < corpus.planted.size(); ++p) {
        planted.push_back({{"follower_id", 2 * p + 2}, {"leader_id", 2 * p + 1}, {"style", corpus.planted[p]}});
      }
      write_artifacts(g, {{"corpus.csv", csv.str()},
                          {"config.json", dump_json(config_to_json(c))},
                          {"planted.json", dump_json(planted)}});
    } else if (extract->parsed()) {
      const PipelineConfig c = resolve_config(g);
      const PreparedData data = prepare_data(c);
      nlohmann::json summary = {{"extracted", data.extracted},
                                {"offline", data.split.offline_pairs.size()},
                                {"online", data.split.online_pairs.size()},
                                {"dataset_hash", data.dataset_hash}};
      write_artifacts(g, {{"offline_pairs.json", dump_json(pairs_to_json(data.split.offline_pairs))},
                          {"online_pairs.json", dump_json(pairs_to_json(data.split.online_pairs))}});
      std::cout << summary.dump(2) << "\n";
    } else if (features->parsed()) {
      const PipelineConfig c = resolve_config(g);
      const PreparedData data = prepare_data(c);
      std::vector<FeatureVector> rows;
      const std::size_t need = samples_for(c.feature_window);
      for (const auto& p : data.split.offline_pairs) {
        if (p.samples.size() >= need) rows.push_back(extract_features(p, c.feature_window));
      }
      std::ostringstream csv;
      csv << kCsvSchemaHeader << "\n";
      write_features_csv(csv, rows);
      write_artifacts(g, {{"features.csv", csv.str()}});
    } else if (learn->parsed()) {
      const PipelineConfig c = resolve_config(g);
      const OfflineResult result = run_offline(c);
      write_artifacts(g, result.artifacts);
      std::cout << result.artifacts.at("offline_report.txt");
    } else if (calibrate_cmd->parsed()) {
      const PipelineConfig c = resolve_config(g);
      std::vector<CarFollowingPair> pairs;
      if (!calib_pairs.empty()) {
        pairs = pairs_from_json(read_json_file(calib_pairs));
      } else {
        pairs = prepare_data(c).split.offline_pairs;
      }
      CalibrateOptions opts;
      opts.budget = c.calibration_budget;
      opts.starts = c.calibration_starts;
      opts.seed = calibration_seed(c, -1);
      opts.workers = c.workers;
      const CalibrationResult r = calibrate(make_problem(pairs, c.bounds, c.rmse_mode), opts);
      const std::string text = dump_json(calibration_to_json(r));
      write_artifacts(g, {{"calibration.json", text}});
      std::cout << text;
    } else if (recognize->parsed()) {
      const StyleLibrary lib = load_library(library_path);
      const double sigma = recog_sigma.value_or(lib.sigma_default);
      if (stream) {
        if (recog_input.empty() || recog_input == "-") {
          stream_recognize(lib, std::cin, std::cout, method, sigma);
        } else {
          std::ifstream in(recog_input);
          if (!in) throw ConfigError("cannot open " + recog_input);
          stream_recognize(lib, in, std::cout, method, sigma);
        }
      } else {
        if (recog_pairs.empty()) throw ConfigError("recognize needs --pairs or --stream");
        const std::size_t n = std::max<std::size_t>(1, samples_for(recog_t_dur));
        for (const auto& pair : pairs_from_json(read_json_file(recog_pairs))) {
          if (pair.samples.size() < n) {
            std::cerr << "skipping pair " << pair.follower_id << "/" << pair.leader_id << ": shorter than t_dur\n";
            continue;
          }
          const ObservationWindow w = ObservationWindow::from_pair(pair, n);
          auto record = stream_record(pair.follower_id, w, run_method(lib, w, method, sigma));
          record["leader_id"] = pair.leader_id;
          record["start_frame"] = pair.start_frame();
          std::cout << record.dump() << "\n";
        }
      }
    } else if (bench->parsed()) {
      const PipelineConfig c = resolve_config(g);
      const PreparedData data = prepare_data(c);
      const StyleLibrary lib = obtain_library(bench_library, data, c);
      BenchmarkOptions opts;
      opts.t_durs = c.t_durs;
      opts.sigma = c.sigma;
      opts.mode = c.rmse_mode;
      opts.workers = c.workers;
      const BenchmarkReport report = run_benchmark(lib, data.split.online_pairs, opts);
      write_artifacts(g, benchmark_artifacts(report));
      std::cout << benchmark_text(report);
    } else if (sweep->parsed()) {
      const PipelineConfig c = resolve_config(g);
      const PreparedData data = prepare_data(c);
      const StyleLibrary lib = obtain_library(sweep_library, data, c);
      const auto rows =
          run_sigma_sweep(lib, data.split.online_pairs, c.sweep_sigmas, c.sweep_t_durs, c.rmse_mode, c.workers);
      const std::string csv = sweep_csv(rows);
      write_artifacts(g, {{"sigma_sweep.csv", csv}});
      std::cout << csv;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 4;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
