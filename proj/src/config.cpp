#include "drivestyle/config.hpp"

#include <filesystem>
#include <fstream>

#include "drivestyle/errors.hpp"
#include "drivestyle/rng.hpp"

namespace drivestyle {

PipelineConfig::PipelineConfig() {
  for (int i = 1; i <= 20; ++i) sweep_sigmas.push_back(0.01 * i);
}

void PipelineConfig::validate() const {
  if (!(min_duration > 0.0)) throw ConfigError("min_duration must be positive");
  if (!(split_fraction > 0.0 && split_fraction < 1.0)) throw ConfigError("split fraction must lie in (0, 1)");
  if (!(feature_window > 0.0)) throw ConfigError("feature window must be positive");
  if (k < 1) throw ConfigError("k must be at least 1");
  if (k_min < 1 || k_max < k_min) throw ConfigError("invalid elbow k range");
  if (n_kept < 1 || n_kept > 13) throw ConfigError("n_kept must lie in [1, 13]");
  if (restarts < 1) throw ConfigError("restarts must be at least 1");
  if (calibration_budget < 100) throw ConfigError("calibration budget must be at least 100");
  if (!(sigma > 0.0)) throw ConfigError("sigma must be positive");
  for (double t : t_durs) {
    if (!(t >= 0.1 - 1e-9)) throw ConfigError("t_dur values must be at least 0.1 s");
  }
  for (double t : sweep_t_durs) {
    if (!(t >= 0.1 - 1e-9)) throw ConfigError("sweep t_dur values must be at least 0.1 s");
  }
  for (double s : sweep_sigmas) {
    if (!(s > 0.0)) throw ConfigError("sweep sigmas must be positive");
  }
  bounds.validate();
}

namespace {

ColumnRef column_ref(const nlohmann::json& v) {
  if (v.is_number_unsigned() || v.is_number_integer()) {
    const auto i = v.get<long long>();
    if (i < 0) throw ConfigError("column index must be non-negative");
    return static_cast<std::size_t>(i);
  }
  if (v.is_string()) return v.get<std::string>();
  throw ConfigError("column must be a name or an index");
}

std::optional<ColumnRef> optional_ref(const nlohmann::json& v) {
  if (v.is_null()) return std::nullopt;
  return column_ref(v);
}

GapConvention parse_gap(const std::string& s) {
  if (s == "headway_minus_leader_length") return GapConvention::kHeadwayMinusLeaderLength;
  if (s == "headway") return GapConvention::kHeadway;
  if (s == "front_bumper_positions") return GapConvention::kFrontBumperPositions;
  if (s == "centroid_positions") return GapConvention::kCentroidPositions;
  throw ConfigError("unknown gap convention: " + s);
}

const char* gap_name(GapConvention g) {
  switch (g) {
    case GapConvention::kHeadwayMinusLeaderLength: return "headway_minus_leader_length";
    case GapConvention::kHeadway: return "headway";
    case GapConvention::kFrontBumperPositions: return "front_bumper_positions";
    case GapConvention::kCentroidPositions: return "centroid_positions";
  }
  return "";
}

nlohmann::json ref_json(const ColumnRef& r) {
  if (const auto* i = std::get_if<std::size_t>(&r)) return *i;
  return std::get<std::string>(r);
}

nlohmann::json ref_json(const std::optional<ColumnRef>& r) { return r ? ref_json(*r) : nlohmann::json(nullptr); }

}  // namespace

PipelineConfig config_from_json(const nlohmann::json& j, const std::string& base_dir) {
  PipelineConfig c;
  try {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    if (j.contains("input")) {
      const auto& in = j.at("input");
      if (in.contains("path")) {
        std::filesystem::path p = in.at("path").get<std::string>();
        if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
        c.input_path = p.string();
      }
      if (in.contains("units")) {
        const auto u = in.at("units").get<std::string>();
        if (u == "feet") c.ingest.units = LengthUnit::kFeet;
        else if (u == "meters") c.ingest.units = LengthUnit::kMeters;
        else throw ConfigError("units must be 'feet' or 'meters'");
      }
      if (in.contains("delimiter")) {
        const auto d = in.at("delimiter").get<std::string>();
        if (d == "auto") c.ingest.delimiter = 0;
        else if (d == "comma" || d == ",") c.ingest.delimiter = ',';
        else if (d == "whitespace" || d == " ") c.ingest.delimiter = ' ';
        else throw ConfigError("delimiter must be 'auto', 'comma' or 'whitespace'");
      }
      c.ingest.has_header = in.value("header", true);
      if (in.contains("gap_convention")) c.ingest.gap_convention = parse_gap(in.at("gap_convention").get<std::string>());
      if (in.contains("lanes")) {
        for (const auto& l : in.at("lanes")) c.ingest.lanes.insert(l.get<int>());
      }
      c.ingest.no_leader_id = in.value("no_leader_id", c.ingest.no_leader_id);
      if (in.contains("columns")) {
        const auto& cols = in.at("columns");
        auto& m = c.ingest.columns;
        if (cols.contains("vehicle_id")) m.vehicle_id = column_ref(cols["vehicle_id"]);
        if (cols.contains("frame")) m.frame = column_ref(cols["frame"]);
        if (cols.contains("position")) m.position = column_ref(cols["position"]);
        if (cols.contains("speed")) m.speed = column_ref(cols["speed"]);
        if (cols.contains("acceleration")) m.acceleration = optional_ref(cols["acceleration"]);
        if (cols.contains("lane")) m.lane = column_ref(cols["lane"]);
        if (cols.contains("leader_id")) m.leader_id = column_ref(cols["leader_id"]);
        if (cols.contains("space_headway")) m.space_headway = optional_ref(cols["space_headway"]);
        if (cols.contains("vehicle_length")) m.vehicle_length = optional_ref(cols["vehicle_length"]);
      }
    }
    if (j.contains("extraction")) c.min_duration = j["extraction"].value("min_duration", c.min_duration);
    if (j.contains("split")) {
      const auto& s = j["split"];
      c.split_fraction = s.value("fraction", c.split_fraction);
      const auto strategy = s.value("strategy", std::string("random"));
      if (strategy == "random") c.split_strategy = SplitStrategy::kRandom;
      else if (strategy == "ordered") c.split_strategy = SplitStrategy::kOrdered;
      else throw ConfigError("split strategy must be 'random' or 'ordered'");
    }
    if (j.contains("features")) {
      c.feature_window = j["features"].value("window", c.feature_window);
      c.standardize_features = j["features"].value("standardize", c.standardize_features);
    }
    if (j.contains("learning")) {
      const auto& l = j["learning"];
      c.k = l.value("k", c.k);
      c.k_min = l.value("k_min", c.k_min);
      c.k_max = l.value("k_max", c.k_max);
      c.restarts = l.value("restarts", c.restarts);
      c.n_kept = l.value("n_kept", c.n_kept);
    }
    if (j.contains("calibration")) {
      const auto& cal = j["calibration"];
      c.calibration_budget = cal.value("budget", c.calibration_budget);
      c.calibration_starts = cal.value("starts", c.calibration_starts);
      const auto mode = cal.value("rmse_mode", std::string("whole_seconds"));
      if (mode == "whole_seconds") c.rmse_mode = RmseMode::kWholeSeconds;
      else if (mode == "all_frames") c.rmse_mode = RmseMode::kAllFrames;
      else throw ConfigError("rmse_mode must be 'whole_seconds' or 'all_frames'");
      if (cal.contains("bounds")) {
        for (std::size_t i = 0; i < kCalibratedParams; ++i) {
          if (!cal["bounds"].contains(param_name(i))) continue;
          const auto range = cal["bounds"][param_name(i)].get<std::vector<double>>();
          if (range.size() != 2) throw ConfigError(std::string("bounds for ") + param_name(i) + " need [lo, hi]");
          c.bounds.lo[i] = range[0];
          c.bounds.hi[i] = range[1];
        }
      }
    }
    if (j.contains("recognition")) c.sigma = j["recognition"].value("sigma", c.sigma);
    if (j.contains("benchmark")) {
      const auto& b = j["benchmark"];
      c.t_durs = b.value("t_durs", c.t_durs);
      c.sweep_sigmas = b.value("sweep_sigmas", c.sweep_sigmas);
      c.sweep_t_durs = b.value("sweep_t_durs", c.sweep_t_durs);
    }
    if (j.contains("style_labels")) {
      for (const auto& [key, value] : j["style_labels"].items()) c.style_labels[std::stoi(key)] = value.get<std::string>();
    }
    c.seed = j.value("seed", c.seed);
    c.workers = j.value("workers", c.workers);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw ConfigError("style_labels keys must be cluster indices");
  }
  c.validate();
  return c;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return config_from_json(j, std::filesystem::path(path).parent_path().string());
}

nlohmann::json config_to_json(const PipelineConfig& c) {
  const auto& m = c.ingest.columns;
  nlohmann::json bounds;
  for (std::size_t i = 0; i < kCalibratedParams; ++i) bounds[param_name(i)] = {c.bounds.lo[i], c.bounds.hi[i]};
  nlohmann::json labels = nlohmann::json::object();
  for (const auto& [k, v] : c.style_labels) labels[std::to_string(k)] = v;
  return nlohmann::json{
      {"input",
       {{"path", c.input_path},
        {"units", c.ingest.units == LengthUnit::kFeet ? "feet" : "meters"},
        {"delimiter", c.ingest.delimiter == 0 ? "auto" : (c.ingest.delimiter == ',' ? "comma" : "whitespace")},
        {"header", c.ingest.has_header},
        {"gap_convention", gap_name(c.ingest.gap_convention)},
        {"lanes", std::vector<int>(c.ingest.lanes.begin(), c.ingest.lanes.end())},
        {"no_leader_id", c.ingest.no_leader_id},
        {"columns",
         {{"vehicle_id", ref_json(m.vehicle_id)},
          {"frame", ref_json(m.frame)},
          {"position", ref_json(m.position)},
          {"speed", ref_json(m.speed)},
          {"acceleration", ref_json(m.acceleration)},
          {"lane", ref_json(m.lane)},
          {"leader_id", ref_json(m.leader_id)},
          {"space_headway", ref_json(m.space_headway)},
          {"vehicle_length", ref_json(m.vehicle_length)}}}}},
      {"extraction", {{"min_duration", c.min_duration}}},
      {"split", {{"fraction", c.split_fraction}, {"strategy", c.split_strategy == SplitStrategy::kRandom ? "random" : "ordered"}}},
      {"features", {{"window", c.feature_window}, {"standardize", c.standardize_features}}},
      {"learning", {{"k", c.k}, {"k_min", c.k_min}, {"k_max", c.k_max}, {"restarts", c.restarts}, {"n_kept", c.n_kept}}},
      {"calibration",
       {{"budget", c.calibration_budget},
        {"starts", c.calibration_starts},
        {"rmse_mode", c.rmse_mode == RmseMode::kWholeSeconds ? "whole_seconds" : "all_frames"},
        {"bounds", bounds}}},
      {"recognition", {{"sigma", c.sigma}}},
      {"benchmark", {{"t_durs", c.t_durs}, {"sweep_sigmas", c.sweep_sigmas}, {"sweep_t_durs", c.sweep_t_durs}}},
      {"style_labels", labels},
      {"seed", c.seed}};
}

std::uint64_t split_seed(const PipelineConfig& c) { return mix_seed(c.seed, 1); }
std::uint64_t kmeans_seed(const PipelineConfig& c) { return mix_seed(c.seed, 2); }
std::uint64_t calibration_seed(const PipelineConfig& c, int cluster) {
  return mix_seed(c.seed, 100 + static_cast<std::uint64_t>(cluster + 1));
}

}  // namespace drivestyle
