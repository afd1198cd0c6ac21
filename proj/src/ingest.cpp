#include "drivestyle/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <unordered_map>

#include "drivestyle/errors.hpp"

namespace drivestyle {

std::size_t samples_for(double seconds) {
  if (!(seconds >= 0.0)) throw DataError("negative duration");
  return static_cast<std::size_t>(std::llround(seconds / kSampleDt));
}

bool pair_order(const CarFollowingPair& a, const CarFollowingPair& b) {
  if (a.follower_id != b.follower_id) return a.follower_id < b.follower_id;
  if (a.start_frame() != b.start_frame()) return a.start_frame() < b.start_frame();
  return a.leader_id < b.leader_id;
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line, char delimiter) {
  std::vector<std::string_view> fields;
  if (delimiter == ' ') {
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
      if (i >= line.size()) break;
      std::size_t j = i;
      while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
      fields.push_back(line.substr(i, j - i));
      i = j;
    }
    return fields;
  }
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(delimiter, start);
    std::string_view field = line.substr(start, pos == std::string_view::npos ? pos : pos - start);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) field.remove_suffix(1);
    if (field.size() >= 2 && field.front() == '"' && field.back() == '"') {
      field = field.substr(1, field.size() - 2);
    }
    fields.push_back(field);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

double parse_number(std::string_view text, std::size_t line, const char* field) {
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw RecordError(line, std::string("field '") + field + "' is not a number: '" + std::string(text) + "'");
  }
  return value;
}

struct ResolvedColumns {
  std::size_t vehicle_id, frame, position, speed, lane, leader_id;
  std::optional<std::size_t> acceleration, space_headway, vehicle_length;
};

std::size_t resolve(const ColumnRef& ref, const std::vector<std::string>& header, const char* field) {
  if (const auto* index = std::get_if<std::size_t>(&ref)) return *index;
  const auto& name = std::get<std::string>(ref);
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) {
    throw ConfigError(std::string("required column for '") + field + "' not found: '" + name + "'");
  }
  return static_cast<std::size_t>(it - header.begin());
}

std::optional<std::size_t> resolve_optional(const std::optional<ColumnRef>& ref,
                                             const std::vector<std::string>& header) {
  if (!ref) return std::nullopt;
  if (const auto* index = std::get_if<std::size_t>(&*ref)) return *index;
  const auto& name = std::get<std::string>(*ref);
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) return std::nullopt;
  return static_cast<std::size_t>(it - header.begin());
}

ResolvedColumns resolve_columns(const ColumnMapping& m, const std::vector<std::string>& header) {
  if (header.empty()) {
    for (const ColumnRef* ref : {&m.vehicle_id, &m.frame, &m.position, &m.speed, &m.lane, &m.leader_id}) {
      if (std::holds_alternative<std::string>(*ref)) {
        throw ConfigError("column names need a header row; use indices for headerless files");
      }
    }
  }
  ResolvedColumns c{resolve(m.vehicle_id, header, "vehicle_id"),
                    resolve(m.frame, header, "frame"),
                    resolve(m.position, header, "position"),
                    resolve(m.speed, header, "speed"),
                    resolve(m.lane, header, "lane"),
                    resolve(m.leader_id, header, "leader_id"),
                    resolve_optional(m.acceleration, header),
                    resolve_optional(m.space_headway, header),
                    resolve_optional(m.vehicle_length, header)};
  return c;
}

struct RawRow {
  TrajectorySample sample;
  std::optional<double> headway;
  bool has_acceleration = false;
};

// Central differences inside runs of consecutive frames, one-sided at run ends.
void fill_accelerations(std::vector<TrajectorySample>& track) {
  const std::size_t n = track.size();
  std::vector<double> acc(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const bool has_prev = i > 0 && track[i].frame - track[i - 1].frame == 1;
    const bool has_next = i + 1 < n && track[i + 1].frame - track[i].frame == 1;
    if (has_prev && has_next) {
      acc[i] = (track[i + 1].speed - track[i - 1].speed) / (2.0 * kSampleDt);
    } else if (has_next) {
      acc[i] = (track[i + 1].speed - track[i].speed) / kSampleDt;
    } else if (has_prev) {
      acc[i] = (track[i].speed - track[i - 1].speed) / kSampleDt;
    }
  }
  for (std::size_t i = 0; i < n; ++i) track[i].acceleration = acc[i];
}

}  // namespace

std::vector<TrajectorySample> load_trajectories(std::istream& in, const IngestConfig& config) {
  std::string line;
  std::size_t line_no = 0;
  char delimiter = config.delimiter;
  std::vector<std::string> header;
  std::optional<ResolvedColumns> cols;

  auto detect = [&](const std::string& text) {
    if (delimiter != 0) return;
    delimiter = text.find(',') != std::string::npos ? ',' : ' ';
  };

  const double scale = config.units == LengthUnit::kFeet ? kFeetToMeters : 1.0;
  std::vector<RawRow> rows;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (line.front() == '#') continue;
    detect(line);
    const auto fields = split_fields(line, delimiter);
    if (!cols) {
      if (config.has_header) {
        for (auto f : fields) header.emplace_back(f);
        cols = resolve_columns(config.columns, header);
        continue;
      }
      cols = resolve_columns(config.columns, header);
    }

    auto field = [&](std::size_t index, const char* name) -> std::string_view {
      if (index >= fields.size()) {
        throw RecordError(line_no, std::string("missing field '") + name + "' (expected column " +
                                       std::to_string(index) + ", row has " + std::to_string(fields.size()) + ")");
      }
      return fields[index];
    };

    RawRow row;
    TrajectorySample& s = row.sample;
    const double id = parse_number(field(cols->vehicle_id, "vehicle_id"), line_no, "vehicle_id");
    const double frame = parse_number(field(cols->frame, "frame"), line_no, "frame");
    if (id != std::floor(id) || frame != std::floor(frame)) {
      throw RecordError(line_no, "vehicle id and frame must be integers");
    }
    s.vehicle_id = static_cast<VehicleId>(id);
    s.frame = static_cast<FrameIndex>(frame);
    s.time = static_cast<double>(s.frame) * kSampleDt;
    s.position = parse_number(field(cols->position, "position"), line_no, "position") * scale;
    s.speed = parse_number(field(cols->speed, "speed"), line_no, "speed") * scale;
    if (s.speed < 0.0) throw RecordError(line_no, "negative speed");
    if (cols->acceleration) {
      s.acceleration = parse_number(field(*cols->acceleration, "acceleration"), line_no, "acceleration") * scale;
      row.has_acceleration = true;
    }
    s.lane_id = static_cast<int>(parse_number(field(cols->lane, "lane"), line_no, "lane"));
    const double leader = parse_number(field(cols->leader_id, "leader_id"), line_no, "leader_id");
    if (static_cast<VehicleId>(leader) > config.no_leader_id) s.leader_id = static_cast<VehicleId>(leader);
    if (cols->space_headway) {
      row.headway = parse_number(field(*cols->space_headway, "space_headway"), line_no, "space_headway") * scale;
    }
    if (cols->vehicle_length) {
      const double len = parse_number(field(*cols->vehicle_length, "vehicle_length"), line_no, "vehicle_length");
      if (len > 0.0) s.length = len * scale;
    }

    if (!config.lanes.empty() && !config.lanes.contains(s.lane_id)) continue;
    rows.push_back(std::move(row));
  }
  if (!cols && config.has_header) throw ConfigError("input has no header row");

  std::stable_sort(rows.begin(), rows.end(), [](const RawRow& a, const RawRow& b) {
    if (a.sample.vehicle_id != b.sample.vehicle_id) return a.sample.vehicle_id < b.sample.vehicle_id;
    return a.sample.frame < b.sample.frame;
  });
  // Duplicate (vehicle, frame) rows: the first occurrence wins.
  rows.erase(std::unique(rows.begin(), rows.end(),
                         [](const RawRow& a, const RawRow& b) {
                           return a.sample.vehicle_id == b.sample.vehicle_id && a.sample.frame == b.sample.frame;
                         }),
             rows.end());

  // Frame lookup for position-based gaps and leader lengths.
  std::unordered_map<VehicleId, std::map<FrameIndex, std::size_t>> index;
  std::unordered_map<VehicleId, double> lengths;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& s = rows[i].sample;
    index[s.vehicle_id][s.frame] = i;
    if (s.length && !lengths.contains(s.vehicle_id)) lengths[s.vehicle_id] = *s.length;
  }

  std::vector<TrajectorySample> out;
  out.reserve(rows.size());
  for (auto& row : rows) {
    TrajectorySample s = row.sample;
    if (s.leader_id) {
      std::optional<double> gap;
      const auto leader_len = lengths.find(*s.leader_id);
      const TrajectorySample* leader = nullptr;
      if (const auto v = index.find(*s.leader_id); v != index.end()) {
        if (const auto f = v->second.find(s.frame); f != v->second.end()) leader = &rows[f->second].sample;
      }
      switch (config.gap_convention) {
        case GapConvention::kHeadwayMinusLeaderLength:
          if (row.headway) {
            gap = *row.headway - (leader_len != lengths.end() ? leader_len->second : 0.0);
          } else if (leader) {
            gap = leader->position - s.position - (leader_len != lengths.end() ? leader_len->second : 0.0);
          }
          break;
        case GapConvention::kHeadway:
          gap = row.headway;
          break;
        case GapConvention::kFrontBumperPositions:
          if (leader) gap = leader->position - s.position - (leader_len != lengths.end() ? leader_len->second : 0.0);
          break;
        case GapConvention::kCentroidPositions:
          if (leader) {
            const double own = s.length.value_or(0.0);
            const double lead = leader_len != lengths.end() ? leader_len->second : 0.0;
            gap = leader->position - s.position - 0.5 * (own + lead);
          }
          break;
      }
      // Without a positive gap the frame cannot be a car-following frame.
      if (gap && *gap > 0.0) {
        s.gap = *gap;
      } else {
        s.leader_id.reset();
        s.gap = 0.0;
      }
    }
    out.push_back(s);
  }

  for (std::size_t begin = 0; begin < out.size();) {
    std::size_t end = begin;
    while (end < out.size() && out[end].vehicle_id == out[begin].vehicle_id) ++end;
    if (!rows[begin].has_acceleration) {
      std::vector<TrajectorySample> track(out.begin() + static_cast<std::ptrdiff_t>(begin),
                                          out.begin() + static_cast<std::ptrdiff_t>(end));
      fill_accelerations(track);
      std::copy(track.begin(), track.end(), out.begin() + static_cast<std::ptrdiff_t>(begin));
    }
    begin = end;
  }
  return out;
}

std::vector<TrajectorySample> load_trajectories(const std::string& path, const IngestConfig& config) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open trajectory file: " + path);
  return load_trajectories(in, config);
}

std::string file_fingerprint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  char buffer[1 << 16];
  while (in.read(buffer, sizeof buffer) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      hash ^= static_cast<unsigned char>(buffer[i]);
      hash *= 0x100000001b3ULL;
    }
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << hash;
  return os.str();
}

}  // namespace drivestyle
