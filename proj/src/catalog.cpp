#include "fmpp/catalog.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fmpp/errors.hpp"
#include "fmpp/pattern_io.hpp"

using nlohmann::json;

namespace fmpp {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      fields.emplace_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return fields;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text,
                                                const std::string& what) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    rows.push_back(split_line(line));
  }
  require(!rows.empty(), what + " CSV is empty");
  return rows;
}

double to_double(const std::string& s, const std::string& context) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw_invalid("bad numeric field '" + s + "' in " + context);
  return v;
}

std::vector<double> resample_linear(const std::vector<double>& values, int target) {
  const int n = static_cast<int>(values.size());
  std::vector<double> out(static_cast<std::size_t>(target));
  for (int k = 0; k < target; ++k) {
    double pos = static_cast<double>(k) * (n - 1) / (target - 1);
    int lo = static_cast<int>(pos);
    if (lo >= n - 1) {
      out[static_cast<std::size_t>(k)] = values[static_cast<std::size_t>(n - 1)];
      continue;
    }
    double frac = pos - lo;
    out[static_cast<std::size_t>(k)] = values[static_cast<std::size_t>(lo)] * (1.0 - frac) +
                                       values[static_cast<std::size_t>(lo) + 1] * frac;
  }
  return out;
}

}  // namespace

IngestedCatalog ingest_catalog(const std::string& events_csv_text,
                               const std::string& waveforms_csv_text,
                               const std::string& sidecar_json_text,
                               std::optional<int> resample_to) {
  json side;
  try {
    side = json::parse(sidecar_json_text);
  } catch (const json::exception& e) {
    throw_invalid(std::string("bad sidecar JSON: ") + e.what());
  }
  const auto& w = side.at("window");
  Window window(w.at("x_min").get<double>(), w.at("x_max").get<double>(),
                w.at("y_min").get<double>(), w.at("y_max").get<double>());
  std::vector<double> grid_values;
  for (const auto& t : side.at("time_grid")) grid_values.push_back(t.get<double>());
  require(time_grid_ok(grid_values), "sidecar time grid must be strictly increasing");

  // Waveform matrix: id column + sample columns, all rows equal length.
  auto wave_rows = parse_csv(waveforms_csv_text, "waveform");
  std::size_t wave_cols = wave_rows[0].size();
  require(wave_cols >= 3, "waveform rows need an id and at least 2 samples");
  std::map<std::string, std::vector<double>> waveforms;
  bool wave_header = wave_rows[0][0] == "id";
  for (std::size_t r = wave_header ? 1 : 0; r < wave_rows.size(); ++r) {
    const auto& row = wave_rows[r];
    if (row.size() != wave_cols)
      throw_invalid("ragged-matrix: waveform row " + std::to_string(r) + " has " +
                    std::to_string(row.size()) + " fields, expected " +
                    std::to_string(wave_cols));
    std::vector<double> samples(row.size() - 1);
    for (std::size_t c = 1; c < row.size(); ++c)
      samples[c - 1] = to_double(row[c], "waveform row " + std::to_string(r));
    if (!waveforms.emplace(row[0], std::move(samples)).second)
      throw_invalid("duplicate-event-id: waveform id '" + row[0] + "' repeats");
  }
  require(wave_cols - 1 == grid_values.size(),
          "waveform sample count " + std::to_string(wave_cols - 1) +
              " does not match sidecar time grid length " +
              std::to_string(grid_values.size()));

  // Events table: id,x,y plus pass-through covariate columns.
  auto event_rows = parse_csv(events_csv_text, "events");
  const auto& header = event_rows[0];
  require(header.size() >= 3 && header[0] == "id" && header[1] == "x" && header[2] == "y",
          "events CSV header must start with id,x,y");

  TimeGridPtr grid;
  if (resample_to) {
    require(*resample_to >= 2, "resample grid needs at least 2 samples");
    auto resampled = std::make_shared<TimeGrid>();
    resampled->resize(static_cast<std::size_t>(*resample_to));
    double a = grid_values.front();
    double b = grid_values.back();
    for (int k = 0; k < *resample_to; ++k)
      (*resampled)[static_cast<std::size_t>(k)] =
          a + (b - a) * static_cast<double>(k) / (*resample_to - 1);
    grid = resampled;
  } else {
    grid = std::make_shared<TimeGrid>(grid_values);
  }

  std::vector<GroundPoint> points;
  std::vector<FunctionalMark> marks;
  json covariates = json::object();
  json ids = json::array();
  std::vector<json> extra_columns(header.size() > 3 ? header.size() - 3 : 0, json::array());
  std::map<std::string, int> seen_ids;

  for (std::size_t r = 1; r < event_rows.size(); ++r) {
    const auto& row = event_rows[r];
    if (row.size() != header.size())
      throw_invalid("ragged-matrix: events row " + std::to_string(r) + " has " +
                    std::to_string(row.size()) + " fields, expected " +
                    std::to_string(header.size()));
    const std::string& id = row[0];
    if (!seen_ids.emplace(id, static_cast<int>(r)).second)
      throw_invalid("duplicate-event-id: '" + id + "' repeats in the events CSV");
    auto wave = waveforms.find(id);
    if (wave == waveforms.end())
      throw_invalid("missing-waveform: event '" + id + "' has no waveform row");

    points.push_back({to_double(row[1], "events row " + std::to_string(r)),
                      to_double(row[2], "events row " + std::to_string(r))});
    std::vector<double> samples = wave->second;
    if (resample_to) samples = resample_linear(samples, *resample_to);
    marks.emplace_back(grid, std::move(samples));

    ids.push_back(id);
    for (std::size_t c = 3; c < header.size(); ++c)
      extra_columns[c - 3].push_back(row[c]);
  }

  covariates["id"] = ids;
  for (std::size_t c = 3; c < header.size(); ++c)
    covariates[header[c]] = extra_columns[c - 3];

  IngestedCatalog out{MarkedPointPattern(window, std::move(points), std::move(marks)),
                      covariates.dump()};
  require_valid(out.pattern);
  return out;
}

IngestedCatalog ingest_catalog_files(const std::string& events_path,
                                     const std::string& waveforms_path,
                                     const std::string& sidecar_path,
                                     std::optional<int> resample_to) {
  return ingest_catalog(read_text_file(events_path), read_text_file(waveforms_path),
                        read_text_file(sidecar_path), resample_to);
}

}  // namespace fmpp
