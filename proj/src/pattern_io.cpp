#include "fmpp/pattern_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fmpp/errors.hpp"

using nlohmann::json;

namespace fmpp {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_io("cannot open for writing: " + path);
  out << text;
  if (!out) throw_io("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_io("cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
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

double parse_double(const std::string& s, const std::string& context) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  while (first < last && (*first == ' ' || *first == '\t')) ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  while (ptr < last && (*ptr == ' ' || *ptr == '\t' || *ptr == '\r')) ++ptr;
  if (ec != std::errc() || ptr != last)
    throw_invalid("bad numeric field '" + s + "' in " + context);
  return v;
}

}  // namespace

std::string pattern_to_csv(const MarkedPointPattern& pattern) {
  std::ostringstream out;
  std::size_t t = pattern.empty() ? 0 : pattern.mark(0).size();
  out << "x,y";
  for (std::size_t k = 0; k < t; ++k) out << ",f_" << k;
  out << "\n";
  for (int i = 0; i < pattern.size(); ++i) {
    out << format_double(pattern.point(i).x) << "," << format_double(pattern.point(i).y);
    for (double v : pattern.mark(i).values) out << "," << format_double(v);
    out << "\n";
  }
  return out.str();
}

std::string pattern_sidecar_json(const MarkedPointPattern& pattern,
                                 const std::string& covariates_json) {
  json side;
  side["window"] = {{"x_min", pattern.window().x_min},
                    {"x_max", pattern.window().x_max},
                    {"y_min", pattern.window().y_min},
                    {"y_max", pattern.window().y_max}};
  json grid = json::array();
  if (!pattern.empty()) {
    for (double t : *pattern.mark(0).times) grid.push_back(t);
  }
  side["time_grid"] = grid;
  if (!covariates_json.empty()) side["covariates"] = json::parse(covariates_json);
  return side.dump(2) + "\n";
}

void write_pattern(const MarkedPointPattern& pattern, const std::string& csv_path,
                   const std::string& sidecar_path, const std::string& covariates_json) {
  write_text_file(csv_path, pattern_to_csv(pattern));
  write_text_file(sidecar_path, pattern_sidecar_json(pattern, covariates_json));
}

MarkedPointPattern pattern_from_csv(const std::string& csv_text,
                                    const std::string& sidecar_text) {
  json side;
  try {
    side = json::parse(sidecar_text);
  } catch (const json::exception& e) {
    throw_invalid(std::string("bad sidecar JSON: ") + e.what());
  }
  if (!side.contains("window")) throw_invalid("sidecar missing 'window'");
  const auto& w = side["window"];
  Window window(w.at("x_min").get<double>(), w.at("x_max").get<double>(),
                w.at("y_min").get<double>(), w.at("y_max").get<double>());

  auto grid = std::make_shared<TimeGrid>();
  if (side.contains("time_grid"))
    for (const auto& t : side["time_grid"]) grid->push_back(t.get<double>());

  std::istringstream in(csv_text);
  std::string line;
  if (!std::getline(in, line)) throw_invalid("pattern CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split_csv_line(line);
  if (header.size() < 2 || header[0] != "x" || header[1] != "y")
    throw_invalid("pattern CSV header must start with x,y");
  std::size_t mark_len = header.size() - 2;
  if (grid->size() != mark_len)
    throw_invalid("sidecar time grid length " + std::to_string(grid->size()) +
                  " does not match CSV mark columns " + std::to_string(mark_len));

  std::vector<GroundPoint> points;
  std::vector<FunctionalMark> marks;
  int row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw_invalid("ragged row " + std::to_string(row) + ": expected " +
                    std::to_string(header.size()) + " fields, got " +
                    std::to_string(fields.size()));
    std::string ctx = "row " + std::to_string(row);
    GroundPoint p{parse_double(fields[0], ctx), parse_double(fields[1], ctx)};
    std::vector<double> values(mark_len);
    for (std::size_t k = 0; k < mark_len; ++k) values[k] = parse_double(fields[k + 2], ctx);
    points.push_back(p);
    marks.emplace_back(grid, std::move(values));
  }

  return MarkedPointPattern(window, std::move(points), std::move(marks));
}

MarkedPointPattern read_pattern(const std::string& csv_path,
                                const std::string& sidecar_path) {
  return pattern_from_csv(read_text_file(csv_path), read_text_file(sidecar_path));
}

}  // namespace fmpp
