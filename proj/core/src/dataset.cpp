#include "aqmap/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "aqmap/errors.hpp"

namespace aqmap {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

// Splits on whitespace and commas; nullopt when a field is not a number.
std::optional<std::vector<double>> split_numbers(std::string_view line) {
  std::vector<double> out;
  std::size_t pos = 0;
  auto is_sep = [](char c) { return c == ' ' || c == '\t' || c == ',' || c == '\r'; };
  while (pos < line.size()) {
    while (pos < line.size() && is_sep(line[pos])) ++pos;
    if (pos >= line.size()) break;
    std::size_t end = pos;
    while (end < line.size() && !is_sep(line[end])) ++end;
    double v = 0.0;
    const char* first = line.data() + pos;
    const char* last = line.data() + end;
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) return std::nullopt;
    out.push_back(v);
    pos = end;
  }
  return out;
}

bool on_lattice(double v, const ParseOptions& o) {
  const double r = v / o.lattice_spacing;
  return std::abs(r - std::round(r)) * o.lattice_spacing <= o.lattice_tolerance;
}

void append_number(std::string& out, double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

void apply_header(std::string_view comment, DatasetDay& day, bool& scenario_given) {
  comment = trim(comment);
  auto value_of = [&](std::string_view key) -> std::optional<std::string_view> {
    if (comment.substr(0, key.size()) != key) return std::nullopt;
    return trim(comment.substr(key.size()));
  };
  if (auto v = value_of("scenario:")) {
    day.scenario = parse_scenario(*v);
    scenario_given = true;
  } else if (auto d = value_of("date:")) {
    day.label = std::string(*d);
  }
}

}  // namespace

SampleSet DatasetDay::samples(double default_wind) const {
  SampleSet out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    Sample s = r.sample;
    if (!r.has_wind) s.wind = default_wind;
    out.push_back(s);
  }
  return out;
}

DatasetDay parse_day_text(std::string_view text, const ParseOptions& options) {
  DatasetDay day;
  bool scenario_given = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    const auto hash = line.find('#');
    if (hash != std::string_view::npos) {
      apply_header(line.substr(hash + 1), day, scenario_given);
      line = line.substr(0, hash);
    }
    if (trim(line).empty()) continue;

    const auto values = split_numbers(line);
    if (!values) {
      day.warnings.push_back("line " + std::to_string(line_no) + ": non-numeric field");
      continue;
    }
    if (values->size() < 4 || values->size() > 7) {
      day.warnings.push_back("line " + std::to_string(line_no) + ": expected 4 to 7 numbers, got " +
                             std::to_string(values->size()));
      continue;
    }
    const auto& v = *values;
    DayRow row;
    row.line = line_no;
    row.sample.position = Vec3(v[0], v[1], v[2]);
    row.sample.aqi = v[3];
    if (v[3] < 0.0) {
      day.warnings.push_back("line " + std::to_string(line_no) + ": negative AQI");
      continue;
    }
    if (v.size() >= 5) {
      if (v[4] < 0.0) {
        day.warnings.push_back("line " + std::to_string(line_no) + ": negative wind speed");
        continue;
      }
      row.sample.wind = v[4];
      row.has_wind = true;
    }
    if (v.size() >= 6) row.temperature = v[5];
    if (v.size() >= 7) row.humidity = v[6];
    if (!on_lattice(v[0], options) || !on_lattice(v[1], options) || !on_lattice(v[2], options)) {
      day.off_lattice.push_back(line_no);
    }
    day.rows.push_back(row);
  }
  if (day.rows.empty()) throw InputError("no samples in dataset day");

  const bool all_ground = std::all_of(day.rows.begin(), day.rows.end(),
                                      [](const DayRow& r) { return r.sample.position.z() == 0.0; });
  if (!scenario_given) {
    day.scenario = all_ground ? Scenario::planar : Scenario::volumetric;
  } else if (day.scenario == Scenario::planar && !all_ground) {
    day.warnings.push_back("2D day contains samples with z != 0");
  }
  return day;
}

DatasetDay parse_day(const std::filesystem::path& path, const ParseOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read dataset file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    DatasetDay day = parse_day_text(buf.str(), options);
    if (day.label.empty()) day.label = path.stem().string();
    return day;
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

DatasetDay parse_day_matrix_text(std::string_view text, const GridSpec& grid) {
  DatasetDay day;
  day.scenario = grid.planar() ? Scenario::planar : Scenario::volumetric;
  std::size_t line_no = 0;
  std::size_t row_index = 0;
  std::size_t pos = 0;
  const std::size_t plane = grid.nx() * grid.ny();
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (trim(line).empty()) continue;
    const auto values = split_numbers(line);
    if (!values || values->size() != grid.nz()) {
      day.warnings.push_back("line " + std::to_string(line_no) + ": expected " + std::to_string(grid.nz()) +
                             " AQI values");
      ++row_index;
      continue;
    }
    if (row_index >= plane) {
      day.warnings.push_back("line " + std::to_string(line_no) + ": more rows than xy positions");
      continue;
    }
    for (std::size_t k = 0; k < grid.nz(); ++k) {
      DayRow row;
      row.line = line_no;
      row.sample.position = grid.center(CubeIndex{row_index % grid.nx(), row_index / grid.nx(), k});
      row.sample.aqi = (*values)[k];
      day.rows.push_back(row);
    }
    ++row_index;
  }
  if (day.rows.empty()) throw InputError("no samples in dataset day");
  return day;
}

std::string write_day(const DatasetDay& day) {
  std::string out = "# aqmap dataset v1\n# scenario: ";
  out += to_string(day.scenario);
  out += '\n';
  if (!day.label.empty()) out += "# date: " + day.label + "\n";
  out += "# x y z aqi [u] [temp] [hum]\n";
  for (const auto& r : day.rows) {
    append_number(out, r.sample.position.x());
    out += ' ';
    append_number(out, r.sample.position.y());
    out += ' ';
    append_number(out, r.sample.position.z());
    out += ' ';
    append_number(out, r.sample.aqi);
    const bool extra = r.temperature || r.humidity;
    if (r.has_wind || extra) {
      out += ' ';
      append_number(out, r.has_wind ? r.sample.wind : 0.0);
    }
    if (extra) {
      out += ' ';
      append_number(out, r.temperature.value_or(0.0));
    }
    if (r.humidity) {
      out += ' ';
      append_number(out, *r.humidity);
    }
    out += '\n';
  }
  return out;
}

void write_day_file(const std::filesystem::path& path, const DatasetDay& day) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write dataset file " + path.string());
  out << write_day(day);
}

std::vector<DatasetDay> load_days(const std::filesystem::path& dir, const ParseOptions& options) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) throw InputError("no dataset found: " + dir.string() + " is not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
  }
  if (files.empty()) throw InputError("no dataset found in " + dir.string());
  std::sort(files.begin(), files.end());
  std::vector<DatasetDay> days;
  days.reserve(files.size());
  for (const auto& f : files) days.push_back(parse_day(f, options));
  return days;
}

DatasetDay day_from_samples(Scenario scenario, std::string label, const SampleSet& samples) {
  DatasetDay day;
  day.scenario = scenario;
  day.label = std::move(label);
  std::size_t line = 0;
  for (const auto& s : samples) {
    DayRow r;
    r.sample = s;
    r.has_wind = true;
    r.line = ++line;
    day.rows.push_back(r);
  }
  return day;
}

std::vector<std::optional<double>> day_to_cube_values(const DatasetDay& day, const GridSpec& grid) {
  std::vector<std::optional<double>> values(grid.cube_count());
  for (const auto& r : day.rows) {
    if (auto idx = grid.locate(r.sample.position)) values[grid.linear(*idx)] = r.sample.aqi;
  }
  return values;
}

}  // namespace aqmap
