#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aqmap/grid.hpp"
#include "aqmap/sensing.hpp"

namespace aqmap {

/// One parsed line of a day file: `x y z aqi [u] [temp] [hum]`.
struct DayRow {
  Sample sample;
  bool has_wind = false;
  std::optional<double> temperature;
  std::optional<double> humidity;
  std::size_t line = 0;
};

/// One complete measurement over a day.
struct DatasetDay {
  Scenario scenario = Scenario::planar;
  std::string label;
  std::vector<DayRow> rows;
  std::vector<std::string> warnings;       // malformed lines, with line numbers
  std::vector<std::size_t> off_lattice;    // line numbers of samples off the lattice

  /// Samples; rows without a wind column get `default_wind`.
  SampleSet samples(double default_wind = 2.5) const;
};

struct ParseOptions {
  double lattice_spacing = 5.0;
  double lattice_tolerance = 1e-6;
};

/// Parses the flat text form. '#' starts a comment; fields are separated
/// by whitespace and/or commas. Optional header comments
/// `# scenario: 2D|3D` and `# date: <label>` are honoured. Throws
/// InputError("no samples ...") when nothing parses.
DatasetDay parse_day_text(std::string_view text, const ParseOptions& options = {});
DatasetDay parse_day(const std::filesystem::path& path, const ParseOptions& options = {});

/// Matrix form: one row per xy position of `grid` (row-major), one column
/// per z level. Positions are the grid's cube centers.
DatasetDay parse_day_matrix_text(std::string_view text, const GridSpec& grid);

/// Canonical text form; shortest round-trip decimal for every number, so
/// parse(write(day)) reproduces the samples bit for bit.
std::string write_day(const DatasetDay& day);
void write_day_file(const std::filesystem::path& path, const DatasetDay& day);

/// Every `*.txt` in `dir`, sorted by file name. Throws InputError("no dataset
/// found ...") when the directory is missing or holds no day files.
std::vector<DatasetDay> load_days(const std::filesystem::path& dir, const ParseOptions& options = {});

/// Dataset day holding the ground truth (or noisy measurements) of a field.
DatasetDay day_from_samples(Scenario scenario, std::string label, const SampleSet& samples);

/// Per-cube values from a day, matched by position; nullopt where absent.
std::vector<std::optional<double>> day_to_cube_values(const DatasetDay& day, const GridSpec& grid);

}  // namespace aqmap
