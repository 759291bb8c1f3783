#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "aqmap/config.hpp"

namespace aqmap::cli {

// Options that only some commands read.
struct CommandOptions {
  std::optional<std::string> model_path;
  std::size_t days = 1;
  bool noiseless = false;
  bool fresh = false;  // session: ignore saved state
};

int cmd_simulate(const RunConfig& config, const CommandOptions& opts, std::ostream& log);
int cmd_fit(const RunConfig& config, const CommandOptions& opts, std::ostream& log);
int cmd_plan(const RunConfig& config, const CommandOptions& opts, std::ostream& log);
int cmd_session(const RunConfig& config, const CommandOptions& opts, std::ostream& log);
int cmd_eval(const RunConfig& config, const CommandOptions& opts, std::ostream& log);
int cmd_screen(const RunConfig& config, const CommandOptions& opts, std::ostream& log);

/// "0:0.1:0.9" (inclusive range) or "0,0.2,0.4".
std::vector<double> parse_thresholds(const std::string& text);
std::vector<std::size_t> parse_counts(const std::string& text);

}  // namespace aqmap::cli
