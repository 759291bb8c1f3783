#include <iostream>
#include <map>
#include <stdexcept>
#include <string>

#include <boost/program_options.hpp>
#include <nlohmann/json.hpp>

#include "aqmap/errors.hpp"
#include "commands.hpp"

namespace po = boost::program_options;
using namespace aqmap;

namespace {

using Command = int (*)(const RunConfig&, const cli::CommandOptions&, std::ostream&);

const std::map<std::string, Command> kCommands = {
    {"simulate", cli::cmd_simulate}, {"fit", cli::cmd_fit},   {"plan", cli::cmd_plan},
    {"session", cli::cmd_session},   {"eval", cli::cmd_eval}, {"screen", cli::cmd_screen},
};

void usage(std::ostream& os, const po::options_description& desc) {
  os << "usage: aqmap <simulate|fit|plan|session|eval|screen> [options]\n\n" << desc << '\n';
}

int run(int argc, char** argv) {
  po::options_description desc("options");
  // clang-format off
  desc.add_options()
    ("help,h", "show this help")
    ("config,c", po::value<std::string>(), "JSON run configuration")
    ("scenario", po::value<std::string>(), "2D or 3D")
    ("grid", po::value<std::string>(), "grid dims, e.g. 10x10x1")
    ("neurons", po::value<std::size_t>(), "hidden neurons K")
    ("pdt", po::value<double>(), "PDT threshold for selective monitoring")
    ("delta", po::value<double>(), "selection tolerance")
    ("seed", po::value<std::uint64_t>(), "seed for world, sensors and hidden layer")
    ("budget-min", po::value<double>(), "flight budget in minutes")
    ("out,o", po::value<std::string>(), "output directory")
    ("data", po::value<std::string>(), "dataset directory (simulate, fit, screen)")
    ("model", po::value<std::string>(), "model JSON (plan)")
    ("algorithm", po::value<std::string>(), "pdt-greedy, nearest or sequential")
    ("days", po::value<std::size_t>()->default_value(1), "days to simulate")
    ("noiseless", po::bool_switch(), "simulate without sensor error")
    ("sensor-error", po::value<double>(), "relative sensor error")
    ("cycles", po::value<std::size_t>(), "session cycles to run")
    ("shock-cycle", po::value<std::size_t>(), "session cycle from which the field is scaled")
    ("shock-factor", po::value<double>(), "scale applied from the shock cycle on")
    ("fresh", po::bool_switch(), "session: discard saved state")
    ("thresholds", po::value<std::string>(), "eval thresholds, 0:0.1:0.9 or 0,0.5")
    ("sweep-neurons", po::value<std::string>(), "eval hidden sizes, e.g. 0,50,1000");
  // clang-format on
  po::options_description all;
  all.add(desc).add_options()("command", po::value<std::string>());
  po::positional_options_description pos;
  pos.add("command", 1);

  po::variables_map vm;
  po::store(po::command_line_parser(argc, argv).options(all).positional(pos).run(), vm);
  po::notify(vm);

  if (vm.count("help") || !vm.count("command")) {
    usage(vm.count("help") ? std::cout : std::cerr, desc);
    return vm.count("help") ? 0 : 2;
  }
  const auto cmd = kCommands.find(vm["command"].as<std::string>());
  if (cmd == kCommands.end()) throw InputError("unknown command '" + vm["command"].as<std::string>() + "'");

  RunConfig config = vm.count("config") ? load_config(vm["config"].as<std::string>()) : default_config();
  // scenario first: it resets the scenario's grid, which --grid may then override
  if (vm.count("scenario")) {
    config = apply_config(config, nlohmann::json{{"scenario", vm["scenario"].as<std::string>()}});
  }
  if (vm.count("grid")) config.dims = parse_dims(vm["grid"].as<std::string>());
  if (vm.count("neurons")) config.fit.neurons = vm["neurons"].as<std::size_t>();
  if (vm.count("pdt")) config.pdt_threshold = vm["pdt"].as<double>();
  if (vm.count("delta")) config.delta = vm["delta"].as<double>();
  if (vm.count("seed")) config.seed = config.fit.seed = vm["seed"].as<std::uint64_t>();
  if (vm.count("budget-min")) {
    const double minutes = vm["budget-min"].as<double>();
    if (!(minutes > 0.0)) throw InputError("--budget-min must be positive");
    config.battery.budget = minutes / config.battery.flight_minutes;
  }
  if (vm.count("out")) config.out = vm["out"].as<std::string>();
  if (vm.count("data")) config.data_dir = vm["data"].as<std::string>();
  if (vm.count("algorithm")) config.algorithm = parse_trajectory_algorithm(vm["algorithm"].as<std::string>());
  if (vm.count("sensor-error")) config.sensor_error = vm["sensor-error"].as<double>();
  if (vm.count("cycles")) config.cycles = vm["cycles"].as<std::size_t>();
  if (vm.count("shock-cycle")) config.shock_cycle = vm["shock-cycle"].as<std::size_t>();
  if (vm.count("shock-factor")) config.shock_factor = vm["shock-factor"].as<double>();
  if (vm.count("thresholds")) config.thresholds = cli::parse_thresholds(vm["thresholds"].as<std::string>());
  if (vm.count("sweep-neurons")) config.sweep_neurons = cli::parse_counts(vm["sweep-neurons"].as<std::string>());

  cli::CommandOptions opts;
  if (vm.count("model")) opts.model_path = vm["model"].as<std::string>();
  opts.days = vm["days"].as<std::size_t>();
  opts.noiseless = vm["noiseless"].as<bool>();
  opts.fresh = vm["fresh"].as<bool>();
  return cmd->second(config, opts, std::cout);
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const po::error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    // parameter validation inside the library
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
