#include "aqmap/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "aqmap/errors.hpp"

namespace aqmap {

using nlohmann::json;

namespace {

template <typename T>
void read(const json& obj, const char* key, T& into) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    into = it->get<T>();
  } catch (const json::exception& e) {
    throw InputError(std::string("config: bad value for '") + key + "': " + e.what());
  }
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const char* where) {
  if (!obj.is_object()) throw InputError(std::string("config: '") + where + "' must be an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw InputError(std::string("config: unknown key '") + key + "' in '" + where + "'");
  }
}

void read_plume(const json& obj, const char* where, PlumeParams& p) {
  check_keys(obj, {"lambda", "length", "sigma_y", "sigma_z", "height", "height_max", "wind_floor"}, where);
  read(obj, "lambda", p.lambda);
  read(obj, "length", p.length);
  read(obj, "sigma_y", p.sigma_y);
  read(obj, "sigma_z", p.sigma_z);
  read(obj, "height", p.height);
  read(obj, "height_max", p.height_max);
  read(obj, "wind_floor", p.wind_floor);
}

json plume_json(const PlumeParams& p) {
  return {{"lambda", p.lambda},         {"length", p.length},         {"sigma_y", p.sigma_y},
          {"sigma_z", p.sigma_z},       {"height", p.height},         {"height_max", p.height_max},
          {"wind_floor", p.wind_floor}};
}

}  // namespace

SessionParams RunConfig::session_params() const {
  SessionParams p;
  p.pdt_threshold = pdt_threshold;
  p.delta = delta;
  p.deviation_threshold = deviation_threshold;
  p.reduction = reduction;
  p.algorithm = algorithm;
  p.start_cube = start_cube;
  p.battery = battery;
  p.plume = plume;
  p.fit = fit;
  return p;
}

SweepConfig RunConfig::sweep_config() const {
  SweepConfig c = default_sweep(scenario);
  c.grid = grid();
  c.truth_plume = world;
  c.model_plume = plume;
  c.field = field;
  c.drift_hours = cycle_hours;
  c.sensor_error = sensor_error;
  c.seed = seed;
  c.thresholds = thresholds;
  c.neurons = sweep_neurons;
  c.planner_neurons = fit.neurons;
  c.delta = delta;
  c.reduction = reduction;
  c.battery = battery;
  c.start_cube = start_cube;
  c.fit = fit;
  return c;
}

RunConfig default_config(Scenario scenario) {
  RunConfig c;
  c.scenario = scenario;
  c.dims = scenario == Scenario::planar ? GridSpec::Dims{10, 10, 1} : GridSpec::Dims{4, 4, 10};
  c.battery.budget = default_sweep(scenario).battery.budget;
  return c;
}

RunConfig apply_config(RunConfig c, const json& doc) {
  check_keys(doc,
             {"scenario", "grid", "spacing", "plume", "world", "field", "sensor_error", "neurons", "activation", "tol",
              "max_iter", "rcond", "update_rcond", "seed", "pdt", "delta", "deviation", "reduction", "algorithm", "start_cube",
              "battery", "cycles", "shock_cycle", "shock_factor", "cycle_hours", "thresholds", "sweep_neurons",
              "data_dir", "out"},
             "config");
  if (auto it = doc.find("scenario"); it != doc.end()) {
    if (!it->is_string()) throw InputError("config: 'scenario' must be a string");
    const Scenario s = parse_scenario(it->get<std::string>());
    if (s != c.scenario) {
      // switching scenario resets the grid to that scenario's default
      c.dims = default_config(s).dims;
      c.scenario = s;
    }
  }
  if (auto it = doc.find("grid"); it != doc.end()) {
    if (it->is_string()) {
      c.dims = parse_dims(it->get<std::string>());
    } else {
      std::vector<std::size_t> d;
      read(doc, "grid", d);
      if (d.size() != 3) throw InputError("config: 'grid' needs three dimensions");
      c.dims = {d[0], d[1], d[2]};
    }
  }
  read(doc, "spacing", c.spacing);
  if (auto it = doc.find("plume"); it != doc.end()) read_plume(*it, "plume", c.plume);
  if (auto it = doc.find("world"); it != doc.end()) read_plume(*it, "world", c.world);
  if (auto it = doc.find("field"); it != doc.end()) {
    check_keys(*it,
               {"c_base", "plume_scale", "perturbation", "wind_mean", "wind_variation", "pocket_depth",
                "pocket_width"},
               "field");
    read(*it, "c_base", c.field.c_base);
    read(*it, "plume_scale", c.field.plume_scale);
    read(*it, "perturbation", c.field.perturbation);
    read(*it, "wind_mean", c.field.wind_mean);
    read(*it, "wind_variation", c.field.wind_variation);
    read(*it, "pocket_depth", c.field.pocket_depth);
    read(*it, "pocket_width", c.field.pocket_width);
  }
  read(doc, "sensor_error", c.sensor_error);
  read(doc, "neurons", c.fit.neurons);
  if (auto it = doc.find("activation"); it != doc.end() && it->is_string()) {
    c.fit.activation = parse_activation(it->get<std::string>());
  }
  read(doc, "tol", c.fit.tol);
  read(doc, "max_iter", c.fit.max_iter);
  read(doc, "rcond", c.fit.rcond);
  read(doc, "update_rcond", c.fit.update_rcond);
  read(doc, "seed", c.seed);
  c.fit.seed = c.seed;
  read(doc, "pdt", c.pdt_threshold);
  read(doc, "delta", c.delta);
  read(doc, "deviation", c.deviation_threshold);
  if (auto it = doc.find("reduction"); it != doc.end() && it->is_string()) {
    c.reduction = parse_pdt_reduction(it->get<std::string>());
  }
  if (auto it = doc.find("algorithm"); it != doc.end() && it->is_string()) {
    c.algorithm = parse_trajectory_algorithm(it->get<std::string>());
  }
  read(doc, "start_cube", c.start_cube);
  if (auto it = doc.find("battery"); it != doc.end()) {
    check_keys(*it, {"budget", "hover_time", "flight_minutes", "speed", "hover_power", "travel_power"}, "battery");
    read(*it, "budget", c.battery.budget);
    read(*it, "hover_time", c.battery.hover_time);
    read(*it, "flight_minutes", c.battery.flight_minutes);
    read(*it, "speed", c.battery.speed);
    read(*it, "hover_power", c.battery.hover_power);
    read(*it, "travel_power", c.battery.travel_power);
  }
  read(doc, "cycles", c.cycles);
  if (auto it = doc.find("shock_cycle"); it != doc.end() && !it->is_null()) {
    std::size_t s = 0;
    read(doc, "shock_cycle", s);
    c.shock_cycle = s;
  }
  read(doc, "shock_factor", c.shock_factor);
  read(doc, "cycle_hours", c.cycle_hours);
  read(doc, "thresholds", c.thresholds);
  read(doc, "sweep_neurons", c.sweep_neurons);
  if (auto it = doc.find("data_dir"); it != doc.end()) c.data_dir = it->get<std::string>();
  if (auto it = doc.find("out"); it != doc.end()) c.out = it->get<std::string>();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("config '" + path.string() + "': " + e.what());
  }
  RunConfig base;
  if (auto it = doc.find("scenario"); it != doc.end() && it->is_string()) {
    base = default_config(parse_scenario(it->get<std::string>()));
  }
  return apply_config(base, doc);
}

json config_to_json(const RunConfig& c) {
  json doc = {{"scenario", to_string(c.scenario)},
              {"grid", {c.dims[0], c.dims[1], c.dims[2]}},
              {"spacing", c.spacing},
              {"plume", plume_json(c.plume)},
              {"world", plume_json(c.world)},
              {"field",
               {{"c_base", c.field.c_base},
                {"plume_scale", c.field.plume_scale},
                {"perturbation", c.field.perturbation},
                {"wind_mean", c.field.wind_mean},
                {"wind_variation", c.field.wind_variation},
                {"pocket_depth", c.field.pocket_depth},
                {"pocket_width", c.field.pocket_width}}},
              {"sensor_error", c.sensor_error},
              {"neurons", c.fit.neurons},
              {"activation", to_string(c.fit.activation)},
              {"tol", c.fit.tol},
              {"max_iter", c.fit.max_iter},
              {"rcond", c.fit.rcond},
              {"update_rcond", c.fit.update_rcond},
              {"seed", c.seed},
              {"pdt", c.pdt_threshold},
              {"delta", c.delta},
              {"deviation", c.deviation_threshold},
              {"reduction", to_string(c.reduction)},
              {"algorithm", to_string(c.algorithm)},
              {"start_cube", c.start_cube},
              {"battery",
               {{"budget", c.battery.budget},
                {"hover_time", c.battery.hover_time},
                {"flight_minutes", c.battery.flight_minutes},
                {"speed", c.battery.speed},
                {"hover_power", c.battery.hover_power},
                {"travel_power", c.battery.travel_power}}},
              {"cycles", c.cycles},
              {"shock_cycle", c.shock_cycle ? json(*c.shock_cycle) : json(nullptr)},
              {"shock_factor", c.shock_factor},
              {"cycle_hours", c.cycle_hours},
              {"thresholds", c.thresholds},
              {"sweep_neurons", c.sweep_neurons},
              {"data_dir", c.data_dir.string()},
              {"out", c.out.string()}};
  return doc;
}

GridSpec::Dims parse_dims(const std::string& text) {
  GridSpec::Dims d{1, 1, 1};
  std::size_t axis = 0;
  const char* p = text.data();
  const char* end = p + text.size();
  while (p < end) {
    if (axis >= 3) throw InputError("grid '" + text + "': at most three dimensions");
    std::size_t v = 0;
    auto [next, ec] = std::from_chars(p, end, v);
    if (ec != std::errc{} || v == 0) throw InputError("grid '" + text + "': expected e.g. 10x10x1");
    d[axis++] = v;
    p = next;
    if (p < end) {
      if (*p != 'x' && *p != 'X' && *p != ',') throw InputError("grid '" + text + "': expected e.g. 10x10x1");
      ++p;
      if (p == end) throw InputError("grid '" + text + "': trailing separator");
    }
  }
  if (axis < 2) throw InputError("grid '" + text + "': expected e.g. 10x10x1");
  return d;
}

}  // namespace aqmap
