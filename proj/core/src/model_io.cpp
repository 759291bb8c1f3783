#include <string>

#include <nlohmann/json.hpp>

#include "aqmap/errors.hpp"
#include "aqmap/gpm_nn.hpp"

namespace aqmap {

namespace {

constexpr const char* kFormat = "aqmap.gpm-nn";
constexpr int kVersion = 1;

nlohmann::json vector_json(const Eigen::VectorXd& v) {
  auto arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Eigen::VectorXd vector_from(const nlohmann::json& arr) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) v(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
  return v;
}

}  // namespace

nlohmann::json model_to_json(const GpmNnModel& model) {
  nlohmann::json doc;
  doc["format"] = kFormat;
  doc["version"] = kVersion;

  auto& hidden = doc["hidden"];
  hidden["neurons"] = model.hidden.neurons();
  hidden["inputs"] = model.hidden.inputs();
  hidden["activation"] = std::string(to_string(model.hidden.activation));
  hidden["seed"] = model.hidden.seed;
  hidden["init"] = "uniform[-1,1], unit-norm rows; bias uniform[-1,1]";
  auto rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < model.hidden.weights.rows(); ++r) {
    rows.push_back(vector_json(model.hidden.weights.row(r).transpose()));
  }
  hidden["weights"] = std::move(rows);
  hidden["biases"] = vector_json(model.hidden.biases);
  hidden["input_offset"] = vector_json(model.hidden.input_offset);
  hidden["input_scale"] = vector_json(model.hidden.input_scale);

  doc["beta"] = vector_json(model.beta);
  const auto& p = model.plume;
  doc["plume"] = {{"lambda", p.lambda},   {"length", p.length},         {"sigma_y", p.sigma_y},
                  {"sigma_z", p.sigma_z}, {"height", p.height},         {"height_max", p.height_max},
                  {"wind_floor", p.wind_floor}};
  doc["c_static"] = model.c_static;
  doc["noise_sigma"] = model.noise_sigma;
  doc["rcond"] = model.rcond;
  doc["update_rcond"] = model.update_rcond;
  return doc;
}

GpmNnModel model_from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("format").get<std::string>() != kFormat) throw InputError("model file: unexpected format tag");
    if (doc.at("version").get<int>() != kVersion) {
      throw InputError("model file: unsupported version " + doc.at("version").dump());
    }
    GpmNnModel model;
    const auto& hidden = doc.at("hidden");
    const auto neurons = hidden.at("neurons").get<std::size_t>();
    const auto inputs = hidden.at("inputs").get<std::size_t>();
    model.hidden.activation = parse_activation(hidden.at("activation").get<std::string>());
    model.hidden.seed = hidden.at("seed").get<std::uint64_t>();
    const auto& rows = hidden.at("weights");
    if (rows.size() != neurons) throw InputError("model file: weight row count differs from neuron count");
    model.hidden.weights.resize(static_cast<Eigen::Index>(neurons), static_cast<Eigen::Index>(inputs));
    for (std::size_t r = 0; r < neurons; ++r) {
      if (rows[r].size() != inputs) throw InputError("model file: weight row has wrong length");
      model.hidden.weights.row(static_cast<Eigen::Index>(r)) = vector_from(rows[r]).transpose();
    }
    model.hidden.biases = vector_from(hidden.at("biases"));
    model.hidden.input_offset = vector_from(hidden.at("input_offset"));
    model.hidden.input_scale = vector_from(hidden.at("input_scale"));
    if (static_cast<std::size_t>(model.hidden.biases.size()) != neurons ||
        static_cast<std::size_t>(model.hidden.input_offset.size()) != inputs ||
        static_cast<std::size_t>(model.hidden.input_scale.size()) != inputs) {
      throw InputError("model file: hidden layer vectors have inconsistent sizes");
    }

    model.beta = vector_from(doc.at("beta"));
    if (static_cast<std::size_t>(model.beta.size()) != neurons + 2) {
      throw InputError("model file: beta must have neurons + 2 entries");
    }
    const auto& p = doc.at("plume");
    model.plume.lambda = p.at("lambda").get<double>();
    model.plume.length = p.at("length").get<double>();
    model.plume.sigma_y = p.at("sigma_y").get<double>();
    model.plume.sigma_z = p.at("sigma_z").get<double>();
    model.plume.height = p.at("height").get<double>();
    model.plume.height_max = p.at("height_max").get<double>();
    model.plume.wind_floor = p.at("wind_floor").get<double>();
    model.plume.validate();
    model.c_static = doc.at("c_static").get<double>();
    model.noise_sigma = doc.at("noise_sigma").get<double>();
    model.rcond = doc.at("rcond").get<double>();
    model.update_rcond = doc.at("update_rcond").get<double>();
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("model file: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("model file: ") + e.what());
  }
}

std::string serialize_model(const GpmNnModel& model) { return model_to_json(model).dump(2) + "\n"; }

GpmNnModel parse_model(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("model file is not valid JSON: ") + e.what());
  }
  return model_from_json(doc);
}

}  // namespace aqmap
