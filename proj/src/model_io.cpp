#include "gaussmc/model_io.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include "gaussmc/errors.hpp"

namespace gaussmc {

namespace {

using nlohmann::json;

double get_real(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw ArgumentError(std::string("model descriptor: '") + key + "' must be a number");
  return j.at(key).get<double>();
}

std::vector<Point2> get_locations(const json& j, std::size_t d) {
  if (!j.contains("locations")) {
    if (d == 0) throw ArgumentError("model descriptor: kernel model needs 'd' or 'locations'");
    return grid_locations(d);
  }
  const auto& arr = j.at("locations");
  if (!arr.is_array()) throw ArgumentError("model descriptor: 'locations' must be an array");
  std::vector<Point2> points;
  points.reserve(arr.size());
  for (const auto& p : arr) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      throw ArgumentError("model descriptor: each location must be [x, y]");
    }
    points.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  if (d != 0 && points.size() != d) throw ArgumentError("model descriptor: 'd' disagrees with 'locations'");
  return points;
}

}  // namespace

CovarianceModel model_from_json(const json& descriptor) {
  if (!descriptor.is_object()) throw ArgumentError("model descriptor: expected a JSON object");
  if (!descriptor.contains("type") || !descriptor.at("type").is_string()) {
    throw ArgumentError("model descriptor: missing string field 'type'");
  }
  const auto type = descriptor.at("type").get<std::string>();
  std::size_t d = 0;
  if (descriptor.contains("d")) {
    const auto& dj = descriptor.at("d");
    if (!dj.is_number_integer() || dj.get<long long>() <= 0) {
      throw ArgumentError("model descriptor: 'd' must be a positive integer");
    }
    d = dj.get<std::size_t>();
  }

  if (type == "identity") {
    if (d == 0) throw ArgumentError("model descriptor: identity model needs 'd'");
    return CovarianceModel::identity(d);
  }
  if (type == "dense") {
    if (!descriptor.contains("values") || !descriptor.at("values").is_array()) {
      throw ArgumentError("model descriptor: dense model needs array 'values'");
    }
    std::vector<double> values;
    for (const auto& v : descriptor.at("values")) {
      if (!v.is_number()) throw ArgumentError("model descriptor: dense values must be numbers");
      values.push_back(v.get<double>());
    }
    if (d == 0) {
      d = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(values.size()))));
    }
    return CovarianceModel::dense(std::move(values), d);
  }
  if (type == "powexp") {
    return CovarianceModel::powered_exponential(get_locations(descriptor, d), get_real(descriptor, "r", 10.0),
                                                get_real(descriptor, "theta", 1.0));
  }
  if (type == "scaledexp") {
    return CovarianceModel::scaled_exponential(get_locations(descriptor, d), get_real(descriptor, "r", 10.0),
                                               get_real(descriptor, "ratio", 7.44 / 8.0));
  }
  throw ArgumentError("model descriptor: unknown type '" + type + "'");
}

json model_to_json(const CovarianceModel& model, bool with_data) {
  json j = json::object();
  j["type"] = std::string(to_string(model.kind()));
  j["d"] = model.dim();
  switch (model.kind()) {
    case ModelKind::Identity:
      break;
    case ModelKind::Dense:
      if (with_data) {
        const auto values = model.dense_values();
        j["values"] = std::vector<double>(values.begin(), values.end());
      }
      break;
    case ModelKind::PoweredExponential:
    case ModelKind::ScaledExponential: {
      j["r"] = model.range();
      if (model.kind() == ModelKind::PoweredExponential) {
        j["theta"] = model.theta();
      } else {
        j["ratio"] = model.ratio();
      }
      if (with_data) {
        json locs = json::array();
        for (const auto& p : model.locations()) locs.push_back({p.x, p.y});
        j["locations"] = std::move(locs);
      }
      break;
    }
  }
  return j;
}

CovarianceModel load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open model file '" + path.string() + "'");
  json descriptor;
  try {
    in >> descriptor;
  } catch (const json::exception& e) {
    throw ArgumentError("model file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return model_from_json(descriptor);
}

}  // namespace gaussmc
