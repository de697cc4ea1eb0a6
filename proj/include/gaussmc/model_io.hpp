#pragma once

#include <filesystem>

#include <json.hpp>

#include "gaussmc/covariance.hpp"

namespace gaussmc {

/// Model descriptor:
///   {"type": "dense" | "powexp" | "scaledexp" | "identity", "d": int,
///    "values": [...], "locations": [[x, y], ...], "r": real, "theta": real,
///    "ratio": real}
/// Dense values are row-major. Kernel descriptors without "locations" use
/// grid_locations(d). "d" may be omitted when values or locations fix it.
CovarianceModel model_from_json(const nlohmann::json& descriptor);

// Full descriptor (values and locations included) when with_data is set,
// otherwise only type, d and scalar parameters.
nlohmann::json model_to_json(const CovarianceModel& model, bool with_data = true);

// Unreadable files and malformed descriptors raise ArgumentError.
CovarianceModel load_model_file(const std::filesystem::path& path);

}  // namespace gaussmc
