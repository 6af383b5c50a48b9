#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "sopf/parametrization.hpp"
#include "sopf/quadratic_system.hpp"
#include "sopf/stability.hpp"

namespace sopf::io {

using Json = nlohmann::json;

/// Row-major nested arrays.
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

Json parametrization_to_json(const StableParametrization& p);
StableParametrization parametrization_from_json(const Json& j);

/// {certified, hurwitz, abscissa, monotone, sigma_min_R,
///  energy_preserving, energy_preserving_violation,
///  trapping_radius_per_unit_input, generalized, reason}
/// Non-finite numbers are written as null.
Json certificate_to_json(const CertificationReport& report);

/// A learned or reference model on disk.
struct ModelDocument {
  std::string kind;  ///< "stable", "stable_generalized", "baseline" or "ground_truth"
  QuadraticControlSystem system;
  std::optional<StableParametrization> parametrization;
  Json config = Json::object();
  Json training = Json::object();
  /// Certificate report stored with the model (recomputed on write).
  Json certificate = Json::object();
};

Json model_to_json(const ModelDocument& doc);
ModelDocument model_from_json(const Json& j);

/// Writes the model with its certificate report (monotone, or generalized
/// with the parametrization's Q when one is present).
void write_model(const std::filesystem::path& path, ModelDocument doc);
ModelDocument read_model(const std::filesystem::path& path);

/// Pretty-printed JSON with a trailing newline.
void write_json(const std::filesystem::path& path, const Json& j);
Json read_json(const std::filesystem::path& path);

/// The certificate appropriate for a model document.
CertificationReport certify_model(const ModelDocument& doc);

}  // namespace sopf::io
