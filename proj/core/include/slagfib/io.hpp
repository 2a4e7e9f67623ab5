#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "slagfib/certificate.hpp"
#include "slagfib/flat_model.hpp"

namespace slagfib {

/// Writes to a sibling temporary file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_text(const std::filesystem::path& path);
nlohmann::json read_json(const std::filesystem::path& path);

/// Structure record: the recipe plus the unscaled potentials and the derived
/// (a, theta). Reading rebuilds the structure and checks (a, theta).
nlohmann::json structure_to_json(const GeneratedStructure& g);
GeneratedStructure structure_from_json(const nlohmann::json& j);

nlohmann::json certificate_to_json(const IFTCertificate& c);
IFTCertificate certificate_from_json(const nlohmann::json& j);

/// Pretty JSON text with a trailing newline.
std::string dump(const nlohmann::json& j);

}  // namespace slagfib
