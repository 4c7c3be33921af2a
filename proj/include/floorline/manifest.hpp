#ifndef FLOORLINE_MANIFEST_HPP
#define FLOORLINE_MANIFEST_HPP

#include "floorline/absorption.hpp"
#include "floorline/parity_check.hpp"

#include <json.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>

namespace floorline {

inline constexpr const char* kVersion = "floorline 0.3.0";

struct ManifestValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StageError : std::runtime_error {
    std::string stage;
    StageError(std::string stage_name, const std::string& what)
        : std::runtime_error("stage '" + stage_name + "': " + what), stage(std::move(stage_name)) {}
};

// Executes every stage of a manifest; emits the artifact CSVs plus a
// summary.json with a version stamp and the full configuration echo.
// Relative paths resolve against the manifest's directory.
nlohmann::json run_manifest(const std::filesystem::path& manifest_path);
nlohmann::json run_manifest_json(const nlohmann::json& manifest,
                                 const std::filesystem::path& base_dir);

SetTopology topology_from_json(const nlohmann::json& j);
nlohmann::json topology_to_json(const SetTopology& topo);

} // namespace floorline

#endif
