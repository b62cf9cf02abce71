#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "spatia/geometry.hpp"

namespace spatia {

/// Layout document: {"name", "category", "speakers": [{"az_deg", "el_deg", "dist_m"}]}.
/// el_deg defaults to 0 and dist_m to 1 when omitted.
LoudspeakerLayout layout_from_json(const nlohmann::json& doc);
nlohmann::json layout_to_json(const LoudspeakerLayout& layout);

/// Reads a layout file, or a preset when `path_or_preset` is "preset:<name>".
LoudspeakerLayout load_layout(const std::filesystem::path& path_or_preset);
void save_layout(const LoudspeakerLayout& layout, const std::filesystem::path& path);

nlohmann::json report_to_json(const ValidationReport& report);

} // namespace spatia
