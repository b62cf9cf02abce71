#include "spatia/layout_io.hpp"

#include <fstream>

namespace spatia {

using nlohmann::json;

LoudspeakerLayout layout_from_json(const json& doc) {
  try {
    LoudspeakerLayout layout;
    layout.name = doc.value("name", std::string{"unnamed"});
    layout.category = parse_layout_category(doc.value("category", std::string{"irregular"}));
    if (!doc.contains("speakers") || !doc.at("speakers").is_array())
      throw FormatError("layout document needs a 'speakers' array");
    for (const auto& s : doc.at("speakers")) {
      const double az = s.at("az_deg").get<double>();
      const double el = s.value("el_deg", 0.0);
      const double dist = s.value("dist_m", 1.0);
      if (!(dist > 0.0)) throw FormatError("speaker dist_m must be positive");
      layout.speakers.push_back(spherical_to_position(Direction::from_degrees(az, el), dist));
    }
    return layout;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed layout document: ") + e.what());
  }
}

json layout_to_json(const LoudspeakerLayout& layout) {
  json speakers = json::array();
  for (const auto& p : layout.speakers) {
    const Direction d = Direction::from_vector(p);
    speakers.push_back({{"az_deg", rad_to_deg(d.azimuth())},
                        {"el_deg", rad_to_deg(d.elevation())},
                        {"dist_m", norm(p)}});
  }
  return {{"name", layout.name}, {"category", std::string(to_string(layout.category))}, {"speakers", speakers}};
}

LoudspeakerLayout load_layout(const std::filesystem::path& path_or_preset) {
  const std::string s = path_or_preset.string();
  if (s.rfind("preset:", 0) == 0) return layouts::preset(s.substr(7));
  std::ifstream in(path_or_preset);
  if (!in) throw IoError("cannot open layout file '" + s + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw FormatError("layout file '" + s + "' is not valid JSON: " + e.what());
  }
  return layout_from_json(doc);
}

void save_layout(const LoudspeakerLayout& layout, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write layout file '" + path.string() + "'");
  out << layout_to_json(layout).dump(2) << '\n';
}

json report_to_json(const ValidationReport& report) {
  json issues = json::array();
  for (const auto& i : report.issues)
    issues.push_back({{"code", i.code}, {"where", i.where}, {"message", i.message}});
  return {{"ok", report.ok()}, {"issues", issues}};
}

} // namespace spatia
