#include "spatia/hrir.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include <json.hpp>

#include "spatia/dsp.hpp"
#include "spatia/wav.hpp"

namespace spatia {

void Hrir::validate() const {
  if (left.empty() || right.empty()) throw ParameterError("HRIR responses must have at least one tap");
  if (left.size() != right.size()) throw ParameterError("HRIR left and right responses differ in length");
  for (std::size_t n = 0; n < left.size(); ++n)
    if (!std::isfinite(left[n]) || !std::isfinite(right[n])) throw ParameterError("HRIR has non-finite samples");
  if (near_field_distance && !(*near_field_distance > 0.0))
    throw ParameterError("near-field HRIR distance must be positive");
}

namespace {

std::string describe(const Direction& d) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "(az %.3f deg, el %.3f deg)", rad_to_deg(d.azimuth()), rad_to_deg(d.elevation()));
  return buf;
}

bool same_direction(const Direction& a, const Direction& b) { return angular_distance(a, b) < 1e-9; }

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return INFINITY;
  double m = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) m = std::max(m, std::abs(a[n] - b[n]));
  return m;
}

} // namespace

HrirSet::HrirSet(std::vector<Hrir> entries, bool symmetric_head, double azimuth_step, double elevation_step)
    : entries_(std::move(entries)), symmetric_(symmetric_head), az_step_(azimuth_step), el_step_(elevation_step) {
  if (entries_.empty()) throw ParameterError("an HRIR set needs at least one entry");
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    entries_[i].validate();
    for (std::size_t j = 0; j < i; ++j)
      if (same_direction(entries_[i].direction, entries_[j].direction))
        throw ParameterError("duplicate HRIR direction " + describe(entries_[i].direction));
  }
  if (!symmetric_) return;
  for (const auto& e : entries_) {
    const Direction mirror(-e.direction.azimuth(), e.direction.elevation());
    const auto it = std::find_if(entries_.begin(), entries_.end(),
                                 [&](const Hrir& o) { return same_direction(o.direction, mirror); });
    if (it == entries_.end())
      throw ParameterError("symmetric HRIR set lacks the mirror of " + describe(e.direction));
    if (max_abs_diff(it->left, e.right) > 1e-12 || max_abs_diff(it->right, e.left) > 1e-12)
      throw ParameterError("HRIR at " + describe(mirror) + " is not the channel-swapped mirror of " +
                           describe(e.direction));
  }
}

std::size_t HrirSet::taps() const noexcept {
  std::size_t t = 0;
  for (const auto& e : entries_) t = std::max(t, e.taps());
  return t;
}

const Hrir& nearest_hrir(const HrirSet& set, const Direction& d) {
  const Hrir* best = nullptr;
  double best_dist = INFINITY;
  for (const auto& e : set.entries()) {
    const double dist = angular_distance(e.direction, d);
    bool take = best == nullptr || dist < best_dist - 1e-12;
    if (!take && std::abs(dist - best_dist) <= 1e-12) {
      const auto& a = e.direction;
      const auto& b = best->direction;
      take = a.azimuth() < b.azimuth() || (a.azimuth() == b.azimuth() && a.elevation() < b.elevation());
    }
    if (take) {
      best = &e;
      best_dist = std::min(best_dist, dist);
    }
  }
  return *best;
}

namespace {

// Lateral angle: positive toward the left ear. Snapped to zero in the median plane
// so that front/back sources give exactly equal ears.
double lateral_angle(const Direction& d) {
  const double s = std::sin(d.azimuth()) * std::cos(d.elevation());
  return std::abs(s) < 1e-12 ? 0.0 : std::asin(std::clamp(s, -1.0, 1.0));
}

} // namespace

double woodworth_itd(const Direction& d, double head_radius) {
  if (!(head_radius > 0.0)) throw ParameterError("head radius must be positive");
  const double t = std::abs(lateral_angle(d));
  return head_radius / kSpeedOfSound * (t + std::sin(t));
}

Hrir synthesize_spherical_head_hrir(const Direction& d, double sample_rate, std::size_t taps, double head_radius) {
  if (!(sample_rate > 0.0)) throw ParameterError("sample rate must be positive");
  if (taps == 0) throw ParameterError("HRIR needs at least one tap");
  const double lateral = lateral_angle(d);
  const double base = std::min(2.0, static_cast<double>(taps - 1));

  auto impulse = [&](double delay) {
    std::vector<double> h(taps, 0.0);
    const auto i = static_cast<std::size_t>(std::floor(delay));
    const double frac = delay - static_cast<double>(i);
    if (i < taps) h[i] = 1.0 - frac;
    if (frac > 0.0 && i + 1 < taps) h[i + 1] = frac;
    return h;
  };

  std::vector<double> near = impulse(base);
  std::vector<double> far = impulse(base + woodworth_itd(d, head_radius) * sample_rate);
  const double a = std::abs(std::sin(lateral)) * std::exp(-2.0 * kPi * 1500.0 / sample_rate);
  auto shadow = OnePoleLowpass::from_coefficient(a);
  shadow.process(far);

  Hrir h;
  h.direction = d;
  if (lateral >= 0.0) {
    h.left = std::move(near);
    h.right = std::move(far);
  } else {
    h.left = std::move(far);
    h.right = std::move(near);
  }
  return h;
}

HrirSet synthesize_spherical_head_set(double azimuth_step_deg, double elevation_step_deg, double sample_rate,
                                      std::size_t taps, double head_radius) {
  if (!(azimuth_step_deg > 0.0) || azimuth_step_deg > 180.0) throw ParameterError("azimuth step must be in (0, 180]");
  if (!(elevation_step_deg >= 0.0) || elevation_step_deg > 90.0)
    throw ParameterError("elevation step must be in [0, 90]");
  const auto n_az = static_cast<int>(std::llround(360.0 / azimuth_step_deg));
  if (std::abs(n_az * azimuth_step_deg - 360.0) > 1e-9) throw ParameterError("azimuth step must divide 360");

  std::vector<double> elevations{0.0};
  if (elevation_step_deg > 0.0) {
    const auto n_el = static_cast<int>(std::llround(90.0 / elevation_step_deg));
    if (std::abs(n_el * elevation_step_deg - 90.0) > 1e-9) throw ParameterError("elevation step must divide 90");
    elevations.clear();
    for (int i = -n_el; i <= n_el; ++i) elevations.push_back(i * elevation_step_deg);
  }

  std::vector<Hrir> entries;
  for (double el : elevations) {
    if (std::abs(el) == 90.0) {
      entries.push_back(synthesize_spherical_head_hrir(Direction::from_degrees(0.0, el), sample_rate, taps, head_radius));
      continue;
    }
    // k * step for k in (-n/2, n/2], so every mirror is an exact negation.
    for (int k = 0; k < n_az; ++k) {
      const int kk = 2 * k <= n_az ? k : k - n_az;
      entries.push_back(
          synthesize_spherical_head_hrir(Direction::from_degrees(kk * azimuth_step_deg, el), sample_rate, taps, head_radius));
    }
  }
  return HrirSet(std::move(entries), true, azimuth_step_deg, elevation_step_deg);
}

namespace {

std::string entry_stem(const Hrir& h) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "hrir_az%+08.3f_el%+07.3f", rad_to_deg(h.direction.azimuth()),
                rad_to_deg(h.direction.elevation()));
  return buf;
}

} // namespace

HrirSet load_hrir_set(const std::filesystem::path& index, double* sample_rate) {
  std::ifstream in(index);
  if (!in) throw IoError("cannot open HRIR index '" + index.string() + "'");
  const auto dir = index.parent_path();
  std::vector<Hrir> entries;
  nlohmann::json doc;
  double rate = 0.0;
  bool symmetric = false;
  double az_step = 0.0, el_step = 0.0;
  try {
    doc = nlohmann::json::parse(in);
    rate = doc.value("sample_rate", 0.0);
    symmetric = doc.value("symmetric_head", false);
    az_step = doc.value("azimuth_step_deg", 0.0);
    el_step = doc.value("elevation_step_deg", 0.0);
    for (const auto& e : doc.at("entries")) {
      Hrir h;
      h.direction = Direction::from_degrees(e.at("az_deg").get<double>(), e.value("el_deg", 0.0));
      if (e.contains("distance") && e.at("distance").is_number()) h.near_field_distance = e.at("distance").get<double>();
      const auto left = read_wav(dir / e.at("left").get<std::string>());
      const auto right = read_wav(dir / e.at("right").get<std::string>());
      if (left.channels.size() != 1 || right.channels.size() != 1)
        throw FormatError("HRIR files must be mono");
      if (rate > 0.0 && (left.sample_rate != rate || right.sample_rate != rate))
        throw FormatError("HRIR file sample rate differs from the index");
      rate = left.sample_rate;
      h.left = left.channels[0];
      h.right = right.channels[0];
      entries.push_back(std::move(h));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("invalid HRIR index '" + index.string() + "': " + e.what());
  }
  if (sample_rate) *sample_rate = rate;
  return HrirSet(std::move(entries), symmetric, az_step, el_step);
}

void save_hrir_set(const HrirSet& set, double sample_rate, const std::filesystem::path& index) {
  const auto dir = index.parent_path();
  if (!dir.empty()) std::filesystem::create_directories(dir);
  nlohmann::json list = nlohmann::json::array();
  for (const auto& h : set.entries()) {
    const std::string stem = entry_stem(h);
    write_wav(dir / (stem + "_L.wav"), AudioBuffer{sample_rate, {h.left}}, SampleFormat::Float64);
    write_wav(dir / (stem + "_R.wav"), AudioBuffer{sample_rate, {h.right}}, SampleFormat::Float64);
    nlohmann::json e{{"az_deg", rad_to_deg(h.direction.azimuth())},
                     {"el_deg", rad_to_deg(h.direction.elevation())},
                     {"left", stem + "_L.wav"},
                     {"right", stem + "_R.wav"}};
    if (h.near_field_distance) e["distance"] = *h.near_field_distance;
    else e["distance"] = "far";
    list.push_back(std::move(e));
  }
  const nlohmann::json doc{{"sample_rate", sample_rate},
                           {"symmetric_head", set.symmetric_head()},
                           {"azimuth_step_deg", set.azimuth_step()},
                           {"elevation_step_deg", set.elevation_step()},
                           {"entries", std::move(list)}};
  std::ofstream f(index, std::ios::trunc);
  if (!f) throw IoError("cannot write HRIR index '" + index.string() + "'");
  f << doc.dump(2) << '\n';
}

} // namespace spatia
