#include "hazsync/config.hpp"

#include <fstream>
#include <set>
#include <string>

#include "hazsync/error.hpp"

namespace hazsync {

using nlohmann::json;

namespace {

// Reads optional keys from one JSON object and rejects anything unexpected.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(path_ + " must be an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception&) {
      throw ConfigError(path_ + "." + key + " has the wrong type");
    }
  }

  void get(const char* key, Vec3& out) {
    std::vector<double> v{out.x, out.y, out.z};
    get(key, v);
    if (v.size() != 3) throw ConfigError(path_ + "." + key + " must have 3 components");
    out = {v[0], v[1], v[2]};
  }

  const json* child(const char* key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  std::string path(const char* key) const { return path_ + "." + key; }

  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.contains(key)) throw ConfigError("unknown config key " + path_ + "." + key);
    }
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

sim::DeviceProfile read_device(const json& obj, const std::string& path) {
  ObjectReader r(obj, path);
  sim::DeviceProfile d;
  std::string kind;
  r.get("id", d.device_id);
  r.get("kind", kind);
  auto parsed = sim::device_kind_from_string(kind);
  if (!parsed) throw ConfigError(r.path("kind") + " must be one of eeg, gaze, input");
  d.kind = *parsed;
  if (d.kind == sim::DeviceKind::Eeg) d.channel_count = sim::kEegChannels;
  r.get("nominal_rate", d.nominal_rate);
  r.get("clock_scale", d.clock_scale);
  r.get("clock_offset", d.clock_offset);
  r.get("marker_jitter_sigma", d.marker_jitter_sigma);
  r.get("marker_drop_prob", d.marker_drop_prob);
  r.get("channel_count", d.channel_count);
  r.finish();
  if (d.device_id.empty()) throw ConfigError(r.path("id") + " is required");
  if (d.device_id.find_first_of("/\\.") != std::string::npos) {
    throw ConfigError(r.path("id") + " must not contain '/', '\\' or '.'");
  }
  if (!(d.nominal_rate > 0.0)) throw ConfigError(r.path("nominal_rate") + " must be positive");
  if (!(d.clock_scale > 0.0)) throw ConfigError(r.path("clock_scale") + " must be positive");
  if (!(d.marker_jitter_sigma >= 0.0))
    throw ConfigError(r.path("marker_jitter_sigma") + " must be >= 0");
  if (!(d.marker_drop_prob >= 0.0 && d.marker_drop_prob < 1.0))
    throw ConfigError(r.path("marker_drop_prob") + " must be in [0, 1)");
  return d;
}

json device_to_json(const sim::DeviceProfile& d) {
  json j{{"id", d.device_id},
         {"kind", sim::to_string(d.kind)},
         {"nominal_rate", d.nominal_rate},
         {"clock_scale", d.clock_scale},
         {"clock_offset", d.clock_offset},
         {"marker_jitter_sigma", d.marker_jitter_sigma},
         {"marker_drop_prob", d.marker_drop_prob}};
  if (d.kind == sim::DeviceKind::Eeg) j["channel_count"] = d.channel_count;
  return j;
}

}  // namespace

Config default_config() {
  Config c;
  c.devices = {
      {"eeg", sim::DeviceKind::Eeg, 128.0, 1.0002, 1.25, 0.0005, 0.02, sim::kEegChannels},
      {"gaze", sim::DeviceKind::Gaze, 120.0, 0.9997, -3.4, 0.0005, 0.02, 0},
      {"input", sim::DeviceKind::Input, 1000.0, 1.00005, 0.75, 0.0002, 0.0, 0},
  };
  return c;
}

void validate(const LabelParams& p) {
  if (!(p.window > 0.0)) throw ConfigError("labeling.window must be positive");
  if (!(p.cone_deg > 0.0 && p.cone_deg <= 10.0))
    throw ConfigError("labeling.cone_deg must be in (0, 10]");
  if (!(p.gap_tolerance >= 0.0)) throw ConfigError("labeling.gap_tolerance must be >= 0");
}

Config config_from_json(const json& doc) {
  Config c = default_config();
  ObjectReader root(doc, "config");

  if (const json* j = root.child("participant")) {
    ObjectReader r(*j, "config.participant");
    r.get("id", c.plan.participant_id);
    r.get("age", c.plan.participant_age);
    r.finish();
    if (c.plan.participant_id.empty()) throw ConfigError("config.participant.id is empty");
  }
  if (const json* j = root.child("protocol")) {
    ObjectReader r(*j, "config.protocol");
    r.get("trials", c.plan.trial_count);
    r.get("trial_duration", c.plan.trial_duration);
    r.get("rest_duration", c.plan.rest_duration);
    r.get("lead_in", c.plan.lead_in);
    r.finish();
    if (c.plan.trial_count <= 0) throw ConfigError("config.protocol.trials must be positive");
    if (!(c.plan.trial_duration > 0.0))
      throw ConfigError("config.protocol.trial_duration must be positive");
  }
  if (const json* j = root.child("site")) {
    ObjectReader r(*j, "config.site");
    r.get("min", c.plan.placement.site_bounds.min);
    r.get("max", c.plan.placement.site_bounds.max);
    r.get("min_separation", c.plan.placement.min_separation);
    r.get("aoi_radius", c.plan.placement.aoi_radius);
    r.get("viewer", c.plan.viewer);
    r.finish();
    if (!(c.plan.placement.aoi_radius > 0.0))
      throw ConfigError("config.site.aoi_radius must be positive");
  }
  if (const json* j = root.child("layout_seed")) {
    try {
      c.plan.layout_seed = j->get<std::uint64_t>();
    } catch (const json::exception&) {
      throw ConfigError("config.layout_seed must be a non-negative integer");
    }
  }
  if (const json* j = root.child("behavior")) {
    ObjectReader r(*j, "config.behavior");
    auto& b = c.plan.behavior;
    r.get("min_looks", b.min_looks);
    r.get("max_looks", b.max_looks);
    r.get("detect_prob", b.detect_prob);
    r.get("gaze_duration_min", b.gaze_duration_min);
    r.get("gaze_duration_max", b.gaze_duration_max);
    r.get("gap_min", b.gap_min);
    r.get("gap_max", b.gap_max);
    r.get("min_press_delay", b.min_press_delay);
    r.get("first_look_min", b.first_look_min);
    r.get("trial_tail", b.trial_tail);
    r.finish();
  }
  if (const json* j = root.child("devices")) {
    if (!j->is_array() || j->empty()) throw ConfigError("config.devices must be a non-empty array");
    c.devices.clear();
    std::set<std::string> ids;
    for (std::size_t i = 0; i < j->size(); ++i) {
      auto d = read_device((*j)[i], "config.devices[" + std::to_string(i) + "]");
      if (!ids.insert(d.device_id).second)
        throw ConfigError("duplicate device id '" + d.device_id + "'");
      c.devices.push_back(std::move(d));
    }
  }
  if (const json* j = root.child("simulation")) {
    ObjectReader r(*j, "config.simulation");
    auto& s = c.simulation;
    r.get("gaze_noise_sigma_deg", s.gaze_noise_sigma_deg);
    r.get("gaze_noise_clip_sigmas", s.gaze_noise_clip_sigmas);
    r.get("aim_cone_deg", s.aim_cone_deg);
    r.get("clearance_margin_deg", s.clearance_margin_deg);
    r.get("eeg_ar_coefficient", s.eeg_ar_coefficient);
    r.get("eeg_noise_uv", s.eeg_noise_uv);
    r.finish();
  }
  if (const json* j = root.child("labeling")) {
    ObjectReader r(*j, "config.labeling");
    r.get("window", c.labeling.window);
    r.get("cone_deg", c.labeling.cone_deg);
    r.get("gap_tolerance", c.labeling.gap_tolerance);
    r.finish();
  }
  root.finish();
  validate(c.labeling);
  return c;
}

json config_to_json(const Config& c) {
  const auto& p = c.plan;
  const auto& b = p.behavior;
  const auto& box = p.placement.site_bounds;
  json devices = json::array();
  for (const auto& d : c.devices) devices.push_back(device_to_json(d));
  json doc{
      {"participant", {{"id", p.participant_id}, {"age", p.participant_age}}},
      {"protocol",
       {{"trials", p.trial_count},
        {"trial_duration", p.trial_duration},
        {"rest_duration", p.rest_duration},
        {"lead_in", p.lead_in}}},
      {"site",
       {{"min", box.min.to_array()},
        {"max", box.max.to_array()},
        {"min_separation", p.placement.min_separation},
        {"aoi_radius", p.placement.aoi_radius},
        {"viewer", p.viewer.to_array()}}},
      {"behavior",
       {{"min_looks", b.min_looks},
        {"max_looks", b.max_looks},
        {"detect_prob", b.detect_prob},
        {"gaze_duration_min", b.gaze_duration_min},
        {"gaze_duration_max", b.gaze_duration_max},
        {"gap_min", b.gap_min},
        {"gap_max", b.gap_max},
        {"min_press_delay", b.min_press_delay},
        {"first_look_min", b.first_look_min},
        {"trial_tail", b.trial_tail}}},
      {"devices", devices},
      {"simulation",
       {{"gaze_noise_sigma_deg", c.simulation.gaze_noise_sigma_deg},
        {"gaze_noise_clip_sigmas", c.simulation.gaze_noise_clip_sigmas},
        {"aim_cone_deg", c.simulation.aim_cone_deg},
        {"clearance_margin_deg", c.simulation.clearance_margin_deg},
        {"eeg_ar_coefficient", c.simulation.eeg_ar_coefficient},
        {"eeg_noise_uv", c.simulation.eeg_noise_uv}}},
      {"labeling",
       {{"window", c.labeling.window},
        {"cone_deg", c.labeling.cone_deg},
        {"gap_tolerance", c.labeling.gap_tolerance}}},
  };
  if (p.layout_seed) doc["layout_seed"] = *p.layout_seed;
  return doc;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  try {
    return config_from_json(doc);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace hazsync
