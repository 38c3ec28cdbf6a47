#include "hazsync/session_io.hpp"

#include <charconv>
#include <fstream>
#include <iterator>
#include <sstream>

#include "hazsync/error.hpp"

namespace hazsync::io {

using nlohmann::json;

namespace {

void append_number(std::string& out, double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

void append_vec(std::string& out, Vec3 v) {
  out += '[';
  append_number(out, v.x);
  out += ',';
  append_number(out, v.y);
  out += ',';
  append_number(out, v.z);
  out += ']';
}

Vec3 vec_from_json(const json& j) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 3) throw json::other_error::create(501, "expected 3 components", &j);
  return {v[0], v[1], v[2]};
}

json model_to_json(const timeline::ClockModel& m) {
  return {{"scale", m.scale},
          {"offset", m.offset},
          {"residual_rms", m.residual_rms},
          {"n_markers", m.n_markers}};
}

timeline::ClockModel model_from_json(const json& j) {
  return {j.at("scale").get<double>(), j.at("offset").get<double>(),
          j.at("residual_rms").get<double>(), j.at("n_markers").get<std::size_t>()};
}

json detection_to_json(const labeling::DetectionEvent& d) {
  return {{"participant", d.participant_id},
          {"trial", d.trial_id},
          {"hazard", d.hazard_id},
          {"t_press", d.t_press},
          {"t_gaze", d.t_gaze}};
}

labeling::DetectionEvent detection_from_json(const json& j) {
  return {j.at("participant").get<std::string>(), j.at("trial").get<int>(),
          j.at("hazard").get<int>(), j.at("t_press").get<double>(), j.at("t_gaze").get<double>()};
}

// Parses every non-empty line of a JSON Lines file.
template <class Fn>
void for_each_record(const fs::path& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      fn(json::parse(line));
    } catch (const json::exception& e) {
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

void require_increasing(const fs::path& path, std::size_t index, double prev, double t) {
  if (index > 0 && !(t > prev)) {
    throw IoError(path.string() + ": record " + std::to_string(index + 1) +
                  " is not after the previous one");
  }
}

template <class T, class Fn>
std::vector<T> read_stream(const fs::path& path, Fn&& parse) {
  std::vector<T> out;
  for_each_record(path, [&](const json& j) {
    T value = parse(j);
    require_increasing(path, out.size(), out.empty() ? 0.0 : out.back().t, value.t);
    out.push_back(std::move(value));
  });
  return out;
}

template <class T, class Fn>
void write_lines(const fs::path& path, const std::vector<T>& items, Fn&& line) {
  std::string buf;
  buf.reserve(items.size() * 64);
  for (const auto& item : items) {
    buf += line(item);
    buf += '\n';
  }
  write_text(path, buf);
}

}  // namespace

std::string samples_file_name(const sim::DeviceInfo& device) {
  if (device.kind == sim::DeviceKind::Input) return std::string(kPressesFile);
  return device.device_id + ".jsonl";
}

std::string markers_file_name(const sim::DeviceInfo& device) {
  return device.device_id + ".markers.jsonl";
}

std::string format_time(double seconds) {
  char buf[400];
  auto res = std::to_chars(buf, buf + sizeof buf, seconds, std::chars_format::fixed);
  std::string s(buf, res.ptr);
  int significant = 0;
  bool leading = true;
  bool has_point = false;
  for (char c : s) {
    if (c == '.') {
      has_point = true;
    } else if (c >= '0' && c <= '9') {
      if (leading && c == '0') continue;
      leading = false;
      ++significant;
    }
  }
  if (significant < 9) {
    if (!has_point) s += '.';
    s.append(static_cast<std::size_t>(9 - significant), '0');
  }
  return s;
}

std::string format_number(double v) {
  std::string s;
  append_number(s, v);
  return s;
}

std::string gaze_line(const gaze::GazeSample& s) {
  std::string out = "{\"d\":";
  append_vec(out, s.direction);
  out += ",\"o\":";
  append_vec(out, s.origin);
  out += ",\"t\":";
  out += format_time(s.t);
  out += '}';
  return out;
}

std::string eeg_line(const sim::EegSample& s) {
  std::string out = "{\"ch\":[";
  for (std::size_t i = 0; i < s.channels.size(); ++i) {
    if (i) out += ',';
    append_number(out, s.channels[i]);
  }
  out += "],\"t\":";
  out += format_time(s.t);
  out += '}';
  return out;
}

std::string marker_line(const timeline::Marker& m) {
  return "{\"seq\":" + std::to_string(m.seq) + ",\"t\":" + format_time(m.t_device) + "}";
}

std::string press_line(const sim::PressSample& p) {
  return "{\"t\":" + format_time(p.t) + ",\"trial\":" + std::to_string(p.trial_id) + "}";
}

std::string sample_line(const sim::SampleStream& stream, std::size_t i) {
  return std::visit(
      [i](const auto& v) -> std::string {
        using T = typename std::decay_t<decltype(v)>::value_type;
        if constexpr (std::is_same_v<T, sim::EegSample>) {
          return eeg_line(v[i]);
        } else if constexpr (std::is_same_v<T, gaze::GazeSample>) {
          return gaze_line(v[i]);
        } else {
          return press_line(v[i]);
        }
      },
      stream);
}

json manifest_to_json(const sim::Manifest& m) {
  json devices = json::array();
  for (const auto& d : m.devices) {
    json dj{{"id", d.device_id},
            {"kind", sim::to_string(d.kind)},
            {"nominal_rate", d.nominal_rate},
            {"samples_file", samples_file_name(d)},
            {"markers_file", markers_file_name(d)}};
    if (d.kind == sim::DeviceKind::Eeg) dj["channel_count"] = d.channel_count;
    devices.push_back(std::move(dj));
  }
  json trials = json::array();
  for (const auto& t : m.trials) {
    json hazards = json::array();
    for (const auto& h : t.layout.placements) {
      hazards.push_back({{"id", h.id},
                         {"category", scene::to_string(h.category)},
                         {"description", h.description},
                         {"center", h.center.to_array()},
                         {"radius", h.radius}});
    }
    trials.push_back({{"trial_id", t.trial_id},
                      {"t_start", t.t_start},
                      {"t_end", t.t_end},
                      {"layout_seed", t.layout.layout_seed},
                      {"hazards", std::move(hazards)}});
  }
  json markers = json::array();
  for (const auto& mk : m.reference_markers) {
    markers.push_back({{"seq", mk.seq},
                       {"t", mk.t_reference},
                       {"cause", sim::to_string(mk.cause)},
                       {"trial", mk.trial_id}});
  }
  return {
      {"format_version", 1},
      {"participant", {{"id", m.participant_id}, {"age", m.participant_age}}},
      {"seed", m.seed},
      {"reference_clock", "stimulation"},
      {"calibration", {{"eye_tracker", "5-point"}, {"simulated", false}}},
      {"protocol",
       {{"trial_count", m.trials.size()},
        {"trial_duration", m.trial_duration},
        {"rest_duration", m.rest_duration},
        {"lead_in", m.lead_in}}},
      {"viewer", m.viewer.to_array()},
      {"devices", std::move(devices)},
      {"trials", std::move(trials)},
      {"reference_markers", std::move(markers)},
      {"notes",
       {{"marker_causes",
         "trial_start and trial_end markers are emitted in addition to button-press markers"}}},
  };
}

sim::Manifest manifest_from_json(const json& doc) {
  sim::Manifest m;
  m.participant_id = doc.at("participant").at("id").get<std::string>();
  m.participant_age = doc.at("participant").at("age").get<double>();
  m.seed = doc.at("seed").get<std::uint64_t>();
  const json& protocol = doc.at("protocol");
  m.trial_duration = protocol.at("trial_duration").get<double>();
  m.rest_duration = protocol.at("rest_duration").get<double>();
  m.lead_in = protocol.at("lead_in").get<double>();
  m.viewer = vec_from_json(doc.at("viewer"));
  for (const auto& dj : doc.at("devices")) {
    sim::DeviceInfo d;
    d.device_id = dj.at("id").get<std::string>();
    auto kind = sim::device_kind_from_string(dj.at("kind").get<std::string>());
    if (!kind) throw IoError("device '" + d.device_id + "' has an unknown kind");
    d.kind = *kind;
    d.nominal_rate = dj.at("nominal_rate").get<double>();
    d.channel_count = dj.value("channel_count", 0);
    if (dj.at("samples_file").get<std::string>() != samples_file_name(d) ||
        dj.at("markers_file").get<std::string>() != markers_file_name(d)) {
      throw IoError("device '" + d.device_id + "' file names do not match its id");
    }
    m.devices.push_back(std::move(d));
  }
  for (const auto& tj : doc.at("trials")) {
    sim::TrialWindow t;
    t.trial_id = tj.at("trial_id").get<int>();
    t.t_start = tj.at("t_start").get<double>();
    t.t_end = tj.at("t_end").get<double>();
    t.layout.trial_id = t.trial_id;
    t.layout.layout_seed = tj.at("layout_seed").get<std::uint64_t>();
    for (const auto& hj : tj.at("hazards")) {
      scene::HazardAoi h;
      h.id = hj.at("id").get<int>();
      auto cat = scene::category_from_string(hj.at("category").get<std::string>());
      if (!cat) throw IoError("hazard " + std::to_string(h.id) + " has an unknown category");
      h.category = *cat;
      h.description = hj.at("description").get<std::string>();
      h.center = vec_from_json(hj.at("center"));
      h.radius = hj.at("radius").get<double>();
      t.layout.placements.push_back(std::move(h));
    }
    m.trials.push_back(std::move(t));
  }
  for (const auto& mj : doc.at("reference_markers")) {
    auto cause = sim::marker_cause_from_string(mj.at("cause").get<std::string>());
    if (!cause) throw IoError("reference marker with unknown cause");
    m.reference_markers.push_back({mj.at("seq").get<std::uint64_t>(), mj.at("t").get<double>(),
                                   *cause, mj.at("trial").get<int>()});
  }
  return m;
}

json ground_truth_to_json(const sim::GroundTruth& truth) {
  json clocks = json::object();
  for (const auto& [id, model] : truth.clocks) {
    clocks[id] = {{"scale", model.scale}, {"offset", model.offset}};
  }
  json detections = json::array();
  for (const auto& d : truth.detections) detections.push_back(detection_to_json(d));
  return {{"clocks", std::move(clocks)}, {"detections", std::move(detections)}};
}

sim::GroundTruth ground_truth_from_json(const json& doc) {
  sim::GroundTruth truth;
  for (const auto& [id, c] : doc.at("clocks").items()) {
    truth.clocks[id] = {c.at("scale").get<double>(), c.at("offset").get<double>(), 0.0, 2};
  }
  for (const auto& d : doc.at("detections")) truth.detections.push_back(detection_from_json(d));
  return truth;
}

void write_session(const fs::path& dir, const sim::SessionRecording& rec) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  write_json(dir / kManifestFile, manifest_to_json(rec.manifest));
  write_json(dir / kGroundTruthFile, ground_truth_to_json(rec.ground_truth));
  for (const auto& dev : rec.devices) {
    write_lines(dir / markers_file_name(dev.info), dev.markers, marker_line);
    const fs::path samples = dir / samples_file_name(dev.info);
    std::visit(
        [&](const auto& v) {
          using T = typename std::decay_t<decltype(v)>::value_type;
          if constexpr (std::is_same_v<T, sim::EegSample>) {
            write_lines(samples, v, eeg_line);
          } else if constexpr (std::is_same_v<T, gaze::GazeSample>) {
            write_lines(samples, v, gaze_line);
          } else {
            write_lines(samples, v, press_line);
          }
        },
        dev.samples);
  }
}

sim::SessionRecording read_session(const fs::path& dir, const LoadOptions& options) {
  sim::SessionRecording rec;
  try {
    rec.manifest = manifest_from_json(read_json(dir / kManifestFile));
  } catch (const json::exception& e) {
    throw IoError((dir / kManifestFile).string() + ": " + e.what());
  }
  for (const auto& info : rec.manifest.devices) {
    sim::DeviceRecording dev;
    dev.info = info;
    const fs::path markers_path = dir / markers_file_name(info);
    for_each_record(markers_path, [&](const json& j) {
      timeline::Marker m{j.at("seq").get<std::uint64_t>(), j.at("t").get<double>()};
      if (!dev.markers.empty() &&
          !(m.seq > dev.markers.back().seq && m.t_device > dev.markers.back().t_device)) {
        throw IoError(markers_path.string() + ": markers must increase in seq and time");
      }
      dev.markers.push_back(m);
    });
    const fs::path samples_path = dir / samples_file_name(info);
    switch (info.kind) {
      case sim::DeviceKind::Eeg:
        if (options.eeg) {
          dev.samples = read_stream<sim::EegSample>(samples_path, [](const json& j) {
            return sim::EegSample{j.at("t").get<double>(), j.at("ch").get<std::vector<double>>()};
          });
        }
        break;
      case sim::DeviceKind::Gaze:
        dev.samples = read_stream<gaze::GazeSample>(samples_path, [](const json& j) {
          return gaze::GazeSample{j.at("t").get<double>(), vec_from_json(j.at("o")),
                                  vec_from_json(j.at("d"))};
        });
        break;
      case sim::DeviceKind::Input:
        dev.samples = read_stream<sim::PressSample>(samples_path, [](const json& j) {
          return sim::PressSample{j.at("t").get<double>(), j.at("trial").get<int>()};
        });
        break;
    }
    rec.devices.push_back(std::move(dev));
  }
  const fs::path truth = dir / kGroundTruthFile;
  if (options.ground_truth && fs::exists(truth)) {
    try {
      rec.ground_truth = ground_truth_from_json(read_json(truth));
    } catch (const json::exception& e) {
      throw IoError(truth.string() + ": " + e.what());
    }
  }
  return rec;
}

json diagnostics_to_json(const std::string& participant_id,
                         const std::map<std::string, timeline::ClockModel>& models) {
  json devices = json::object();
  for (const auto& [id, m] : models) devices[id] = model_to_json(m);
  return {{"participant", participant_id}, {"devices", std::move(devices)}};
}

std::map<std::string, timeline::ClockModel> diagnostics_from_json(const json& doc) {
  std::map<std::string, timeline::ClockModel> out;
  for (const auto& [id, m] : doc.at("devices").items()) out[id] = model_from_json(m);
  return out;
}

json labels_to_json(const analytics::SessionMeta& meta, const labeling::Labels& labels,
                    const json& parameters) {
  json detections = json::array();
  for (const auto& d : labels.detections) detections.push_back(detection_to_json(d));
  json false_alarms = json::array();
  for (const auto& f : labels.false_alarms) {
    false_alarms.push_back(
        {{"participant", f.participant_id}, {"trial", f.trial_id}, {"t_press", f.t_press}});
  }
  return {{"participant", meta.participant_id},
          {"trial_count", meta.trial_count},
          {"parameters", parameters},
          {"detections", std::move(detections)},
          {"false_alarms", std::move(false_alarms)}};
}

analytics::SessionResult labels_from_json(const json& doc) {
  analytics::SessionResult r;
  r.meta = {doc.at("participant").get<std::string>(), doc.at("trial_count").get<int>()};
  for (const auto& d : doc.at("detections")) r.detections.push_back(detection_from_json(d));
  for (const auto& f : doc.at("false_alarms")) {
    r.false_alarms.push_back({f.at("participant").get<std::string>(), f.at("trial").get<int>(),
                              f.at("t_press").get<double>()});
  }
  return r;
}

analytics::SessionResult read_labeled_session(const fs::path& dir) {
  const fs::path labels = dir / kDetectionsFile;
  analytics::SessionResult r;
  try {
    r = labels_from_json(read_json(labels));
  } catch (const json::exception& e) {
    throw IoError(labels.string() + ": " + e.what());
  }
  const fs::path diag = dir / kDiagnosticsFile;
  if (fs::exists(diag)) {
    try {
      r.clock_models = diagnostics_from_json(read_json(diag));
    } catch (const json::exception& e) {
      throw IoError(diag.string() + ": " + e.what());
    }
  }
  return r;
}

json report_to_json(const analytics::DetectionReport& report) {
  json hazards = json::array();
  for (const auto& info : scene::hazard_catalog()) {
    hazards.push_back({{"id", info.id},
                       {"category", scene::to_string(info.category)},
                       {"description", info.description},
                       {"count", report.per_hazard_counts.at(info.id)},
                       {"ratio", report.per_hazard_ratio.at(info.id)},
                       {"per_opportunity_rate", report.per_hazard_opportunity_rate.at(info.id)}});
  }
  json categories = json::object();
  for (const auto& [c, ratio] : report.per_category_ratio) {
    categories[std::string(scene::to_string(c))] = ratio;
  }
  json participants = json::object();
  for (const auto& [pid, counts] : report.per_participant) {
    json c = json::array();
    for (const auto& [id, n] : counts) c.push_back(n);
    const auto fa = report.false_alarms_per_participant.find(pid);
    participants[pid] = {{"counts", std::move(c)},
                         {"false_alarms",
                          fa == report.false_alarms_per_participant.end() ? 0 : fa->second}};
  }
  json diagnostics = json::object();
  for (const auto& [pid, models] : report.sync_diagnostics) {
    json devices = json::object();
    for (const auto& [id, m] : models) devices[id] = model_to_json(m);
    diagnostics[pid] = std::move(devices);
  }
  return {{"hazards", std::move(hazards)},
          {"categories", std::move(categories)},
          {"participants", std::move(participants)},
          {"sync_diagnostics", std::move(diagnostics)},
          {"opportunities", report.opportunities},
          {"total_detections", report.total_detections},
          {"total_false_alarms", report.total_false_alarms}};
}

std::string report_csv(const analytics::DetectionReport& report) {
  std::string out = "hazard_id,category,count,ratio,per_opportunity_rate\n";
  for (const auto& info : scene::hazard_catalog()) {
    out += std::to_string(info.id) + ',' + std::string(scene::to_string(info.category)) + ',' +
           std::to_string(report.per_hazard_counts.at(info.id)) + ',' +
           format_number(report.per_hazard_ratio.at(info.id)) + ',' +
           format_number(report.per_hazard_opportunity_rate.at(info.id)) + '\n';
  }
  return out;
}

std::string participants_csv(const analytics::DetectionReport& report) {
  std::string out = "participant,hazard_id,count\n";
  for (const auto& [pid, counts] : report.per_participant) {
    for (const auto& [id, n] : counts) {
      out += pid + ',' + std::to_string(id) + ',' + std::to_string(n) + '\n';
    }
  }
  return out;
}

std::string categories_csv(const analytics::DetectionReport& report) {
  std::string out = "category,ratio\n";
  for (const auto& [c, ratio] : report.per_category_ratio) {
    out += std::string(scene::to_string(c)) + ',' + format_number(ratio) + '\n';
  }
  return out;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text(const fs::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

json read_json(const fs::path& path) {
  const std::string text = read_text(path);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw IoError(path.string() + " is not valid JSON: " + e.what());
  }
}

void write_json(const fs::path& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

}  // namespace hazsync::io
