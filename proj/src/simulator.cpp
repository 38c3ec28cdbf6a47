#include "hazsync/simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>
#include <tuple>

#include "hazsync/error.hpp"

namespace hazsync::sim {

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

// 26 directions toward the faces, edges and corners of a cube. Any two are at
// least 35 degrees apart, so ten hazards cannot block all of them.
const std::array<Vec3, 26>& fallback_directions() {
  static const std::array<Vec3, 26> dirs = [] {
    std::array<Vec3, 26> out{};
    std::size_t k = 0;
    for (int x = -1; x <= 1; ++x) {
      for (int y = -1; y <= 1; ++y) {
        for (int z = -1; z <= 1; ++z) {
          if (x != 0 || y != 0 || z != 0) {
            out[k++] = normalized(Vec3{double(x), double(y), double(z)});
          }
        }
      }
    }
    return out;
  }();
  return dirs;
}

bool clear_of_hazards(Vec3 dir, Vec3 viewer, const scene::TrialLayout& layout, double clearance) {
  return std::all_of(layout.placements.begin(), layout.placements.end(),
                     [&](const scene::HazardAoi& h) {
                       return angle_between(dir, h.center - viewer) >= clearance;
                     });
}

// Rotates dir by a clipped Gaussian angular error.
Vec3 perturb(Vec3 dir, double sigma_rad, double clip_rad, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  const double a = n(rng) * sigma_rad;
  const double b = n(rng) * sigma_rad;
  double mag = std::hypot(a, b);
  if (!(mag > 0.0)) {
    return dir;
  }
  const Vec3 helper = std::abs(dir.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
  const Vec3 e1 = normalized(cross(dir, helper));
  const Vec3 e2 = cross(dir, e1);
  const Vec3 u = (1.0 / mag) * (a * e1 + b * e2);
  mag = std::min(mag, clip_rad);
  return normalized(std::cos(mag) * dir + std::sin(mag) * u);
}

struct ScanPath {
  double yaw0 = 0.0;
  double phase1 = 0.0;
  double phase2 = 0.0;

  Vec3 at(double t) const {
    const double yaw = yaw0 + 0.35 * t + 0.8 * std::sin(0.23 * t + phase1);
    const double pitch = -0.15 + 0.25 * std::sin(0.31 * t + phase2);
    return {std::cos(pitch) * std::cos(yaw), std::cos(pitch) * std::sin(yaw), std::sin(pitch)};
  }
};

void validate_profiles(const std::vector<DeviceProfile>& profiles) {
  std::set<std::string> ids;
  for (const auto& p : profiles) {
    const auto bad = [&](const std::string& what) {
      return InvalidPlan("device '" + p.device_id + "': " + what);
    };
    if (p.device_id.empty()) throw InvalidPlan("device id must not be empty");
    if (!ids.insert(p.device_id).second) throw bad("duplicate device id");
    if (!(p.nominal_rate > 0.0)) throw bad("nominal_rate must be positive");
    if (!(p.clock_scale > 0.0)) throw bad("clock_scale must be positive");
    if (!std::isfinite(p.clock_offset)) throw bad("clock_offset must be finite");
    if (!(p.marker_jitter_sigma >= 0.0)) throw bad("marker_jitter_sigma must be >= 0");
    if (!(p.marker_drop_prob >= 0.0 && p.marker_drop_prob < 1.0))
      throw bad("marker_drop_prob must be in [0, 1)");
    if (p.kind == DeviceKind::Eeg && p.channel_count <= 0) throw bad("EEG needs channels");
  }
}

}  // namespace

std::string_view to_string(DeviceKind kind) {
  switch (kind) {
    case DeviceKind::Eeg:
      return "eeg";
    case DeviceKind::Gaze:
      return "gaze";
    case DeviceKind::Input:
      return "input";
  }
  return "unknown";
}

std::optional<DeviceKind> device_kind_from_string(std::string_view name) {
  for (auto k : {DeviceKind::Eeg, DeviceKind::Gaze, DeviceKind::Input}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

std::string_view to_string(MarkerCause cause) {
  switch (cause) {
    case MarkerCause::TrialStart:
      return "trial_start";
    case MarkerCause::TrialEnd:
      return "trial_end";
    case MarkerCause::Press:
      return "press";
  }
  return "unknown";
}

std::optional<MarkerCause> marker_cause_from_string(std::string_view name) {
  for (auto c : {MarkerCause::TrialStart, MarkerCause::TrialEnd, MarkerCause::Press}) {
    if (to_string(c) == name) return c;
  }
  return std::nullopt;
}

double SessionPlan::session_end() const {
  if (trials.empty()) {
    return lead_in;
  }
  return trial_start(trials.size() - 1) + trial_duration + lead_in;
}

const DeviceRecording* SessionRecording::find_device(std::string_view id) const {
  for (const auto& d : devices) {
    if (d.info.device_id == id) return &d;
  }
  return nullptr;
}

std::vector<ScheduledMarker> marker_schedule(const SessionPlan& plan) {
  std::vector<ScheduledMarker> events;
  for (std::size_t i = 0; i < plan.trials.size(); ++i) {
    const int trial_id = plan.trials[i].layout.trial_id;
    const double start = plan.trial_start(i);
    events.push_back({0, start, MarkerCause::TrialStart, trial_id});
    for (const auto& b : plan.trials[i].behaviors) {
      if (b.press_time) {
        events.push_back({0, start + *b.press_time, MarkerCause::Press, trial_id});
      }
    }
    events.push_back({0, start + plan.trial_duration, MarkerCause::TrialEnd, trial_id});
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const auto& a, const auto& b) { return a.t_reference < b.t_reference; });
  for (std::size_t i = 0; i < events.size(); ++i) {
    events[i].seq = i;
  }
  return events;
}

void validate_plan(const SessionPlan& plan) {
  if (plan.participant_id.empty()) throw InvalidPlan("participant id must not be empty");
  if (plan.trials.empty()) throw InvalidPlan("plan has no trials");
  if (!(plan.trial_duration > 0.0)) throw InvalidPlan("trial_duration must be positive");
  if (!(plan.rest_duration >= 0.0)) throw InvalidPlan("rest_duration must be >= 0");
  if (!(plan.lead_in >= 0.0)) throw InvalidPlan("lead_in must be >= 0");

  for (std::size_t i = 0; i < plan.trials.size(); ++i) {
    const auto& trial = plan.trials[i];
    const std::string where = "trial " + std::to_string(trial.layout.trial_id) + ": ";
    if (trial.layout.trial_id != static_cast<int>(i) + 1) {
      throw InvalidPlan(where + "trial ids must run 1..N in order");
    }
    std::set<int> ids;
    for (const auto& h : trial.layout.placements) ids.insert(h.id);
    if (trial.layout.placements.size() != scene::kHazardCount ||
        ids.size() != scene::kHazardCount || *ids.begin() != 1 ||
        *ids.rbegin() != scene::kHazardCount) {
      throw InvalidPlan(where + "layout must place hazards 1..10 exactly once");
    }
    for (const auto& b : trial.behaviors) {
      if (b.hazard_id < 1 || b.hazard_id > scene::kHazardCount)
        throw InvalidPlan(where + "behavior names unknown hazard " + std::to_string(b.hazard_id));
      if (!(b.gaze_onset >= 0.0 && b.gaze_duration > 0.0 &&
            b.gaze_onset + b.gaze_duration <= plan.trial_duration))
        throw InvalidPlan(where + "gaze interval outside the trial");
      if (b.press_time && !(*b.press_time > 0.0 && *b.press_time <= plan.trial_duration))
        throw InvalidPlan(where + "press time outside (0, trial_duration]");
    }
  }

  const auto schedule = marker_schedule(plan);
  for (std::size_t i = 1; i < schedule.size(); ++i) {
    if (!(schedule[i].t_reference > schedule[i - 1].t_reference)) {
      throw InvalidPlan("stimulation events at reference time " +
                        std::to_string(schedule[i].t_reference) +
                        " are not strictly ordered (trial " +
                        std::to_string(schedule[i].trial_id) + ")");
    }
  }
}

std::vector<labeling::DetectionEvent> planned_detections(const SessionPlan& plan) {
  std::vector<labeling::DetectionEvent> out;
  std::set<std::pair<int, int>> seen;
  for (std::size_t i = 0; i < plan.trials.size(); ++i) {
    const auto& trial = plan.trials[i];
    std::vector<const PlannedBehavior*> pressed;
    for (const auto& b : trial.behaviors) {
      if (b.press_time) pressed.push_back(&b);
    }
    std::stable_sort(pressed.begin(), pressed.end(),
                     [](const auto* a, const auto* b) { return *a->press_time < *b->press_time; });
    for (const auto* b : pressed) {
      if (seen.emplace(trial.layout.trial_id, b->hazard_id).second) {
        const double t = plan.trial_start(i) + *b->press_time;
        out.push_back({plan.participant_id, trial.layout.trial_id, b->hazard_id, t, t});
      }
    }
  }
  return out;
}

SessionRecording simulate_session(const SessionPlan& plan, const std::vector<DeviceProfile>& profiles,
                                  std::uint64_t seed, const SimulationOptions& options) {
  validate_plan(plan);
  validate_profiles(profiles);
  if (!(options.gaze_noise_sigma_deg >= 0.0 && options.gaze_noise_clip_sigmas >= 0.0)) {
    throw InvalidPlan("gaze noise parameters must be >= 0");
  }

  SessionRecording rec;
  Manifest& m = rec.manifest;
  m.participant_id = plan.participant_id;
  m.participant_age = plan.participant_age;
  m.seed = seed;
  m.viewer = plan.viewer;
  m.trial_duration = plan.trial_duration;
  m.rest_duration = plan.rest_duration;
  m.lead_in = plan.lead_in;
  for (std::size_t i = 0; i < plan.trials.size(); ++i) {
    const double start = plan.trial_start(i);
    m.trials.push_back({plan.trials[i].layout.trial_id, start, start + plan.trial_duration,
                        plan.trials[i].layout});
  }
  m.reference_markers = marker_schedule(plan);

  const double end = plan.session_end();
  const double trial_period = plan.trial_duration + plan.rest_duration;
  const double clearance = deg_to_rad(options.clearance_deg());
  const double sigma = deg_to_rad(options.gaze_noise_sigma_deg);
  const double clip = deg_to_rad(options.max_gaze_noise_deg());

  // Index of the trial running at reference time t, if any.
  const auto trial_at = [&](double t) -> std::optional<std::size_t> {
    if (t < plan.lead_in) return std::nullopt;
    const auto k = static_cast<std::size_t>((t - plan.lead_in) / trial_period);
    for (std::size_t i : {k == 0 ? k : k - 1, k}) {
      if (i < plan.trials.size() && t >= plan.trial_start(i) &&
          t <= plan.trial_start(i) + plan.trial_duration) {
        return i;
      }
    }
    return std::nullopt;
  };
  const auto nearby_trials = [&](double t) {
    const double pos = std::floor((t - plan.lead_in) / trial_period);
    const auto last = static_cast<double>(plan.trials.size() - 1);
    const auto lo = static_cast<std::size_t>(std::clamp(pos, 0.0, last));
    const auto hi = static_cast<std::size_t>(std::clamp(pos + 1.0, 0.0, last));
    return std::array<std::size_t, 2>{lo, hi};
  };

  for (const auto& profile : profiles) {
    const timeline::ClockModel truth{profile.clock_scale, profile.clock_offset, 0.0, 2};
    rec.ground_truth.clocks[profile.device_id] = truth;
    auto rng = make_rng(seed, fnv1a(profile.device_id));

    DeviceRecording dev;
    dev.info = {profile.device_id, profile.kind, profile.nominal_rate,
                profile.kind == DeviceKind::Eeg ? profile.channel_count : 0};

    // Markers: every stimulation event reaches every device.
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> jitter(0.0, 1.0);
    for (const auto& ev : m.reference_markers) {
      const bool dropped = unit(rng) < profile.marker_drop_prob;
      const double noise = jitter(rng) * profile.marker_jitter_sigma;
      if (dropped) continue;
      const double t = timeline::to_device(truth, ev.t_reference) + noise;
      // A recorder keeps its log strictly increasing; reordered markers are lost.
      if (!dev.markers.empty() && !(t > dev.markers.back().t_device)) continue;
      dev.markers.push_back({ev.seq, t});
    }

    const double t0 = timeline::to_device(truth, 0.0);
    const double period = 1.0 / profile.nominal_rate;
    const auto sample_count = static_cast<std::size_t>(
        std::floor((timeline::to_device(truth, end) - t0) / period)) + 1;

    switch (profile.kind) {
      case DeviceKind::Eeg: {
        std::vector<EegSample> samples;
        samples.reserve(sample_count);
        std::vector<double> state(static_cast<std::size_t>(profile.channel_count), 0.0);
        std::normal_distribution<double> n(0.0, options.eeg_noise_uv);
        for (std::size_t i = 0; i < sample_count; ++i) {
          for (auto& x : state) x = options.eeg_ar_coefficient * x + n(rng);
          samples.push_back({t0 + static_cast<double>(i) * period, state});
        }
        dev.samples = std::move(samples);
        break;
      }
      case DeviceKind::Gaze: {
        std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
        const ScanPath scan{phase(rng), phase(rng), phase(rng)};
        std::vector<gaze::GazeSample> samples;
        samples.reserve(sample_count);
        for (std::size_t i = 0; i < sample_count; ++i) {
          const double t_dev = t0 + static_cast<double>(i) * period;
          const double t_ref = timeline::to_reference(truth, t_dev);
          Vec3 aim = scan.at(t_ref);
          const PlannedBehavior* look = nullptr;
          std::size_t look_trial = 0;
          if (auto k = trial_at(t_ref)) {
            const double rel = t_ref - plan.trial_start(*k);
            for (const auto& b : plan.trials[*k].behaviors) {
              if (rel >= b.gaze_onset && rel <= b.gaze_onset + b.gaze_duration) {
                look = &b;
                look_trial = *k;
                break;
              }
            }
          }
          if (look) {
            aim = normalized(plan.trials[look_trial].layout.hazard(look->hazard_id).center -
                             plan.viewer);
          } else {
            // Stay clear of the layouts on both sides of t so that a sample near a
            // trial boundary cannot turn into a hit after resynchronization.
            const auto near = nearby_trials(t_ref);
            const auto clear = [&](Vec3 d) {
              return std::all_of(near.begin(), near.end(), [&](std::size_t i) {
                return clear_of_hazards(d, plan.viewer, plan.trials[i].layout, clearance);
              });
            };
            if (!clear(aim)) {
              const auto& dirs = fallback_directions();
              auto it = std::find_if(dirs.begin(), dirs.end(), clear);
              if (it == dirs.end()) {
                throw InvalidPlan("no gaze direction keeps the scan path clear of hazards");
              }
              aim = *it;
            }
          }
          samples.push_back({t_dev, plan.viewer, perturb(aim, sigma, clip, rng)});
        }
        dev.samples = std::move(samples);
        break;
      }
      case DeviceKind::Input: {
        std::vector<PressSample> presses;
        for (const auto& ev : m.reference_markers) {
          if (ev.cause == MarkerCause::Press) {
            presses.push_back({timeline::to_device(truth, ev.t_reference), ev.trial_id});
          }
        }
        dev.samples = std::move(presses);
        break;
      }
    }
    rec.manifest.devices.push_back(dev.info);
    rec.devices.push_back(std::move(dev));
  }

  rec.ground_truth.detections = planned_detections(plan);
  return rec;
}

std::vector<int> unambiguous_hazards(const scene::TrialLayout& layout, Vec3 viewer,
                                     double clearance_deg) {
  const double clearance = deg_to_rad(clearance_deg);
  std::vector<int> out;
  for (const auto& h : layout.placements) {
    const Vec3 los = h.center - viewer;
    if (!(norm(los) > 0.0)) continue;
    const bool clear = std::all_of(
        layout.placements.begin(), layout.placements.end(), [&](const scene::HazardAoi& o) {
          return o.id == h.id || angle_between(los, o.center - viewer) >= clearance;
        });
    if (clear) out.push_back(h.id);
  }
  return out;
}

SessionPlan make_session_plan(const PlanConfig& config, std::uint64_t seed,
                              const SimulationOptions& options) {
  const BehaviorConfig& bc = config.behavior;
  if (config.trial_count <= 0) throw InvalidPlan("trial_count must be positive");
  if (bc.min_looks < 0 || bc.max_looks < bc.min_looks)
    throw InvalidPlan("look counts must satisfy 0 <= min_looks <= max_looks");
  if (!(bc.gaze_duration_min > 0.0 && bc.gaze_duration_max >= bc.gaze_duration_min))
    throw InvalidPlan("gaze duration range is invalid");
  if (!(bc.min_press_delay > 0.0 && bc.min_press_delay <= bc.gaze_duration_min))
    throw InvalidPlan("min_press_delay must be in (0, gaze_duration_min]");
  if (!(bc.gap_min > 0.0 && bc.gap_max >= bc.gap_min)) throw InvalidPlan("gap range is invalid");
  if (!(bc.detect_prob >= 0.0 && bc.detect_prob <= 1.0))
    throw InvalidPlan("detect_prob must be in [0, 1]");

  SessionPlan plan;
  plan.participant_id = config.participant_id;
  plan.participant_age = config.participant_age;
  plan.viewer = config.viewer;
  plan.trial_duration = config.trial_duration;
  plan.rest_duration = config.rest_duration;
  plan.lead_in = config.lead_in;

  const std::uint64_t layout_seed = config.layout_seed.value_or(seed);
  auto rng = make_rng(seed, fnv1a("behavior"));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  for (int trial_id = 1; trial_id <= config.trial_count; ++trial_id) {
    TrialPlan trial;
    trial.layout = scene::generate_trial_layout(trial_id, layout_seed, config.placement);
    auto candidates = unambiguous_hazards(trial.layout, plan.viewer, options.clearance_deg());
    std::shuffle(candidates.begin(), candidates.end(), rng);
    const int looks = std::uniform_int_distribution<int>(bc.min_looks, bc.max_looks)(rng);

    double t = uniform(bc.first_look_min, bc.first_look_min + bc.gap_max);
    for (int k = 0; k < looks && k < static_cast<int>(candidates.size()); ++k) {
      const double onset = k == 0 ? t : t + uniform(bc.gap_min, bc.gap_max);
      const double duration = uniform(bc.gaze_duration_min, bc.gaze_duration_max);
      if (onset + duration > plan.trial_duration - bc.trial_tail) break;
      PlannedBehavior b{candidates[static_cast<std::size_t>(k)], onset, duration, std::nullopt};
      if (unit(rng) < bc.detect_prob) {
        b.press_time = onset + uniform(bc.min_press_delay, duration);
      }
      trial.behaviors.push_back(b);
      t = onset + duration;
    }
    plan.trials.push_back(std::move(trial));
  }
  validate_plan(plan);
  return plan;
}

}  // namespace hazsync::sim
