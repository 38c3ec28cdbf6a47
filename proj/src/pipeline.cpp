#include "hazsync/pipeline.hpp"

#include <algorithm>

#include "hazsync/error.hpp"

namespace hazsync::pipeline {

ClockModels synchronize(const sim::SessionRecording& rec) {
  std::vector<timeline::Marker> reference;
  reference.reserve(rec.manifest.reference_markers.size());
  for (const auto& m : rec.manifest.reference_markers) {
    reference.push_back({m.seq, m.t_reference});
  }

  ClockModels models;
  for (const auto& dev : rec.devices) {
    try {
      const auto pairs = timeline::match_markers(dev.markers, reference);
      models[dev.info.device_id] = timeline::fit_clock_map(pairs);
    } catch (const NoCommonMarkers& e) {
      throw SyncError(dev.info.device_id, e.what());
    } catch (const InsufficientMarkers& e) {
      throw SyncError(dev.info.device_id, e.what());
    } catch (const DegenerateFit& e) {
      throw SyncError(dev.info.device_id, e.what());
    }
  }
  return models;
}

std::vector<timeline::AlignedRecord> align(const sim::SessionRecording& rec,
                                           const ClockModels& models) {
  timeline::StreamTimes streams;
  for (const auto& dev : rec.devices) {
    auto& times = streams[dev.info.device_id];
    std::visit(
        [&](const auto& samples) {
          times.reserve(samples.size());
          for (const auto& s : samples) times.push_back(s.t);
        },
        dev.samples);
  }
  return timeline::align_streams(streams, models);
}

LabelOutcome label(const sim::SessionRecording& rec, const ClockModels& models,
                   const LabelParams& params) {
  const auto& trials = rec.manifest.trials;
  // Trial whose [t_start, t_end] contains t.
  const auto trial_at = [&](double t) -> const sim::TrialWindow* {
    auto it = std::upper_bound(trials.begin(), trials.end(), t,
                               [](double v, const sim::TrialWindow& w) { return v < w.t_start; });
    if (it == trials.begin()) return nullptr;
    --it;
    return t <= it->t_end ? &*it : nullptr;
  };
  const auto model_for = [&](const std::string& id) -> const timeline::ClockModel& {
    auto it = models.find(id);
    if (it == models.end()) throw MissingModel("no clock model for device '" + id + "'");
    return it->second;
  };

  LabelOutcome out;
  std::vector<labeling::ButtonPress> presses;
  bool have_gaze = false;
  bool have_input = false;
  for (const auto& dev : rec.devices) {
    if (dev.info.kind == sim::DeviceKind::Gaze) {
      have_gaze = true;
      const auto& model = model_for(dev.info.device_id);
      for (const auto& s : std::get<std::vector<gaze::GazeSample>>(dev.samples)) {
        gaze::GazeSample remapped = s;
        remapped.t = timeline::to_reference(model, s.t);
        if (const auto* w = trial_at(remapped.t)) {
          out.hits.push_back(gaze::cast_gaze_sample(remapped, w->layout, params.cone_deg));
        } else {
          out.hits.push_back({remapped.t, std::nullopt, 0.0});
        }
      }
    } else if (dev.info.kind == sim::DeviceKind::Input) {
      have_input = true;
      const auto& model = model_for(dev.info.device_id);
      for (const auto& p : std::get<std::vector<sim::PressSample>>(dev.samples)) {
        presses.push_back(
            {timeline::to_reference(model, p.t), p.trial_id, rec.manifest.participant_id});
      }
    }
  }
  if (!have_gaze) throw IoError("session has no gaze device");
  if (!have_input) throw IoError("session has no input device");

  std::stable_sort(out.hits.begin(), out.hits.end(),
                   [](const gaze::GazeHit& a, const gaze::GazeHit& b) { return a.t < b.t; });
  out.labels = labeling::label_detections(presses, out.hits, params.window);

  for (const auto& d : gaze::segment_dwells(out.hits, params.gap_tolerance)) {
    const auto* w = trial_at(d.start);
    out.dwells.push_back({w ? w->trial_id : 0, d});
  }
  return out;
}

analytics::SessionResult session_result(const sim::Manifest& manifest, const ClockModels& models,
                                        const labeling::Labels& labels) {
  return {{manifest.participant_id, static_cast<int>(manifest.trials.size())},
          labels.detections,
          labels.false_alarms,
          models};
}

}  // namespace hazsync::pipeline
