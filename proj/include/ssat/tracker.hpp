#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ssat/association.hpp"
#include "ssat/features.hpp"
#include "ssat/geometry.hpp"

namespace ssat {

enum class TrackState { Tracked, Lost };

struct Track {
  TrackId id = 0;
  TrackState state = TrackState::Tracked;
  BoundingBox box;
  FeatureVec feature;
  std::uint32_t frames_since_seen = 0;
  std::uint32_t total_hits = 0;
};

struct Detection {
  BoundingBox box;
  double confidence = 1.0;
  FeatureVec feature;
};

struct TrackerConfig {
  AssocConfig assoc;
  double beta = 0.4;
  std::uint32_t max_lost_age = 30;
  double min_confidence = 0.4;
  std::size_t embedding_dim = kDefaultEmbeddingDim;
  // When false, a matched track's feature is replaced by the detection's.
  bool feature_accumulation = true;

  void validate() const {
    assoc.validate();
    if (!(beta >= 0.0 && beta <= 1.0)) throw InputError("tracker: beta outside [0,1]");
    if (!(min_confidence >= 0.0 && min_confidence <= 1.0))
      throw InputError("tracker: min_confidence outside [0,1]");
    if (embedding_dim == 0) throw InputError("tracker: embedding_dim must be positive");
  }
};

/// One (frame, id, box) output row.
struct TrackRecord {
  std::int64_t frame = 0;
  TrackId id = 0;
  BoundingBox box;
  friend bool operator==(const TrackRecord&, const TrackRecord&) = default;
};

using TrackOutput = std::vector<TrackRecord>;

struct FrameResult {
  std::int64_t frame = 0;
  std::vector<std::pair<TrackId, BoundingBox>> tracks;  // Tracked only, by id
};

struct FrameDetections {
  std::int64_t frame = 0;
  std::vector<Detection> detections;
};

/// Online tracker. Owns the track list for one sequence; call step() once
/// per frame with strictly increasing frame indices.
class Tracker {
 public:
  explicit Tracker(TrackerConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

  const TrackerConfig& config() const { return cfg_; }
  const std::vector<Track>& tracks() const { return tracks_; }
  const MatchOutcome& last_outcome() const { return last_; }

  FrameResult step(std::int64_t frame, std::span<const Detection> detections) {
    if (last_frame_ && frame <= *last_frame_) {
      throw InputError("tracker: frame index " + std::to_string(frame) +
                       " does not follow " + std::to_string(*last_frame_));
    }
    last_frame_ = frame;

    // Low-confidence and zero-perimeter detections never reach matching.
    std::vector<const Detection*> usable;
    for (const auto& d : detections) {
      if (d.feature.dim() != cfg_.embedding_dim) {
        throw InputError("tracker: detection feature has dimension " +
                         std::to_string(d.feature.dim()) + ", expected " +
                         std::to_string(cfg_.embedding_dim));
      }
      if (!d.box.valid()) throw InputError("tracker: invalid detection box " + to_string(d.box));
      if (d.confidence < cfg_.min_confidence || !(perimeter(d.box) > 0.0)) continue;
      usable.push_back(&d);
    }
    std::vector<ObservationRef> det_refs;
    for (const Detection* d : usable) det_refs.push_back(ObservationRef{d->box, d->feature});
    std::vector<TrackRef> tracked, lost;
    for (const auto& t : tracks_) {
      (t.state == TrackState::Tracked ? tracked : lost).push_back(TrackRef{t.id, t.box, t.feature});
    }
    last_ = two_stage_match(tracked, lost, det_refs, cfg_.assoc);

    for (const auto& m : last_.matches) absorb(m.track_id, *usable[m.detection]);
    for (const auto& m : last_.reacquired) absorb(m.track_id, *usable[m.detection]);
    for (TrackId id : last_.unmatched_tracks) {
      Track& t = find(id);
      t.state = TrackState::Lost;
      t.frames_since_seen = 1;
    }
    for (TrackId id : last_.unmatched_lost) ++find(id).frames_since_seen;
    std::erase_if(tracks_, [&](const Track& t) {
      return t.state == TrackState::Lost && t.frames_since_seen > cfg_.max_lost_age;
    });
    for (std::size_t idx : last_.unmatched_detections) {
      const Detection& d = *usable[idx];
      tracks_.push_back(Track{next_id_++, TrackState::Tracked, d.box, d.feature, 0, 1});
    }

    FrameResult result{frame, {}};
    for (const auto& t : tracks_)
      if (t.state == TrackState::Tracked) result.tracks.emplace_back(t.id, t.box);
    return result;
  }

 private:
  Track& find(TrackId id) {
    auto it = std::ranges::find(tracks_, id, &Track::id);
    if (it == tracks_.end()) throw InvariantError("tracker: unknown track id " + std::to_string(id));
    return *it;
  }

  void absorb(TrackId id, const Detection& d) {
    Track& t = find(id);
    t.state = TrackState::Tracked;
    t.box = d.box;
    t.feature = cfg_.feature_accumulation ? accumulate(t.feature, d.feature, cfg_.beta)
                                          : d.feature;
    t.frames_since_seen = 0;
    ++t.total_hits;
  }

  TrackerConfig cfg_;
  std::vector<Track> tracks_;  // ascending id order
  TrackId next_id_ = 1;
  std::optional<std::int64_t> last_frame_;
  MatchOutcome last_;
};

/// Runs a fresh tracker over an ordered list of frames and concatenates the
/// per-frame outputs.
inline TrackOutput run_sequence(std::span<const FrameDetections> frames,
                                const TrackerConfig& cfg) {
  Tracker tracker(cfg);
  TrackOutput out;
  for (const auto& f : frames) {
    for (const auto& [id, box] : tracker.step(f.frame, f.detections).tracks) {
      out.push_back(TrackRecord{f.frame, id, box});
    }
  }
  return out;
}

}  // namespace ssat
