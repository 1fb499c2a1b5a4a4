#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "ssat/features.hpp"
#include "ssat/geometry.hpp"
#include "ssat/motio.hpp"
#include "ssat/tracker.hpp"

namespace ssat {

/// Explicit initial state for one identity, overriding the random draw.
struct ScriptedIdentity {
  BoundingBox box;  // box at frame 1
  double vx = 0.0;
  double vy = 0.0;
};

/// Frames [first, last] (inclusive) during which an identity emits nothing.
struct HiddenWindow {
  TrackId id = 0;
  std::int64_t first = 0;
  std::int64_t last = 0;
};

/// Defaults describe the standard benchmark: 20 identities on random
/// reflecting paths that cross often, with detector noise, occlusion drops
/// and occlusion-corrupted appearance.
struct SimConfig {
  std::size_t n_identities = 20;
  std::int64_t n_frames = 500;
  double arena_width = 1280.0;
  double arena_height = 720.0;
  double box_size_min = 30.0;  // box width; height is width x aspect in [1.8, 2.6]
  double box_size_max = 70.0;
  double speed_min = 1.0;
  double speed_max = 6.0;
  double det_jitter_sigma = 2.0;
  double fp_rate = 0.1;
  double fn_rate = 0.05;
  double occlusion_iou = 0.3;
  double feature_noise_sigma = 0.015;
  double occlusion_feature_corruption = 0.75;
  std::uint64_t seed = 1;
  std::size_t embedding_dim = kDefaultEmbeddingDim;
  std::vector<ScriptedIdentity> scripted;  // applied to ids 1..scripted.size()
  std::vector<HiddenWindow> hidden;

  void validate() const {
    auto rate = [](double r, const char* name) {
      if (!(r >= 0.0 && r <= 1.0)) throw InputError(std::string("sim: ") + name + " outside [0,1]");
    };
    rate(fp_rate, "fp_rate");
    rate(fn_rate, "fn_rate");
    rate(occlusion_iou, "occlusion_iou");
    rate(occlusion_feature_corruption, "occlusion_feature_corruption");
    if (!(det_jitter_sigma >= 0.0) || !(feature_noise_sigma >= 0.0))
      throw InputError("sim: sigmas must be >= 0");
    if (!(arena_width > 0.0) || !(arena_height > 0.0)) throw InputError("sim: arena must be positive");
    if (!(box_size_min > 0.0) || !(box_size_max >= box_size_min))
      throw InputError("sim: invalid box size range");
    if (box_size_max * 2.6 >= arena_height || box_size_max >= arena_width)
      throw InputError("sim: boxes do not fit in the arena");
    if (!(speed_min >= 0.0) || !(speed_max >= speed_min)) throw InputError("sim: invalid speed range");
    if (n_frames < 1) throw InputError("sim: n_frames must be >= 1");
    if (embedding_dim == 0 || embedding_dim > 0xFFFF) throw InputError("sim: invalid embedding_dim");
    if (scripted.size() > n_identities) throw InputError("sim: more scripted identities than identities");
  }
};

/// Same motion model with every noise source switched off and occlusion
/// never triggering: detections equal ground truth, features equal anchors.
inline SimConfig noiseless(SimConfig cfg) {
  cfg.det_jitter_sigma = 0.0;
  cfg.fp_rate = 0.0;
  cfg.fn_rate = 0.0;
  cfg.occlusion_iou = 1.0;
  cfg.feature_noise_sigma = 0.0;
  cfg.occlusion_feature_corruption = 0.0;
  return cfg;
}

/// Realized appearance separability over true (non-FP) detections.
struct SimStats {
  double max_same_identity_distance = 0.0;  // detection vs its own anchor
  double min_cross_identity_distance = 2.0;  // detection vs any other anchor
  std::int64_t true_detections = 0;
  std::int64_t false_positives = 0;
  std::int64_t dropped = 0;
  std::int64_t occluded_frames = 0;

  /// Every same-identity distance below `tau1` and every cross-identity
  /// distance above `tau2`.
  bool separable(double tau1, double tau2) const {
    return max_same_identity_distance < tau1 && min_cross_identity_distance > tau2;
  }
};

struct Scenario {
  SequenceMeta meta;
  std::vector<GtEntry> gt;
  std::vector<FrameDetections> frames;         // one entry per frame 1..n_frames
  std::vector<std::vector<TrackId>> origin;    // per detection: source identity, 0 for FP
  std::vector<FeatureVec> anchors;             // anchors[id - 1]
  SimStats stats;

  DetectionSequence detection_sequence() const {
    DetectionSequence seq;
    for (const auto& f : frames) {
      DetFrame df{f.frame, {}};
      for (const auto& d : f.detections) df.detections.push_back(RawDetection{d.box, d.confidence});
      seq.push_back(std::move(df));
    }
    return seq;
  }

  EmbeddingTable embeddings() const {
    EmbeddingTable t;
    for (const auto& f : frames)
      for (std::size_t i = 0; i < f.detections.size(); ++i)
        t.emplace(EmbeddingKey{static_cast<std::uint32_t>(f.frame), static_cast<std::uint32_t>(i)},
                  f.detections[i].feature);
    return t;
  }
};

/// Portable random source: std::mt19937_64 has a fully specified output
/// sequence, and the variates below are derived from it without the
/// implementation-defined standard distributions.
class SimRandom {
 public:
  explicit SimRandom(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  bool bernoulli(double p) { return uniform() < p; }

  // Box-Muller, one variate per call (the sine branch is discarded).
  double gaussian() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

namespace sim_detail {

// Unit vector whose components are exactly representable as float32, so the
// in-memory feature and its SSEB-encoded copy are identical.
inline FeatureVec float_exact_unit(std::vector<double> v) {
  const double n = l2_norm(v);
  for (auto& x : v) x = static_cast<double>(static_cast<float>(x / n));
  return FeatureVec::from_unit(std::move(v));
}

inline FeatureVec random_unit(SimRandom& rng, std::size_t dim) {
  std::vector<double> v(dim);
  for (auto& x : v) x = rng.gaussian();
  return float_exact_unit(std::move(v));
}

inline BoundingBox valid_box(double top, double left, double bottom, double right) {
  if (bottom < top) std::swap(top, bottom);
  if (right < left) std::swap(left, right);
  if (bottom - top < 1.0) bottom = top + 1.0;
  if (right - left < 1.0) right = left + 1.0;
  return BoundingBox{top, left, bottom, right};
}

struct Mover {
  BoundingBox box;
  double vx = 0.0;
  double vy = 0.0;

  void advance(double arena_w, double arena_h) {
    double left = box.left + vx, top = box.top + vy;
    const double w = box.width(), h = box.height();
    if (left < 0.0) { left = -left; vx = -vx; }
    if (left + w > arena_w) { left = 2.0 * (arena_w - w) - left; vx = -vx; }
    if (top < 0.0) { top = -top; vy = -vy; }
    if (top + h > arena_h) { top = 2.0 * (arena_h - h) - top; vy = -vy; }
    box = BoundingBox{top, left, top + h, left + w};
  }
};

}  // namespace sim_detail

/// Generates ground truth and detections with appearance features.
///
/// Random stream order (fixed, part of the output contract):
///   1. per identity in id order: anchor (dim gaussians), then for random
///      identities width, aspect, left, top, speed, heading;
///   2. per frame, per identity in id order, only for identities that are
///      not hidden: drop draw; if emitted: 4 jitter gaussians (when
///      det_jitter_sigma > 0), dim noise gaussians (when
///      feature_noise_sigma > 0), confidence;
///   3. per frame: false-positive draw; if one fires: width, aspect, left,
///      top, feature (dim gaussians), confidence.
inline Scenario generate_scenario(const SimConfig& cfg) {
  using namespace sim_detail;
  cfg.validate();
  SimRandom rng(cfg.seed);
  const std::size_t dim = cfg.embedding_dim;
  Scenario sc;
  sc.meta = SequenceMeta{"sim-" + std::to_string(cfg.seed), cfg.n_frames, 30.0, cfg.arena_width,
                         cfg.arena_height};

  std::vector<Mover> movers;
  for (std::size_t k = 0; k < cfg.n_identities; ++k) {
    sc.anchors.push_back(random_unit(rng, dim));
    if (k < cfg.scripted.size()) {
      const auto& s = cfg.scripted[k];
      if (!s.box.valid() || !(perimeter(s.box) > 0.0)) throw InputError("sim: invalid scripted box");
      movers.push_back(Mover{s.box, s.vx, s.vy});
      continue;
    }
    const double w = rng.uniform(cfg.box_size_min, cfg.box_size_max);
    const double h = w * rng.uniform(1.8, 2.6);
    const double left = rng.uniform(0.0, cfg.arena_width - w);
    const double top = rng.uniform(0.0, cfg.arena_height - h);
    const double speed = rng.uniform(cfg.speed_min, cfg.speed_max);
    const double heading = rng.uniform(0.0, 2.0 * std::numbers::pi);
    movers.push_back(Mover{BoundingBox{top, left, top + h, left + w}, speed * std::cos(heading),
                           speed * std::sin(heading)});
  }

  auto hidden = [&](TrackId id, std::int64_t frame) {
    return std::ranges::any_of(cfg.hidden, [&](const HiddenWindow& hw) {
      return hw.id == id && frame >= hw.first && frame <= hw.last;
    });
  };

  for (std::int64_t frame = 1; frame <= cfg.n_frames; ++frame) {
    if (frame > 1) {
      for (auto& m : movers) m.advance(cfg.arena_width, cfg.arena_height);
    }
    FrameDetections fd{frame, {}};
    std::vector<TrackId> origin;
    for (std::size_t k = 0; k < movers.size(); ++k) {
      const TrackId id = k + 1;
      const BoundingBox& box = movers[k].box;
      // Lower ids are in front; the strongest-overlapping one is the occluder.
      std::size_t occluder = k;
      double best = 0.0, covered = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        const double o = iou(movers[j].box, box);
        covered = std::max(covered, intersection_area(movers[j].box, box) / box.area());
        if (o > cfg.occlusion_iou && o > best) {
          best = o;
          occluder = j;
        }
      }
      const bool occluded = occluder != k;
      sc.gt.push_back(GtEntry{frame, id, box, std::clamp(1.0 - covered, 0.0, 1.0)});
      if (occluded) ++sc.stats.occluded_frames;
      if (hidden(id, frame)) {
        ++sc.stats.dropped;
        continue;
      }
      const double p_drop = occluded ? std::min(1.0, cfg.fn_rate + 0.5) : cfg.fn_rate;
      if (rng.bernoulli(p_drop)) {
        ++sc.stats.dropped;
        continue;
      }
      BoundingBox det = box;
      if (cfg.det_jitter_sigma > 0.0) {
        const double s = cfg.det_jitter_sigma;
        const double dt = s * rng.gaussian(), dl = s * rng.gaussian();
        const double db = s * rng.gaussian(), dr = s * rng.gaussian();
        det = valid_box(box.top + dt, box.left + dl, box.bottom + db, box.right + dr);
      }
      FeatureVec feat = sc.anchors[k];
      if (cfg.feature_noise_sigma > 0.0) {
        std::vector<double> v(dim);
        const auto a = sc.anchors[k].values();
        for (std::size_t i = 0; i < dim; ++i) v[i] = a[i] + cfg.feature_noise_sigma * rng.gaussian();
        feat = float_exact_unit(std::move(v));
      }
      if (occluded && cfg.occlusion_feature_corruption > 0.0) {
        const double c = cfg.occlusion_feature_corruption;
        const auto own = feat.values();
        const auto front = sc.anchors[occluder].values();
        std::vector<double> v(dim);
        for (std::size_t i = 0; i < dim; ++i) v[i] = (1.0 - c) * own[i] + c * front[i];
        if (l2_norm(v) >= kMinNorm) feat = float_exact_unit(std::move(v));
      }
      const double conf = rng.uniform(0.5, 1.0);
      ++sc.stats.true_detections;
      for (std::size_t j = 0; j < sc.anchors.size(); ++j) {
        const double d = cosine_distance(feat, sc.anchors[j]);
        if (j == k) sc.stats.max_same_identity_distance = std::max(sc.stats.max_same_identity_distance, d);
        else sc.stats.min_cross_identity_distance = std::min(sc.stats.min_cross_identity_distance, d);
      }
      fd.detections.push_back(Detection{det, conf, std::move(feat)});
      origin.push_back(id);
    }
    if (rng.bernoulli(cfg.fp_rate)) {
      const double w = rng.uniform(cfg.box_size_min, cfg.box_size_max);
      const double h = w * rng.uniform(1.8, 2.6);
      const double left = rng.uniform(0.0, cfg.arena_width - w);
      const double top = rng.uniform(0.0, cfg.arena_height - h);
      FeatureVec feat = random_unit(rng, dim);
      const double conf = rng.uniform(0.4, 0.8);
      fd.detections.push_back(Detection{BoundingBox{top, left, top + h, left + w}, conf, std::move(feat)});
      origin.push_back(0);
      ++sc.stats.false_positives;
    }
    sc.frames.push_back(std::move(fd));
    sc.origin.push_back(std::move(origin));
  }
  return sc;
}

}  // namespace ssat
