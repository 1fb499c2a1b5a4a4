#pragma once

#include <concepts>
#include <cstdint>
#include <ranges>
#include <string>
#include <vector>

#include "ssat/assignment.hpp"
#include "ssat/features.hpp"
#include "ssat/geometry.hpp"

namespace ssat {

using TrackId = std::uint64_t;

/// Anything carrying a box and an appearance feature.
template <typename T>
concept Observed = requires(const T& t) {
  { t.box } -> std::convertible_to<BoundingBox>;
  { t.feature } -> std::convertible_to<const FeatureVec&>;
};

/// An observed object that also carries a track id.
template <typename T>
concept Identified = Observed<T> && requires(const T& t) {
  { t.id } -> std::convertible_to<TrackId>;
};

/// Non-owning views usable wherever Observed / Identified is expected.
struct ObservationRef {
  const BoundingBox& box;
  const FeatureVec& feature;
};

struct TrackRef {
  TrackId id;
  const BoundingBox& box;
  const FeatureVec& feature;
};

struct AssocConfig {
  double alpha = 2.0;
  double cos_weight = 1.0;
  double bbox_weight = 1.0;
  double tau1 = 0.56;
  double tau2 = 0.64;
  Solver solver = Solver::Hungarian;
  BoxNorm bbox_norm = BoxNorm::L2;

  void validate() const {
    if (!(alpha > 0.0)) throw InputError("association: alpha must be > 0");
    if (!(cos_weight >= 0.0) || !(bbox_weight >= 0.0))
      throw InputError("association: weights must be >= 0");
    if (cos_weight == 0.0 && bbox_weight == 0.0)
      throw InputError("association: cos_weight and bbox_weight are both zero");
    if (!std::isfinite(tau1) || !std::isfinite(tau2))
      throw InputError("association: thresholds must be finite");
    if (!(tau2 >= tau1))
      throw InputError("association: tau2 must be >= tau1");
  }
};

/// Weighted sum of the appearance and box terms for one track/detection pair.
inline double pair_cost(const BoundingBox& track_box, const FeatureVec& track_feat,
                        const BoundingBox& det_box, const FeatureVec& det_feat,
                        const AssocConfig& cfg) {
  double c = 0.0;
  if (cfg.cos_weight != 0.0) c += cfg.cos_weight * cosine_distance(track_feat, det_feat);
  else require_same_dim(track_feat, det_feat, "pair_cost");
  if (cfg.bbox_weight != 0.0)
    c += cfg.bbox_weight * bbox_distance(track_box, det_box, cfg.alpha, cfg.bbox_norm);
  return c;
}

template <std::ranges::forward_range Tracks, std::ranges::forward_range Dets>
  requires Observed<std::ranges::range_value_t<Tracks>> &&
           Observed<std::ranges::range_value_t<Dets>>
CostMatrix build_cost_matrix(const Tracks& tracks, const Dets& dets,
                             const AssocConfig& cfg, double threshold) {
  const auto rows = static_cast<std::size_t>(std::ranges::distance(tracks));
  const auto cols = static_cast<std::size_t>(std::ranges::distance(dets));
  CostMatrix m(rows, cols);
  std::size_t r = 0;
  for (const auto& t : tracks) {
    std::size_t c = 0;
    for (const auto& d : dets) {
      const double cost = pair_cost(t.box, t.feature, d.box, d.feature, cfg);
      m.set(r, c, cost, cost <= threshold);
      ++c;
    }
    ++r;
  }
  return m;
}

struct Match {
  TrackId track_id = 0;
  std::size_t detection = 0;
  double cost = 0.0;
  friend bool operator==(const Match&, const Match&) = default;
};

struct MatchOutcome {
  std::vector<Match> matches;
  std::vector<Match> reacquired;
  std::vector<TrackId> unmatched_tracks;  // tracked tracks left without a detection
  std::vector<TrackId> unmatched_lost;    // lost tracks still unseen
  std::vector<std::size_t> unmatched_detections;
  friend bool operator==(const MatchOutcome&, const MatchOutcome&) = default;
};

namespace detail {

template <typename Tracks>
std::vector<TrackId> ids_of(const Tracks& tracks) {
  std::vector<TrackId> ids;
  for (const auto& t : tracks) ids.push_back(static_cast<TrackId>(t.id));
  return ids;
}

}  // namespace detail

/// Stage 1 matches detections to tracked tracks under tau1; leftover
/// detections are matched to lost tracks under tau2 and reported as
/// reacquisitions. Detection indices refer to positions in `dets`.
template <std::ranges::forward_range Tracks, std::ranges::forward_range Lost,
          std::ranges::random_access_range Dets>
  requires Identified<std::ranges::range_value_t<Tracks>> &&
           Identified<std::ranges::range_value_t<Lost>> &&
           Observed<std::ranges::range_value_t<Dets>>
MatchOutcome two_stage_match(const Tracks& tracked, const Lost& lost,
                             const Dets& dets, const AssocConfig& cfg) {
  MatchOutcome out;
  const auto tracked_ids = detail::ids_of(tracked);
  const auto lost_ids = detail::ids_of(lost);
  const auto n_dets = static_cast<std::size_t>(std::ranges::size(dets));

  const CostMatrix first = build_cost_matrix(tracked, dets, cfg, cfg.tau1);
  std::vector<char> track_used(tracked_ids.size(), 0), det_used(n_dets, 0);
  for (const auto& [r, c] : solve_assignment(first, cfg.solver)) {
    out.matches.push_back({tracked_ids[r], c, first.cost(r, c)});
    track_used[r] = det_used[c] = 1;
  }
  for (std::size_t r = 0; r < tracked_ids.size(); ++r)
    if (!track_used[r]) out.unmatched_tracks.push_back(tracked_ids[r]);

  std::vector<std::size_t> remaining;
  for (std::size_t c = 0; c < n_dets; ++c)
    if (!det_used[c]) remaining.push_back(c);

  std::vector<char> lost_used(lost_ids.size(), 0);
  if (!lost_ids.empty() && !remaining.empty()) {
    std::vector<ObservationRef> rest;
    for (std::size_t c : remaining) {
      const auto& d = std::ranges::begin(dets)[static_cast<std::ptrdiff_t>(c)];
      rest.push_back(ObservationRef{d.box, d.feature});
    }
    const CostMatrix second = build_cost_matrix(lost, rest, cfg, cfg.tau2);
    for (const auto& [r, c] : solve_assignment(second, cfg.solver)) {
      out.reacquired.push_back({lost_ids[r], remaining[c], second.cost(r, c)});
      lost_used[r] = 1;
      det_used[remaining[c]] = 1;
    }
  }
  for (std::size_t r = 0; r < lost_ids.size(); ++r)
    if (!lost_used[r]) out.unmatched_lost.push_back(lost_ids[r]);
  for (std::size_t c = 0; c < n_dets; ++c)
    if (!det_used[c]) out.unmatched_detections.push_back(c);
  return out;
}

}  // namespace ssat
