#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ssat/assignment.hpp"
#include "ssat/geometry.hpp"
#include "ssat/motio.hpp"
#include "ssat/tracker.hpp"

namespace ssat {

inline constexpr double kDefaultIouGate = 0.5;

struct ClearMot {
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t idsw = 0;
  std::int64_t matches = 0;
  std::int64_t gt_total = 0;
  std::int64_t pred_total = 0;
  std::optional<double> mota;  // absent when there is no ground truth
};

struct IdentityScores {
  std::int64_t idtp = 0;
  std::int64_t idfp = 0;
  std::int64_t idfn = 0;
  std::optional<double> idf1;  // absent when there is no ground truth
};

struct Coverage {
  std::int64_t mt = 0;
  std::int64_t pt = 0;
  std::int64_t ml = 0;
  std::int64_t gt_ids = 0;
};

struct MetricsReport {
  ClearMot clear;
  IdentityScores identity;
  Coverage coverage;
};

namespace metrics_detail {

struct FrameBoxes {
  std::vector<std::pair<TrackId, BoundingBox>> gt;
  std::vector<std::pair<TrackId, BoundingBox>> pred;
};

inline std::map<std::int64_t, FrameBoxes> by_frame(std::span<const GtEntry> gt,
                                                   std::span<const TrackRecord> pred) {
  std::map<std::int64_t, FrameBoxes> frames;
  for (const auto& g : gt) frames[g.frame].gt.emplace_back(g.id, g.box);
  for (const auto& p : pred) frames[p.frame].pred.emplace_back(p.id, p.box);
  for (auto& [frame, fb] : frames) {
    for (auto* list : {&fb.gt, &fb.pred}) {
      std::set<TrackId> seen;
      for (const auto& [id, box] : *list) {
        if (!seen.insert(id).second) {
          throw InputError("metrics: id " + std::to_string(id) + " appears twice in frame " +
                           std::to_string(frame));
        }
      }
    }
  }
  return frames;
}

// Per-frame CLEAR correspondences: (gt id, pred id) for every match.
struct ClearTrace {
  ClearMot counts;
  std::map<TrackId, std::int64_t> gt_frames;    // frames each gt id is present
  std::map<TrackId, std::int64_t> gt_matched;   // frames each gt id is matched
};

inline ClearTrace clear_trace(std::span<const GtEntry> gt, std::span<const TrackRecord> pred,
                              double iou_gate) {
  ClearTrace t;
  std::map<TrackId, TrackId> prev_frame;  // matches of the preceding frame
  std::map<TrackId, TrackId> last_match;  // most recent pred id per gt id
  std::optional<std::int64_t> prev_index;
  for (const auto& [frame, fb] : by_frame(gt, pred)) {
    if (prev_index && frame != *prev_index + 1) prev_frame.clear();
    prev_index = frame;
    const std::size_t ng = fb.gt.size(), np = fb.pred.size();
    std::vector<char> g_used(ng, 0), p_used(np, 0);
    std::map<TrackId, TrackId> current;

    // Keep last frame's pairs that are still inside the gate.
    for (std::size_t i = 0; i < ng; ++i) {
      const auto it = prev_frame.find(fb.gt[i].first);
      if (it == prev_frame.end()) continue;
      for (std::size_t j = 0; j < np; ++j) {
        if (fb.pred[j].first == it->second && !p_used[j] &&
            iou(fb.gt[i].second, fb.pred[j].second) >= iou_gate) {
          g_used[i] = p_used[j] = 1;
          current[fb.gt[i].first] = fb.pred[j].first;
        }
      }
    }

    std::vector<std::size_t> gi, pj;
    for (std::size_t i = 0; i < ng; ++i) if (!g_used[i]) gi.push_back(i);
    for (std::size_t j = 0; j < np; ++j) if (!p_used[j]) pj.push_back(j);
    CostMatrix m(gi.size(), pj.size());
    for (std::size_t a = 0; a < gi.size(); ++a)
      for (std::size_t b = 0; b < pj.size(); ++b) {
        const double o = iou(fb.gt[gi[a]].second, fb.pred[pj[b]].second);
        m.set(a, b, 1.0 - o, o >= iou_gate);
      }
    for (const auto& [a, b] : solve_hungarian(m)) {
      current[fb.gt[gi[a]].first] = fb.pred[pj[b]].first;
    }

    for (const auto& [g, p] : current) {
      const auto it = last_match.find(g);
      if (it != last_match.end() && it->second != p) ++t.counts.idsw;
      last_match[g] = p;
      ++t.gt_matched[g];
    }
    for (const auto& [id, box] : fb.gt) ++t.gt_frames[id];
    const auto matched = static_cast<std::int64_t>(current.size());
    t.counts.matches += matched;
    t.counts.gt_total += static_cast<std::int64_t>(ng);
    t.counts.pred_total += static_cast<std::int64_t>(np);
    t.counts.fn += static_cast<std::int64_t>(ng) - matched;
    t.counts.fp += static_cast<std::int64_t>(np) - matched;
    prev_frame = std::move(current);
  }
  return t;
}

}  // namespace metrics_detail

inline std::optional<double> mota_from(std::int64_t fp, std::int64_t fn, std::int64_t idsw,
                                       std::int64_t gt_total) {
  if (gt_total <= 0) return std::nullopt;
  return 1.0 - static_cast<double>(fp + fn + idsw) / static_cast<double>(gt_total);
}

inline std::optional<double> idf1_from(std::int64_t idtp, std::int64_t idfp, std::int64_t idfn,
                                       std::int64_t gt_total) {
  if (gt_total <= 0) return std::nullopt;
  return 2.0 * static_cast<double>(idtp) / static_cast<double>(2 * idtp + idfp + idfn);
}

/// CLEAR-MOT counts. Pairs matched in the immediately preceding frame are
/// kept while IoU >= gate; the rest is matched by gated Hungarian on 1 - IoU.
/// An identity switch is a gt id whose pred id differs from the one it had
/// at its previous matched frame.
inline ClearMot clear_mot(std::span<const GtEntry> gt, std::span<const TrackRecord> pred,
                          double iou_gate = kDefaultIouGate) {
  ClearMot c = metrics_detail::clear_trace(gt, pred, iou_gate).counts;
  c.mota = mota_from(c.fp, c.fn, c.idsw, c.gt_total);
  return c;
}

/// Identity F1 from a single global pairing of gt trajectories with predicted
/// trajectories that maximizes the number of co-located (IoU >= gate) frames.
inline IdentityScores idf1(std::span<const GtEntry> gt, std::span<const TrackRecord> pred,
                           double iou_gate = kDefaultIouGate) {
  std::map<TrackId, std::size_t> gi, pi;
  for (const auto& g : gt) gi.emplace(g.id, gi.size());
  for (const auto& p : pred) pi.emplace(p.id, pi.size());
  const std::size_t ng = gi.size(), np = pi.size();
  std::vector<std::int64_t> overlap(ng * np, 0);
  for (const auto& [frame, fb] : metrics_detail::by_frame(gt, pred)) {
    for (const auto& [g, gb] : fb.gt)
      for (const auto& [p, pb] : fb.pred)
        if (iou(gb, pb) >= iou_gate) ++overlap[gi[g] * np + pi[p]];
  }
  IdentityScores s;
  if (ng > 0 && np > 0) {
    const std::int64_t top = *std::max_element(overlap.begin(), overlap.end());
    std::vector<double> cost(ng * np);
    for (std::size_t k = 0; k < cost.size(); ++k) cost[k] = static_cast<double>(top - overlap[k]);
    for (const auto& [r, c] : hungarian_dense(cost, ng, np)) s.idtp += overlap[r * np + c];
  }
  const auto n_gt = static_cast<std::int64_t>(gt.size());
  const auto n_pred = static_cast<std::int64_t>(pred.size());
  s.idfn = n_gt - s.idtp;
  s.idfp = n_pred - s.idtp;
  s.idf1 = idf1_from(s.idtp, s.idfp, s.idfn, n_gt);
  return s;
}

/// Mostly tracked (coverage >= 80%) / mostly lost (coverage <= 20%) counts,
/// coverage being the fraction of a gt id's frames with a CLEAR match.
inline Coverage mt_ml(std::span<const GtEntry> gt, std::span<const TrackRecord> pred,
                      double iou_gate = kDefaultIouGate) {
  const auto t = metrics_detail::clear_trace(gt, pred, iou_gate);
  Coverage c;
  for (const auto& [id, frames] : t.gt_frames) {
    const auto it = t.gt_matched.find(id);
    const std::int64_t hit = it == t.gt_matched.end() ? 0 : it->second;
    ++c.gt_ids;
    if (5 * hit >= 4 * frames) ++c.mt;
    else if (5 * hit <= frames) ++c.ml;
    else ++c.pt;
  }
  return c;
}

inline MetricsReport evaluate(std::span<const GtEntry> gt, std::span<const TrackRecord> pred,
                              double iou_gate = kDefaultIouGate) {
  return MetricsReport{clear_mot(gt, pred, iou_gate), idf1(gt, pred, iou_gate),
                       mt_ml(gt, pred, iou_gate)};
}

/// Sums raw counts over sequences, then recomputes the ratios.
inline MetricsReport aggregate(std::span<const MetricsReport> reports) {
  MetricsReport a;
  for (const auto& r : reports) {
    a.clear.fp += r.clear.fp;
    a.clear.fn += r.clear.fn;
    a.clear.idsw += r.clear.idsw;
    a.clear.matches += r.clear.matches;
    a.clear.gt_total += r.clear.gt_total;
    a.clear.pred_total += r.clear.pred_total;
    a.identity.idtp += r.identity.idtp;
    a.identity.idfp += r.identity.idfp;
    a.identity.idfn += r.identity.idfn;
    a.coverage.mt += r.coverage.mt;
    a.coverage.pt += r.coverage.pt;
    a.coverage.ml += r.coverage.ml;
    a.coverage.gt_ids += r.coverage.gt_ids;
  }
  a.clear.mota = mota_from(a.clear.fp, a.clear.fn, a.clear.idsw, a.clear.gt_total);
  a.identity.idf1 = idf1_from(a.identity.idtp, a.identity.idfp, a.identity.idfn, a.clear.gt_total);
  return a;
}

namespace metrics_detail {

inline std::string fixed(std::optional<double> v, int digits = 4) {
  if (!v) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, *v);
  return buf;
}

inline std::optional<double> percent(std::int64_t part, std::int64_t whole) {
  if (whole <= 0) return std::nullopt;
  return 100.0 * static_cast<double>(part) / static_cast<double>(whole);
}

}  // namespace metrics_detail

/// One metric per line, `key=value`.
inline std::string to_key_values(const MetricsReport& r) {
  using metrics_detail::fixed;
  using metrics_detail::percent;
  std::string out;
  auto line = [&](const char* k, const std::string& v) { out += std::string(k) + "=" + v + "\n"; };
  line("mota", fixed(r.clear.mota, 6));
  line("idf1", fixed(r.identity.idf1, 6));
  line("mt", std::to_string(r.coverage.mt));
  line("mt_percent", fixed(percent(r.coverage.mt, r.coverage.gt_ids), 2));
  line("pt", std::to_string(r.coverage.pt));
  line("ml", std::to_string(r.coverage.ml));
  line("ml_percent", fixed(percent(r.coverage.ml, r.coverage.gt_ids), 2));
  line("fp", std::to_string(r.clear.fp));
  line("fn", std::to_string(r.clear.fn));
  line("idsw", std::to_string(r.clear.idsw));
  line("idtp", std::to_string(r.identity.idtp));
  line("idfp", std::to_string(r.identity.idfp));
  line("idfn", std::to_string(r.identity.idfn));
  line("gt_total", std::to_string(r.clear.gt_total));
  line("pred_total", std::to_string(r.clear.pred_total));
  line("gt_ids", std::to_string(r.coverage.gt_ids));
  return out;
}

inline std::string to_table(const MetricsReport& r, const std::string& name = "sequence") {
  using metrics_detail::fixed;
  using metrics_detail::percent;
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "%-16s %8s %8s %10s %10s %8s %8s %6s\n"
                "%-16s %8s %8s %4lld(%4s) %4lld(%4s) %8lld %8lld %6lld\n",
                "sequence", "MOTA", "IDF1", "MT", "ML", "FP", "FN", "IDSW", name.c_str(),
                fixed(r.clear.mota ? std::optional(*r.clear.mota * 100) : std::nullopt, 1).c_str(),
                fixed(r.identity.idf1 ? std::optional(*r.identity.idf1 * 100) : std::nullopt, 1).c_str(),
                static_cast<long long>(r.coverage.mt),
                fixed(percent(r.coverage.mt, r.coverage.gt_ids), 0).c_str(),
                static_cast<long long>(r.coverage.ml),
                fixed(percent(r.coverage.ml, r.coverage.gt_ids), 0).c_str(),
                static_cast<long long>(r.clear.fp), static_cast<long long>(r.clear.fn),
                static_cast<long long>(r.clear.idsw));
  return buf;
}

}  // namespace ssat
