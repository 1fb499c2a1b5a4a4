#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include "ssat/metrics.hpp"
#include "ssat/sim.hpp"
#include "ssat/tracker.hpp"

namespace ssat {

/// Matching variants compared by the ablation harness.
enum class Variant {
  CosineOnly,       // appearance term only, feature replaced on every match
  CosineBbox,       // + box distance term
  CosineBboxAccum,  // + feature accumulation
};

inline std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::CosineOnly: return "cosine";
    case Variant::CosineBbox: return "cosine+bbox";
    case Variant::CosineBboxAccum: return "cosine+bbox+acc";
  }
  return "?";
}

inline Variant parse_variant(std::string_view s) {
  if (s == "cosine" || s == "a") return Variant::CosineOnly;
  if (s == "cosine+bbox" || s == "b") return Variant::CosineBbox;
  if (s == "cosine+bbox+acc" || s == "c") return Variant::CosineBboxAccum;
  throw InputError("unknown ablation variant '" + std::string(s) + "'");
}

inline TrackerConfig apply_variant(TrackerConfig cfg, Variant v) {
  if (v == Variant::CosineOnly) cfg.assoc.bbox_weight = 0.0;
  cfg.feature_accumulation = v == Variant::CosineBboxAccum;
  return cfg;
}

struct AblationRow {
  Variant variant = Variant::CosineOnly;
  double mean_mota = 0.0;
  double mean_idf1 = 0.0;
  double mean_idsw = 0.0;
  MetricsReport pooled;  // counts summed over seeds
  std::vector<MetricsReport> per_seed;
};

/// Runs every variant on scenarios generated with seeds
/// first_seed .. first_seed + n_seeds - 1.
inline std::vector<AblationRow> run_ablation(const SimConfig& scenario, const TrackerConfig& tracker,
                                             std::uint64_t first_seed, std::size_t n_seeds,
                                             const std::vector<Variant>& variants,
                                             double iou_gate = kDefaultIouGate) {
  std::vector<Scenario> scenarios;
  for (std::size_t s = 0; s < n_seeds; ++s) {
    SimConfig c = scenario;
    c.seed = first_seed + s;
    scenarios.push_back(generate_scenario(c));
  }
  std::vector<AblationRow> rows;
  for (Variant v : variants) {
    AblationRow row;
    row.variant = v;
    const TrackerConfig cfg = apply_variant(tracker, v);
    for (const auto& sc : scenarios) {
      const TrackOutput out = run_sequence(sc.frames, cfg);
      const MetricsReport r = evaluate(sc.gt, out, iou_gate);
      row.mean_mota += r.clear.mota.value_or(0.0);
      row.mean_idf1 += r.identity.idf1.value_or(0.0);
      row.mean_idsw += static_cast<double>(r.clear.idsw);
      row.per_seed.push_back(r);
    }
    if (n_seeds > 0) {
      const auto n = static_cast<double>(n_seeds);
      row.mean_mota /= n;
      row.mean_idf1 /= n;
      row.mean_idsw /= n;
    }
    row.pooled = aggregate(row.per_seed);
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::string ablation_table(const std::vector<AblationRow>& rows) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-18s %8s %8s %10s\n", "variant", "MOTA", "IDF1", "IDSW");
  out += buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-18s %8.2f %8.2f %10.2f\n", std::string(to_string(r.variant)).c_str(),
                  100.0 * r.mean_mota, 100.0 * r.mean_idf1, r.mean_idsw);
    out += buf;
  }
  return out;
}

}  // namespace ssat
