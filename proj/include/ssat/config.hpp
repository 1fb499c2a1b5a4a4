#pragma once

#include <charconv>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ssat/ablation.hpp"
#include "ssat/error.hpp"
#include "ssat/metrics.hpp"
#include "ssat/sim.hpp"
#include "ssat/tracker.hpp"

namespace ssat {

/// Everything a CLI run can be configured with.
struct RunConfig {
  TrackerConfig tracker;
  SimConfig sim;
  double iou_gate = kDefaultIouGate;
  std::uint64_t ablate_first_seed = 1;
  std::size_t ablate_seeds = 10;
  std::vector<Variant> ablate_variants = {Variant::CosineOnly, Variant::CosineBbox,
                                          Variant::CosineBboxAccum};

  void validate() const {
    tracker.validate();
    sim.validate();
    if (!(iou_gate > 0.0 && iou_gate <= 1.0)) throw InputError("eval: iou_gate outside (0,1]");
    if (ablate_seeds == 0) throw InputError("ablate: seeds must be >= 1");
    if (ablate_variants.empty()) throw InputError("ablate: no variants");
  }
};

namespace config_detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T number(const std::string& v, const std::string& at) {
  T out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw InputError(at + ": cannot parse '" + v + "'");
  }
  return out;
}

inline bool boolean(const std::string& v, const std::string& at) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw InputError(at + ": expected true/false, got '" + v + "'");
}

inline std::vector<Variant> variants(const std::string& v) {
  std::vector<Variant> out;
  std::size_t start = 0;
  while (start <= v.size()) {
    const auto comma = v.find(',', start);
    const std::string item = trim(std::string_view(v).substr(start, comma - start));
    if (!item.empty()) out.push_back(parse_variant(item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

inline const std::map<std::string, Setter>& setters() {
  using C = RunConfig;
  using S = const std::string&;
  static const std::map<std::string, Setter> table = {
      {"association.alpha", [](C& c, S v, S at) { c.tracker.assoc.alpha = number<double>(v, at); }},
      {"association.cos_weight", [](C& c, S v, S at) { c.tracker.assoc.cos_weight = number<double>(v, at); }},
      {"association.bbox_weight", [](C& c, S v, S at) { c.tracker.assoc.bbox_weight = number<double>(v, at); }},
      {"association.tau1", [](C& c, S v, S at) { c.tracker.assoc.tau1 = number<double>(v, at); }},
      {"association.tau2", [](C& c, S v, S at) { c.tracker.assoc.tau2 = number<double>(v, at); }},
      {"association.solver",
       [](C& c, S v, S at) {
         if (v == "hungarian") c.tracker.assoc.solver = Solver::Hungarian;
         else if (v == "greedy") c.tracker.assoc.solver = Solver::Greedy;
         else throw InputError(at + ": solver must be hungarian or greedy");
       }},
      {"association.bbox_norm",
       [](C& c, S v, S at) {
         if (v == "l2") c.tracker.assoc.bbox_norm = BoxNorm::L2;
         else if (v == "l1") c.tracker.assoc.bbox_norm = BoxNorm::L1;
         else throw InputError(at + ": bbox_norm must be l2 or l1");
       }},
      {"tracker.beta", [](C& c, S v, S at) { c.tracker.beta = number<double>(v, at); }},
      {"tracker.max_lost_age", [](C& c, S v, S at) { c.tracker.max_lost_age = number<std::uint32_t>(v, at); }},
      {"tracker.min_confidence", [](C& c, S v, S at) { c.tracker.min_confidence = number<double>(v, at); }},
      {"tracker.embedding_dim",
       [](C& c, S v, S at) {
         c.tracker.embedding_dim = number<std::size_t>(v, at);
         c.sim.embedding_dim = c.tracker.embedding_dim;
       }},
      {"tracker.feature_accumulation", [](C& c, S v, S at) { c.tracker.feature_accumulation = boolean(v, at); }},
      {"sim.n_identities", [](C& c, S v, S at) { c.sim.n_identities = number<std::size_t>(v, at); }},
      {"sim.n_frames", [](C& c, S v, S at) { c.sim.n_frames = number<std::int64_t>(v, at); }},
      {"sim.arena_width", [](C& c, S v, S at) { c.sim.arena_width = number<double>(v, at); }},
      {"sim.arena_height", [](C& c, S v, S at) { c.sim.arena_height = number<double>(v, at); }},
      {"sim.box_size_min", [](C& c, S v, S at) { c.sim.box_size_min = number<double>(v, at); }},
      {"sim.box_size_max", [](C& c, S v, S at) { c.sim.box_size_max = number<double>(v, at); }},
      {"sim.speed_min", [](C& c, S v, S at) { c.sim.speed_min = number<double>(v, at); }},
      {"sim.speed_max", [](C& c, S v, S at) { c.sim.speed_max = number<double>(v, at); }},
      {"sim.det_jitter_sigma", [](C& c, S v, S at) { c.sim.det_jitter_sigma = number<double>(v, at); }},
      {"sim.fp_rate", [](C& c, S v, S at) { c.sim.fp_rate = number<double>(v, at); }},
      {"sim.fn_rate", [](C& c, S v, S at) { c.sim.fn_rate = number<double>(v, at); }},
      {"sim.occlusion_iou", [](C& c, S v, S at) { c.sim.occlusion_iou = number<double>(v, at); }},
      {"sim.feature_noise_sigma", [](C& c, S v, S at) { c.sim.feature_noise_sigma = number<double>(v, at); }},
      {"sim.occlusion_feature_corruption",
       [](C& c, S v, S at) { c.sim.occlusion_feature_corruption = number<double>(v, at); }},
      {"sim.seed", [](C& c, S v, S at) { c.sim.seed = number<std::uint64_t>(v, at); }},
      {"eval.iou_gate", [](C& c, S v, S at) { c.iou_gate = number<double>(v, at); }},
      {"ablate.first_seed", [](C& c, S v, S at) { c.ablate_first_seed = number<std::uint64_t>(v, at); }},
      {"ablate.seeds", [](C& c, S v, S at) { c.ablate_seeds = number<std::size_t>(v, at); }},
      {"ablate.variants", [](C& c, S v, S) { c.ablate_variants = variants(v); }},
  };
  return table;
}

}  // namespace config_detail

/// Reads a sectioned `key = value` file into `cfg`. `#` starts a comment.
/// Unknown sections or keys are rejected. The result is validated.
inline void load_config(std::istream& in, RunConfig& cfg, const std::string& source = "<config>") {
  using namespace config_detail;
  std::string line, section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string at = source + ":" + std::to_string(line_no);
    const auto hash = line.find('#');
    const std::string body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') throw InputError(at + ": malformed section header");
      section = trim(std::string_view(body).substr(1, body.size() - 2));
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw InputError(at + ": expected key = value");
    const std::string key = section + "." + trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw InputError(at + ": unknown key '" + key + "'");
    it->second(cfg, value, at);
  }
  try {
    cfg.validate();
  } catch (const InputError& e) {
    throw InputError(source + ": " + e.what());
  }
}

/// The default configuration, annotated.
inline std::string default_config_text() {
  return R"(# ssat configuration. Keys not listed here are rejected.

[association]
alpha = 2             # box distance scale (reference value of the method)
cos_weight = 1        # appearance : box weighting 1:1 (reference value)
bbox_weight = 1
tau1 = 0.56           # stage-1 gate for tracked tracks (reference value)
tau2 = 0.64           # stage-2 gate for lost tracks (reference value)
solver = hungarian    # hungarian | greedy
bbox_norm = l2        # l2 | l1

[tracker]
beta = 0.4                   # feature accumulation weight (reference value)
max_lost_age = 30            # frames a lost track is kept (chosen: 1 s at 30 fps)
min_confidence = 0.4         # detections below this are ignored (chosen)
embedding_dim = 512          # appearance embedding size (reference value)
feature_accumulation = true

[sim]
n_identities = 20
n_frames = 500
arena_width = 1280
arena_height = 720
box_size_min = 30
box_size_max = 70
speed_min = 1
speed_max = 6
det_jitter_sigma = 2
fp_rate = 0.1
fn_rate = 0.05
occlusion_iou = 0.3
feature_noise_sigma = 0.015
occlusion_feature_corruption = 0.75
seed = 1

[eval]
iou_gate = 0.5

[ablate]
first_seed = 1
seeds = 10
variants = cosine, cosine+bbox, cosine+bbox+acc
)";
}

}  // namespace ssat
