// Command-line driver: track, eval, simulate, ablate, render, config.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ssat/ssat.hpp"

namespace fs = std::filesystem;
using namespace ssat;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kInput = 2, kInternal = 3 };

std::ifstream open_in(const std::string& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw InputError("cannot open '" + path + "' for reading");
  return in;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw InputError("failed writing '" + path + "'");
}

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> solver;
  bool no_bbox = false;
  bool no_acc = false;
  std::optional<std::uint32_t> max_lost_age;

  void add_to(CLI::App* app, bool tracker_flags) {
    app->add_option("--config", config_path, "configuration file")->check(CLI::ExistingFile);
    app->add_option("--seed", seed, "random seed");
    if (!tracker_flags) return;
    app->add_option("--solver", solver, "assignment solver")
        ->check(CLI::IsMember({"hungarian", "greedy"}));
    app->add_flag("--no-bbox-term", no_bbox, "drop the box distance term");
    app->add_flag("--no-feature-acc", no_acc, "replace track features instead of blending");
    app->add_option("--max-lost-age", max_lost_age, "frames a lost track is kept");
  }

  RunConfig load() const {
    RunConfig cfg;
    if (!config_path.empty()) {
      auto in = open_in(config_path);
      load_config(in, cfg, config_path);
    }
    if (seed) cfg.sim.seed = *seed;
    if (solver) cfg.tracker.assoc.solver = *solver == "greedy" ? Solver::Greedy : Solver::Hungarian;
    if (no_bbox) cfg.tracker.assoc.bbox_weight = 0.0;
    if (no_acc) cfg.tracker.feature_accumulation = false;
    if (max_lost_age) cfg.tracker.max_lost_age = *max_lost_age;
    cfg.validate();
    return cfg;
  }
};

// Inserts empty frames so every index in [first, last] is stepped.
std::vector<FrameDetections> fill_gaps(std::vector<FrameDetections> frames, std::int64_t first,
                                       std::int64_t last) {
  std::map<std::int64_t, FrameDetections> by;
  for (auto& f : frames) by[f.frame] = std::move(f);
  if (!by.empty()) {
    first = std::min(first, by.begin()->first);
    last = std::max(last, by.rbegin()->first);
  }
  std::vector<FrameDetections> out;
  for (std::int64_t t = first; t <= last; ++t) {
    auto it = by.find(t);
    out.push_back(it == by.end() ? FrameDetections{t, {}} : std::move(it->second));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ssat: two-stage appearance + geometry multi-object tracker"};
  app.require_subcommand(1);

  auto* track = app.add_subcommand("track", "track a detection file with its embeddings");
  Overrides track_ov;
  std::string det_path, emb_path, out_path, seqinfo_path;
  track_ov.add_to(track, true);
  track->add_option("--dets", det_path, "MOTChallenge detection file")->required();
  track->add_option("--emb", emb_path, "SSEB embedding file")->required();
  track->add_option("--seqinfo", seqinfo_path, "seqinfo.ini giving the sequence length");
  track->add_option("--out", out_path, "result file")->required();

  auto* eval = app.add_subcommand("eval", "score a result file against ground truth");
  Overrides eval_ov;
  std::string gt_path, pred_path, metrics_out;
  eval_ov.add_to(eval, false);
  eval->add_option("--gt", gt_path, "ground-truth file")->required();
  eval->add_option("--pred", pred_path, "result file")->required();
  eval->add_option("--out", metrics_out, "key=value metrics file");

  auto* simulate = app.add_subcommand("simulate", "generate a synthetic sequence");
  Overrides sim_ov;
  std::string sim_dir;
  sim_ov.add_to(simulate, false);
  simulate->add_option("--out", sim_dir, "output directory")->required();

  auto* ablate = app.add_subcommand("ablate", "compare matching variants on simulated scenarios");
  Overrides abl_ov;
  std::string abl_out, abl_variants;
  std::optional<std::size_t> abl_seeds;
  abl_ov.add_to(ablate, true);
  ablate->add_option("--seeds", abl_seeds, "number of seeds");
  ablate->add_option("--variants", abl_variants, "comma list of cosine, cosine+bbox, cosine+bbox+acc");
  ablate->add_option("--out", abl_out, "table output file");

  auto* render = app.add_subcommand("render", "draw trajectories as SVG");
  std::string render_in, render_meta, render_out;
  render->add_option("--input", render_in, "gt or result file")->required();
  render->add_option("--meta", render_meta, "seqinfo.ini")->required();
  render->add_option("--out", render_out, "SVG file")->required();

  auto* config = app.add_subcommand("config", "print the default configuration");
  std::string config_out;
  config->add_option("--out", config_out, "write to file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*track) {
      const RunConfig cfg = track_ov.load();
      const auto t0 = std::chrono::steady_clock::now();
      auto det_in = open_in(det_path);
      const DetectionSequence dets = parse_detections(det_in, det_path);
      auto emb_in = open_in(emb_path, true);
      const EmbeddingTable emb = read_embeddings(emb_in, cfg.tracker.embedding_dim, emb_path);
      auto frames = attach_embeddings(dets, emb, cfg.tracker.min_confidence, emb_path);
      std::int64_t first = 1, last = 0;
      if (!seqinfo_path.empty()) {
        auto si = open_in(seqinfo_path);
        last = parse_seqinfo(si, seqinfo_path).frame_count;
      }
      frames = fill_gaps(std::move(frames), first, last);
      const TrackOutput out = run_sequence(frames, cfg.tracker);
      write_file(out_path, write_tracks(out));
      const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      std::set<TrackId> ids;
      std::size_t n_det = 0;
      for (const auto& f : dets) n_det += f.detections.size();
      for (const auto& r : out) ids.insert(r.id);
      std::printf("frames=%zu detections=%zu tracks=%zu records=%zu elapsed_ms=%.1f\n", frames.size(), n_det,
                  ids.size(), out.size(), ms);
    } else if (*eval) {
      const RunConfig cfg = eval_ov.load();
      auto gt_in = open_in(gt_path);
      const auto gt = parse_gt(gt_in, gt_path);
      auto pred_in = open_in(pred_path);
      const auto pred = parse_tracks(pred_in, pred_path);
      const MetricsReport report = evaluate(gt, pred, cfg.iou_gate);
      std::fputs(to_table(report, fs::path(pred_path).stem().string()).c_str(), stdout);
      if (!metrics_out.empty()) write_file(metrics_out, to_key_values(report));
    } else if (*simulate) {
      const RunConfig cfg = sim_ov.load();
      const Scenario sc = generate_scenario(cfg.sim);
      fs::create_directories(sim_dir);
      const fs::path dir(sim_dir);
      write_file((dir / "gt.txt").string(), write_gt(sc.gt));
      write_file((dir / "det.txt").string(), write_detections(sc.detection_sequence()));
      std::ostringstream emb(std::ios::binary);
      write_embeddings(emb, sc.embeddings(), cfg.sim.embedding_dim);
      write_file((dir / "emb.sseb").string(), emb.str());
      write_file((dir / "seqinfo.ini").string(), write_seqinfo(sc.meta));
      char stats[512];
      std::snprintf(stats, sizeof stats,
                    "max_same_identity_distance=%.9f\nmin_cross_identity_distance=%.9f\n"
                    "true_detections=%lld\nfalse_positives=%lld\ndropped=%lld\noccluded_frames=%lld\n",
                    sc.stats.max_same_identity_distance, sc.stats.min_cross_identity_distance,
                    static_cast<long long>(sc.stats.true_detections),
                    static_cast<long long>(sc.stats.false_positives), static_cast<long long>(sc.stats.dropped),
                    static_cast<long long>(sc.stats.occluded_frames));
      write_file((dir / "stats.txt").string(), stats);
      std::fputs(stats, stdout);
    } else if (*ablate) {
      RunConfig cfg = abl_ov.load();
      if (abl_ov.seed) cfg.ablate_first_seed = *abl_ov.seed;
      if (abl_seeds) cfg.ablate_seeds = *abl_seeds;
      if (!abl_variants.empty()) cfg.ablate_variants = config_detail::variants(abl_variants);
      cfg.validate();
      const auto rows = run_ablation(cfg.sim, cfg.tracker, cfg.ablate_first_seed, cfg.ablate_seeds,
                                     cfg.ablate_variants, cfg.iou_gate);
      const std::string table = ablation_table(rows);
      std::fputs(table.c_str(), stdout);
      if (!abl_out.empty()) write_file(abl_out, table);
    } else if (*render) {
      auto in = open_in(render_in);
      const TrackOutput tracks = parse_tracks(in, render_in);
      auto meta_in = open_in(render_meta);
      const SequenceMeta meta = parse_seqinfo(meta_in, render_meta);
      write_file(render_out, render_svg(tracks, meta));
    } else if (*config) {
      if (config_out.empty()) std::fputs(default_config_text().c_str(), stdout);
      else write_file(config_out, default_config_text());
    }
  } catch (const InputError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInput;
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInput;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return kInternal;
  }
  return kOk;
}
