// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli_support.hpp"
#include "generators.hpp"
#include "oracles.hpp"
#include "ssat/ssat.hpp"

namespace fs = std::filesystem;
using namespace ssat;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

int failures = 0;

void criterion(const char* name, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (o.pass && budget_s > 0 && s > budget_s) {
    o.pass = false;
    o.detail = "over time budget of " + std::to_string(budget_s) + " s";
  }
  if (!o.pass) ++failures;
  std::printf("%s  %-34s %8.3f s  %s\n", o.pass ? "PASS" : "FAIL", name, s, o.detail.c_str());
  std::fflush(stdout);
}

bool near(double a, double b, double tol = 1e-9) { return std::abs(a - b) <= tol; }

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Pairing sorted(Pairing p) {
  std::sort(p.begin(), p.end());
  return p;
}

Outcome formulas() {
  Outcome o;
  const BoundingBox a{0, 0, 10, 10}, b{5, 0, 15, 10};
  o.require(near(iou(a, b), 1.0 / 3.0), "iou");
  o.require(near(perimeter(BoundingBox{0, 0, 20, 10}), 60.0), "perimeter 60");
  o.require(near(perimeter(BoundingBox{0, 0, 5, 5}), 20.0), "perimeter 20");
  o.require(near(bbox_distance(BoundingBox{0, 0, 20, 10}, BoundingBox{0, 2, 20, 12}, 2.0), std::sqrt(8.0) / 120.0),
            "bbox_distance");
  const auto n = FeatureVec::normalize(std::vector<double>{3, 4});
  o.require(near(n[0], 0.6) && near(n[1], 0.8), "normalize");
  const auto e0 = FeatureVec::normalize(std::vector<double>{1, 0});
  const auto e1 = FeatureVec::normalize(std::vector<double>{0, 1});
  const auto acc = accumulate(e0, e1, 0.4);
  o.require(near(acc[0], 0.6 / std::sqrt(0.52)) && near(acc[1], 0.4 / std::sqrt(0.52)), "accumulate");
  o.require(near(acc[0], 0.832050, 1e-6) && near(acc[1], 0.554700, 1e-6), "accumulate rounded");
  const auto g = FeatureVec::normalize(std::vector<double>{0.8, 0.6});
  o.require(near(cosine_distance(e0, g), 0.2), "cosine_distance");
  // D_cos 0.2, D_bbox = 12 / (2 * 60) = 0.1
  const double c = pair_cost(BoundingBox{0, 0, 20, 10}, e0, BoundingBox{0, -12, 20, 10}, g, AssocConfig{});
  o.require(near(c, 0.3), "pair cost composition");
  CostMatrix m(2, 2);
  m.set(0, 0, 0.1, true);
  m.set(0, 1, 0.5, true);
  m.set(1, 0, 0.4, true);
  m.set(1, 1, 0.2, true);
  const Pairing p = solve_hungarian(m);
  o.require(p == Pairing{{0, 0}, {1, 1}} && near(total_cost(m, p), 0.3), "2x2 assignment");
  return o;
}

Outcome assignment_oracle() {
  Outcome o;
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<std::size_t> size(1, 6);
  int mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto m = gen::random_gated(rng, size(rng), size(rng));
    if (sorted(solve_hungarian(m)) != sorted(oracle::brute_force_assignment(m))) ++mismatches;
  }
  o.require(mismatches == 0, std::to_string(mismatches) + " of 1000 differ");
  return o;
}

Outcome metrics_oracle() {
  Outcome o;
  std::mt19937_64 rng(31337);
  int mismatches = 0;
  for (int i = 0; i < 500; ++i) {
    const auto m = gen::random_micro(rng);
    const auto c = clear_mot(m.gt, m.pred);
    const auto ref = oracle::clear_mot(m.gt, m.pred, kDefaultIouGate);
    if (c.fp != ref.fp || c.fn != ref.fn || c.idsw != ref.idsw ||
        idf1(m.gt, m.pred).idtp != oracle::idtp(m.gt, m.pred, kDefaultIouGate))
      ++mismatches;
  }
  o.require(mismatches == 0, std::to_string(mismatches) + " of 500 differ");
  std::vector<GtEntry> gt;
  std::vector<TrackRecord> pred;
  for (std::int64_t f = 1; f <= 10; ++f) {
    const double x = 10.0 * static_cast<double>(f);
    gt.push_back({f, 1, BoundingBox{0, x, 50, x + 20}, 1.0});
    pred.push_back({f, f <= 5 ? TrackId{7} : TrackId{9}, BoundingBox{0, x, 50, x + 20}});
  }
  const auto r = evaluate(gt, pred);
  o.require(r.clear.idsw == 1 && near(*r.clear.mota, 0.9) && near(*r.identity.idf1, 0.5),
            fmt("split id: mota %.6f idf1 %.6f", *r.clear.mota, *r.identity.idf1));
  return o;
}

Outcome perfect_world() {
  Outcome o;
  const TrackerConfig tc;
  const Scenario sc = generate_scenario(noiseless(SimConfig{}));
  o.require(sc.stats.separable(tc.assoc.tau1, tc.assoc.tau2),
            fmt("not separable: same %.4f cross %.4f", sc.stats.max_same_identity_distance,
                sc.stats.min_cross_identity_distance));
  const auto r = evaluate(sc.gt, run_sequence(sc.frames, tc));
  o.require(r.clear.mota == 1.0 && r.identity.idf1 == 1.0 && r.clear.idsw == 0,
            fmt("mota %.6f idf1 %.6f idsw %.0f", r.clear.mota.value_or(0), r.identity.idf1.value_or(0),
                static_cast<double>(r.clear.idsw)));
  return o;
}

Outcome ablation_trend() {
  Outcome o;
  const auto rows = run_ablation(SimConfig{}, TrackerConfig{}, 1, 10,
                                 {Variant::CosineOnly, Variant::CosineBbox, Variant::CosineBboxAccum});
  const auto& a = rows[0];
  const auto& b = rows[1];
  const auto& c = rows[2];
  o.detail = fmt("IDSW %.1f -> %.1f -> %.1f", a.mean_idsw, b.mean_idsw, c.mean_idsw) +
             fmt(", IDF1 %.2f -> %.2f -> %.2f", 100 * a.mean_idf1, 100 * b.mean_idf1, 100 * c.mean_idf1);
  const std::string summary = o.detail;
  o.require(b.mean_idsw <= 0.8 * a.mean_idsw, "bbox term reduces IDSW by less than 20%: " + summary);
  o.require(b.mean_idf1 > a.mean_idf1, "bbox term does not raise IDF1: " + summary);
  o.require(c.mean_idsw <= b.mean_idsw, "accumulation raises IDSW: " + summary);
  return o;
}

Outcome blink_reacquisition() {
  Outcome o;
  std::string per_seed;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SimConfig s = noiseless(SimConfig{});
    s.n_identities = 6;
    s.n_frames = 60;
    s.embedding_dim = 128;
    s.seed = seed;
    s.hidden = {{3, 20, 24}};
    const Scenario sc = generate_scenario(s);
    TrackerConfig keep;
    keep.embedding_dim = 128;
    TrackerConfig drop = keep;
    drop.max_lost_age = 0;
    const auto with_lost = clear_mot(sc.gt, run_sequence(sc.frames, keep)).idsw;
    const auto without = clear_mot(sc.gt, run_sequence(sc.frames, drop)).idsw;
    per_seed += " " + std::to_string(with_lost) + "/" + std::to_string(without);
    o.require(with_lost == 0 && without >= 1, "seed " + std::to_string(seed));
  }
  if (o.pass) o.detail = "idsw age30/age0 per seed:" + per_seed;
  return o;
}

bool same_tree(const fs::path& a, const fs::path& b, std::string& why) {
  std::vector<fs::path> names;
  for (const auto& e : fs::directory_iterator(a))
    if (e.is_regular_file()) names.push_back(e.path().filename());
  std::size_t other = 0;
  for (const auto& e : fs::directory_iterator(b)) other += e.is_regular_file() ? 1 : 0;
  if (names.size() != other) {
    why = "file sets differ";
    return false;
  }
  for (const auto& n : names) {
    if (n == "cli.log") continue;
    if (cli::slurp(a / n) != cli::slurp(b / n)) {
      why = n.string() + " differs";
      return false;
    }
  }
  return true;
}

Outcome cli_determinism() {
  Outcome o;
  const fs::path root = cli::scratch_dir("acceptance");
  std::ofstream(root / "small.cfg") << "[tracker]\nembedding_dim = 64\n[sim]\nn_identities = 8\nn_frames = 120\n"
                                    << "[ablate]\nseeds = 2\n";
  auto q = [](const fs::path& p) { return "\"" + p.string() + "\""; };
  const std::string cfg = " --config " + q(root / "small.cfg");
  for (const char* run : {"run1", "run2"}) {
    const fs::path d = root / run;
    fs::create_directories(d);
    const std::vector<std::string> commands = {
        "simulate" + cfg + " --seed 7 --out " + q(d / "seq"),
        "track" + cfg + " --dets " + q(d / "seq/det.txt") + " --emb " + q(d / "seq/emb.sseb") + " --seqinfo " +
            q(d / "seq/seqinfo.ini") + " --out " + q(d / "res.txt"),
        "ablate" + cfg + " --out " + q(d / "ablation.txt"),
        "render --input " + q(d / "res.txt") + " --meta " + q(d / "seq/seqinfo.ini") + " --out " + q(d / "res.svg"),
    };
    for (const auto& c : commands) {
      const auto r = cli::run(c, d);
      o.require(r.code == 0, c.substr(0, c.find(' ')) + " exited " + std::to_string(r.code) + ": " + r.output);
    }
  }
  std::string why;
  o.require(same_tree(root / "run1", root / "run2", why), why);
  o.require(same_tree(root / "run1/seq", root / "run2/seq", why), "simulate: " + why);
  if (o.pass) o.detail = "simulate, track, ablate, render byte-identical";
  fs::remove_all(root);
  return o;
}

Outcome round_trips() {
  Outcome o;
  std::mt19937_64 rng(4242);
  int bad = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto m = gen::random_mot(rng);
    std::istringstream tin(write_tracks(m.tracks));
    std::istringstream din(write_detections(m.detections));
    if (parse_tracks(tin) != m.tracks || parse_detections(din) != m.detections) ++bad;
    const std::size_t dim = 1 + static_cast<std::size_t>(i) % 64;
    const auto table = gen::random_embeddings(rng, dim, 1 + static_cast<std::uint32_t>(i) % 9);
    std::ostringstream out(std::ios::binary);
    write_embeddings(out, table, dim);
    std::istringstream in(out.str(), std::ios::binary);
    if (read_embeddings(in, dim) != table) ++bad;
  }
  o.require(bad == 0, std::to_string(bad) + " round trips differ");
  return o;
}

}  // namespace

int main() {
  criterion("formula exactness", 1.0, formulas);
  criterion("assignment oracle (1000 matrices)", 5.0, assignment_oracle);
  criterion("metrics oracle (500 instances)", 10.0, metrics_oracle);
  criterion("perfect-world end-to-end", 1.0, perfect_world);
  criterion("ablation trend (10 seeds)", 60.0, ablation_trend);
  criterion("lost-track reacquisition", 5.0, blink_reacquisition);
  criterion("CLI determinism", 0.0, cli_determinism);
  criterion("format round-trips (1000 cases)", 0.0, round_trips);
  std::printf("%s: %d failed\n", failures ? "FAILED" : "OK", failures);
  return failures ? 1 : 0;
}
