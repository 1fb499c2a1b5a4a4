#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ssat/error.hpp"
#include "ssat/features.hpp"
#include "ssat/geometry.hpp"
#include "ssat/tracker.hpp"

namespace ssat {

struct SequenceMeta {
  std::string name = "sequence";
  std::int64_t frame_count = 1;
  double fps = 30.0;
  double image_width = 1920.0;
  double image_height = 1080.0;
};

struct GtEntry {
  std::int64_t frame = 0;
  TrackId id = 0;
  BoundingBox box;
  double visibility = 1.0;
  friend bool operator==(const GtEntry&, const GtEntry&) = default;
};

struct RawDetection {
  BoundingBox box;
  double confidence = 0.0;
  friend bool operator==(const RawDetection&, const RawDetection&) = default;
};

struct DetFrame {
  std::int64_t frame = 0;
  std::vector<RawDetection> detections;  // det-file order
  friend bool operator==(const DetFrame&, const DetFrame&) = default;
};

using DetectionSequence = std::vector<DetFrame>;

/// (frame, within-frame detection index) -> feature.
using EmbeddingKey = std::pair<std::uint32_t, std::uint32_t>;
using EmbeddingTable = std::map<EmbeddingKey, FeatureVec>;

namespace motio_detail {

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    std::string_view field = line.substr(start, comma == std::string_view::npos
                                                    ? std::string_view::npos
                                                    : comma - start);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r'))
      field.remove_suffix(1);
    out.push_back(field);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::string where(const std::string& source, std::size_t line_no) {
  return source + ":" + std::to_string(line_no);
}

inline double parse_double(std::string_view s, const std::string& at) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw InputError(at + ": malformed number '" + std::string(s) + "'");
  }
  return v;
}

inline std::int64_t parse_int(std::string_view s, const std::string& at) {
  // MOT files sometimes write integral fields as "1.0"; accept that too.
  std::int64_t v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec == std::errc() && ptr == end) return v;
  const double d = parse_double(s, at);
  if (d != std::floor(d) || std::abs(d) > 9e15) {
    throw InputError(at + ": expected an integer, got '" + std::string(s) + "'");
  }
  return static_cast<std::int64_t>(d);
}

inline bool blank(std::string_view line) {
  return line.find_first_not_of(" \t\r") == std::string_view::npos;
}

inline BoundingBox parse_ltwh(const std::vector<std::string_view>& f, const std::string& at) {
  const double l = parse_double(f[2], at), t = parse_double(f[3], at);
  const double w = parse_double(f[4], at), h = parse_double(f[5], at);
  if (w < 0.0 || h < 0.0) {
    throw InputError(at + ": negative width or height");
  }
  return BoundingBox::from_ltwh(l, t, w, h);
}

// Shortest decimal that reads back to exactly `v`.
inline void put_number(std::string& out, double v) {
  std::array<char, 32> buf{};
  if (v == 0.0) v = 0.0;  // drop the sign of negative zero
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw InvariantError("to_chars failed");
  out.append(buf.data(), ptr);
}

// A width w with origin + w == end exactly, so that ltwh round-trips.
inline double exact_extent(double origin, double end) {
  double w = end - origin;
  for (int k = 0; k < 64 && origin + w != end; ++k) {
    w = std::nextafter(w, origin + w < end ? HUGE_VAL : -HUGE_VAL);
  }
  return w;
}

inline void put_ltwh(std::string& out, const BoundingBox& b) {
  put_number(out, b.left);
  out += ',';
  put_number(out, b.top);
  out += ',';
  put_number(out, exact_extent(b.left, b.right));
  out += ',';
  put_number(out, exact_extent(b.top, b.bottom));
}

template <typename Row>
void for_each_row(std::istream& in, const std::string& source, std::size_t min_fields,
                  Row&& row) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const auto fields = split_csv(line);
    const std::string at = where(source, line_no);
    if (fields.size() < min_fields) {
      throw InputError(at + ": expected at least " + std::to_string(min_fields) +
                       " comma-separated fields, got " + std::to_string(fields.size()));
    }
    row(fields, at);
  }
}

template <typename T>
void put_le(std::ostream& out, T v) {
  static_assert(std::is_unsigned_v<T>);
  std::array<char, sizeof(T)> b{};
  for (std::size_t i = 0; i < sizeof(T); ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(b.data(), b.size());
}

template <typename T>
T get_le(std::istream& in, const char* what) {
  static_assert(std::is_unsigned_v<T>);
  std::array<unsigned char, sizeof(T)> b{};
  in.read(reinterpret_cast<char*>(b.data()), b.size());
  if (in.gcount() != static_cast<std::streamsize>(b.size())) {
    throw InputError(std::string("embeddings: truncated stream while reading ") + what);
  }
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(static_cast<T>(b[i]) << (8 * i));
  return v;
}

}  // namespace motio_detail

/// MOTChallenge detection rows `frame,id,left,top,width,height,conf,...`.
/// Frames come back sorted; rows inside a frame keep file order.
inline DetectionSequence parse_detections(std::istream& in,
                                          const std::string& source = "<detections>") {
  std::map<std::int64_t, std::vector<RawDetection>> by_frame;
  motio_detail::for_each_row(in, source, 7, [&](const auto& f, const std::string& at) {
    const std::int64_t frame = motio_detail::parse_int(f[0], at);
    if (frame < 0) throw InputError(at + ": negative frame index");
    const BoundingBox box = motio_detail::parse_ltwh(f, at);
    const double conf = motio_detail::parse_double(f[6], at);
    by_frame[frame].push_back(RawDetection{box, conf});
  });
  DetectionSequence out;
  for (auto& [frame, dets] : by_frame) out.push_back(DetFrame{frame, std::move(dets)});
  return out;
}

inline std::string write_detections(const DetectionSequence& seq) {
  std::string out;
  for (const auto& f : seq) {
    for (const auto& d : f.detections) {
      out += std::to_string(f.frame);
      out += ",-1,";
      motio_detail::put_ltwh(out, d.box);
      out += ',';
      motio_detail::put_number(out, d.confidence);
      out += ",-1,-1,-1\n";
    }
  }
  return out;
}

/// Results rows `frame,id,left,top,width,height,1,-1,-1,-1`, sorted by (frame, id).
inline std::string write_tracks(const TrackOutput& output) {
  TrackOutput sorted = output;
  std::stable_sort(sorted.begin(), sorted.end(), [](const TrackRecord& a, const TrackRecord& b) {
    return std::pair(a.frame, a.id) < std::pair(b.frame, b.id);
  });
  std::string out;
  for (const auto& r : sorted) {
    out += std::to_string(r.frame);
    out += ',';
    out += std::to_string(r.id);
    out += ',';
    motio_detail::put_ltwh(out, r.box);
    out += ",1,-1,-1,-1\n";
  }
  return out;
}

inline TrackOutput parse_tracks(std::istream& in, const std::string& source = "<tracks>") {
  TrackOutput out;
  motio_detail::for_each_row(in, source, 6, [&](const auto& f, const std::string& at) {
    const std::int64_t frame = motio_detail::parse_int(f[0], at);
    const std::int64_t id = motio_detail::parse_int(f[1], at);
    if (id < 0) throw InputError(at + ": negative track id");
    out.push_back(TrackRecord{frame, static_cast<TrackId>(id), motio_detail::parse_ltwh(f, at)});
  });
  std::stable_sort(out.begin(), out.end(), [](const TrackRecord& a, const TrackRecord& b) {
    return std::pair(a.frame, a.id) < std::pair(b.frame, b.id);
  });
  return out;
}

/// Ground truth rows `frame,id,left,top,width,height[,flag[,class[,visibility]]]`.
/// Rows whose flag is 0 or whose class is not 1 (pedestrian) are skipped,
/// following the MOT17 evaluation convention.
inline std::vector<GtEntry> parse_gt(std::istream& in, const std::string& source = "<gt>") {
  std::vector<GtEntry> out;
  motio_detail::for_each_row(in, source, 6, [&](const auto& f, const std::string& at) {
    const std::int64_t frame = motio_detail::parse_int(f[0], at);
    const std::int64_t id = motio_detail::parse_int(f[1], at);
    if (id <= 0) throw InputError(at + ": ground-truth ids must be positive");
    const BoundingBox box = motio_detail::parse_ltwh(f, at);
    if (f.size() > 6 && motio_detail::parse_double(f[6], at) == 0.0) return;
    if (f.size() > 7 && motio_detail::parse_int(f[7], at) != 1) return;
    double vis = 1.0;
    if (f.size() > 8) vis = std::clamp(motio_detail::parse_double(f[8], at), 0.0, 1.0);
    out.push_back(GtEntry{frame, static_cast<TrackId>(id), box, vis});
  });
  std::stable_sort(out.begin(), out.end(), [](const GtEntry& a, const GtEntry& b) {
    return std::pair(a.frame, a.id) < std::pair(b.frame, b.id);
  });
  return out;
}

inline std::string write_gt(const std::vector<GtEntry>& gt) {
  std::string out;
  for (const auto& g : gt) {
    out += std::to_string(g.frame);
    out += ',';
    out += std::to_string(g.id);
    out += ',';
    motio_detail::put_ltwh(out, g.box);
    out += ",1,1,";
    motio_detail::put_number(out, g.visibility);
    out += '\n';
  }
  return out;
}

/// MOTChallenge seqinfo.ini.
inline std::string write_seqinfo(const SequenceMeta& m) {
  std::string out = "[Sequence]\nname=" + m.name + "\nframeRate=";
  motio_detail::put_number(out, m.fps);
  out += "\nseqLength=" + std::to_string(m.frame_count) + "\nimWidth=";
  motio_detail::put_number(out, m.image_width);
  out += "\nimHeight=";
  motio_detail::put_number(out, m.image_height);
  out += "\n";
  return out;
}

inline SequenceMeta parse_seqinfo(std::istream& in, const std::string& source = "<seqinfo>") {
  SequenceMeta m;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (motio_detail::blank(line) || line[0] == '[' || line[0] == ';' || line[0] == '#') continue;
    const auto eq = line.find('=');
    const std::string at = motio_detail::where(source, line_no);
    if (eq == std::string::npos) throw InputError(at + ": expected key=value");
    std::string key = line.substr(0, eq), val = line.substr(eq + 1);
    while (!val.empty() && (val.back() == '\r' || val.back() == ' ')) val.pop_back();
    while (!key.empty() && key.back() == ' ') key.pop_back();
    if (key == "name") m.name = val;
    else if (key == "frameRate") m.fps = motio_detail::parse_double(val, at);
    else if (key == "seqLength") m.frame_count = motio_detail::parse_int(val, at);
    else if (key == "imWidth") m.image_width = motio_detail::parse_double(val, at);
    else if (key == "imHeight") m.image_height = motio_detail::parse_double(val, at);
  }
  if (m.frame_count < 1 || !(m.fps > 0.0) || !(m.image_width > 0.0) || !(m.image_height > 0.0)) {
    throw InputError(source + ": sequence metadata must have positive length, rate and size");
  }
  return m;
}

// ---------------------------------------------------------------------------
// SSEB embedding files.
//
//   "SSEB" | version u16 | dim u16 | count u32 | count x record
//   record = frame u32 | detection index u32 | dim x float32
//
// Every integer and float is little-endian.

inline constexpr std::array<char, 4> kSsebMagic = {'S', 'S', 'E', 'B'};
inline constexpr std::uint16_t kSsebVersion = 1;
inline constexpr double kEmbeddingRenormLimit = 1e-3;

/// Features are narrowed to float32; records are written in key order.
inline void write_embeddings(std::ostream& out, const EmbeddingTable& table, std::size_t dim) {
  using namespace motio_detail;
  if (dim == 0 || dim > 0xFFFF) throw InputError("embeddings: dimension out of range");
  if (table.size() > 0xFFFFFFFFu) throw InputError("embeddings: too many records");
  out.write(kSsebMagic.data(), kSsebMagic.size());
  put_le<std::uint16_t>(out, kSsebVersion);
  put_le<std::uint16_t>(out, static_cast<std::uint16_t>(dim));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(table.size()));
  for (const auto& [key, f] : table) {
    if (f.dim() != dim) throw InputError("embeddings: record dimension mismatch");
    put_le<std::uint32_t>(out, key.first);
    put_le<std::uint32_t>(out, key.second);
    for (double x : f.values()) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(static_cast<float>(x)));
  }
}

/// Reads an SSEB stream. Features whose norm is off by more than 1e-6 but
/// less than 1e-3 are re-normalized; larger deviations are rejected.
inline EmbeddingTable read_embeddings(std::istream& in, std::size_t expected_dim,
                                      const std::string& source = "<embeddings>") {
  using namespace motio_detail;
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (in.gcount() != 4 || magic != kSsebMagic) throw InputError(source + ": bad magic, not an SSEB file");
  const auto version = get_le<std::uint16_t>(in, "version");
  if (version != kSsebVersion) {
    throw InputError(source + ": unsupported SSEB version " + std::to_string(version));
  }
  const auto dim = get_le<std::uint16_t>(in, "dimension");
  if (dim != expected_dim) {
    throw InputError(source + ": embedding dimension " + std::to_string(dim) +
                     " does not match configured " + std::to_string(expected_dim));
  }
  const auto count = get_le<std::uint32_t>(in, "record count");
  EmbeddingTable table;
  std::vector<double> values(dim);
  for (std::uint32_t r = 0; r < count; ++r) {
    const auto frame = get_le<std::uint32_t>(in, "frame");
    const auto index = get_le<std::uint32_t>(in, "detection index");
    for (auto& v : values) v = static_cast<double>(std::bit_cast<float>(get_le<std::uint32_t>(in, "feature")));
    const std::string rec = source + ": record " + std::to_string(r) + " (frame " +
                            std::to_string(frame) + ", detection " + std::to_string(index) + ")";
    const double n = l2_norm(values);
    const double dev = std::abs(n - 1.0);
    FeatureVec f;
    if (dev <= kUnitNormTolerance) f = FeatureVec::from_unit(values);
    else if (dev < kEmbeddingRenormLimit) f = FeatureVec::normalize(values);
    else throw InputError(rec + ": norm " + std::to_string(n) + " is corrupt");
    if (!table.emplace(EmbeddingKey{frame, index}, std::move(f)).second) {
      throw InputError(rec + ": duplicate key");
    }
  }
  return table;
}

/// Joins detections with their embeddings. Detections under `min_confidence`
/// are dropped; any kept detection without an embedding is an error.
inline std::vector<FrameDetections> attach_embeddings(const DetectionSequence& dets,
                                                      const EmbeddingTable& table,
                                                      double min_confidence,
                                                      const std::string& source = "<embeddings>") {
  std::vector<FrameDetections> out;
  for (const auto& f : dets) {
    FrameDetections fd{f.frame, {}};
    for (std::size_t i = 0; i < f.detections.size(); ++i) {
      const auto& d = f.detections[i];
      if (d.confidence < min_confidence) continue;
      const auto it = table.find(EmbeddingKey{static_cast<std::uint32_t>(f.frame),
                                              static_cast<std::uint32_t>(i)});
      if (it == table.end()) {
        throw InputError(source + ": no embedding for frame " + std::to_string(f.frame) +
                         ", detection " + std::to_string(i));
      }
      fd.detections.push_back(Detection{d.box, d.confidence, it->second});
    }
    out.push_back(std::move(fd));
  }
  return out;
}

}  // namespace ssat
