#include <bit>
#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "generators.hpp"
#include "ssat/motio.hpp"

using ssat::BoundingBox;

namespace {

ssat::DetectionSequence parse_det(const std::string& s) {
  std::istringstream in(s);
  return ssat::parse_detections(in);
}

ssat::TrackOutput parse_trk(const std::string& s) {
  std::istringstream in(s);
  return ssat::parse_tracks(in);
}

std::string sseb(const ssat::EmbeddingTable& t, std::size_t dim) {
  std::ostringstream out(std::ios::binary);
  ssat::write_embeddings(out, t, dim);
  return out.str();
}

ssat::EmbeddingTable read(const std::string& bytes, std::size_t dim) {
  std::istringstream in(bytes, std::ios::binary);
  return ssat::read_embeddings(in, dim);
}

// Header + one record with the given float payload, built by hand.
std::string raw_record(std::vector<float> values, std::uint16_t version = 1) {
  std::string s = "SSEB";
  auto u16 = [&](std::uint16_t v) { s += char(v & 0xFF); s += char(v >> 8); };
  auto u32 = [&](std::uint32_t v) { for (int i = 0; i < 4; ++i) s += char((v >> (8 * i)) & 0xFF); };
  u16(version);
  u16(static_cast<std::uint16_t>(values.size()));
  u32(1);
  u32(1);
  u32(0);
  for (float f : values) u32(std::bit_cast<std::uint32_t>(f));
  return s;
}

}  // namespace

TEST(MotIO, ParseDetectionRow) {
  const auto seq = parse_det("1,-1,10,20,30,60,0.9,-1,-1,-1\n");
  ASSERT_EQ(seq.size(), 1u);
  EXPECT_EQ(seq[0].frame, 1);
  ASSERT_EQ(seq[0].detections.size(), 1u);
  EXPECT_EQ(seq[0].detections[0].box, (BoundingBox{20, 10, 80, 40}));
  EXPECT_EQ(seq[0].detections[0].confidence, 0.9);
}

TEST(MotIO, ParseEmptyStream) { EXPECT_TRUE(parse_det("").empty()); }

TEST(MotIO, NegativeWidthIsErrorWithLine) {
  try {
    parse_det("1,-1,10,20,-5,60,0.9\n");
    FAIL();
  } catch (const ssat::InputError& e) {
    EXPECT_NE(std::string(e.what()).find(":1:"), std::string::npos) << e.what();
  }
}

TEST(MotIO, MalformedRowNamesLine) {
  try {
    parse_det("1,-1,10,20,5,6,0.9\n2,-1,abc,20,5,6,0.9\n");
    FAIL();
  } catch (const ssat::InputError& e) {
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_det("1,-1,10,20\n"), ssat::InputError);
}

TEST(MotIO, GroupingKeepsWithinFrameOrder) {
  const auto seq = parse_det("2,-1,5,0,1,1,0.5\n1,-1,3,0,1,1,0.5\n2,-1,1,0,1,1,0.5\n2,-1,9,0,1,1,0.5\n");
  ASSERT_EQ(seq.size(), 2u);
  EXPECT_EQ(seq[0].frame, 1);
  EXPECT_EQ(seq[1].frame, 2);
  ASSERT_EQ(seq[1].detections.size(), 3u);
  EXPECT_EQ(seq[1].detections[0].box.left, 5);
  EXPECT_EQ(seq[1].detections[1].box.left, 1);
  EXPECT_EQ(seq[1].detections[2].box.left, 9);
}

TEST(MotIO, WriteTracksRow) {
  EXPECT_EQ(ssat::write_tracks({}), "");
  const ssat::TrackOutput out{{1, 3, BoundingBox{20, 10, 80, 40}}};
  EXPECT_EQ(ssat::write_tracks(out), "1,3,10,20,30,60,1,-1,-1,-1\n");
}

TEST(MotIO, WriteTracksSortsByFrameThenId) {
  const ssat::TrackOutput out{{2, 1, {0, 0, 1, 1}}, {1, 5, {0, 0, 1, 1}}, {1, 2, {0, 0, 1, 1}}};
  EXPECT_EQ(ssat::write_tracks(out),
            "1,2,0,0,1,1,1,-1,-1,-1\n1,5,0,0,1,1,1,-1,-1,-1\n2,1,0,0,1,1,1,-1,-1,-1\n");
}

TEST(MotIO, GtFiltersIgnoredRowsAndClasses) {
  std::istringstream in(
      "1,1,0,0,10,10,1,1,0.8\n"
      "1,2,0,0,10,10,0,1,1.0\n"   // flagged ignore
      "1,3,0,0,10,10,1,7,1.0\n"   // static person class
      "2,1,1,1,10,10,1,1,1.0\n");
  const auto gt = ssat::parse_gt(in);
  ASSERT_EQ(gt.size(), 2u);
  EXPECT_EQ(gt[0].id, 1u);
  EXPECT_DOUBLE_EQ(gt[0].visibility, 0.8);
  EXPECT_EQ(gt[1].frame, 2);
}

TEST(MotIO, SeqinfoRoundTrip) {
  const ssat::SequenceMeta m{"MOT17-02", 600, 30, 1920, 1080};
  std::istringstream in(ssat::write_seqinfo(m));
  const auto r = ssat::parse_seqinfo(in);
  EXPECT_EQ(r.name, m.name);
  EXPECT_EQ(r.frame_count, 600);
  EXPECT_EQ(r.fps, 30);
  EXPECT_EQ(r.image_width, 1920);
}

TEST(MotIOProperty, TrackAndDetectionFilesRoundTrip) {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 200; ++i) {
    const auto m = gen::random_mot(rng);
    EXPECT_EQ(parse_trk(ssat::write_tracks(m.tracks)), m.tracks);
    EXPECT_EQ(parse_det(ssat::write_detections(m.detections)), m.detections);
  }
}

TEST(Embeddings, EmptyStream) {
  EXPECT_TRUE(read(sseb({}, 8), 8).empty());
}

TEST(Embeddings, SingleUnitRecord) {
  ssat::EmbeddingTable t;
  t.emplace(ssat::EmbeddingKey{1, 0}, ssat::FeatureVec::normalize(std::vector<double>{1, 0, 0}));
  const auto r = read(sseb(t, 3), 3);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r.at({1, 0}), t.at({1, 0}));
}

TEST(Embeddings, HeaderLayoutIsLittleEndian) {
  const std::string s = sseb({}, 512);
  ASSERT_EQ(s.size(), 12u);
  EXPECT_EQ(s.substr(0, 4), "SSEB");
  EXPECT_EQ(static_cast<unsigned char>(s[4]), 1);
  EXPECT_EQ(static_cast<unsigned char>(s[5]), 0);
  EXPECT_EQ(static_cast<unsigned char>(s[6]), 0x00);
  EXPECT_EQ(static_cast<unsigned char>(s[7]), 0x02);
}

TEST(Embeddings, Errors) {
  EXPECT_THROW(read("SSEC" + sseb({}, 2).substr(4), 2), ssat::InputError);
  EXPECT_THROW(read(raw_record({1, 0}, 2), 2), ssat::InputError);
  EXPECT_THROW(read(sseb({}, 2), 3), ssat::InputError);
  EXPECT_THROW(read(raw_record({1.01f, 0}), 2), ssat::InputError);
  EXPECT_THROW(read(raw_record({1, 0}).substr(0, 20), 2), ssat::InputError);
  std::string dup = raw_record({1, 0});
  dup[8] = 2;  // count = 2
  dup += dup.substr(12);
  EXPECT_THROW(read(dup, 2), ssat::InputError);
}

TEST(Embeddings, SmallNormDeviationIsRenormalized) {
  const auto r = read(raw_record({1.0001f, 0}), 2);
  EXPECT_EQ(r.at({1, 0})[0], 1.0);
}

TEST(EmbeddingsProperty, RoundTripIsExactAtFloatPrecision) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 100; ++i) {
    const std::size_t dim = 1 + i % 40;
    const auto t = gen::random_embeddings(rng, dim, 10);
    const std::string bytes = sseb(t, dim);
    const auto back = read(bytes, dim);
    EXPECT_EQ(back, t);
    EXPECT_EQ(sseb(back, dim), bytes);
  }
}

TEST(Embeddings, AttachRequiresEmbeddingForConfidentDetections) {
  const auto dets = parse_det("1,-1,0,0,10,10,0.9\n1,-1,20,0,10,10,0.1\n");
  ssat::EmbeddingTable t;
  t.emplace(ssat::EmbeddingKey{1, 0}, ssat::FeatureVec::normalize(std::vector<double>{1, 0}));
  const auto frames = ssat::attach_embeddings(dets, t, 0.4);
  ASSERT_EQ(frames.size(), 1u);
  EXPECT_EQ(frames[0].detections.size(), 1u);
  EXPECT_THROW(ssat::attach_embeddings(dets, t, 0.05), ssat::InputError);
}
