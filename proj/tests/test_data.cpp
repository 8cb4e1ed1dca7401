#include <gtest/gtest.h>

#include <filesystem>

#include "ctsn/data.hpp"
#include "ctsn/errors.hpp"

using namespace ctsn;

namespace {

std::vector<std::uint8_t> be32(std::uint32_t v) {
  return {static_cast<std::uint8_t>(v >> 24), static_cast<std::uint8_t>(v >> 16),
          static_cast<std::uint8_t>(v >> 8), static_cast<std::uint8_t>(v)};
}

std::vector<std::uint8_t> idx_bytes(std::uint32_t magic, std::vector<std::uint32_t> dims,
                                    std::size_t payload, std::uint8_t seed = 0) {
  auto out = be32(magic);
  for (auto d : dims) {
    auto b = be32(d);
    out.insert(out.end(), b.begin(), b.end());
  }
  for (std::size_t i = 0; i < payload; ++i) out.push_back(static_cast<std::uint8_t>(seed + i * 37));
  return out;
}

std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("ctsn_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

TEST(Idx, ParsesImagesHeader) {
  const auto bytes = idx_bytes(0x00000803, {3, 28, 28}, 3 * 28 * 28);
  const IdxArray a = parse_idx(bytes, "images");
  EXPECT_EQ(a.dims, (std::vector<std::uint32_t>{3, 28, 28}));
  EXPECT_EQ(a.payload.size(), 3u * 28 * 28);
}

TEST(Idx, ParsesLabels) {
  const auto bytes = idx_bytes(0x00000801, {5}, 5);
  EXPECT_EQ(parse_idx(bytes, "labels").dims, (std::vector<std::uint32_t>{5}));
}

TEST(Idx, CorruptMagicNamesOffset) {
  auto bytes = idx_bytes(0x00000803, {1, 2, 2}, 4);
  bytes[0] = 0x12;
  try {
    parse_idx(bytes, "images");
    FAIL();
  } catch (const IdxError& e) {
    EXPECT_EQ(e.kind(), IdxError::Kind::format);
    EXPECT_NE(std::string(e.what()).find("offset 0"), std::string::npos) << e.what();
  }
  auto wrong_type = idx_bytes(0x00000D03, {1, 2, 2}, 4);
  EXPECT_THROW(parse_idx(wrong_type, "images"), IdxError);
}

TEST(Idx, TruncatedAndTrailing) {
  auto short_payload = idx_bytes(0x00000803, {2, 2, 2}, 7);
  try {
    parse_idx(short_payload, "images");
    FAIL();
  } catch (const IdxError& e) {
    EXPECT_EQ(e.kind(), IdxError::Kind::length);
  }
  auto short_header = idx_bytes(0x00000803, {2}, 0);
  EXPECT_THROW(parse_idx(short_header, "images"), IdxError);
  auto trailing = idx_bytes(0x00000801, {2}, 3);
  EXPECT_THROW(parse_idx(trailing, "labels"), IdxError);
}

TEST(Idx, SerializeRoundTrip) {
  const auto bytes = idx_bytes(0x00000803, {4, 3, 5}, 60, 9);
  EXPECT_EQ(serialize_idx(parse_idx(bytes, "x")), bytes);
}

TEST(Idx, LoadScalesAndChecksCounts) {
  const auto dir = temp_dir("idx_load");
  auto images = idx_bytes(0x00000803, {2, 2, 2}, 8);
  write_file_bytes((dir / "img").string(), images);
  write_file_bytes((dir / "lab").string(), std::vector<std::uint8_t>{0, 0, 8, 1, 0, 0, 0, 2, 3, 1});
  const Dataset ds = load_idx((dir / "img").string(), (dir / "lab").string());
  ASSERT_EQ(ds.size(), 2u);
  EXPECT_EQ(ds.sample_shape(), (Shape{2, 2}));
  EXPECT_EQ(ds.samples[0].label, 3);
  EXPECT_EQ(ds.num_classes, 4u);
  for (const auto& s : ds.samples)
    for (double v : s.x.data()) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  EXPECT_DOUBLE_EQ(ds.samples[0].x[1], images[17] / 255.0);
  write_file_bytes((dir / "lab3").string(), idx_bytes(0x00000801, {3}, 3));
  try {
    load_idx((dir / "img").string(), (dir / "lab3").string());
    FAIL();
  } catch (const IdxError& e) {
    EXPECT_EQ(e.kind(), IdxError::Kind::consistency);
  }
  EXPECT_THROW(load_idx((dir / "missing").string(), (dir / "lab").string()), IdxError);
}

TEST(Idx, WriteReproducesFiles) {
  const auto dir = temp_dir("idx_write");
  const auto images = idx_bytes(0x00000803, {6, 2, 3}, 36, 5);
  std::vector<std::uint8_t> labels = be32(0x00000801);
  auto n = be32(6);
  labels.insert(labels.end(), n.begin(), n.end());
  for (std::uint8_t l : {0, 1, 2, 1, 0, 2}) labels.push_back(l);
  write_file_bytes((dir / "i").string(), images);
  write_file_bytes((dir / "l").string(), labels);
  const Dataset ds = load_idx((dir / "i").string(), (dir / "l").string());
  write_idx(ds, (dir / "i2").string(), (dir / "l2").string());
  EXPECT_EQ(read_file_bytes((dir / "i2").string()), images);
  EXPECT_EQ(read_file_bytes((dir / "l2").string()), labels);
}

TEST(Normalize, IdentityAndCentering) {
  Rng rng(1);
  Dataset ds = synth_static(50, 4, 2, 1.0, rng);
  const double zero[] = {0.0}, one[] = {1.0};
  const Dataset same = normalize(ds, zero, one);
  for (std::size_t i = 0; i < ds.size(); ++i) EXPECT_EQ(same.samples[i].x, ds.samples[i].x);

  Dataset flat;
  flat.num_classes = 1;
  flat.samples.push_back({Tensor({3}, 0.5), 0});
  const double half[] = {0.5};
  EXPECT_EQ(normalize(flat, half, one).samples[0].x, Tensor({3}, 0.0));

  const CorpusStats s = corpus_stats(ds);
  const double m[] = {s.mean}, sd[] = {s.std};
  const CorpusStats after = corpus_stats(normalize(ds, m, sd));
  EXPECT_NEAR(after.mean, 0.0, 1e-6);
  EXPECT_NEAR(after.std, 1.0, 1e-6);
}

TEST(Normalize, PerChannel) {
  Dataset ds;
  ds.num_classes = 1;
  ds.samples.push_back({Tensor({2, 2}, std::vector<double>{1, 3, 10, 20}), 0});
  const double mean[] = {2.0, 15.0}, std[] = {1.0, 5.0};
  EXPECT_EQ(normalize(ds, mean, std).samples[0].x.values(), (std::vector<double>{-1, 1, -1, 1}));
  const double bad[] = {1.0, 1.0, 1.0};
  EXPECT_THROW(normalize(ds, bad, bad), DimensionError);
  const double zero_std[] = {0.0};
  const double m0[] = {0.0};
  EXPECT_THROW(normalize(ds, m0, zero_std), ArgumentError);
}

TEST(DirectEncode, Copies) {
  const Tensor x({3}, std::vector<double>{1, -2, 0.5});
  const auto one = direct_encode(x, 1);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0], x);
  const auto four = direct_encode(x, 4);
  ASSERT_EQ(four.size(), 4u);
  Tensor total({3});
  for (const auto& t : four) {
    EXPECT_EQ(t, x);
    total = add(total, t);
  }
  EXPECT_EQ(total, scale(x, 4));
  EXPECT_THROW(direct_encode(x, 0), ArgumentError);
}

TEST(SynthStatic, DeterministicAndBalanced) {
  Rng a(3), b(3);
  const Dataset da = synth_static(103, 8, 4, 2.0, a);
  const Dataset db = synth_static(103, 8, 4, 2.0, b);
  ASSERT_EQ(da.size(), 103u);
  std::vector<int> counts(4, 0);
  for (std::size_t i = 0; i < da.size(); ++i) {
    EXPECT_EQ(da.samples[i].x, db.samples[i].x);
    ++counts[da.samples[i].label];
  }
  for (int c : counts) EXPECT_NEAR(c, 103.0 / 4, 1.0);
}

TEST(SynthStatic, LargeMarginSeparable) {
  Rng rng(4);
  const Dataset ds = synth_static(400, 6, 2, 40.0, rng);
  // A single perceptron pass from the class-mean difference separates the data.
  std::vector<double> m0(6, 0.0), m1(6, 0.0);
  for (const auto& s : ds.samples)
    for (std::size_t d = 0; d < 6; ++d) (s.label == 0 ? m0 : m1)[d] += s.x[d] / 200.0;
  std::vector<double> w(6);
  double bias = 0.0;
  for (std::size_t d = 0; d < 6; ++d) {
    w[d] = m1[d] - m0[d];
    bias -= w[d] * (m0[d] + m1[d]) / 2;
  }
  for (const auto& s : ds.samples) {
    double z = bias;
    for (std::size_t d = 0; d < 6; ++d) z += w[d] * s.x[d];
    EXPECT_EQ(z > 0 ? 1 : 0, s.label);
  }
}

TEST(SynthEvents, RateAndDeterminism) {
  Rng zero_rng(5);
  const Dataset zero = synth_event_frames(10, 20, 5, 0.0, 3, zero_rng);
  for (const auto& s : zero.samples)
    for (double v : s.x.data()) EXPECT_EQ(v, 0.0);

  Rng rng(6), again(6);
  const Dataset ds = synth_event_frames(200, 50, 10, 0.2, 4, rng);
  const Dataset ds2 = synth_event_frames(200, 50, 10, 0.2, 4, again);
  std::size_t nonzero = 0, total = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    EXPECT_EQ(ds.samples[i].x, ds2.samples[i].x);
    EXPECT_EQ(ds.samples[i].x.shape(), (Shape{10, 50}));
    for (double v : ds.samples[i].x.data()) {
      EXPECT_TRUE(v == -1.0 || v == 0.0 || v == 1.0);
      nonzero += v != 0.0;
      ++total;
    }
  }
  ASSERT_GE(total, 100000u);
  const double frac = static_cast<double>(nonzero) / static_cast<double>(total);
  EXPECT_NEAR(frac, 0.2, 0.02);
  EXPECT_THROW(synth_event_frames(1, 1, 1, 1.5, 2, rng), ArgumentError);
}

TEST(MakeBatch, StaticAndNeuromorphic) {
  Rng rng(7);
  const Dataset st = synth_static(6, 3, 2, 1.0, rng);
  const std::size_t idx[] = {4, 1};
  const Batch b = make_batch(st, idx, 3);
  ASSERT_EQ(b.inputs.size(), 3u);
  EXPECT_EQ(b.inputs[0].shape(), (Shape{2, 3}));
  EXPECT_EQ(b.inputs[2].at(0, 1), st.samples[4].x[1]);
  EXPECT_EQ(b.labels, (std::vector<int>{st.samples[4].label, st.samples[1].label}));

  const Dataset ev = synth_event_frames(6, 5, 3, 0.5, 2, rng);
  const Batch e = make_batch(ev, idx, 3);
  EXPECT_EQ(e.inputs[1].at(1, 2), ev.samples[1].x.at(1, 2));
  EXPECT_THROW(make_batch(ev, idx, 4), DimensionError);
}

TEST(Manifest, KeyOrder) {
  EXPECT_EQ(format_manifest({{"seed", "1"}, {"dims", "8"}}), "dims=8\nseed=1\n");
}
