// Copyright 2026 The TrustSR Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "oracles.h"
#include "test_util.h"
#include "trustsr/image.h"
#include "trustsr/image_io.h"
#include "trustsr/sample_set.h"

namespace trustsr {
namespace {

using testing::TempDir;

// Minimal PNG writer built straight from the format description: signature,
// IHDR, one zlib-compressed IDAT with filter byte 0 per row, IEND.
std::vector<std::uint8_t> HandMadePng(int w, int h, int color_type,
                                      int bit_depth,
                                      const std::vector<std::uint8_t>& rows) {
  std::vector<std::uint8_t> out = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  auto be32 = [](std::vector<std::uint8_t>& v, std::uint32_t x) {
    v.push_back(x >> 24);
    v.push_back(x >> 16);
    v.push_back(x >> 8);
    v.push_back(x);
  };
  auto chunk = [&](const char* type, const std::vector<std::uint8_t>& data) {
    be32(out, static_cast<std::uint32_t>(data.size()));
    std::vector<std::uint8_t> body(type, type + 4);
    body.insert(body.end(), data.begin(), data.end());
    out.insert(out.end(), body.begin(), body.end());
    be32(out, static_cast<std::uint32_t>(crc32(0, body.data(), body.size())));
  };
  std::vector<std::uint8_t> ihdr;
  be32(ihdr, w);
  be32(ihdr, h);
  ihdr.insert(ihdr.end(), {static_cast<std::uint8_t>(bit_depth),
                           static_cast<std::uint8_t>(color_type), 0, 0, 0});
  chunk("IHDR", ihdr);
  uLongf len = compressBound(rows.size());
  std::vector<std::uint8_t> z(len);
  compress(z.data(), &len, rows.data(), rows.size());
  z.resize(len);
  chunk("IDAT", z);
  chunk("IEND", {});
  return out;
}

TEST(ImageTest, ClampsOnConstruction) {
  Image img(2, 1, 1, std::vector<double>{-0.5, 1.5});
  EXPECT_EQ(img.at(0, 0), 0.0);
  EXPECT_EQ(img.at(1, 0), 1.0);
  Image nan(1, 1, 1, std::vector<double>{std::nan("")});
  EXPECT_EQ(nan.at(0, 0), 0.0);
}

TEST(ImageTest, RejectsBadShapes) {
  EXPECT_TRUSTSR_ERROR(Image(2, 2, 2), ErrorCode::kShapeMismatch);
  EXPECT_TRUSTSR_ERROR(Image(2, 2, 1, std::vector<double>(3)),
                       ErrorCode::kShapeMismatch);
}

TEST(ImageTest, SetClamps) {
  Image img(1, 1, 1);
  img.set(0, 0, 0, 3.0);
  EXPECT_EQ(img.at(0, 0), 1.0);
}

TEST(GrayscaleTest, PureRedIsLumaWeight) {
  Image red(1, 1, 3, std::vector<double>{1, 0, 0});
  EXPECT_DOUBLE_EQ(ToGrayscale(red).at(0, 0), 0.299);
}

TEST(GrayscaleTest, GrayPixelsStayGray) {
  for (double g : {0.0, 0.13, 0.5, 0.77, 1.0}) {
    Image px(1, 1, 3, std::vector<double>{g, g, g});
    EXPECT_NEAR(ToGrayscale(px).at(0, 0), g, 1e-15);
  }
}

TEST(GrayscaleTest, SingleChannelUnchangedAndIdempotent) {
  const Image g = oracle::RandomImage(9, 7, 1);
  EXPECT_EQ(ToGrayscale(g), g);
  const Image rgb = oracle::RandomImage(9, 7, 2, 3);
  EXPECT_EQ(ToGrayscale(ToGrayscale(rgb)), ToGrayscale(rgb));
}

TEST(PsnrTest, IdenticalIsPerfectMatch) {
  const Image a = oracle::RandomImage(8, 8, 3);
  EXPECT_TRUE(Psnr(a, a).perfect_match);
}

TEST(PsnrTest, KnownValues) {
  const Image zeros(4, 4, 1, 0.0);
  const PsnrResult max = Psnr(zeros, Image(4, 4, 1, 1.0));
  EXPECT_FALSE(max.perfect_match);
  EXPECT_NEAR(max.decibels, 0.0, 1e-12);
  EXPECT_NEAR(Psnr(zeros, Image(4, 4, 1, 0.5)).decibels, 6.0206, 1e-4);
  EXPECT_NEAR(Psnr(zeros, Image(4, 4, 1, 0.5)).decibels,
              10 * std::log10(4.0), 1e-12);
}

TEST(PsnrTest, SymmetricAndShapeChecked) {
  const Image a = oracle::RandomImage(8, 8, 4);
  const Image b = oracle::RandomImage(8, 8, 5);
  EXPECT_DOUBLE_EQ(Psnr(a, b).decibels, Psnr(b, a).decibels);
  EXPECT_TRUSTSR_ERROR(Psnr(a, oracle::RandomImage(8, 9, 5)),
                       ErrorCode::kShapeMismatch);
}

TEST(EnsembleTest, Examples) {
  const Image zeros(3, 3, 1, 0.0);
  const Image ones(3, 3, 1, 1.0);
  std::vector<Image> pair = {zeros, ones};
  EXPECT_EQ(EnsembleAverage(pair), Image(3, 3, 1, 0.5));
  const Image x = oracle::RandomImage(5, 4, 6, 3);
  std::vector<Image> one = {x};
  EXPECT_EQ(EnsembleAverage(one), x);
  std::vector<Image> five(5, x);
  const Image avg = EnsembleAverage(five);
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_NEAR(avg.data()[i], x.data()[i], 1e-15);
  }
}

TEST(EnsembleTest, ErrorsAndPermutationInvariance) {
  EXPECT_TRUSTSR_ERROR(EnsembleAverage({}), ErrorCode::kEmptyInput);
  std::vector<Image> mixed = {Image(2, 2, 1), Image(2, 3, 1)};
  EXPECT_TRUSTSR_ERROR(EnsembleAverage(mixed), ErrorCode::kShapeMismatch);
  std::vector<Image> imgs;
  for (int i = 0; i < 4; ++i) imgs.push_back(oracle::RandomImage(6, 6, 10 + i));
  const Image forward = EnsembleAverage(imgs);
  std::reverse(imgs.begin(), imgs.end());
  const Image backward = EnsembleAverage(imgs);
  for (std::size_t i = 0; i < forward.size(); ++i) {
    EXPECT_NEAR(forward.data()[i], backward.data()[i], 1e-15);
  }
  const auto mean = oracle::BruteForceMean(imgs);
  for (std::size_t i = 0; i < forward.size(); ++i) {
    EXPECT_NEAR(forward.data()[i], mean[i], 1e-15);
  }
}

TEST(TileMnistTest, ConstantDigit) {
  const Image out = TileMnist(Image(7, 7, 1, 0.3));
  ASSERT_EQ(out.width(), 128);
  ASSERT_EQ(out.height(), 128);
  for (double v : out.data()) EXPECT_EQ(v, 0.3);
}

TEST(TileMnistTest, CornersAndReplication) {
  std::vector<double> ramp(49);
  std::iota(ramp.begin(), ramp.end(), 0.0);
  for (double& v : ramp) v /= 48.0;
  const Image digit(7, 7, 1, ramp);
  const Image out = TileMnist(digit);
  EXPECT_EQ(out.at(0, 0), digit.at(0, 0));
  EXPECT_EQ(out.at(125, 125), digit.at(6, 6));
  for (int x = 0; x < 128; ++x) {
    EXPECT_EQ(out.at(x, 126), out.at(x, 124));
    EXPECT_EQ(out.at(x, 127), out.at(x, 125));
  }
  const auto expected = oracle::BruteForceTile(digit);
  ASSERT_EQ(expected.size(), out.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    ASSERT_EQ(out.data()[i], expected[i]) << "pixel " << i;
  }
}

TEST(TileMnistTest, PeriodicGrid) {
  const Image digit = oracle::RandomImage(7, 7, 42);
  const Image out = TileMnist(digit);
  for (int y = 0; y < 126; ++y) {
    for (int x = 0; x + 7 < 126; ++x) {
      ASSERT_EQ(out.at(x, y), out.at(x + 7, y));
    }
  }
}

TEST(TileMnistTest, RejectsWrongShape) {
  EXPECT_TRUSTSR_ERROR(TileMnist(Image(8, 7, 1)), ErrorCode::kShapeMismatch);
  EXPECT_TRUSTSR_ERROR(TileMnist(Image(7, 7, 3)), ErrorCode::kShapeMismatch);
}

TEST(ImageIoTest, EightBitGrayPng) {
  TempDir dir;
  // Two rows, each prefixed with filter type 0.
  const auto png = HandMadePng(2, 2, 0, 8, {0, 0, 255, 0, 128, 64});
  WriteFileBytes(dir / "g.png", png);
  const Image img = LoadImage(dir / "g.png");
  ASSERT_EQ(img.channels(), 1);
  EXPECT_EQ(img.at(0, 0), 0.0);
  EXPECT_EQ(img.at(1, 0), 1.0);
  EXPECT_NEAR(img.at(0, 1), 0.50196, 1e-5);
  EXPECT_NEAR(img.at(1, 1), 0.25098, 1e-5);
  EXPECT_EQ(img.at(0, 1), 128.0 / 255.0);
}

TEST(ImageIoTest, WhiteRgbPng) {
  const auto png = HandMadePng(2, 1, 2, 8, {0, 255, 255, 255, 255, 255, 255});
  const Image img = DecodeImage(png);
  ASSERT_EQ(img.channels(), 3);
  for (double v : img.data()) EXPECT_EQ(v, 1.0);
}

TEST(ImageIoTest, SixteenBitPngAndAlpha) {
  // 16-bit gray+alpha: value 0x8000, alpha ignored.
  const auto png = HandMadePng(1, 1, 4, 16, {0, 0x80, 0x00, 0xff, 0xff});
  const Image img = DecodeImage(png);
  ASSERT_EQ(img.channels(), 1);
  EXPECT_EQ(img.at(0, 0), 32768.0 / 65535.0);
}

TEST(ImageIoTest, UnsupportedBitDepthIsFormatError) {
  const auto png = HandMadePng(8, 1, 0, 1, {0, 0xAA});
  EXPECT_TRUSTSR_ERROR(DecodeImage(png), ErrorCode::kFormatError);
}

TEST(ImageIoTest, MissingFileAndGarbage) {
  EXPECT_TRUSTSR_ERROR(LoadImage("/nonexistent/x.png"), ErrorCode::kIoError);
  EXPECT_TRUSTSR_ERROR(DecodeImage({1, 2, 3, 4}), ErrorCode::kFormatError);
  auto png = HandMadePng(2, 2, 0, 8, {0, 0, 255, 0, 128, 64});
  png.resize(png.size() - 20);
  EXPECT_TRUSTSR_ERROR(DecodeImage(png), ErrorCode::kFormatError);
}

TEST(ImageIoTest, Pnm) {
  const std::string pgm = std::string("P5\n# c\n2 1\n255\n") + '\x00' + '\xff';
  const Image g = DecodeImage({pgm.begin(), pgm.end()});
  EXPECT_EQ(g.at(0, 0), 0.0);
  EXPECT_EQ(g.at(1, 0), 1.0);
  const std::string ppm16 =
      std::string("P6 1 1 65535\n") + '\xff' + '\xff' + '\x00' + '\x00' +
      '\x80' + '\x00';
  const Image c = DecodeImage({ppm16.begin(), ppm16.end()});
  ASSERT_EQ(c.channels(), 3);
  EXPECT_EQ(c.at(0, 0, 0), 1.0);
  EXPECT_EQ(c.at(0, 0, 1), 0.0);
  EXPECT_EQ(c.at(0, 0, 2), 32768.0 / 65535.0);
}

TEST(ImageIoTest, SixteenBitRoundTripIsExactOnGrid) {
  TempDir dir;
  std::vector<double> d;
  for (int i = 0; i < 30; ++i) d.push_back((i * 2183) % 65536 / 65535.0);
  const Image img(10, 1, 3, d);
  for (const char* name : {"a.png", "a.ppm"}) {
    SaveImage(dir / name, img, 16);
    EXPECT_EQ(LoadImage(dir / name), img) << name;
  }
  SaveImage(dir / "b.png", img, 8);
  const Image eight = LoadImage(dir / "b.png");
  for (std::size_t i = 0; i < img.size(); ++i) {
    EXPECT_NEAR(eight.data()[i], img.data()[i], 0.5 / 255 + 1e-12);
  }
}

TEST(SampleSetTest, ManifestRoundTrip) {
  TempDir dir;
  SampleSet set;
  set.scene_id = "scene";
  set.reference = oracle::RandomImage(4, 4, 1);
  set.candidates.push_back({"a", oracle::RandomImage(4, 4, 2), {}});
  set.candidates.push_back({"b", oracle::RandomImage(4, 4, 3), {}});
  set.truth_order = {"b", "a"};
  SaveSampleSet(set, dir / "sub" / "m.json");
  const SampleSet back = LoadSampleSet(dir / "sub" / "m.json");
  EXPECT_EQ(back.scene_id, "scene");
  ASSERT_EQ(back.candidates.size(), 2u);
  EXPECT_EQ(back.candidates[1].id, "b");
  EXPECT_EQ(back.truth_order, set.truth_order);
  ASSERT_TRUE(back.reference.has_value());
  for (std::size_t i = 0; i < 16; ++i) {
    EXPECT_NEAR(back.candidates[0].image.data()[i],
                set.candidates[0].image.data()[i], 0.5 / 65535 + 1e-12);
  }
}

TEST(SampleSetTest, NullReferenceAndValidation) {
  TempDir dir;
  SaveImage(dir / "x.png", Image(4, 4, 1, 0.5));
  SaveImage(dir / "y.png", Image(5, 4, 1, 0.5));
  {
    std::ofstream(dir / "ok.json")
        << R"({"scene_id":"s","reference":null,"candidates":[{"id":"x","path":"x.png"}]})";
    const SampleSet s = LoadSampleSet(dir / "ok.json");
    EXPECT_FALSE(s.reference.has_value());
    EXPECT_EQ(s.Find("x").image.width(), 4);
    EXPECT_TRUSTSR_ERROR(s.Find("nope"), ErrorCode::kFormatError);
  }
  std::ofstream(dir / "dup.json")
      << R"({"scene_id":"s","reference":null,"candidates":[{"id":"x","path":"x.png"},{"id":"x","path":"x.png"}]})";
  EXPECT_TRUSTSR_ERROR(LoadSampleSet(dir / "dup.json"), ErrorCode::kFormatError);
  std::ofstream(dir / "shape.json")
      << R"({"scene_id":"s","reference":null,"candidates":[{"id":"x","path":"x.png"},{"id":"y","path":"y.png"}]})";
  EXPECT_TRUSTSR_ERROR(LoadSampleSet(dir / "shape.json"),
                       ErrorCode::kShapeMismatch);
  std::ofstream(dir / "bad.json") << "{";
  EXPECT_TRUSTSR_ERROR(LoadSampleSet(dir / "bad.json"), ErrorCode::kFormatError);
}

}  // namespace
}  // namespace trustsr
