#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>

#include "cmr/dataio.hpp"
#include "oracles.hpp"

using cmr::Complex;

namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("cmr_dataio_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
             "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

std::vector<std::uint8_t> file_bytes(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

bool bitwise_equal(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::bit_cast<std::uint64_t>(a[i].real()) != std::bit_cast<std::uint64_t>(b[i].real()) ||
        std::bit_cast<std::uint64_t>(a[i].imag()) != std::bit_cast<std::uint64_t>(b[i].imag())) {
      return false;
    }
  }
  return true;
}

// Values with awkward bit patterns: signed zero, subnormals, extremes.
void sprinkle_edge_values(std::span<Complex> v) {
  const double specials[] = {-0.0, std::numeric_limits<double>::denorm_min(),
                             std::numeric_limits<double>::max(), -1e-310, 1.0 / 3.0};
  for (std::size_t i = 0; i < std::size(specials) && i < v.size(); ++i) {
    v[i] = {specials[i], -specials[i]};
  }
}

}  // namespace

TEST(DataIo, RoundTripEveryKind) {
  TempDir dir;
  auto y = oracle::random_kspace(3, 2, 5, 4, 1);
  sprinkle_edge_values(y.flat());
  cmr::write_kspace(dir / "k.cmrx", y);
  EXPECT_TRUE(bitwise_equal(cmr::read_kspace(dir / "k.cmrx").flat(), y.flat()));
  EXPECT_EQ(cmr::read_kspace(dir / "k.cmrx").shape(), y.shape());

  auto x = oracle::random_image(3, 6, 7, 2);
  sprinkle_edge_values(x.flat());
  cmr::write_image(dir / "x.cmrx", x);
  EXPECT_TRUE(bitwise_equal(cmr::read_image(dir / "x.cmrx").flat(), x.flat()));

  const auto s = oracle::random_maps(4, 5, 5, 3);
  cmr::write_maps(dir / "s.cmrx", s);
  const auto s2 = cmr::read_maps(dir / "s.cmrx");
  EXPECT_TRUE(bitwise_equal(s2.flat(), s.flat()));
  EXPECT_EQ(s2.shape(), s.shape());

  const auto m = oracle::random_mask(3, 4, 9, 0.4, 4);
  cmr::write_mask(dir / "m.cmrx", m);
  EXPECT_EQ(cmr::read_mask(dir / "m.cmrx"), m);

  cmr::Rng rng(5);
  cmr::RealVolume rv({2, 3, 4});
  for (auto& v : rv.flat()) v = rng.uniform() - 0.5;
  rv.flat()[0] = -0.0;
  cmr::write_array(dir / "r.cmrx", cmr::from_real_image(rv));
  const auto back = cmr::read_array(dir / "r.cmrx");
  EXPECT_EQ(back.dtype(), cmr::DType::float64);
  EXPECT_EQ(back.dims, (std::vector<std::uint32_t>{2, 3, 4}));
  const auto& vals = std::get<std::vector<double>>(back.data);
  for (std::size_t i = 0; i < vals.size(); ++i) {
    EXPECT_EQ(std::bit_cast<std::uint64_t>(vals[i]), std::bit_cast<std::uint64_t>(rv.flat()[i]));
  }
  // Real images are promoted to complex by the typed reader.
  const auto promoted = cmr::read_image(dir / "r.cmrx");
  EXPECT_EQ(promoted.shape(), rv.shape());
  EXPECT_EQ(promoted.flat()[5], Complex(rv.flat()[5], 0.0));

  cmr::RealGrid rg({2, 5});
  cmr::write_array(dir / "g.cmrx", cmr::from_real_image(rg));
  EXPECT_EQ(cmr::read_image(dir / "g.cmrx").shape(), (std::array<std::size_t, 3>{1, 2, 5}));
}

TEST(DataIo, ZeroRealImageFileSize) {
  TempDir dir;
  cmr::write_array(dir / "z.cmrx", cmr::from_real_image(cmr::RealGrid({2, 2})));
  const auto bytes = file_bytes(dir / "z.cmrx");
  ASSERT_EQ(bytes.size(), 51u);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 8), "CMRX0001");
  EXPECT_EQ(bytes[8], 1);   // image
  EXPECT_EQ(bytes[9], 1);   // f64
  EXPECT_EQ(bytes[10], 2);  // ndim
  EXPECT_EQ(bytes[11], 2);
  EXPECT_EQ(bytes[15], 2);
}

TEST(DataIo, LittleEndianLayout) {
  cmr::MultiCoilKSpace y(1, 1, 2, 2);
  y(0, 0, 0, 0) = {1.0, -2.0};
  const auto bytes = cmr::encode(cmr::from_kspace(y));
  ASSERT_EQ(bytes.size(), 11u + 16u + 4u * 16u);
  // 1.0 = 0x3FF0000000000000, -2.0 = 0xC000000000000000.
  EXPECT_EQ(bytes[27 + 7], 0x3F);
  EXPECT_EQ(bytes[27 + 6], 0xF0);
  EXPECT_EQ(bytes[35 + 7], 0xC0);
}

TEST(DataIo, BadMagicNamesOffsetZero) {
  auto bytes = cmr::encode(cmr::from_mask(cmr::SamplingMask(1, 2, 2)));
  bytes[0] = 'X';
  try {
    cmr::decode(bytes);
    FAIL() << "no error";
  } catch (const cmr::FormatError& e) {
    EXPECT_EQ(e.offset(), 0u);
  }
}

TEST(DataIo, TruncatedAndTrailingBytesRejected) {
  const auto good = cmr::encode(cmr::from_image(oracle::random_image(1, 3, 3, 1)));
  for (std::size_t n = 0; n < good.size(); ++n) {
    EXPECT_THROW(cmr::decode({good.begin(), good.begin() + n}), cmr::FormatError) << n;
  }
  auto longer = good;
  longer.push_back(0);
  EXPECT_THROW(cmr::decode(longer), cmr::FormatError);
}

TEST(DataIo, MaskValuesMustBeBinary) {
  auto bytes = cmr::encode(cmr::from_mask(cmr::SamplingMask(1, 2, 2, 1)));
  bytes.back() = 2;
  EXPECT_THROW(cmr::decode(bytes), cmr::FormatError);
}

TEST(DataIo, MissingFileIsIoError) {
  EXPECT_THROW(cmr::read_array("/nonexistent/dir/x.cmrx"), cmr::IoError);
}

TEST(DataIo, TypedReaderRejectsWrongKind) {
  TempDir dir;
  cmr::write_maps(dir / "s.cmrx", oracle::random_maps(2, 4, 4, 1));
  EXPECT_THROW(cmr::read_image(dir / "s.cmrx"), cmr::FormatError);
  EXPECT_THROW(cmr::read_mask(dir / "s.cmrx"), cmr::FormatError);
}

// Every single-byte mutation of every header byte must be rejected by the
// reader for that kind.
TEST(DataIo, HeaderMutationFuzz) {
  using Reader = std::function<void(const std::vector<std::uint8_t>&)>;
  struct Sample {
    std::vector<std::uint8_t> bytes;
    Reader read;
  };
  const std::vector<Sample> samples = {
      {cmr::encode(cmr::from_kspace(oracle::random_kspace(2, 2, 3, 3, 1))),
       [](const auto& b) { cmr::to_kspace(cmr::decode(b)); }},
      {cmr::encode(cmr::from_image(oracle::random_image(2, 3, 3, 2))),
       [](const auto& b) { cmr::to_image(cmr::decode(b)); }},
      {cmr::encode(cmr::from_real_image(cmr::RealGrid({3, 3}))),
       [](const auto& b) { cmr::to_image(cmr::decode(b)); }},
      {cmr::encode(cmr::from_maps(oracle::random_maps(2, 3, 3, 3))),
       [](const auto& b) { cmr::to_maps(cmr::decode(b)); }},
      {cmr::encode(cmr::from_mask(oracle::random_mask(2, 3, 3, 0.5, 4))),
       [](const auto& b) { cmr::to_mask(cmr::decode(b)); }},
  };
  std::size_t mutations = 0;
  for (const auto& s : samples) {
    const std::size_t header = cmr::kPreambleSize + 4 * s.bytes[10];
    ASSERT_NO_THROW(s.read(s.bytes));
    for (std::size_t pos = 0; pos < header; ++pos) {
      for (int v = 0; v < 256; ++v) {
        if (v == s.bytes[pos]) continue;
        auto bad = s.bytes;
        bad[pos] = static_cast<std::uint8_t>(v);
        EXPECT_THROW(s.read(bad), cmr::FormatError) << "byte " << pos << " value " << v;
        ++mutations;
      }
    }
  }
  EXPECT_GT(mutations, 5000u);
}

TEST(Reports, CsvFormatting) {
  cmr::ReconReport r;
  r.method = "vsharp";
  r.volume = "v0";
  r.acceleration = 4;
  r.scheme = "equispaced";
  r.ssim = 0.9;
  r.ssim3d = 0.8;
  r.psnr = std::numeric_limits<double>::infinity();
  r.nmse = 0.0;
  const std::string csv = cmr::report_csv({r});
  EXPECT_EQ(csv,
            "method,volume,acceleration,scheme,ssim,ssim3d,psnr,nmse,wall_seconds\n"
            "vsharp,v0,4.000000,equispaced,0.900000,0.800000,inf,0.000000,0.000000\n");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
  EXPECT_EQ(cmr::format_report_value(0.0), "0.000000");
}

TEST(Reports, RowsSortedByMethodThenVolume) {
  std::vector<cmr::ReconReport> rs(4);
  rs[0].method = "zero-filled";
  rs[0].volume = "a";
  rs[1].method = "sense";
  rs[1].volume = "b";
  rs[2].method = "sense";
  rs[2].volume = "a";
  rs[3].method = "cg";
  rs[3].volume = "z";
  const auto sorted = cmr::sorted_reports(rs);
  EXPECT_EQ(sorted[0].method, "cg");
  EXPECT_EQ(sorted[1].method + sorted[1].volume, "sensea");
  EXPECT_EQ(sorted[2].method + sorted[2].volume, "senseb");
  EXPECT_EQ(sorted[3].method, "zero-filled");
}

TEST(Reports, WriteReportEmitsCsvAndJson) {
  TempDir dir;
  cmr::ReconReport r;
  r.method = "sense";
  r.volume = "p";
  r.psnr = std::numeric_limits<double>::infinity();
  r.ssim3d = std::numeric_limits<double>::quiet_NaN();
  cmr::write_report(dir / "report.csv", {r});
  const auto csv = file_bytes(dir / "report.csv");
  EXPECT_EQ(std::string(csv.begin(), csv.end()), cmr::report_csv({r}));
  const auto json = file_bytes(dir / "report.json");
  const std::string text(json.begin(), json.end());
  EXPECT_NE(text.find("\"psnr\": \"inf\""), std::string::npos);
  EXPECT_NE(text.find("\"ssim3d\": null"), std::string::npos);
  EXPECT_THROW(cmr::write_report(dir / "none.csv", {}), cmr::InvalidParameterError);
}
