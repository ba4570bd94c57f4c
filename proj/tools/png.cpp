#include "png.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

#include "cmr/error.hpp"

namespace cmr::png {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};

}  // namespace

void write_gray(const std::filesystem::path& path, const std::vector<std::uint8_t>& pixels,
                std::size_t width, std::size_t height) {
  if (pixels.size() != width * height) throw DimensionError("png: pixel count mismatch");
  std::unique_ptr<std::FILE, FileCloser> file(std::fopen(path.string().c_str(), "wb"));
  if (!file) throw IoError("cannot open " + path.string() + " for writing");

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("png: cannot create writer");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("png: cannot create info struct");
  }
  // libpng reports errors by longjmp; nothing with a destructor lives between
  // here and the end of the write.
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("png: write failed for " + path.string());
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (std::size_t r = 0; r < height; ++r) {
    png_write_row(png, const_cast<png_bytep>(pixels.data() + r * width));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

void write_magnitude_strip(const std::filesystem::path& path, const DynamicImage& x) {
  const std::size_t nf = x.frames(), ny = x.rows(), nx = x.cols();
  const std::size_t width = nf * nx;
  std::vector<std::uint8_t> pixels(width * ny, 0);
  for (std::size_t f = 0; f < nf; ++f) {
    auto plane = x.frame(f);
    double lo = std::abs(plane[0]), hi = lo;
    for (const auto& v : plane) {
      lo = std::min(lo, std::abs(v));
      hi = std::max(hi, std::abs(v));
    }
    const double span = hi > lo ? hi - lo : 1.0;
    for (std::size_t r = 0; r < ny; ++r) {
      for (std::size_t c = 0; c < nx; ++c) {
        const double t = (std::abs(plane[r * nx + c]) - lo) / span;
        pixels[r * width + f * nx + c] = static_cast<std::uint8_t>(std::lround(255.0 * t));
      }
    }
  }
  write_gray(path, pixels, width, ny);
}

}  // namespace cmr::png
