#include "ccbench/png_io.hpp"

#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <memory>
#include <string>

#include "ccbench/error.hpp"

namespace ccbench {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const noexcept {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& what) {
  throw Error(ErrorCode::Io, path.string() + ": " + what);
}

// libpng reports errors via longjmp; keep the message for the rethrow.
struct ErrorSink {
  char message[256] = "libpng error";
};

void on_error(png_structp png, png_const_charp msg) {
  auto* sink = static_cast<ErrorSink*>(png_get_error_ptr(png));
  std::snprintf(sink->message, sizeof sink->message, "%s", msg);
  png_longjmp(png, 1);
}

void on_warning(png_structp, png_const_charp) {}

// Decodes into `out`. Returns false (with sink->message set) on a libpng
// error. Buffers are owned by the caller so a longjmp cannot leak them.
bool decode(std::FILE* fp, PngRaster& out, ErrorSink* sink,
            std::vector<png_bytep>& rows, std::vector<std::uint8_t>& bytes) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, sink,
                                           on_error, on_warning);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_init_io(png, fp);
  png_read_info(png, info);

  const int color_type = png_get_color_type(png, info);
  int depth = png_get_bit_depth(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && depth < 8)
    png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_read_update_info(png, info);

  out.width = png_get_image_width(png, info);
  out.height = png_get_image_height(png, info);
  out.channels = png_get_channels(png, info);
  depth = png_get_bit_depth(png, info);
  out.bit_depth = depth;

  const std::size_t row_bytes = png_get_rowbytes(png, info);
  const std::size_t per_row = out.width * static_cast<std::size_t>(out.channels);
  bytes.assign(row_bytes * out.height, 0);
  rows.assign(out.height, nullptr);
  for (std::size_t y = 0; y < out.height; ++y) rows[y] = &bytes[y * row_bytes];
  png_read_image(png, rows.data());

  out.samples.assign(per_row * out.height, 0);
  for (std::size_t y = 0; y < out.height; ++y) {
    const std::uint8_t* row = &bytes[y * row_bytes];
    std::uint16_t* dst = &out.samples[y * per_row];
    for (std::size_t i = 0; i < per_row; ++i) {
      dst[i] = depth == 16
                   ? static_cast<std::uint16_t>((row[2 * i] << 8) | row[2 * i + 1])
                   : row[i];
    }
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

bool encode(std::FILE* fp, const PngRaster& in, ErrorSink* sink,
            std::vector<png_bytep>& rows, std::vector<std::uint8_t>& bytes) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, sink,
                                            on_error, on_warning);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_init_io(png, fp);
  int color_type = PNG_COLOR_TYPE_RGB;
  switch (in.channels) {
    case 1: color_type = PNG_COLOR_TYPE_GRAY; break;
    case 2: color_type = PNG_COLOR_TYPE_GRAY_ALPHA; break;
    case 3: color_type = PNG_COLOR_TYPE_RGB; break;
    default: color_type = PNG_COLOR_TYPE_RGB_ALPHA; break;
  }
  png_set_IHDR(png, info, static_cast<png_uint_32>(in.width),
               static_cast<png_uint_32>(in.height), in.bit_depth, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  const std::size_t per_row = in.width * static_cast<std::size_t>(in.channels);
  const std::size_t bytes_per_sample = in.bit_depth == 16 ? 2 : 1;
  const std::size_t row_bytes = per_row * bytes_per_sample;
  bytes.assign(row_bytes * in.height, 0);
  for (std::size_t i = 0; i < in.samples.size(); ++i) {
    const std::uint16_t v = in.samples[i];
    if (bytes_per_sample == 2) {
      bytes[i * 2] = static_cast<std::uint8_t>(v >> 8);  // PNG is big endian
      bytes[i * 2 + 1] = static_cast<std::uint8_t>(v & 0xff);
    } else {
      bytes[i] = static_cast<std::uint8_t>(v);
    }
  }
  rows.assign(in.height, nullptr);
  for (std::size_t y = 0; y < in.height; ++y) rows[y] = &bytes[y * row_bytes];
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

}  // namespace

PngRaster read_png(const std::filesystem::path& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) fail(path, "cannot open for reading");
  png_byte header[8] = {};
  if (std::fread(header, 1, 8, fp.get()) != 8 || png_sig_cmp(header, 0, 8) != 0)
    fail(path, "not a PNG file");
  std::rewind(fp.get());

  PngRaster raster;
  ErrorSink sink;
  std::vector<png_bytep> rows;
  std::vector<std::uint8_t> bytes;
  if (!decode(fp.get(), raster, &sink, rows, bytes)) fail(path, sink.message);
  return raster;
}

void write_png(const std::filesystem::path& path, const PngRaster& raster) {
  if (raster.bit_depth != 8 && raster.bit_depth != 16)
    fail(path, "bit depth must be 8 or 16");
  if (raster.channels < 1 || raster.channels > 4)
    fail(path, "channel count must be 1..4");
  if (raster.samples.size() !=
      raster.width * raster.height * static_cast<std::size_t>(raster.channels))
    fail(path, "sample buffer does not match dimensions");

  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) fail(path, "cannot open for writing");
  ErrorSink sink;
  std::vector<png_bytep> rows;
  std::vector<std::uint8_t> bytes;
  if (!encode(fp.get(), raster, &sink, rows, bytes)) fail(path, sink.message);
  if (std::fflush(fp.get()) != 0) fail(path, "write failed");
}

}  // namespace ccbench
