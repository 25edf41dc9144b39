#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace ccbench {

/// Raw PNG samples as stored on disk: `channels` interleaved samples per
/// pixel, each 8- or 16-bit wide (16-bit samples are widened, not scaled).
/// Palette and sub-byte images are expanded to 8 bits on read.
struct PngRaster {
  std::size_t width = 0;
  std::size_t height = 0;
  int channels = 0;   // 1 gray, 2 gray+alpha, 3 rgb, 4 rgba
  int bit_depth = 0;  // 8 or 16
  std::vector<std::uint16_t> samples;

  std::uint16_t sample(std::size_t pixel, int channel) const {
    return samples[pixel * static_cast<std::size_t>(channels) +
                   static_cast<std::size_t>(channel)];
  }
};

/// Throws Io with the file name on any failure.
PngRaster read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const PngRaster& raster);

}  // namespace ccbench
