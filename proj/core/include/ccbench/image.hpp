#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace ccbench {

enum class ColorSpace { Linear, Srgb };

std::string_view to_string(ColorSpace space);
ColorSpace color_space_from_string(std::string_view name);

using Rgb = std::array<double, 3>;

/// Interleaved H x W x 3 raster of doubles with an optional validity mask.
///
/// The mask (when present) holds one byte per pixel; nonzero means the pixel
/// participates in statistics. Pixels outside the mask are never read by
/// estimators, recovery or metrics, so their values may be anything,
/// including NaN.
class Image {
 public:
  Image() = default;
  Image(std::size_t width, std::size_t height,
        ColorSpace space = ColorSpace::Linear);
  Image(std::size_t width, std::size_t height, std::vector<double> data,
        ColorSpace space = ColorSpace::Linear);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t pixel_count() const noexcept { return width_ * height_; }
  bool empty() const noexcept { return pixel_count() == 0; }

  ColorSpace space() const noexcept { return space_; }
  void set_space(ColorSpace space) noexcept { space_ = space; }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  double& at(std::size_t x, std::size_t y, std::size_t c) {
    return data_[(y * width_ + x) * 3 + c];
  }
  double at(std::size_t x, std::size_t y, std::size_t c) const {
    return data_[(y * width_ + x) * 3 + c];
  }

  Rgb pixel(std::size_t index) const {
    const double* p = &data_[index * 3];
    return {p[0], p[1], p[2]};
  }
  void set_pixel(std::size_t index, const Rgb& rgb) {
    double* p = &data_[index * 3];
    p[0] = rgb[0];
    p[1] = rgb[1];
    p[2] = rgb[2];
  }

  bool has_mask() const noexcept { return !mask_.empty(); }
  std::span<const std::uint8_t> mask() const noexcept { return mask_; }
  /// Throws InputDomain when the mask size does not match the raster.
  void set_mask(std::vector<std::uint8_t> mask);
  void clear_mask() noexcept { mask_.clear(); }

  bool in_mask(std::size_t index) const noexcept {
    return mask_.empty() || mask_[index] != 0;
  }
  std::size_t masked_in_count() const noexcept;

  /// Largest channel value over masked-in pixels (0 for an empty selection).
  double max_value() const noexcept;

  /// Checks that every masked-in channel value is finite and >= 0.
  void validate() const;

  bool same_size(const Image& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  ColorSpace space_ = ColorSpace::Linear;
  std::vector<double> data_;
  std::vector<std::uint8_t> mask_;
};

/// Light colour as relative channel gains. Only the direction matters;
/// `normalized()` gives the unit-L2 canonical form.
class Illuminant {
 public:
  /// Throws DegenerateIlluminant unless all components are finite and > 0.
  Illuminant(double r, double g, double b);
  explicit Illuminant(const Rgb& rgb) : Illuminant(rgb[0], rgb[1], rgb[2]) {}

  double r() const noexcept { return rgb_[0]; }
  double g() const noexcept { return rgb_[1]; }
  double b() const noexcept { return rgb_[2]; }
  double operator[](std::size_t c) const noexcept { return rgb_[c]; }
  const Rgb& rgb() const noexcept { return rgb_; }

  Illuminant normalized() const;

  friend bool operator==(const Illuminant&, const Illuminant&) = default;

 private:
  Rgb rgb_;
};

}  // namespace ccbench
