#include "ccbench/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ccbench/error.hpp"

namespace ccbench {

std::string_view to_string(ColorSpace space) {
  return space == ColorSpace::Linear ? "linear" : "srgb";
}

ColorSpace color_space_from_string(std::string_view name) {
  if (name == "linear") return ColorSpace::Linear;
  if (name == "srgb") return ColorSpace::Srgb;
  throw Error(ErrorCode::Config,
              "unknown color space '" + std::string(name) +
                  "' (expected linear or srgb)");
}

Image::Image(std::size_t width, std::size_t height, ColorSpace space)
    : width_(width), height_(height), space_(space),
      data_(width * height * 3, 0.0) {}

Image::Image(std::size_t width, std::size_t height, std::vector<double> data,
             ColorSpace space)
    : width_(width), height_(height), space_(space), data_(std::move(data)) {
  if (data_.size() != width * height * 3) {
    throw Error(ErrorCode::InputDomain,
                "image data has " + std::to_string(data_.size()) +
                    " values, expected " + std::to_string(width * height * 3));
  }
}

void Image::set_mask(std::vector<std::uint8_t> mask) {
  if (mask.size() != pixel_count()) {
    throw Error(ErrorCode::InputDomain,
                "mask has " + std::to_string(mask.size()) +
                    " pixels, image has " + std::to_string(pixel_count()));
  }
  mask_ = std::move(mask);
}

std::size_t Image::masked_in_count() const noexcept {
  if (mask_.empty()) return pixel_count();
  return static_cast<std::size_t>(
      std::count_if(mask_.begin(), mask_.end(), [](auto m) { return m != 0; }));
}

double Image::max_value() const noexcept {
  double best = 0.0;
  for (std::size_t i = 0; i < pixel_count(); ++i) {
    if (!in_mask(i)) continue;
    for (std::size_t c = 0; c < 3; ++c) best = std::max(best, data_[i * 3 + c]);
  }
  return best;
}

void Image::validate() const {
  for (std::size_t i = 0; i < pixel_count(); ++i) {
    if (!in_mask(i)) continue;
    for (std::size_t c = 0; c < 3; ++c) {
      const double v = data_[i * 3 + c];
      if (!std::isfinite(v) || v < 0.0) {
        throw Error(ErrorCode::InputDomain,
                    "pixel (" + std::to_string(i % width_) + "," +
                        std::to_string(i / width_) +
                        ") has a negative or non-finite value");
      }
    }
  }
}

Illuminant::Illuminant(double r, double g, double b) : rgb_{r, g, b} {
  for (double v : rgb_) {
    if (!std::isfinite(v) || v <= 0.0) {
      throw Error(ErrorCode::DegenerateIlluminant,
                  "illuminant components must be finite and > 0, got (" +
                      std::to_string(r) + ", " + std::to_string(g) + ", " +
                      std::to_string(b) + ")");
    }
  }
}

Illuminant Illuminant::normalized() const {
  const double n = std::sqrt(rgb_[0] * rgb_[0] + rgb_[1] * rgb_[1] +
                             rgb_[2] * rgb_[2]);
  return Illuminant(rgb_[0] / n, rgb_[1] / n, rgb_[2] / n);
}

}  // namespace ccbench
