#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ccbench/image.hpp"

namespace ccbench {

// IEC 61966-2-1 transfer curve, scalar form. Inputs must lie in [0, 1].
double srgb_decode(double encoded);
double srgb_encode(double linear);

/// sRGB-tagged image -> Linear-tagged image. Throws InputDomain on any
/// masked-in value outside [0, 1].
Image srgb_decode(const Image& encoded);
/// Linear-tagged image -> sRGB-tagged image. Callers clip first.
Image srgb_encode(const Image& linear);

/// Clamps every channel to [0, 1]; masked-out pixels are left untouched.
Image clip_unit(const Image& img);

/// I = W * e, per channel.
Image apply_illuminant(const Image& canonical, const Illuminant& e);

/// Diagonal (von Kries) correction: divides each channel by e.
Image correct_von_kries(const Image& observed, const Illuminant& e);

enum class Aggregator { Median, Mean };

/// Relative threshold below which a predicted channel is treated as zero.
inline constexpr double kSupportEpsilon = 1e-6;
/// Minimum fraction of masked-in pixels that must survive the threshold.
inline constexpr double kMinSupportFraction = 0.01;

/// Recovers the illuminant relating an observed image to a white-balanced
/// prediction of it. Per masked-in pixel and channel the ratio
/// input / predicted is taken wherever predicted exceeds
/// kSupportEpsilon * max(predicted); the per-channel ratios are reduced with
/// `aggregator` and the result is returned with unit L2 norm.
///
/// The shared mask is the intersection of both images' masks.
Illuminant recover_illuminant(const Image& input, const Image& predicted_white,
                              Aggregator aggregator = Aggregator::Median);

/// Angle between two illuminants, in degrees.
double angular_error(const Illuminant& a, const Illuminant& b);
/// Same metric on raw triples; returns NaN if either vector is all zero.
double angular_error(const Rgb& a, const Rgb& b);

struct ErrorMap {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> degrees;
  std::vector<std::uint8_t> valid;

  std::size_t valid_count() const noexcept;
};

/// Per-pixel angular error between two white-balanced images. Pixels outside
/// either mask, or where either RGB vector has a norm below
/// kSupportEpsilon * image max, are flagged invalid.
ErrorMap error_map(const Image& predicted_white, const Image& gt_white);

}  // namespace ccbench
