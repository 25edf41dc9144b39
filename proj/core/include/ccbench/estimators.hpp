#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ccbench/image.hpp"

namespace ccbench {

/// One member of the (n, p, sigma) grey-edge family:
///   e_c ~ ( sum |D^n (G_sigma * I_c)|^p )^(1/p)
/// over masked-in pixels.
struct EstimatorParams {
  static constexpr double kInfinity = std::numeric_limits<double>::infinity();

  int order = 0;        // derivative order n in {0, 1, 2}
  double norm = 1.0;    // Minkowski p in [1, inf]; kInfinity selects the max
  double sigma = 0.0;   // Gaussian scale in pixels

  bool is_max_norm() const noexcept { return norm == kInfinity; }
  /// Throws Config on out-of-range values or n >= 1 with sigma == 0.
  void validate() const;

  friend bool operator==(const EstimatorParams&,
                         const EstimatorParams&) = default;
};

enum class Preset {
  GreyWorld,
  WhitePatch,
  ShadesOfGrey,
  GeneralGreyWorld,
  GreyEdge1,
  GreyEdge2,
};

std::string_view to_string(Preset preset);
std::optional<Preset> preset_from_string(std::string_view name);
std::span<const Preset> all_presets();

/// Default parameters per preset. Shades-of-grey p=6, general grey-world
/// (p=13, sigma=2), first-order grey-edge (p=7, sigma=4), second-order
/// grey-edge (p=7, sigma=5).
EstimatorParams preset_params(Preset preset);

/// Separable Gaussian blur, kernel truncated at +-ceil(3 sigma), symmetric
/// (half-sample) reflection at the borders. sigma == 0 is the identity.
///
/// With a mask present this is a normalized convolution: only masked-in
/// pixels contribute and the weights are renormalized, so masked-out values
/// never leak into the result. Without a mask it is the plain convolution.
Image gaussian_smooth(const Image& img, double sigma);

/// Normalized 1-D Gaussian kernel of radius ceil(3 sigma).
std::vector<double> gaussian_kernel(double sigma);

/// Per-channel response |D^n (G_sigma * img)| for every pixel. Order 1 is the
/// Euclidean norm of the central x/y differences; order 2 is the Frobenius
/// norm of the Hessian sqrt(fxx^2 + 2 fxy^2 + fyy^2).
Image derivative_magnitude(const Image& img, int order, double sigma);

/// Throws InputDomain for non-linear input or an empty mask, Config for bad
/// params, DegenerateScene when a channel statistic is zero.
Illuminant estimate(const Image& img, const EstimatorParams& params);
Illuminant estimate_preset(const Image& img, Preset preset);

}  // namespace ccbench
