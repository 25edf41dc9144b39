#include "ccbench/estimators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "ccbench/error.hpp"

namespace ccbench {
namespace {

constexpr std::array<Preset, 6> kPresets = {
    Preset::GreyWorld,        Preset::WhitePatch, Preset::ShadesOfGrey,
    Preset::GeneralGreyWorld, Preset::GreyEdge1,  Preset::GreyEdge2,
};

// Half-sample symmetric reflection: -1 -> 0, n -> n-1.
std::size_t reflect(std::ptrdiff_t i, std::size_t n) {
  const auto period = static_cast<std::ptrdiff_t>(2 * n);
  std::ptrdiff_t m = i % period;
  if (m < 0) m += period;
  if (m >= static_cast<std::ptrdiff_t>(n)) m = period - 1 - m;
  return static_cast<std::size_t>(m);
}

// Convolves an interleaved raster with `stride` components per pixel along
// x (horizontal) or y.
std::vector<double> convolve_axis(const std::vector<double>& src,
                                  std::size_t width, std::size_t height,
                                  std::size_t stride,
                                  const std::vector<double>& kernel,
                                  bool horizontal) {
  const auto radius = static_cast<std::ptrdiff_t>(kernel.size() / 2);
  std::vector<double> dst(src.size(), 0.0);
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      double* out = &dst[(y * width + x) * stride];
      for (std::ptrdiff_t k = -radius; k <= radius; ++k) {
        const double w = kernel[static_cast<std::size_t>(k + radius)];
        std::size_t sx = x, sy = y;
        if (horizontal)
          sx = reflect(static_cast<std::ptrdiff_t>(x) + k, width);
        else
          sy = reflect(static_cast<std::ptrdiff_t>(y) + k, height);
        const double* in = &src[(sy * width + sx) * stride];
        for (std::size_t c = 0; c < stride; ++c) out[c] += w * in[c];
      }
    }
  }
  return dst;
}

std::vector<double> separable(const std::vector<double>& src, std::size_t width,
                              std::size_t height, std::size_t stride,
                              const std::vector<double>& kernel) {
  return convolve_axis(convolve_axis(src, width, height, stride, kernel, true),
                       width, height, stride, kernel, false);
}

double minkowski(std::span<const double> values, double p) {
  double peak = 0.0;
  for (double v : values) peak = std::max(peak, v);
  if (peak == 0.0 || p == EstimatorParams::kInfinity) return peak;
  double acc = 0.0;
  if (p == 1.0) {
    for (double v : values) acc += v;
    return acc;
  }
  // Scale by the peak so large p cannot underflow.
  for (double v : values) acc += std::pow(v / peak, p);
  return peak * std::pow(acc, 1.0 / p);
}

}  // namespace

void EstimatorParams::validate() const {
  if (order < 0 || order > 2) {
    throw Error(ErrorCode::Config, "derivative order must be 0, 1 or 2, got " +
                                       std::to_string(order));
  }
  if (!(norm >= 1.0)) {
    throw Error(ErrorCode::Config,
                "Minkowski norm must be >= 1, got " + std::to_string(norm));
  }
  if (!std::isfinite(sigma) || sigma < 0.0) {
    throw Error(ErrorCode::Config,
                "sigma must be finite and >= 0, got " + std::to_string(sigma));
  }
  if (order >= 1 && sigma <= 0.0) {
    throw Error(ErrorCode::Config,
                "derivative order " + std::to_string(order) +
                    " requires sigma > 0");
  }
}

std::string_view to_string(Preset preset) {
  switch (preset) {
    case Preset::GreyWorld: return "GREY_WORLD";
    case Preset::WhitePatch: return "WHITE_PATCH";
    case Preset::ShadesOfGrey: return "SHADES_OF_GREY";
    case Preset::GeneralGreyWorld: return "GENERAL_GREY_WORLD";
    case Preset::GreyEdge1: return "GREY_EDGE_1";
    case Preset::GreyEdge2: return "GREY_EDGE_2";
  }
  return "UNKNOWN";
}

std::optional<Preset> preset_from_string(std::string_view name) {
  for (Preset p : kPresets)
    if (to_string(p) == name) return p;
  return std::nullopt;
}

std::span<const Preset> all_presets() { return kPresets; }

EstimatorParams preset_params(Preset preset) {
  switch (preset) {
    case Preset::GreyWorld: return {0, 1.0, 0.0};
    case Preset::WhitePatch: return {0, EstimatorParams::kInfinity, 0.0};
    case Preset::ShadesOfGrey: return {0, 6.0, 0.0};
    case Preset::GeneralGreyWorld: return {0, 13.0, 2.0};
    case Preset::GreyEdge1: return {1, 7.0, 4.0};
    case Preset::GreyEdge2: return {2, 7.0, 5.0};
  }
  return {};
}

std::vector<double> gaussian_kernel(double sigma) {
  if (sigma <= 0.0) return {1.0};
  const auto radius = static_cast<std::ptrdiff_t>(std::ceil(3.0 * sigma));
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (std::ptrdiff_t i = -radius; i <= radius; ++i) {
    const double w = std::exp(-static_cast<double>(i * i) / (2.0 * sigma * sigma));
    k[static_cast<std::size_t>(i + radius)] = w;
    sum += w;
  }
  for (double& w : k) w /= sum;
  return k;
}

Image gaussian_smooth(const Image& img, double sigma) {
  if (sigma == 0.0 || img.empty()) return img;
  const auto kernel = gaussian_kernel(sigma);
  const std::size_t w = img.width(), h = img.height();

  if (!img.has_mask()) {
    std::vector<double> src(img.data().begin(), img.data().end());
    Image out(w, h, separable(src, w, h, 3, kernel), img.space());
    return out;
  }

  // Normalized convolution: blur (value * mask, mask) together and divide.
  std::vector<double> packed(img.pixel_count() * 4, 0.0);
  const auto data = img.data();
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    if (!img.in_mask(i)) continue;
    for (std::size_t c = 0; c < 3; ++c) packed[i * 4 + c] = data[i * 3 + c];
    packed[i * 4 + 3] = 1.0;
  }
  const auto blurred = separable(packed, w, h, 4, kernel);
  Image out(w, h, img.space());
  auto od = out.data();
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    const double weight = blurred[i * 4 + 3];
    if (weight <= 0.0) continue;
    for (std::size_t c = 0; c < 3; ++c) od[i * 3 + c] = blurred[i * 4 + c] / weight;
  }
  out.set_mask(std::vector<std::uint8_t>(img.mask().begin(), img.mask().end()));
  return out;
}

Image derivative_magnitude(const Image& img, int order, double sigma) {
  if (order < 0 || order > 2) {
    throw Error(ErrorCode::Config, "derivative order must be 0, 1 or 2");
  }
  if (order >= 1 && sigma <= 0.0) {
    throw Error(ErrorCode::Config, "derivatives require sigma > 0");
  }
  const Image s = gaussian_smooth(img, sigma);
  const std::size_t w = s.width(), h = s.height();
  Image out(w, h, img.space());
  if (img.has_mask())
    out.set_mask(std::vector<std::uint8_t>(img.mask().begin(), img.mask().end()));

  auto at = [&](std::ptrdiff_t x, std::ptrdiff_t y, std::size_t c) {
    return s.at(reflect(x, w), reflect(y, h), c);
  };

  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const auto xi = static_cast<std::ptrdiff_t>(x);
      const auto yi = static_cast<std::ptrdiff_t>(y);
      for (std::size_t c = 0; c < 3; ++c) {
        double m = 0.0;
        if (order == 0) {
          m = std::abs(s.at(x, y, c));
        } else if (order == 1) {
          const double fx = 0.5 * (at(xi + 1, yi, c) - at(xi - 1, yi, c));
          const double fy = 0.5 * (at(xi, yi + 1, c) - at(xi, yi - 1, c));
          m = std::sqrt(fx * fx + fy * fy);
        } else {
          const double centre = s.at(x, y, c);
          const double fxx = at(xi + 1, yi, c) - 2.0 * centre + at(xi - 1, yi, c);
          const double fyy = at(xi, yi + 1, c) - 2.0 * centre + at(xi, yi - 1, c);
          const double fxy = 0.25 * (at(xi + 1, yi + 1, c) - at(xi + 1, yi - 1, c) -
                                     at(xi - 1, yi + 1, c) + at(xi - 1, yi - 1, c));
          m = std::sqrt(fxx * fxx + 2.0 * fxy * fxy + fyy * fyy);
        }
        out.at(x, y, c) = m;
      }
    }
  }
  return out;
}

Illuminant estimate(const Image& img, const EstimatorParams& params) {
  params.validate();
  if (img.space() != ColorSpace::Linear) {
    throw Error(ErrorCode::InputDomain, "estimators accept linear images only");
  }
  const std::size_t n = img.masked_in_count();
  if (n == 0) {
    throw Error(ErrorCode::InputDomain, "image has no masked-in pixels");
  }
  img.validate();

  const Image response = derivative_magnitude(img, params.order, params.sigma);
  std::array<std::vector<double>, 3> values;
  for (auto& v : values) v.reserve(n);
  const auto r = response.data();
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    if (!img.in_mask(i)) continue;
    for (std::size_t c = 0; c < 3; ++c) values[c].push_back(r[i * 3 + c]);
  }

  Rgb e{};
  for (std::size_t c = 0; c < 3; ++c) {
    e[c] = minkowski(values[c], params.norm);
    if (!(e[c] > 0.0) || !std::isfinite(e[c])) {
      throw Error(ErrorCode::DegenerateScene,
                  "channel " + std::to_string(c) +
                      " statistic is zero; scene carries no information");
    }
  }
  return Illuminant(e).normalized();
}

Illuminant estimate_preset(const Image& img, Preset preset) {
  return estimate(img, preset_params(preset));
}

}  // namespace ccbench
