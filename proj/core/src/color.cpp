#include "ccbench/color.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "ccbench/error.hpp"

namespace ccbench {
namespace {

void require_space(const Image& img, ColorSpace expected, const char* op) {
  if (img.space() != expected) {
    throw Error(ErrorCode::InputDomain,
                std::string(op) + " expects a " +
                    std::string(to_string(expected)) + " image, got " +
                    std::string(to_string(img.space())));
  }
}

void require_unit_range(double v, const char* op) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw Error(ErrorCode::InputDomain,
                std::string(op) + ": value " + std::to_string(v) +
                    " outside [0, 1]");
  }
}

template <typename Fn>
Image map_channels(const Image& src, ColorSpace out_space, Fn&& fn) {
  Image out = src;
  out.set_space(out_space);
  auto data = out.data();
  for (std::size_t i = 0; i < src.pixel_count(); ++i) {
    if (!src.in_mask(i)) continue;
    for (std::size_t c = 0; c < 3; ++c) data[i * 3 + c] = fn(data[i * 3 + c], c);
  }
  return out;
}

double median_in_place(std::vector<double>& v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid),
                   v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(
      v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double mean_of(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

std::vector<std::uint8_t> shared_mask(const Image& a, const Image& b) {
  std::vector<std::uint8_t> m(a.pixel_count());
  for (std::size_t i = 0; i < m.size(); ++i)
    m[i] = (a.in_mask(i) && b.in_mask(i)) ? 1 : 0;
  return m;
}

double rgb_norm(const Rgb& v) {
  return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}

}  // namespace

double srgb_decode(double encoded) {
  require_unit_range(encoded, "srgb_decode");
  if (encoded <= 0.04045) return encoded / 12.92;
  return std::pow((encoded + 0.055) / 1.055, 2.4);
}

double srgb_encode(double linear) {
  require_unit_range(linear, "srgb_encode");
  if (linear <= 0.0031308) return linear * 12.92;
  return 1.055 * std::pow(linear, 1.0 / 2.4) - 0.055;
}

Image srgb_decode(const Image& encoded) {
  require_space(encoded, ColorSpace::Srgb, "srgb_decode");
  return map_channels(encoded, ColorSpace::Linear,
                      [](double v, std::size_t) { return srgb_decode(v); });
}

Image srgb_encode(const Image& linear) {
  require_space(linear, ColorSpace::Linear, "srgb_encode");
  return map_channels(linear, ColorSpace::Srgb,
                      [](double v, std::size_t) { return srgb_encode(v); });
}

Image clip_unit(const Image& img) {
  return map_channels(img, img.space(), [](double v, std::size_t) {
    return std::clamp(v, 0.0, 1.0);
  });
}

Image apply_illuminant(const Image& canonical, const Illuminant& e) {
  require_space(canonical, ColorSpace::Linear, "apply_illuminant");
  return map_channels(canonical, ColorSpace::Linear,
                      [&e](double v, std::size_t c) { return v * e[c]; });
}

Image correct_von_kries(const Image& observed, const Illuminant& e) {
  require_space(observed, ColorSpace::Linear, "correct_von_kries");
  return map_channels(observed, ColorSpace::Linear,
                      [&e](double v, std::size_t c) { return v / e[c]; });
}

Illuminant recover_illuminant(const Image& input, const Image& predicted_white,
                              Aggregator aggregator) {
  require_space(input, ColorSpace::Linear, "recover_illuminant");
  require_space(predicted_white, ColorSpace::Linear, "recover_illuminant");
  if (!input.same_size(predicted_white)) {
    throw Error(ErrorCode::InputDomain,
                "recover_illuminant: input and prediction differ in size");
  }

  Image pred = predicted_white;
  pred.set_mask(shared_mask(input, predicted_white));
  const std::size_t support = pred.masked_in_count();
  const double eps = kSupportEpsilon * pred.max_value();
  const auto min_support = static_cast<std::size_t>(
      std::ceil(kMinSupportFraction * static_cast<double>(support)));

  std::array<std::vector<double>, 3> ratios;
  for (auto& r : ratios) r.reserve(support);
  const auto in = input.data();
  const auto pw = pred.data();
  for (std::size_t i = 0; i < pred.pixel_count(); ++i) {
    if (!pred.in_mask(i)) continue;
    for (std::size_t c = 0; c < 3; ++c) {
      const double p = pw[i * 3 + c];
      const double v = in[i * 3 + c];
      if (std::isfinite(p) && std::isfinite(v) && p > eps)
        ratios[c].push_back(v / p);
    }
  }

  Rgb gains{};
  for (std::size_t c = 0; c < 3; ++c) {
    if (ratios[c].empty() || ratios[c].size() < min_support) {
      throw Error(ErrorCode::InsufficientSupport,
                  "recover_illuminant: only " +
                      std::to_string(ratios[c].size()) + " of " +
                      std::to_string(support) + " pixels usable in channel " +
                      std::to_string(c));
    }
    gains[c] = aggregator == Aggregator::Median ? median_in_place(ratios[c])
                                                : mean_of(ratios[c]);
  }
  return Illuminant(gains).normalized();
}

double angular_error(const Rgb& a, const Rgb& b) {
  const double na = rgb_norm(a);
  const double nb = rgb_norm(b);
  if (na == 0.0 || nb == 0.0) return std::numeric_limits<double>::quiet_NaN();
  // atan2 of |a x b| and a . b: same angle as the clamped arccos of the
  // normalized dot product, but without its loss of precision near 0.
  const double cx = a[1] * b[2] - a[2] * b[1];
  const double cy = a[2] * b[0] - a[0] * b[2];
  const double cz = a[0] * b[1] - a[1] * b[0];
  const double dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
  return std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), dot) * 180.0 /
         std::numbers::pi;
}

double angular_error(const Illuminant& a, const Illuminant& b) {
  return angular_error(a.rgb(), b.rgb());
}

std::size_t ErrorMap::valid_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(valid.begin(), valid.end(), [](auto v) { return v != 0; }));
}

ErrorMap error_map(const Image& predicted_white, const Image& gt_white) {
  if (!predicted_white.same_size(gt_white)) {
    throw Error(ErrorCode::InputDomain,
                "error_map: prediction is " +
                    std::to_string(predicted_white.width()) + "x" +
                    std::to_string(predicted_white.height()) +
                    ", ground truth is " + std::to_string(gt_white.width()) +
                    "x" + std::to_string(gt_white.height()));
  }
  ErrorMap map;
  map.width = gt_white.width();
  map.height = gt_white.height();
  map.degrees.assign(gt_white.pixel_count(), 0.0);
  map.valid.assign(gt_white.pixel_count(), 0);

  const double eps_pred = kSupportEpsilon * predicted_white.max_value();
  const double eps_gt = kSupportEpsilon * gt_white.max_value();
  for (std::size_t i = 0; i < gt_white.pixel_count(); ++i) {
    if (!predicted_white.in_mask(i) || !gt_white.in_mask(i)) continue;
    const Rgb p = predicted_white.pixel(i);
    const Rgb g = gt_white.pixel(i);
    const double np = rgb_norm(p);
    const double ng = rgb_norm(g);
    if (!(np >= eps_pred && ng >= eps_gt) || np == 0.0 || ng == 0.0) continue;
    map.degrees[i] = angular_error(p, g);
    map.valid[i] = 1;
  }
  return map;
}

}  // namespace ccbench
