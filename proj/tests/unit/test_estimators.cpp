#include <cmath>
#include <random>
#include <vector>

#include "ccbench/color.hpp"
#include "ccbench/error.hpp"
#include "ccbench/estimators.hpp"
#include "ccbench/synth.hpp"
#include "doctest.h"
#include "oracles.hpp"
#include "support.hpp"

using namespace ccbench;
using testing::error_code_of;

namespace {

SynthConfig mondrian(std::uint64_t seed, AlbedoDistribution albedo,
                     bool white = false) {
  SynthConfig cfg;
  cfg.seed = seed;
  cfg.albedo_distribution = albedo;
  cfg.include_white_patch = white;
  cfg.illuminants = {Illuminant(0.9, 1.0, 0.55)};
  return cfg;
}

}  // namespace

TEST_SUITE("presets") {
  TEST_CASE("parameter table") {
    CHECK(preset_params(Preset::GreyWorld) == EstimatorParams{0, 1.0, 0.0});
    CHECK(preset_params(Preset::WhitePatch) ==
          EstimatorParams{0, EstimatorParams::kInfinity, 0.0});
    CHECK(preset_params(Preset::ShadesOfGrey) == EstimatorParams{0, 6.0, 0.0});
    CHECK(preset_params(Preset::GeneralGreyWorld) ==
          EstimatorParams{0, 13.0, 2.0});
    CHECK(preset_params(Preset::GreyEdge1) == EstimatorParams{1, 7.0, 4.0});
    CHECK(preset_params(Preset::GreyEdge2) == EstimatorParams{2, 7.0, 5.0});
  }

  TEST_CASE("names round-trip") {
    CHECK(all_presets().size() == 6);
    for (Preset p : all_presets()) CHECK(preset_from_string(to_string(p)) == p);
    CHECK(to_string(Preset::GreyEdge1) == "GREY_EDGE_1");
    CHECK_FALSE(preset_from_string("GREY_WROLD").has_value());
  }

  TEST_CASE("parameter validation") {
    CHECK_NOTHROW(EstimatorParams{2, 7.0, 5.0}.validate());
    CHECK(error_code_of([] { EstimatorParams{3, 1.0, 1.0}.validate(); }) ==
          ErrorCode::Config);
    CHECK(error_code_of([] { EstimatorParams{0, 0.5, 0.0}.validate(); }) ==
          ErrorCode::Config);
    CHECK(error_code_of([] { EstimatorParams{0, 1.0, -1.0}.validate(); }) ==
          ErrorCode::Config);
    CHECK(error_code_of([] { EstimatorParams{1, 1.0, 0.0}.validate(); }) ==
          ErrorCode::Config);
  }
}

TEST_SUITE("gaussian smoothing") {
  TEST_CASE("kernel shape") {
    const auto k = gaussian_kernel(2.0);
    CHECK(k.size() == 13);
    double sum = 0;
    for (double v : k) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
    for (std::size_t i = 0; i < k.size(); ++i) CHECK(k[i] == k[k.size() - 1 - i]);
    CHECK(gaussian_kernel(0.4).size() == 5);
  }

  TEST_CASE("sigma zero is the identity") {
    std::mt19937_64 gen(1);
    const Image img = testing::random_image(gen, 9, 9);
    CHECK(gaussian_smooth(img, 0.0) == img);
  }

  TEST_CASE("constant image stays constant") {
    const Image img = testing::constant_image(17, 11, {0.3, 0.6, 0.9});
    for (double sigma : {0.5, 1.0, 3.0, 7.5}) {
      const Image out = gaussian_smooth(img, sigma);
      for (std::size_t i = 0; i < out.pixel_count(); ++i) {
        const Rgb p = out.pixel(i);
        CHECK(std::abs(p[0] - 0.3) < 1e-6);
        CHECK(std::abs(p[1] - 0.6) < 1e-6);
        CHECK(std::abs(p[2] - 0.9) < 1e-6);
      }
    }
  }

  TEST_CASE("impulse response equals the discrete 2-D kernel") {
    const std::size_t n = 31, mid = 15;
    Image img(n, n);
    img.at(mid, mid, 1) = 1.0;
    const Image out = gaussian_smooth(img, 2.0);
    int radius = 0;
    const auto k2 = oracle::gaussian_2d(2.0, radius);
    const int side = 2 * radius + 1;
    for (std::size_t y = 0; y < n; ++y) {
      for (std::size_t x = 0; x < n; ++x) {
        const int dx = static_cast<int>(x) - static_cast<int>(mid);
        const int dy = static_cast<int>(y) - static_cast<int>(mid);
        double expect = 0.0;
        if (std::abs(dx) <= radius && std::abs(dy) <= radius)
          expect = k2[static_cast<std::size_t>((dy + radius) * side + dx + radius)];
        CHECK(std::abs(out.at(x, y, 1) - expect) < 1e-12);
        CHECK(out.at(x, y, 0) == 0.0);
      }
    }
  }

  TEST_CASE("borders reflect without losing mass") {
    Image img(8, 1);
    img.at(0, 0, 0) = 1.0;
    const Image out = gaussian_smooth(img, 1.0);
    double sum = 0;
    for (std::size_t x = 0; x < 8; ++x) sum += out.at(x, 0, 0);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("masked-out values never leak") {
    std::mt19937_64 gen(2);
    Image a = testing::random_image(gen, 20, 20, 0.1, 1.0);
    std::vector<std::uint8_t> mask(a.pixel_count(), 1);
    for (std::size_t y = 5; y < 12; ++y)
      for (std::size_t x = 3; x < 9; ++x) mask[y * 20 + x] = 0;
    a.set_mask(mask);
    Image b = a;
    for (std::size_t i = 0; i < mask.size(); ++i)
      if (!mask[i]) b.set_pixel(i, {std::nan(""), 1e30, -4});
    const Image sa = gaussian_smooth(a, 2.0);
    const Image sb = gaussian_smooth(b, 2.0);
    for (std::size_t i = 0; i < mask.size(); ++i) {
      if (!mask[i]) continue;
      for (std::size_t c = 0; c < 3; ++c) {
        CHECK(std::isfinite(sb.data()[i * 3 + c]));
        CHECK(sa.data()[i * 3 + c] == sb.data()[i * 3 + c]);
      }
    }
  }
}

TEST_SUITE("derivatives") {
  TEST_CASE("order requires positive sigma") {
    const Image img(4, 4);
    CHECK(error_code_of([&] { derivative_magnitude(img, 1, 0.0); }) ==
          ErrorCode::Config);
    CHECK(error_code_of([&] { derivative_magnitude(img, 3, 1.0); }) ==
          ErrorCode::Config);
  }

  TEST_CASE("first order of a linear ramp is its slope") {
    Image img(32, 32);
    for (std::size_t y = 0; y < 32; ++y)
      for (std::size_t x = 0; x < 32; ++x)
        for (std::size_t c = 0; c < 3; ++c)
          img.at(x, y, c) = 0.01 * static_cast<double>(x) + 0.02 * static_cast<double>(y);
    const Image d = derivative_magnitude(img, 1, 1.0);
    // Away from the reflected borders the smoothed ramp is still a ramp.
    CHECK(d.at(16, 16, 0) == doctest::Approx(std::hypot(0.01, 0.02)).epsilon(1e-9));
    const Image d2 = derivative_magnitude(img, 2, 1.0);
    CHECK(std::abs(d2.at(16, 16, 0)) < 1e-12);
  }

  TEST_CASE("second order of a quadratic") {
    Image img(40, 40);
    for (std::size_t y = 0; y < 40; ++y)
      for (std::size_t x = 0; x < 40; ++x)
        for (std::size_t c = 0; c < 3; ++c) {
          const double u = static_cast<double>(x), v = static_cast<double>(y);
          img.at(x, y, c) = 0.001 * u * u + 0.002 * u * v;
        }
    // fxx = 0.002, fyy = 0, fxy = 0.002. Gaussian smoothing adds only a
    // constant to a quadratic, which second differences cancel.
    const Image d = derivative_magnitude(img, 2, 1.0);
    const double expect = std::sqrt(0.002 * 0.002 + 2 * 0.002 * 0.002);
    CHECK(d.at(20, 20, 2) == doctest::Approx(expect).epsilon(1e-9));
  }
}

TEST_SUITE("estimate") {
  TEST_CASE("constant image under grey world") {
    const Image img = testing::constant_image(8, 8, {0.6, 0.4, 0.2});
    const Illuminant e = estimate_preset(img, Preset::GreyWorld);
    CHECK(angular_error(e, Illuminant(0.6, 0.4, 0.2)) < 1e-9);
  }

  TEST_CASE("p infinity is the exact channel max") {
    std::mt19937_64 gen(3);
    const Image img = testing::random_image(gen, 10, 10);
    double mx[3] = {0, 0, 0};
    for (std::size_t i = 0; i < img.pixel_count(); ++i)
      for (std::size_t c = 0; c < 3; ++c)
        mx[c] = std::max(mx[c], img.data()[i * 3 + c]);
    const Illuminant e = estimate_preset(img, Preset::WhitePatch);
    CHECK(angular_error(e, Illuminant(mx[0], mx[1], mx[2])) < 1e-9);
  }

  TEST_CASE("white patch recovers the light") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto cfg = mondrian(seed, AlbedoDistribution::UniformRgb, true);
      const SynthSample s = render(generate_scene(cfg), cfg);
      CHECK(angular_error(estimate_preset(s.observed, Preset::WhitePatch),
                          s.gt_illuminant) < 0.1);
    }
  }

  TEST_CASE("grey world on achromatic-mean scenes") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto cfg = mondrian(seed, AlbedoDistribution::AchromaticMean);
      const SynthSample s = render(generate_scene(cfg), cfg);
      CHECK(angular_error(estimate_preset(s.observed, Preset::GreyWorld),
                          s.gt_illuminant) < 0.1);
    }
  }

  TEST_CASE("high-p shades of grey approaches white patch on white-patch scenes") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto cfg = mondrian(seed, AlbedoDistribution::UniformRgb, true);
      const SynthSample s = render(generate_scene(cfg), cfg);
      const Illuminant wp = estimate_preset(s.observed, Preset::WhitePatch);
      const Illuminant sog = estimate(s.observed, {0, 64.0, 0.0});
      CHECK(angular_error(wp, sog) < 0.5);
    }
  }

  TEST_CASE("grey edge on a single-illuminant Mondrian") {
    auto cfg = mondrian(5, AlbedoDistribution::AchromaticEdges);
    cfg.noise_sigma = 0.01;
    const SynthSample s = render(generate_scene(cfg), cfg);
    CHECK(angular_error(estimate_preset(s.observed, Preset::GreyEdge1),
                        s.gt_illuminant) < 3.0);
    CHECK(angular_error(estimate_preset(s.observed, Preset::GreyEdge2),
                        s.gt_illuminant) < 3.0);
  }

  TEST_CASE("diagonal covariance") {
    std::mt19937_64 gen(4);
    const Rgb d{1.7, 0.6, 0.9};
    for (Preset p : all_presets()) {
      CAPTURE(to_string(p));
      const Image w = testing::random_image(gen, 24, 24, 0.05, 1.0);
      const Illuminant base = estimate_preset(w, p);
      const Illuminant lit = estimate_preset(apply_illuminant(w, Illuminant(d)), p);
      const Illuminant expect(base.r() * d[0], base.g() * d[1], base.b() * d[2]);
      const double tol = preset_params(p).order == 0 ? 1e-6 : 0.2;
      CHECK(angular_error(lit, expect) < tol);
    }
  }

  TEST_CASE("exposure invariance") {
    std::mt19937_64 gen(5);
    const Image w = testing::random_image(gen, 20, 20, 0.05, 1.0);
    Image bright = w;
    for (double& v : bright.data()) v *= 3.7;
    for (Preset p : all_presets()) {
      const Illuminant a = estimate_preset(w, p);
      const Illuminant b = estimate_preset(bright, p);
      CHECK(std::abs(a.r() - b.r()) < 1e-6);
      CHECK(std::abs(a.g() - b.g()) < 1e-6);
      CHECK(std::abs(a.b() - b.b()) < 1e-6);
    }
  }

  TEST_CASE("p-family converges monotonically to white patch") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto cfg = mondrian(seed, AlbedoDistribution::UniformRgb, true);
      const SynthSample s = render(generate_scene(cfg), cfg);
      const Illuminant wp = estimate_preset(s.observed, Preset::WhitePatch);
      double prev = 180.0;
      for (double p : {1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0}) {
        const double d = angular_error(estimate(s.observed, {0, p, 0.0}), wp);
        CHECK(d <= prev + 1e-12);
        prev = d;
      }
    }
  }

  TEST_CASE("masked-out pixels have no influence") {
    std::mt19937_64 gen(6);
    Image a = testing::random_image(gen, 24, 24, 0.05, 1.0);
    std::vector<std::uint8_t> mask(a.pixel_count(), 1);
    for (std::size_t i = 0; i < mask.size(); ++i)
      if ((i / 24) < 8 && (i % 24) < 10) mask[i] = 0;
    a.set_mask(mask);
    Image b = a;
    for (std::size_t i = 0; i < mask.size(); ++i)
      if (!mask[i]) b.set_pixel(i, {std::nan(""), 1e6, -1});
    for (Preset p : all_presets()) {
      CAPTURE(to_string(p));
      CHECK(estimate_preset(a, p) == estimate_preset(b, p));
    }
  }

  TEST_CASE("errors") {
    const Image black(6, 6);
    CHECK(error_code_of([&] { estimate_preset(black, Preset::GreyWorld); }) ==
          ErrorCode::DegenerateScene);
    const Image flat = testing::constant_image(6, 6, {0.5, 0.5, 0.5});
    CHECK(error_code_of([&] { estimate_preset(flat, Preset::GreyEdge1); }) ==
          ErrorCode::DegenerateScene);

    Image srgb = flat;
    srgb.set_space(ColorSpace::Srgb);
    CHECK(error_code_of([&] { estimate_preset(srgb, Preset::GreyWorld); }) ==
          ErrorCode::InputDomain);

    Image none = flat;
    none.set_mask(std::vector<std::uint8_t>(36, 0));
    CHECK(error_code_of([&] { estimate_preset(none, Preset::GreyWorld); }) ==
          ErrorCode::InputDomain);

    Image poisoned = flat;
    poisoned.at(2, 2, 1) = std::nan("");
    CHECK(error_code_of([&] { estimate_preset(poisoned, Preset::GreyWorld); }) ==
          ErrorCode::InputDomain);

    CHECK(error_code_of([&] { estimate(flat, {0, 0.0, 0.0}); }) ==
          ErrorCode::Config);
  }
}
