#include <cmath>
#include <random>
#include <vector>

#include "ccbench/color.hpp"
#include "ccbench/error.hpp"
#include "doctest.h"
#include "oracles.hpp"
#include "support.hpp"

using namespace ccbench;
using testing::error_code_of;

TEST_SUITE("srgb") {
  TEST_CASE("fixed points") {
    CHECK(srgb_decode(0.0) == 0.0);
    CHECK(srgb_decode(1.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(srgb_encode(0.0) == 0.0);
    CHECK(srgb_encode(1.0) == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("mid grey decode and its inverse") {
    CHECK(std::abs(srgb_decode(0.5) - oracle::srgb_to_linear(0.5)) < 1e-12);
    CHECK(std::abs(srgb_decode(0.5) - 0.2140) < 1e-4);
    CHECK(std::abs(srgb_encode(0.2140) - 0.5) < 1e-3);
  }

  TEST_CASE("matches the piecewise curve across the range") {
    for (int i = 0; i <= 1000; ++i) {
      const double x = i / 1000.0;
      CHECK(std::abs(srgb_decode(x) - oracle::srgb_to_linear(x)) < 1e-12);
      CHECK(std::abs(srgb_encode(x) - oracle::linear_to_srgb(x)) < 1e-12);
    }
  }

  TEST_CASE("monotone, range-preserving, round-trips") {
    double prev_d = -1, prev_e = -1;
    for (int i = 0; i <= 10000; ++i) {
      const double x = i / 10000.0;
      const double d = srgb_decode(x);
      const double e = srgb_encode(x);
      CHECK(d >= prev_d);
      CHECK(e >= prev_e);
      CHECK(d >= 0.0);
      CHECK(d <= 1.0 + 1e-12);
      CHECK(std::abs(srgb_encode(d) - x) < 1e-6);
      CHECK(std::abs(srgb_decode(e) - x) < 1e-6);
      prev_d = d;
      prev_e = e;
    }
  }

  TEST_CASE("out-of-range values are rejected") {
    CHECK(error_code_of([] { srgb_decode(1.5); }) == ErrorCode::InputDomain);
    CHECK(error_code_of([] { srgb_encode(-0.1); }) == ErrorCode::InputDomain);
    CHECK(error_code_of([] { srgb_decode(std::nan("")); }) ==
          ErrorCode::InputDomain);

    Image img = testing::constant_image(2, 2, {0.2, 0.3, 1.2});
    img.set_space(ColorSpace::Srgb);
    CHECK(error_code_of([&] { srgb_decode(img); }) == ErrorCode::InputDomain);
  }

  TEST_CASE("image conversion checks and flips the tag") {
    Image lin = testing::constant_image(3, 2, {0.1, 0.2, 0.3});
    CHECK(error_code_of([&] { srgb_decode(lin); }) == ErrorCode::InputDomain);
    const Image enc = srgb_encode(lin);
    CHECK(enc.space() == ColorSpace::Srgb);
    CHECK(error_code_of([&] { srgb_encode(enc); }) == ErrorCode::InputDomain);
    const Image back = srgb_decode(enc);
    CHECK(back.space() == ColorSpace::Linear);
    for (std::size_t i = 0; i < back.data().size(); ++i)
      CHECK(std::abs(back.data()[i] - lin.data()[i]) < 1e-12);
  }

  TEST_CASE("masked-out pixels are left alone") {
    Image img = testing::constant_image(2, 1, {0.5, 0.5, 0.5});
    img.set_space(ColorSpace::Srgb);
    img.at(1, 0, 0) = 7.0;  // out of range but masked out
    img.set_mask({1, 0});
    const Image out = srgb_decode(img);
    CHECK(out.at(1, 0, 0) == 7.0);
    CHECK(std::abs(out.at(0, 0, 0) - oracle::srgb_to_linear(0.5)) < 1e-12);
  }

  TEST_CASE("clip_unit clamps into the unit cube") {
    const Image img(1, 2, {-0.5, 0.5, 1.5, 2.0, 0.0, 1.0});
    const Image c = clip_unit(img);
    const std::vector<double> expect{0.0, 0.5, 1.0, 1.0, 0.0, 1.0};
    for (std::size_t i = 0; i < expect.size(); ++i) CHECK(c.data()[i] == expect[i]);
  }
}

TEST_SUITE("von kries") {
  TEST_CASE("identity gains leave the image unchanged") {
    std::mt19937_64 gen(1);
    const Image w = testing::random_image(gen, 5, 4);
    CHECK(apply_illuminant(w, Illuminant(1, 1, 1)) == w);
    CHECK(correct_von_kries(w, Illuminant(1, 1, 1)) == w);
  }

  TEST_CASE("componentwise product and quotient") {
    const Image grey = testing::constant_image(1, 1, {0.5, 0.5, 0.5});
    const Image lit = apply_illuminant(grey, Illuminant(2, 1, 1));
    CHECK(lit.pixel(0) == Rgb{1.0, 0.5, 0.5});
    const Image back = correct_von_kries(lit, Illuminant(2, 1, 1));
    CHECK(back.pixel(0) == Rgb{0.5, 0.5, 0.5});
  }

  TEST_CASE("inverse pair on random images and gains") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> gain(0.05, 4.0);
    for (int t = 0; t < 50; ++t) {
      const Image img = testing::random_image(gen, 8, 6);
      const Illuminant e(gain(gen), gain(gen), gain(gen));
      const Image a = apply_illuminant(correct_von_kries(img, e), e);
      const Image b = correct_von_kries(apply_illuminant(img, e), e);
      for (std::size_t i = 0; i < img.data().size(); ++i) {
        CHECK(std::abs(a.data()[i] - img.data()[i]) < 1e-6);
        CHECK(std::abs(b.data()[i] - img.data()[i]) < 1e-6);
      }
    }
  }

  TEST_CASE("correcting by e then by 1/e recovers the per-channel scaling") {
    std::mt19937_64 gen(8);
    const Image img = testing::random_image(gen, 4, 4);
    const Illuminant e(0.3, 0.9, 2.0);
    const Illuminant inv(1 / 0.3, 1 / 0.9, 1 / 2.0);
    const Image out = correct_von_kries(correct_von_kries(img, e), inv);
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
      for (std::size_t c = 0; c < 3; ++c) {
        const double expect = (img.data()[i * 3 + c] / e[c]) / inv[c];
        CHECK(out.data()[i * 3 + c] == doctest::Approx(expect).epsilon(1e-14));
      }
    }
  }

  TEST_CASE("non-positive gains cannot form an illuminant") {
    CHECK(error_code_of([] { Illuminant(0, 1, 1); }) ==
          ErrorCode::DegenerateIlluminant);
    CHECK(error_code_of([] { Illuminant(1, -1, 1); }) ==
          ErrorCode::DegenerateIlluminant);
    CHECK(error_code_of([] { Illuminant(1, 1, std::nan("")); }) ==
          ErrorCode::DegenerateIlluminant);
  }

  TEST_CASE("sRGB-tagged input is refused") {
    Image img = testing::constant_image(1, 1, {0.5, 0.5, 0.5});
    img.set_space(ColorSpace::Srgb);
    CHECK(error_code_of([&] { apply_illuminant(img, Illuminant(1, 1, 1)); }) ==
          ErrorCode::InputDomain);
    CHECK(error_code_of([&] { correct_von_kries(img, Illuminant(1, 1, 1)); }) ==
          ErrorCode::InputDomain);
  }
}

TEST_SUITE("angular error") {
  TEST_CASE("scale invariance") {
    CHECK(angular_error(Illuminant(1, 1, 1), Illuminant(2, 2, 2)) ==
          doctest::Approx(0.0));
  }

  TEST_CASE("near-orthogonal primaries") {
    const double a[3] = {1, 0.001, 0.001}, b[3] = {0.001, 1, 0.001};
    const double got = angular_error(Illuminant(1, 0.001, 0.001),
                                     Illuminant(0.001, 1, 0.001));
    CHECK(std::abs(got - oracle::angle_deg(a, b)) < 1e-9);
    CHECK(std::abs(got - 89.9) < 0.1);
  }

  TEST_CASE("forty-five degrees") {
    const double a[3] = {1, 1, 0.001}, b[3] = {1, 0.001, 0.001};
    const double got = angular_error(Illuminant(1, 1, 0.001),
                                     Illuminant(1, 0.001, 0.001));
    CHECK(std::abs(got - oracle::angle_deg(a, b)) < 1e-9);
    CHECK(std::abs(got - 45.0) < 0.1);
  }

  TEST_CASE("symmetric, non-negative, scale invariant") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(0.01, 1.0);
    std::uniform_real_distribution<double> k(0.1, 10.0);
    for (int t = 0; t < 200; ++t) {
      const Illuminant a(u(gen), u(gen), u(gen));
      const Illuminant b(u(gen), u(gen), u(gen));
      const double s = k(gen);
      const double ab = angular_error(a, b);
      CHECK(ab >= 0.0);
      CHECK(ab == angular_error(b, a));
      const Illuminant as(a.r() * s, a.g() * s, a.b() * s);
      CHECK(std::abs(angular_error(as, b) - ab) < 1e-6);
      CHECK(angular_error(a, as) < 1e-5);
    }
  }

  TEST_CASE("parallel vectors give exactly zero after clamping") {
    const Rgb a{0.1, 0.2, 0.3};
    CHECK(angular_error(a, a) == 0.0);
  }

  TEST_CASE("zero vector is undefined") {
    CHECK(std::isnan(angular_error(Rgb{0, 0, 0}, Rgb{1, 1, 1})));
  }
}

TEST_SUITE("recover illuminant") {
  TEST_CASE("identity prediction") {
    std::mt19937_64 gen(11);
    const Image img = testing::random_image(gen, 16, 16, 0.05, 1.0);
    const Illuminant e = recover_illuminant(img, img);
    CHECK(angular_error(e, Illuminant(1, 1, 1)) < 0.01);
  }

  TEST_CASE("exact diagonal relation, both aggregators") {
    std::mt19937_64 gen(12);
    const Image w = testing::random_image(gen, 16, 16, 0.05, 1.0);
    const Image input = apply_illuminant(w, Illuminant(2, 1, 1));
    for (auto agg : {Aggregator::Median, Aggregator::Mean}) {
      const Illuminant e = recover_illuminant(input, w, agg);
      CHECK(angular_error(e, Illuminant(2, 1, 1)) < 1e-6);
      CHECK(std::hypot(e.r(), e.g(), e.b()) == doctest::Approx(1.0));
    }
  }

  TEST_CASE("median ignores ten percent of x10 outliers") {
    std::mt19937_64 gen(13);
    const Image w = testing::random_image(gen, 40, 40, 0.05, 1.0);
    const Image input = apply_illuminant(w, Illuminant(2, 1, 1));
    Image pred = w;
    std::vector<std::size_t> idx(w.pixel_count());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), gen);
    for (std::size_t j = 0; j < idx.size() / 10; ++j)
      for (std::size_t c = 0; c < 3; ++c) pred.data()[idx[j] * 3 + c] *= 10.0;

    // Brute-force median of the per-pixel ratios.
    double oracle_gain[3];
    for (std::size_t c = 0; c < 3; ++c) {
      std::vector<double> r;
      for (std::size_t i = 0; i < w.pixel_count(); ++i)
        r.push_back(input.data()[i * 3 + c] / pred.data()[i * 3 + c]);
      oracle_gain[c] = oracle::median_by_sorting(r);
    }

    const Illuminant e = recover_illuminant(input, pred, Aggregator::Median);
    const Illuminant o(oracle_gain[0], oracle_gain[1], oracle_gain[2]);
    CHECK(angular_error(e, o) < 1e-9);
    CHECK(angular_error(e, Illuminant(2, 1, 1)) < 0.5);

    // The mean is dragged off by the same outliers.
    const Illuminant m = recover_illuminant(input, pred, Aggregator::Mean);
    CHECK(std::abs(m.r() - e.r()) + std::abs(m.g() - e.g()) > 0.0);
  }

  TEST_CASE("any noiseless scene with more than one pixel") {
    std::mt19937_64 gen(14);
    std::uniform_real_distribution<double> g(0.1, 3.0);
    for (int t = 0; t < 30; ++t) {
      const Image w = testing::random_image(gen, 2, 1, 0.01, 1.0);
      const Illuminant e(g(gen), g(gen), g(gen));
      CHECK(angular_error(recover_illuminant(apply_illuminant(w, e), w), e) < 0.1);
    }
  }

  TEST_CASE("insufficient support") {
    Image pred(10, 10);  // all zero
    pred.set_pixel(0, {1, 1, 1});
    pred.set_pixel(1, {1, 1, 1});
    Image input = testing::constant_image(10, 10, {0.5, 0.5, 0.5});
    // 2 of 100 survive: enough (>= 1%).
    CHECK_NOTHROW(recover_illuminant(input, pred));

    Image big(200, 100);
    big.set_pixel(0, {1, 1, 1});
    Image in2 = testing::constant_image(200, 100, {0.5, 0.5, 0.5});
    CHECK(error_code_of([&] { recover_illuminant(in2, big); }) ==
          ErrorCode::InsufficientSupport);

    Image zero(4, 4);
    CHECK(error_code_of([&] { recover_illuminant(zero, zero); }) ==
          ErrorCode::InsufficientSupport);
  }

  TEST_CASE("size mismatch and colour space are checked") {
    const Image a(3, 3), b(3, 4);
    CHECK(error_code_of([&] { recover_illuminant(a, b); }) ==
          ErrorCode::InputDomain);
    Image s = testing::constant_image(3, 3, {0.5, 0.5, 0.5});
    s.set_space(ColorSpace::Srgb);
    CHECK(error_code_of([&] { recover_illuminant(s, s); }) ==
          ErrorCode::InputDomain);
  }

  TEST_CASE("masked-out pixels are never read") {
    std::mt19937_64 gen(15);
    const Image w = testing::random_image(gen, 12, 12, 0.05, 1.0);
    Image input = apply_illuminant(w, Illuminant(0.8, 1.0, 0.6));
    Image pred = w;
    std::vector<std::uint8_t> mask(w.pixel_count(), 1);
    for (std::size_t i = 0; i < mask.size(); i += 3) {
      mask[i] = 0;
      input.set_pixel(i, {std::nan(""), -5, 1e9});
      pred.set_pixel(i, {0, std::nan(""), -1});
    }
    input.set_mask(mask);
    const Illuminant e = recover_illuminant(input, pred);
    CHECK(angular_error(e, Illuminant(0.8, 1.0, 0.6)) < 1e-6);
  }
}

TEST_SUITE("error map") {
  TEST_CASE("identical images give an all-zero map") {
    std::mt19937_64 gen(21);
    const Image img = testing::random_image(gen, 9, 7, 0.05, 1.0);
    const ErrorMap m = error_map(img, img);
    CHECK(m.valid_count() == img.pixel_count());
    for (double d : m.degrees) CHECK(d == 0.0);
  }

  TEST_CASE("one channel doubled gives a constant positive map") {
    const Image gt = testing::constant_image(10, 10, {0.4, 0.4, 0.4});
    const ErrorMap m = error_map(apply_illuminant(gt, Illuminant(2, 1, 1)), gt);
    double mean = 0, var = 0;
    for (double d : m.degrees) mean += d;
    mean /= static_cast<double>(m.degrees.size());
    for (double d : m.degrees) var += (d - mean) * (d - mean);
    var /= static_cast<double>(m.degrees.size());
    CHECK(m.valid_count() == 100);
    CHECK(mean > 0.0);
    CHECK(var < 1e-8);
  }

  TEST_CASE("uniformly miscorrected image is constant over the mask") {
    std::mt19937_64 gen(23);
    const Image w = testing::random_image(gen, 16, 16, 0.05, 1.0);
    Image pred = w;
    for (std::size_t i = 0; i < pred.pixel_count(); ++i) {
      const double s = w.data()[i * 3] + w.data()[i * 3 + 1] + w.data()[i * 3 + 2];
      pred.set_pixel(i, {s * 0.5, s * 0.3, s * 0.2});
    }
    Image gt = pred;
    for (std::size_t i = 0; i < gt.pixel_count(); ++i) {
      const Rgb p = pred.pixel(i);
      gt.set_pixel(i, {p[0] / 0.5, p[1] / 0.3, p[2] / 0.2});
    }
    std::vector<std::uint8_t> mask(w.pixel_count(), 1);
    mask[0] = mask[5] = 0;
    gt.set_mask(mask);
    const ErrorMap m = error_map(pred, gt);
    CHECK(m.valid_count() == w.pixel_count() - 2);
    CHECK(m.valid[0] == 0);
    double mean = 0;
    for (std::size_t i = 0; i < m.degrees.size(); ++i)
      if (m.valid[i]) mean += m.degrees[i];
    mean /= static_cast<double>(m.valid_count());
    double var = 0;
    for (std::size_t i = 0; i < m.degrees.size(); ++i)
      if (m.valid[i]) var += (m.degrees[i] - mean) * (m.degrees[i] - mean);
    var /= static_cast<double>(m.valid_count());
    CHECK(mean > 1.0);
    CHECK(var < 1e-8);
  }

  TEST_CASE("random pair matches a naive per-pixel loop") {
    std::mt19937_64 gen(24);
    const Image a = testing::random_image(gen, 13, 11, 0.01, 1.0);
    const Image b = testing::random_image(gen, 13, 11, 0.01, 1.0);
    const ErrorMap m = error_map(a, b);
    for (std::size_t y = 0; y < 11; ++y) {
      for (std::size_t x = 0; x < 13; ++x) {
        const double pa[3] = {a.at(x, y, 0), a.at(x, y, 1), a.at(x, y, 2)};
        const double pb[3] = {b.at(x, y, 0), b.at(x, y, 1), b.at(x, y, 2)};
        CHECK(std::abs(m.degrees[y * 13 + x] - oracle::angle_deg(pa, pb)) < 1e-9);
      }
    }
  }

  TEST_CASE("black pixels are invalid") {
    Image a = testing::constant_image(2, 1, {0.5, 0.5, 0.5});
    a.set_pixel(1, {0, 0, 0});
    const ErrorMap m = error_map(a, a);
    CHECK(m.valid[0] == 1);
    CHECK(m.valid[1] == 0);
  }

  TEST_CASE("dimension mismatch") {
    CHECK(error_code_of([] { error_map(Image(2, 2), Image(2, 3)); }) ==
          ErrorCode::InputDomain);
  }
}
