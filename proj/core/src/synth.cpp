#include "ccbench/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ccbench/color.hpp"
#include "ccbench/error.hpp"
#include "ccbench/rng.hpp"

namespace ccbench {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kAlbedoMin = 0.05;
constexpr double kAlbedoMax = 0.95;
constexpr double kRandomIlluminantMin = 0.35;

[[noreturn]] void config_fail(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::Config, "field '" + field + "': " + what);
}

constexpr double kEdgeBaseMin = 0.05;
constexpr double kEdgeBaseMax = 0.3;
constexpr double kEdgeGreyMax = 0.6;

struct AlbedoSource {
  AlbedoDistribution dist;
  Rgb base{};

  AlbedoSource(AlbedoDistribution d, Rng& rng) : dist(d) {
    if (dist == AlbedoDistribution::AchromaticEdges)
      base = {rng.uniform(kEdgeBaseMin, kEdgeBaseMax), rng.uniform(kEdgeBaseMin, kEdgeBaseMax),
              rng.uniform(kEdgeBaseMin, kEdgeBaseMax)};
  }

  Rgb draw(Rng& rng) const {
    if (dist == AlbedoDistribution::AchromaticEdges) {
      const double g = rng.uniform(0.0, kEdgeGreyMax);
      return {base[0] + g, base[1] + g, base[2] + g};
    }
    return {rng.uniform(kAlbedoMin, kAlbedoMax), rng.uniform(kAlbedoMin, kAlbedoMax),
            rng.uniform(kAlbedoMin, kAlbedoMax)};
  }
};

struct Rect {
  std::size_t x0, y0, x1, y1;  // half-open
};

Rect draw_rect(Rng& rng, std::size_t w, std::size_t h, double lo, double hi) {
  const auto rw = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::lround(rng.uniform(lo, hi) * static_cast<double>(w))),
      1, w);
  const auto rh = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::lround(rng.uniform(lo, hi) * static_cast<double>(h))),
      1, h);
  const auto x0 = static_cast<std::size_t>(rng.index(w - rw + 1));
  const auto y0 = static_cast<std::size_t>(rng.index(h - rh + 1));
  return {x0, y0, x0 + rw, y0 + rh};
}

double number_field(const json& doc, const char* key) {
  const json& v = doc.at(key);
  if (!v.is_number()) config_fail(key, "must be a number");
  return v.get<double>();
}

std::int64_t integer_field(const json& doc, const char* key) {
  const json& v = doc.at(key);
  if (!v.is_number_integer()) config_fail(key, "must be an integer");
  return v.get<std::int64_t>();
}

bool bool_field(const json& doc, const char* key) {
  const json& v = doc.at(key);
  if (!v.is_boolean()) config_fail(key, "must be true or false");
  return v.get<bool>();
}

}  // namespace

void SynthConfig::validate() const {
  if (width < 1) config_fail("width", "must be >= 1");
  if (height < 1) config_fail("height", "must be >= 1");
  if (patch_count < 1) config_fail("patch_count", "must be >= 1");
  if (illuminants.empty() || illuminants.size() > 2)
    config_fail("illuminants", "must hold 1 or 2 illuminants");
  if (blend.has_value() != (illuminants.size() == 2))
    config_fail("blend", "must be present exactly when two illuminants are given");
  if (blend && !(blend->softness >= 0.0 && std::isfinite(blend->softness)))
    config_fail("blend.softness", "must be finite and >= 0");
  if (!(noise_sigma >= 0.0 && noise_sigma < 0.1))
    config_fail("noise_sigma", "must lie in [0, 0.1)");
  if (name.empty()) config_fail("name", "must not be empty");
}

SynthConfig parse_synth_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // Translate the byte offset into a line for the diagnostic.
    std::size_t line = 1;
    for (std::size_t i = 0; i < std::min(e.byte, text.size() + 1) && i < text.size(); ++i)
      if (text[i] == '\n') ++line;
    throw Error(ErrorCode::Config,
                "config syntax error at line " + std::to_string(line) + ": " + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::Config, "config must be a JSON object");

  static const std::set<std::string> known = {
      "name",          "width",       "height", "patch_count",
      "albedo_distribution", "illuminants", "blend", "noise_sigma",
      "seed",          "include_white_patch", "random_illuminants"};
  for (const auto& [key, value] : doc.items())
    if (!known.count(key)) config_fail(key, "unknown field");

  SynthConfig cfg;
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) config_fail("name", "must be a string");
    cfg.name = doc["name"].get<std::string>();
  }
  if (doc.contains("width")) {
    const auto v = integer_field(doc, "width");
    if (v < 1) config_fail("width", "must be >= 1");
    cfg.width = static_cast<std::size_t>(v);
  }
  if (doc.contains("height")) {
    const auto v = integer_field(doc, "height");
    if (v < 1) config_fail("height", "must be >= 1");
    cfg.height = static_cast<std::size_t>(v);
  }
  if (doc.contains("patch_count"))
    cfg.patch_count = static_cast<int>(integer_field(doc, "patch_count"));
  if (doc.contains("albedo_distribution")) {
    const json& v = doc["albedo_distribution"];
    const std::string s = v.is_string() ? v.get<std::string>() : "";
    if (s == "uniform_rgb" || s == "UNIFORM_RGB")
      cfg.albedo_distribution = AlbedoDistribution::UniformRgb;
    else if (s == "achromatic_mean" || s == "ACHROMATIC_MEAN")
      cfg.albedo_distribution = AlbedoDistribution::AchromaticMean;
    else if (s == "achromatic_edges" || s == "ACHROMATIC_EDGES")
      cfg.albedo_distribution = AlbedoDistribution::AchromaticEdges;
    else
      config_fail("albedo_distribution",
                  "must be uniform_rgb, achromatic_mean or achromatic_edges");
  }
  if (!doc.contains("illuminants")) config_fail("illuminants", "missing");
  {
    const json& list = doc["illuminants"];
    if (!list.is_array()) config_fail("illuminants", "must be an array of [r, g, b]");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const json& t = list[i];
      const std::string f = "illuminants[" + std::to_string(i) + "]";
      if (!t.is_array() || t.size() != 3 ||
          !std::all_of(t.begin(), t.end(), [](const json& x) { return x.is_number(); }))
        config_fail(f, "must be [r, g, b]");
      try {
        cfg.illuminants.emplace_back(t[0].get<double>(), t[1].get<double>(),
                                     t[2].get<double>());
      } catch (const Error& e) {
        config_fail(f, e.what());
      }
    }
  }
  if (doc.contains("blend") && !doc["blend"].is_null()) {
    const json& b = doc["blend"];
    if (!b.is_object()) config_fail("blend", "must be an object");
    Blend blend;
    if (b.contains("axis")) {
      const std::string a = b["axis"].is_string() ? b["axis"].get<std::string>() : "";
      if (a == "x" || a == "X")
        blend.axis = BlendAxis::X;
      else if (a == "y" || a == "Y")
        blend.axis = BlendAxis::Y;
      else
        config_fail("blend.axis", "must be x or y");
    }
    if (b.contains("softness")) {
      if (!b["softness"].is_number()) config_fail("blend.softness", "must be a number");
      blend.softness = b["softness"].get<double>();
    }
    cfg.blend = blend;
  }
  if (doc.contains("noise_sigma")) cfg.noise_sigma = number_field(doc, "noise_sigma");
  if (doc.contains("seed")) {
    const auto v = integer_field(doc, "seed");
    if (v < 0) config_fail("seed", "must be >= 0");
    cfg.seed = static_cast<std::uint64_t>(v);
  }
  if (doc.contains("include_white_patch"))
    cfg.include_white_patch = bool_field(doc, "include_white_patch");
  if (doc.contains("random_illuminants"))
    cfg.random_illuminants = bool_field(doc, "random_illuminants");
  cfg.validate();
  return cfg;
}

SynthConfig load_synth_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, path.string() + ": cannot open");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_synth_config(ss.str());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

Image generate_scene(const SynthConfig& cfg) {
  cfg.validate();
  const std::size_t w = cfg.width, h = cfg.height;
  Rng rng(cfg.seed);
  Image img(w, h);

  const AlbedoSource albedos(cfg.albedo_distribution, rng);
  const Rgb background = albedos.draw(rng);
  for (std::size_t i = 0; i < img.pixel_count(); ++i) img.set_pixel(i, background);

  for (int k = 1; k < cfg.patch_count; ++k) {
    const Rect r = draw_rect(rng, w, h, 0.1, 0.5);
    const Rgb albedo = albedos.draw(rng);
    for (std::size_t y = r.y0; y < r.y1; ++y)
      for (std::size_t x = r.x0; x < r.x1; ++x) img.set_pixel(y * w + x, albedo);
  }

  std::vector<std::uint8_t> white(img.pixel_count(), 0);
  if (cfg.include_white_patch) {
    const Rect r = draw_rect(rng, w, h, 0.15, 0.3);
    for (std::size_t y = r.y0; y < r.y1; ++y)
      for (std::size_t x = r.x0; x < r.x1; ++x) {
        img.set_pixel(y * w + x, {1.0, 1.0, 1.0});
        white[y * w + x] = 1;
      }
  }

  if (cfg.albedo_distribution == AlbedoDistribution::AchromaticMean) {
    Rgb sums{0.0, 0.0, 0.0};
    const auto d = img.data();
    for (std::size_t i = 0; i < img.pixel_count(); ++i)
      if (!white[i])
        for (std::size_t c = 0; c < 3; ++c) sums[c] += d[i * 3 + c];
    const double target = std::min({sums[0], sums[1], sums[2]});
    if (target > 0.0) {
      const Rgb gain{target / sums[0], target / sums[1], target / sums[2]};
      auto md = img.data();
      for (std::size_t i = 0; i < img.pixel_count(); ++i)
        if (!white[i])
          for (std::size_t c = 0; c < 3; ++c) md[i * 3 + c] *= gain[c];
    }
  }
  return img;
}

std::vector<Rgb> illuminant_field(const SynthConfig& cfg) {
  cfg.validate();
  const std::size_t w = cfg.width, h = cfg.height;
  std::vector<Rgb> field(w * h, cfg.illuminants.front().rgb());
  if (cfg.illuminants.size() == 1) return field;

  const Rgb& e1 = cfg.illuminants[0].rgb();
  const Rgb& e2 = cfg.illuminants[1].rgb();
  const bool along_x = cfg.blend->axis == BlendAxis::X;
  const double centre = 0.5 * static_cast<double>(along_x ? w : h);
  const double soft = cfg.blend->softness;
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const double u = static_cast<double>(along_x ? x : y) + 0.5 - centre;
      const double t = soft > 0.0 ? 1.0 / (1.0 + std::exp(-u / soft))
                                  : (u < 0.0 ? 0.0 : 1.0);
      Rgb& e = field[y * w + x];
      for (std::size_t c = 0; c < 3; ++c) e[c] = (1.0 - t) * e1[c] + t * e2[c];
    }
  }
  return field;
}

SynthSample render(const Image& canonical, const SynthConfig& cfg) {
  cfg.validate();
  if (canonical.width() != cfg.width || canonical.height() != cfg.height)
    throw Error(ErrorCode::InputDomain, "render: canonical size does not match config");

  const bool multi = cfg.illuminants.size() == 2;
  std::vector<Rgb> field = illuminant_field(cfg);

  Image observed = canonical;
  auto d = observed.data();
  Rgb mean{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < observed.pixel_count(); ++i) {
    for (std::size_t c = 0; c < 3; ++c) {
      d[i * 3 + c] *= field[i][c];
      mean[c] += field[i][c];
    }
  }
  for (double& m : mean) m /= static_cast<double>(observed.pixel_count());

  if (cfg.noise_sigma > 0.0) {
    Rng rng(derive_seed(cfg.seed, "render-noise"));
    for (double& v : d) v = std::max(0.0, v + cfg.noise_sigma * rng.normal());
  }

  SynthSample sample{canonical, std::move(observed),
                     multi ? Illuminant(mean) : cfg.illuminants.front(), {}, multi};
  if (multi) sample.illuminant_field = std::move(field);
  return sample;
}

Manifest emit_dataset(const SynthConfig& cfg, std::size_t count, const fs::path& out_dir) {
  cfg.validate();
  if (count == 0) throw Error(ErrorCode::Config, "sample count must be >= 1");
  std::error_code ec;
  for (const char* sub : {"images", "canonical", "masks"}) {
    fs::create_directories(out_dir / sub, ec);
    if (ec)
      throw Error(ErrorCode::Io,
                  (out_dir / sub).string() + ": cannot create directory: " + ec.message());
  }

  Manifest manifest;
  manifest.name = cfg.name;
  const std::vector<std::uint8_t> all_in(cfg.width * cfg.height, 1);
  for (std::size_t k = 0; k < count; ++k) {
    char id_buf[32];
    std::snprintf(id_buf, sizeof id_buf, "_%04zu", k);
    const std::string id = cfg.name + id_buf;

    SynthConfig sample_cfg = cfg;
    sample_cfg.seed = derive_seed(cfg.seed, id);
    if (cfg.random_illuminants) {
      Rng rng(derive_seed(sample_cfg.seed, "illuminant"));
      for (auto& e : sample_cfg.illuminants)
        e = Illuminant(rng.uniform(kRandomIlluminantMin, 1.0),
                       rng.uniform(kRandomIlluminantMin, 1.0),
                       rng.uniform(kRandomIlluminantMin, 1.0));
    }

    const Image canonical = generate_scene(sample_cfg);
    const SynthSample s = render(canonical, sample_cfg);

    const fs::path image = out_dir / "images" / (id + ".png");
    const fs::path canon = out_dir / "canonical" / (id + ".png");
    const fs::path mask = out_dir / "masks" / (id + ".png");
    save_linear16(s.observed, image);
    save_linear16(s.canonical, canon);
    save_mask(all_in, cfg.width, cfg.height, mask);

    SampleRecord rec{id, image, s.gt_illuminant};
    rec.mask_path = mask;
    rec.encoding = Encoding::Linear16;
    rec.canonical_path = canon;
    rec.multi_illuminant = s.multi_illuminant;
    manifest.samples.push_back(std::move(rec));
  }
  save_manifest(manifest, out_dir / "manifest.json");
  return manifest;
}

}  // namespace ccbench
