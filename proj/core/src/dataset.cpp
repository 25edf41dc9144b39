#include "ccbench/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ccbench/color.hpp"
#include "ccbench/error.hpp"
#include "ccbench/png_io.hpp"
#include "ccbench/rng.hpp"

namespace ccbench {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

[[noreturn]] void parse_fail(const fs::path& file, const std::string& what) {
  throw Error(ErrorCode::Parse, file.string() + ": " + what);
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, path.string() + ": cannot open");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    parse_fail(path, e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, path.string() + ": cannot open for writing");
  out << text;
  if (!out) throw Error(ErrorCode::Io, path.string() + ": write failed");
}

const json& field(const json& obj, const char* key, const std::string& ctx,
                  const fs::path& file) {
  auto it = obj.find(key);
  if (it == obj.end()) parse_fail(file, ctx + ": missing field '" + key + "'");
  return *it;
}

std::string string_field(const json& obj, const char* key, const std::string& ctx,
                         const fs::path& file) {
  const json& v = field(obj, key, ctx, file);
  if (!v.is_string())
    parse_fail(file, ctx + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

Rgb triple(const json& v, const std::string& ctx, const fs::path& file) {
  if (!v.is_array() || v.size() != 3 ||
      !std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_number(); }))
    parse_fail(file, ctx + ": expected an array of three numbers");
  return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

SceneTag scene_from_string(const std::string& s, const std::string& ctx,
                           const fs::path& file) {
  const auto l = lower(s);
  if (l == "indoor") return SceneTag::Indoor;
  if (l == "outdoor") return SceneTag::Outdoor;
  if (l == "unknown") return SceneTag::Unknown;
  parse_fail(file, ctx + ": unknown scene_tag '" + s + "'");
}

Encoding encoding_from_string(const std::string& s, const std::string& ctx,
                              const fs::path& file) {
  const auto l = lower(s);
  if (l == "srgb8") return Encoding::Srgb8;
  if (l == "linear16") return Encoding::Linear16;
  parse_fail(file, ctx + ": unknown encoding '" + s + "' (srgb8 or linear16)");
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

std::string relative_to(const fs::path& p, const fs::path& base) {
  const fs::path abs_p = fs::absolute(p).lexically_normal();
  const fs::path abs_base = fs::absolute(base.empty() ? fs::path(".") : base).lexically_normal();
  const auto rel = abs_p.lexically_relative(abs_base);
  return rel.empty() ? abs_p.generic_string() : rel.generic_string();
}

std::string join_ids(const std::vector<std::string>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ", ";
    out += ids[i];
  }
  return out;
}

Image raster_to_image(const PngRaster& r, const fs::path& path) {
  if (r.channels < 1 || r.channels > 4)
    throw Error(ErrorCode::Io, path.string() + ": unsupported channel count");
  const double scale = r.bit_depth == 16 ? 65535.0 : 255.0;
  Image img(r.width, r.height);
  auto d = img.data();
  const bool gray = r.channels <= 2;
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    for (int c = 0; c < 3; ++c)
      d[i * 3 + static_cast<std::size_t>(c)] =
          static_cast<double>(r.sample(i, gray ? 0 : c)) / scale;
  }
  return img;
}

}  // namespace

std::string_view to_string(SceneTag tag) {
  switch (tag) {
    case SceneTag::Indoor: return "indoor";
    case SceneTag::Outdoor: return "outdoor";
    case SceneTag::Unknown: return "unknown";
  }
  return "unknown";
}

std::string_view to_string(Encoding encoding) {
  return encoding == Encoding::Srgb8 ? "srgb8" : "linear16";
}

std::string_view to_string(PredictionKind kind) {
  return kind == PredictionKind::WhiteBalancedImage ? "white_balanced_image"
                                                    : "illuminant_triple";
}

const SampleRecord* Manifest::find(std::string_view id) const {
  for (const auto& s : samples)
    if (s.id == id) return &s;
  return nullptr;
}

Manifest load_manifest(const fs::path& path) {
  const json doc = read_json(path);
  if (!doc.is_object()) parse_fail(path, "top level must be an object");
  const json& version = field(doc, "version", "manifest", path);
  if (!version.is_number_integer() || version.get<int>() != Manifest::kVersion)
    parse_fail(path, "unsupported manifest version (expected " +
                         std::to_string(Manifest::kVersion) + ")");

  Manifest m;
  m.name = string_field(doc, "name", "manifest", path);
  const json& samples = field(doc, "samples", "manifest", path);
  if (!samples.is_array()) parse_fail(path, "'samples' must be an array");
  if (samples.empty())
    throw Error(ErrorCode::Invariant, path.string() + ": manifest has no samples");

  const fs::path base = path.parent_path();
  std::set<std::string> seen;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const json& s = samples[i];
    const std::string ctx = "samples[" + std::to_string(i) + "]";
    if (!s.is_object()) parse_fail(path, ctx + ": must be an object");
    const std::string id = string_field(s, "id", ctx, path);
    if (id.empty()) parse_fail(path, ctx + ": empty id");
    if (!seen.insert(id).second)
      throw Error(ErrorCode::DuplicateId,
                  path.string() + ": duplicate sample id '" + id + "'");

    const Rgb gt = triple(field(s, "gt_illuminant", ctx, path),
                          ctx + ".gt_illuminant", path);
    if (!std::all_of(gt.begin(), gt.end(),
                     [](double v) { return std::isfinite(v) && v > 0.0; })) {
      std::ostringstream os;
      os << path.string() << ": sample '" << id
         << "' has a non-positive ground-truth illuminant (" << gt[0] << ", "
         << gt[1] << ", " << gt[2] << ")";
      throw Error(ErrorCode::Invariant, os.str());
    }

    SampleRecord rec{id, resolve(base, string_field(s, "image_path", ctx, path)),
                     Illuminant(gt)};
    if (auto it = s.find("mask_path"); it != s.end() && !it->is_null()) {
      if (!it->is_string()) parse_fail(path, ctx + ": 'mask_path' must be a string");
      rec.mask_path = resolve(base, it->get<std::string>());
    }
    if (auto it = s.find("scene_tag"); it != s.end()) {
      if (!it->is_string()) parse_fail(path, ctx + ": 'scene_tag' must be a string");
      rec.scene_tag = scene_from_string(it->get<std::string>(), ctx, path);
    }
    rec.encoding =
        encoding_from_string(string_field(s, "encoding", ctx, path), ctx, path);
    if (auto it = s.find("metadata"); it != s.end() && it->is_object()) {
      if (auto c = it->find("canonical_path"); c != it->end() && c->is_string())
        rec.canonical_path = resolve(base, c->get<std::string>());
      if (auto mi = it->find("multi"); mi != it->end() && mi->is_boolean())
        rec.multi_illuminant = mi->get<bool>();
    }
    m.samples.push_back(std::move(rec));
  }

  std::vector<std::string> missing;
  for (const auto& rec : m.samples) {
    bool ok = fs::is_regular_file(rec.image_path);
    if (rec.mask_path) ok = ok && fs::is_regular_file(*rec.mask_path);
    if (rec.canonical_path) ok = ok && fs::is_regular_file(*rec.canonical_path);
    if (!ok) missing.push_back(rec.id);
  }
  if (!missing.empty())
    throw Error(ErrorCode::MissingFile,
                path.string() + ": missing files for samples: " + join_ids(missing));
  return m;
}

void save_manifest(const Manifest& manifest, const fs::path& path) {
  const fs::path base = path.parent_path();
  json samples = json::array();
  for (const auto& rec : manifest.samples) {
    json s = {
        {"id", rec.id},
        {"image_path", relative_to(rec.image_path, base)},
        {"gt_illuminant",
         {rec.gt_illuminant.r(), rec.gt_illuminant.g(), rec.gt_illuminant.b()}},
        {"mask_path",
         rec.mask_path ? json(relative_to(*rec.mask_path, base)) : json(nullptr)},
        {"scene_tag", std::string(to_string(rec.scene_tag))},
        {"encoding", std::string(to_string(rec.encoding))},
    };
    if (rec.canonical_path || rec.multi_illuminant) {
      json meta = json::object();
      if (rec.canonical_path)
        meta["canonical_path"] = relative_to(*rec.canonical_path, base);
      meta["multi"] = rec.multi_illuminant;
      s["metadata"] = meta;
    }
    samples.push_back(std::move(s));
  }
  const json doc = {{"version", Manifest::kVersion},
                    {"name", manifest.name},
                    {"samples", samples}};
  write_text(path, doc.dump(2) + "\n");
}

Split split_manifest(const Manifest& manifest, std::uint64_t seed, double ratio) {
  if (!(ratio > 0.0 && ratio < 1.0))
    throw Error(ErrorCode::Config,
                "split ratio must lie in (0, 1), got " + std::to_string(ratio));
  std::vector<std::string> ids;
  ids.reserve(manifest.samples.size());
  for (const auto& s : manifest.samples) ids.push_back(s.id);
  std::sort(ids.begin(), ids.end());

  Rng rng(seed);
  for (std::size_t i = ids.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.index(i));
    std::swap(ids[i - 1], ids[j]);
  }
  const auto n_train = static_cast<std::size_t>(
      std::floor(ratio * static_cast<double>(ids.size()) + 0.5));

  Split split;
  split.seed = seed;
  split.ratio = ratio;
  split.train_ids.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_train));
  split.test_ids.assign(ids.begin() + static_cast<std::ptrdiff_t>(n_train), ids.end());
  std::sort(split.train_ids.begin(), split.train_ids.end());
  std::sort(split.test_ids.begin(), split.test_ids.end());
  return split;
}

Split full_split(const Manifest& manifest) {
  Split split;
  split.ratio = 0.0;
  for (const auto& s : manifest.samples) split.test_ids.push_back(s.id);
  std::sort(split.test_ids.begin(), split.test_ids.end());
  return split;
}

Image load_image(const fs::path& path, Encoding encoding) {
  const PngRaster raster = read_png(path);
  const int want = encoding == Encoding::Srgb8 ? 8 : 16;
  if (raster.bit_depth != want)
    throw Error(ErrorCode::Io, path.string() + ": unsupported bit depth " +
                                   std::to_string(raster.bit_depth) + " for " +
                                   std::string(to_string(encoding)) +
                                   " (expected " + std::to_string(want) + ")");
  Image img = raster_to_image(raster, path);
  if (encoding == Encoding::Srgb8) {
    img.set_space(ColorSpace::Srgb);
    img = srgb_decode(img);
  }
  return img;
}

Image load_image_auto(const fs::path& path) {
  const PngRaster raster = read_png(path);
  Image img = raster_to_image(raster, path);
  if (raster.bit_depth == 8) {
    img.set_space(ColorSpace::Srgb);
    img = srgb_decode(img);
  }
  return img;
}

std::vector<std::uint8_t> load_mask(const fs::path& path, std::size_t width,
                                    std::size_t height) {
  const PngRaster raster = read_png(path);
  if (raster.width != width || raster.height != height)
    throw Error(ErrorCode::InputDomain,
                path.string() + ": mask is " + std::to_string(raster.width) + "x" +
                    std::to_string(raster.height) + ", image is " +
                    std::to_string(width) + "x" + std::to_string(height));
  std::vector<std::uint8_t> mask(width * height);
  for (std::size_t i = 0; i < mask.size(); ++i)
    mask[i] = raster.sample(i, 0) != 0 ? 1 : 0;
  return mask;
}

Image load_sample(const SampleRecord& record) {
  Image img = load_image(record.image_path, record.encoding);
  if (record.mask_path)
    img.set_mask(load_mask(*record.mask_path, img.width(), img.height()));
  return img;
}

void save_linear16(const Image& img, const fs::path& path) {
  PngRaster r{img.width(), img.height(), 3, 16, {}};
  r.samples.resize(img.pixel_count() * 3);
  const auto d = img.data();
  for (std::size_t i = 0; i < r.samples.size(); ++i) {
    const double v = std::isfinite(d[i]) ? std::clamp(d[i], 0.0, 1.0) : 0.0;
    r.samples[i] = static_cast<std::uint16_t>(std::lround(v * 65535.0));
  }
  write_png(path, r);
}

void save_srgb8(const Image& img, const fs::path& path) {
  PngRaster r{img.width(), img.height(), 3, 8, {}};
  r.samples.resize(img.pixel_count() * 3);
  const auto d = img.data();
  for (std::size_t i = 0; i < r.samples.size(); ++i) {
    const double v = std::isfinite(d[i]) ? std::clamp(d[i], 0.0, 1.0) : 0.0;
    const double enc = img.space() == ColorSpace::Linear ? srgb_encode(v) : v;
    r.samples[i] = static_cast<std::uint16_t>(std::lround(enc * 255.0));
  }
  write_png(path, r);
}

void save_mask(const std::vector<std::uint8_t>& mask, std::size_t width,
               std::size_t height, const fs::path& path) {
  PngRaster r{width, height, 1, 8, {}};
  r.samples.resize(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) r.samples[i] = mask[i] ? 255 : 0;
  write_png(path, r);
}

PredictionSet load_predictions(const fs::path& path, const Manifest& manifest,
                               const Split& split) {
  const fs::path file = fs::is_directory(path) ? path / "predictions.json" : path;
  const fs::path base = file.parent_path();
  const json doc = read_json(file);
  if (!doc.is_object()) parse_fail(file, "top level must be an object");

  PredictionSet set;
  set.model_name = string_field(doc, "model_name", "predictions", file);
  const auto kind = lower(string_field(doc, "kind", "predictions", file));
  if (kind == "white_balanced_image") {
    set.kind = PredictionKind::WhiteBalancedImage;
  } else if (kind == "illuminant_triple") {
    set.kind = PredictionKind::IlluminantTriple;
  } else {
    parse_fail(file, "unknown kind '" + kind +
                         "' (white_balanced_image or illuminant_triple)");
  }
  if (auto it = doc.find("train_dataset"); it != doc.end() && it->is_string())
    set.train_dataset = it->get<std::string>();

  for (const auto& id : split.test_ids)
    if (!manifest.find(id))
      throw Error(ErrorCode::Invariant,
                  "split test id '" + id + "' is not in manifest " + manifest.name);

  const json& entries = field(doc, "entries", "predictions", file);
  if (!entries.is_object()) parse_fail(file, "'entries' must be an object");

  const std::set<std::string> test(split.test_ids.begin(), split.test_ids.end());
  std::vector<std::string> extra, missing_files;
  for (const auto& [id, value] : entries.items()) {
    const bool is_image = value.is_string();
    const bool is_triple = value.is_array();
    if (!is_image && !is_triple)
      parse_fail(file, "entry '" + id + "' must be a path or an RGB triple");
    if ((set.kind == PredictionKind::WhiteBalancedImage) != is_image)
      throw Error(ErrorCode::MixedKinds,
                  file.string() + ": entry '" + id + "' does not match kind " +
                      std::string(to_string(set.kind)));
    if (!test.count(id)) {
      extra.push_back(id);
      continue;
    }
    if (is_image) {
      const fs::path p = resolve(base, value.get<std::string>());
      if (!fs::is_regular_file(p)) missing_files.push_back(id);
      set.entries.emplace(id, p);
    } else {
      const Rgb rgb = triple(value, "entry '" + id + "'", file);
      try {
        set.entries.emplace(id, Illuminant(rgb));
      } catch (const Error& e) {
        throw Error(ErrorCode::Invariant, file.string() + ": entry '" + id +
                                              "': " + e.what());
      }
    }
  }
  if (!extra.empty())
    throw Error(ErrorCode::ExtraId,
                file.string() + ": predictions for ids outside the test split: " +
                    join_ids(extra));

  std::vector<std::string> missing;
  for (const auto& id : split.test_ids)
    if (!set.entries.count(id)) missing.push_back(id);
  if (!missing.empty())
    throw Error(ErrorCode::MissingId,
                file.string() + ": no prediction for test ids: " + join_ids(missing));
  if (!missing_files.empty())
    throw Error(ErrorCode::MissingFile,
                file.string() + ": prediction images missing for: " +
                    join_ids(missing_files));
  return set;
}

void save_predictions(const PredictionSet& set, const fs::path& dir) {
  json entries = json::object();
  for (const auto& [id, pred] : set.entries) {
    if (const auto* p = std::get_if<fs::path>(&pred)) {
      entries[id] = relative_to(*p, dir);
    } else {
      const auto& e = std::get<Illuminant>(pred);
      entries[id] = {e.r(), e.g(), e.b()};
    }
  }
  json doc = {{"version", 1},
              {"model_name", set.model_name},
              {"kind", std::string(to_string(set.kind))},
              {"entries", entries}};
  if (set.train_dataset) doc["train_dataset"] = *set.train_dataset;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, dir.string() + ": cannot create directory");
  write_text(dir / "predictions.json", doc.dump(2) + "\n");
}

}  // namespace ccbench
