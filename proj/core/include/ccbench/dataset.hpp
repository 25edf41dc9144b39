#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "ccbench/image.hpp"

namespace ccbench {

enum class SceneTag { Indoor, Outdoor, Unknown };
enum class Encoding { Srgb8, Linear16 };

std::string_view to_string(SceneTag tag);
std::string_view to_string(Encoding encoding);

struct SampleRecord {
  SampleRecord(std::string id_, std::filesystem::path image, Illuminant gt)
      : id(std::move(id_)), image_path(std::move(image)), gt_illuminant(gt) {}

  std::string id;
  std::filesystem::path image_path;  // resolved against the manifest dir
  Illuminant gt_illuminant;
  std::optional<std::filesystem::path> mask_path;
  SceneTag scene_tag = SceneTag::Unknown;
  Encoding encoding = Encoding::Linear16;
  // Optional metadata written by the synthetic generator.
  std::optional<std::filesystem::path> canonical_path;
  bool multi_illuminant = false;
};

struct Manifest {
  static constexpr int kVersion = 1;

  std::string name;
  std::vector<SampleRecord> samples;

  const SampleRecord* find(std::string_view id) const;
};

/// Parses and validates a manifest eagerly. Relative paths are resolved
/// against the manifest's directory. Errors: Parse (syntax, schema, version),
/// DuplicateId, Invariant (non-positive illuminant, empty sample list),
/// MissingFile (lists every affected id).
Manifest load_manifest(const std::filesystem::path& path);

/// Writes `manifest` as JSON at `path`, storing file paths relative to the
/// manifest's directory.
void save_manifest(const Manifest& manifest, const std::filesystem::path& path);

struct Split {
  std::vector<std::string> train_ids;  // sorted
  std::vector<std::string> test_ids;   // sorted
  std::uint64_t seed = 0;
  double ratio = 0.8;

  friend bool operator==(const Split&, const Split&) = default;
};

/// Deterministic train/test split.
///
/// The ids are sorted, shuffled with Fisher-Yates driven by
/// std::mt19937_64(seed) (j drawn uniformly from [0, i] by rejection
/// sampling, i running from N-1 down to 1), and the first
/// floor(ratio * N + 0.5) shuffled ids form the training set. Both output
/// lists are sorted. Throws Config unless 0 < ratio < 1.
Split split_manifest(const Manifest& manifest, std::uint64_t seed,
                     double ratio = 0.8);

/// Every sample in the test set; used when scoring a whole dataset.
Split full_split(const Manifest& manifest);

/// Loads the sample's image as a Linear raster (sRGB-decoded for SRGB8,
/// divided by 65535 for LINEAR16) with its mask attached.
Image load_sample(const SampleRecord& record);

/// Reads a PNG as a Linear raster: 8-bit files are treated as sRGB and
/// decoded, 16-bit files as linear.
Image load_image_auto(const std::filesystem::path& path);

/// Reads a PNG with an explicit encoding; mismatched bit depth is an error.
Image load_image(const std::filesystem::path& path, Encoding encoding);

/// Single-channel mask (nonzero = masked in) of the given dimensions.
std::vector<std::uint8_t> load_mask(const std::filesystem::path& path,
                                    std::size_t width, std::size_t height);

/// Clips to [0, 1] and writes a 16-bit RGB PNG of round(v * 65535).
void save_linear16(const Image& img, const std::filesystem::path& path);
/// Encodes to sRGB (after clipping) and writes an 8-bit RGB PNG.
void save_srgb8(const Image& img, const std::filesystem::path& path);
void save_mask(const std::vector<std::uint8_t>& mask, std::size_t width,
               std::size_t height, const std::filesystem::path& path);

enum class PredictionKind { WhiteBalancedImage, IlluminantTriple };

std::string_view to_string(PredictionKind kind);

using Prediction = std::variant<std::filesystem::path, Illuminant>;

struct PredictionSet {
  std::string model_name;
  PredictionKind kind = PredictionKind::WhiteBalancedImage;
  std::optional<std::string> train_dataset;
  std::map<std::string, Prediction> entries;
};

/// Reads `<dir>/predictions.json` (or `path` itself if it is a file) and
/// validates it against the manifest's test split. Errors: Parse,
/// MixedKinds, MissingId, ExtraId, MissingFile.
PredictionSet load_predictions(const std::filesystem::path& path,
                               const Manifest& manifest, const Split& split);

/// Writes predictions.json into `dir`; image paths are stored relative to it.
void save_predictions(const PredictionSet& set, const std::filesystem::path& dir);

}  // namespace ccbench
