#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ccbench/dataset.hpp"
#include "ccbench/image.hpp"

namespace ccbench {

enum class AlbedoDistribution {
  UniformRgb,       // each channel uniform in [0.05, 0.95]
  AchromaticMean,   // UniformRgb, then rescaled so channel means coincide
  AchromaticEdges,  // shared base colour + per-patch grey level
};
enum class BlendAxis { X, Y };

struct Blend {
  BlendAxis axis = BlendAxis::X;
  double softness = 0.0;  // logistic ramp scale in pixels; 0 = hard edge
};

struct SynthConfig {
  std::string name = "synthetic";
  std::size_t width = 64;
  std::size_t height = 64;
  int patch_count = 12;  // including the full-frame background patch
  AlbedoDistribution albedo_distribution = AlbedoDistribution::UniformRgb;
  std::vector<Illuminant> illuminants;
  std::optional<Blend> blend;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  bool include_white_patch = false;
  // emit_dataset only: draw each sample's illuminant(s) from its own stream
  // instead of reusing `illuminants` (which then only fixes the count).
  bool random_illuminants = false;

  /// Throws Config naming the offending field.
  void validate() const;
};

/// Parses a JSON config. Syntax errors report the line; schema errors
/// name the field. Unknown keys are rejected. Throws Config.
SynthConfig parse_synth_config(const std::string& text);
SynthConfig load_synth_config(const std::filesystem::path& path);

struct SynthSample {
  Image canonical;
  Image observed;
  /// The single illuminant, or the area-weighted mean of the field.
  Illuminant gt_illuminant;
  /// Per-pixel illuminant for two-illuminant scenes; empty otherwise.
  std::vector<Rgb> illuminant_field;
  bool multi_illuminant = false;
};

/// Mondrian of axis-aligned rectangles over a background patch.
///
/// ACHROMATIC_MEAN rescales the non-white pixels per channel so the channel
/// means coincide. ACHROMATIC_EDGES draws one base colour per scene (channels
/// in [0.05, 0.3]) and gives every patch base + g (1, 1, 1), g in [0, 0.6], so
/// every albedo step between patches is grey. The white patch (1, 1, 1) is
/// drawn last so it is never occluded. Pure in cfg.
Image generate_scene(const SynthConfig& cfg);

/// Illuminant at every pixel: constant for one illuminant, a logistic blend
/// (1 - t) e1 + t e2 across the chosen axis for two, centred on the image.
std::vector<Rgb> illuminant_field(const SynthConfig& cfg);

/// observed = field * canonical + N(0, noise_sigma), clipped at 0. The noise
/// stream is derived from cfg.seed.
SynthSample render(const Image& canonical, const SynthConfig& cfg);

/// Writes `count` samples under out_dir:
///   images/<id>.png     observed, 16-bit linear
///   canonical/<id>.png  ground-truth white-balanced scene, 16-bit linear
///   masks/<id>.png      all-in 8-bit mask
///   manifest.json
/// Each sample uses cfg with seed = derive_seed(cfg.seed, id).
/// Throws Io with the failing path.
Manifest emit_dataset(const SynthConfig& cfg, std::size_t count,
                      const std::filesystem::path& out_dir);

}  // namespace ccbench
