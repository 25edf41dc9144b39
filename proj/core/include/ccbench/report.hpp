#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ccbench/eval.hpp"

namespace ccbench {

enum class ReportFormat { Markdown, Csv };

/// Deterministic tables, degrees printed with one decimal.
///
/// Markdown: a "Method | Mean | Med. | Tri. | Best 25% | Worst 25% | Max"
/// row for the run, a Scene table when any sample carries an indoor/outdoor
/// tag, and a failure footer when samples failed.
/// CSV: `id,angular_error_deg` per sample (`failed` for failures), a blank
/// line, then a `metric,value` block with the six statistics and the failure
/// count.
std::string render_report(const EvaluationRun& run, ReportFormat format);

/// Markdown: one "Train / Test" row per cell, grouped by training set with the
/// same-dataset cell first. CSV: train,test,mean,median,trimean,best25,
/// worst25,max.
std::string render_report(const CrossMatrix& matrix, ReportFormat format);

struct ParsedCsvReport {
  std::vector<std::pair<std::string, std::optional<double>>> samples;
  std::optional<ErrorStats> stats;
  std::size_t failed = 0;
};

/// Inverse of the CSV run report. Throws Parse on malformed input.
ParsedCsvReport parse_csv_report(const std::string& text);

/// Upper end of the error-map colour scale; larger errors saturate.
inline constexpr double kErrorMapMaxDeg = 30.0;

using Rgb8 = std::array<std::uint8_t, 3>;

/// Colour for an error in degrees: piecewise-linear blue (0) -> cyan -> green
/// -> yellow -> red (>= 30) with stops every 7.5 degrees.
Rgb8 error_color(double degrees);
inline constexpr Rgb8 kInvalidColor = {128, 128, 128};

/// Renders error_map(pred, gt_white) as an 8-bit RGB PNG. Invalid pixels are
/// neutral grey. Returns the map that was drawn.
ErrorMap write_error_map(const Image& predicted_white, const Image& gt_white,
                         const std::filesystem::path& out_path);

}  // namespace ccbench
