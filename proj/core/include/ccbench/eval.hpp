#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ccbench/color.hpp"
#include "ccbench/dataset.hpp"
#include "ccbench/estimators.hpp"
#include "ccbench/stats.hpp"

namespace ccbench {

struct SampleResult {
  std::string id;
  SceneTag scene = SceneTag::Unknown;
  std::optional<double> error_deg;  // empty when the sample failed
  std::string failure;              // reason, when error_deg is empty
};

struct EvaluationRun {
  std::string model_name;
  std::string train_dataset;  // row key of cross-dataset matrices
  std::string manifest_name;  // test dataset
  std::uint64_t split_seed = 0;
  double split_ratio = 0.8;
  ColorSpace space = ColorSpace::Linear;
  std::vector<SampleResult> samples;
  std::optional<ErrorStats> stats;          // over successful samples
  std::map<SceneTag, ErrorStats> partitions;  // per scene tag present

  std::size_t failure_count() const;
};

/// Recomputes `stats` and `partitions` from `samples`. Failed samples are
/// excluded from the statistics but stay listed.
void finalize(EvaluationRun& run);

struct EvalOptions {
  unsigned jobs = 1;  // worker threads; never changes results
  Aggregator aggregator = Aggregator::Median;
};

/// Scores a prediction set on the test split.
///
/// WHITE_BALANCED_IMAGE: the input sample and the predicted image are both
/// brought to linear RGB (the prediction is sRGB-decoded first when `space`
/// is Srgb, taken as linear otherwise), the sample mask is applied to both,
/// the illuminant is recovered and compared against ground truth.
/// ILLUMINANT_TRIPLE: compared directly.
///
/// Numerical failures (insufficient support, degenerate estimates, size
/// mismatches) are recorded per sample; I/O errors propagate.
EvaluationRun evaluate(const Manifest& manifest, const Split& split,
                       const PredictionSet& predictions, ColorSpace space,
                       const EvalOptions& options = {});

/// Runs a grey-edge family estimator over the test split. With `space` Srgb
/// the estimator sees the sRGB-encoded pixel values instead of linear ones.
EvaluationRun evaluate_estimator(const Manifest& manifest, const Split& split,
                                 const EstimatorParams& params,
                                 const std::string& model_name, ColorSpace space,
                                 const EvalOptions& options = {});
EvaluationRun evaluate_estimator(const Manifest& manifest, const Split& split,
                                 Preset preset, ColorSpace space,
                                 const EvalOptions& options = {});

std::string run_to_json(const EvaluationRun& run);
/// Throws Parse on schema errors and Invariant when the stored statistics do
/// not match the per-sample list.
EvaluationRun run_from_json(const std::string& text);
void save_run(const EvaluationRun& run, const std::filesystem::path& path);
EvaluationRun load_run(const std::filesystem::path& path);

struct CrossMatrix {
  std::vector<std::string> train_datasets;  // sorted
  std::vector<std::string> test_datasets;   // sorted
  std::map<std::pair<std::string, std::string>, ErrorStats> cells;

  const ErrorStats& at(const std::string& train, const std::string& test) const {
    return cells.at({train, test});
  }
};

/// Assembles runs keyed by (train_dataset, manifest_name) into a matrix.
/// Every train x test combination must be present exactly once and carry
/// statistics; otherwise throws IncompleteGrid naming the pair.
CrossMatrix cross_evaluate(const std::vector<EvaluationRun>& runs);

}  // namespace ccbench
