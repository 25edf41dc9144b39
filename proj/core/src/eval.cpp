#include "ccbench/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "ccbench/error.hpp"
#include "ccbench/png_io.hpp"

namespace ccbench {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Runs fn(i) for i in [0, n) on up to `jobs` threads. Each index is handled
// by exactly one worker, so writes to per-index slots need no locking.
template <typename Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn) {
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(std::max(1u, jobs), std::max<std::size_t>(n, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

bool is_sample_failure(ErrorCode code) {
  switch (code) {
    case ErrorCode::InputDomain:
    case ErrorCode::DegenerateIlluminant:
    case ErrorCode::InsufficientSupport:
    case ErrorCode::DegenerateScene:
      return true;
    default:
      return false;
  }
}

// Scores every test sample with `score`, recording numerical failures and
// rethrowing the first other error in sample order.
template <typename Score>
std::vector<SampleResult> score_split(const Manifest& manifest, const Split& split,
                                      unsigned jobs, Score&& score) {
  const std::size_t n = split.test_ids.size();
  std::vector<SampleResult> results(n);
  std::vector<std::exception_ptr> errors(n);
  parallel_for(n, jobs, [&](std::size_t i) {
    const std::string& id = split.test_ids[i];
    SampleResult& r = results[i];
    r.id = id;
    try {
      const SampleRecord* rec = manifest.find(id);
      if (!rec)
        throw Error(ErrorCode::Invariant,
                    "test id '" + id + "' is not in manifest " + manifest.name);
      r.scene = rec->scene_tag;
      r.error_deg = score(*rec);
    } catch (const Error& e) {
      if (is_sample_failure(e.code())) {
        r.failure = std::string(to_string(e.code())) + ": " + e.what();
      } else {
        errors[i] = std::current_exception();
      }
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

Image load_prediction_image(const fs::path& path, ColorSpace space) {
  const PngRaster r = read_png(path);
  if (r.channels < 3)
    throw Error(ErrorCode::Io, path.string() + ": prediction must be an RGB image");
  const double scale = r.bit_depth == 16 ? 65535.0 : 255.0;
  Image img(r.width, r.height, space);
  auto d = img.data();
  for (std::size_t i = 0; i < img.pixel_count(); ++i)
    for (int c = 0; c < 3; ++c)
      d[i * 3 + static_cast<std::size_t>(c)] = static_cast<double>(r.sample(i, c)) / scale;
  return space == ColorSpace::Srgb ? srgb_decode(img) : img;
}

json stats_to_json(const ErrorStats& s) {
  return {{"mean", s.mean},       {"median", s.median}, {"trimean", s.trimean},
          {"best25", s.best25},   {"worst25", s.worst25}, {"max", s.max}};
}

ErrorStats stats_from_json(const json& j) {
  ErrorStats s;
  s.mean = j.at("mean").get<double>();
  s.median = j.at("median").get<double>();
  s.trimean = j.at("trimean").get<double>();
  s.best25 = j.at("best25").get<double>();
  s.worst25 = j.at("worst25").get<double>();
  s.max = j.at("max").get<double>();
  return s;
}

bool stats_close(const ErrorStats& a, const ErrorStats& b) {
  const double tol = 1e-9;
  auto close = [tol](double x, double y) {
    return std::abs(x - y) <= tol * std::max(1.0, std::abs(y));
  };
  return close(a.mean, b.mean) && close(a.median, b.median) &&
         close(a.trimean, b.trimean) && close(a.best25, b.best25) &&
         close(a.worst25, b.worst25) && close(a.max, b.max);
}

SceneTag scene_from_name(const std::string& s) {
  if (s == "indoor") return SceneTag::Indoor;
  if (s == "outdoor") return SceneTag::Outdoor;
  if (s == "unknown") return SceneTag::Unknown;
  throw Error(ErrorCode::Parse, "unknown scene tag '" + s + "'");
}

}  // namespace

std::size_t EvaluationRun::failure_count() const {
  return static_cast<std::size_t>(std::count_if(
      samples.begin(), samples.end(), [](const auto& s) { return !s.error_deg; }));
}

void finalize(EvaluationRun& run) {
  std::vector<double> all;
  std::map<SceneTag, std::vector<double>> by_scene;
  for (const auto& s : run.samples) {
    if (!s.error_deg) continue;
    all.push_back(*s.error_deg);
    by_scene[s.scene].push_back(*s.error_deg);
  }
  run.stats.reset();
  run.partitions.clear();
  if (!all.empty()) run.stats = summarize(all);
  for (const auto& [tag, errs] : by_scene) run.partitions.emplace(tag, summarize(errs));
}

EvaluationRun evaluate(const Manifest& manifest, const Split& split,
                       const PredictionSet& predictions, ColorSpace space,
                       const EvalOptions& options) {
  EvaluationRun run;
  run.model_name = predictions.model_name;
  run.manifest_name = manifest.name;
  run.train_dataset = predictions.train_dataset.value_or(manifest.name);
  run.split_seed = split.seed;
  run.split_ratio = split.ratio;
  run.space = space;

  run.samples = score_split(manifest, split, options.jobs, [&](const SampleRecord& rec) {
    auto it = predictions.entries.find(rec.id);
    if (it == predictions.entries.end())
      throw Error(ErrorCode::MissingId, "no prediction for test id '" + rec.id + "'");
    if (const auto* e = std::get_if<Illuminant>(&it->second))
      return angular_error(*e, rec.gt_illuminant);

    const Image input = load_sample(rec);
    Image predicted = load_prediction_image(std::get<fs::path>(it->second), space);
    if (!predicted.same_size(input))
      throw Error(ErrorCode::InputDomain,
                  "prediction for '" + rec.id + "' differs in size from the input");
    if (input.has_mask())
      predicted.set_mask(std::vector<std::uint8_t>(input.mask().begin(), input.mask().end()));
    const Illuminant e = recover_illuminant(input, predicted, options.aggregator);
    return angular_error(e, rec.gt_illuminant);
  });
  finalize(run);
  return run;
}

EvaluationRun evaluate_estimator(const Manifest& manifest, const Split& split,
                                 const EstimatorParams& params,
                                 const std::string& model_name, ColorSpace space,
                                 const EvalOptions& options) {
  params.validate();
  EvaluationRun run;
  run.model_name = model_name;
  run.manifest_name = manifest.name;
  run.train_dataset = manifest.name;
  run.split_seed = split.seed;
  run.split_ratio = split.ratio;
  run.space = space;

  run.samples = score_split(manifest, split, options.jobs, [&](const SampleRecord& rec) {
    Image img = load_sample(rec);
    if (space == ColorSpace::Srgb) {
      img = srgb_encode(clip_unit(img));
      img.set_space(ColorSpace::Linear);  // estimator consumes encoded values as-is
    }
    return angular_error(estimate(img, params), rec.gt_illuminant);
  });
  finalize(run);
  return run;
}

EvaluationRun evaluate_estimator(const Manifest& manifest, const Split& split,
                                 Preset preset, ColorSpace space,
                                 const EvalOptions& options) {
  return evaluate_estimator(manifest, split, preset_params(preset),
                            std::string(to_string(preset)), space, options);
}

std::string run_to_json(const EvaluationRun& run) {
  json samples = json::array();
  for (const auto& s : run.samples) {
    json j = {{"id", s.id}, {"scene_tag", std::string(to_string(s.scene))}};
    if (s.error_deg) {
      j["angular_error_deg"] = *s.error_deg;
    } else {
      j["angular_error_deg"] = nullptr;
      j["failure"] = s.failure;
    }
    samples.push_back(std::move(j));
  }
  json partitions = json::object();
  for (const auto& [tag, st] : run.partitions)
    partitions[std::string(to_string(tag))] = stats_to_json(st);
  const json doc = {
      {"version", 1},
      {"model_name", run.model_name},
      {"train_dataset", run.train_dataset},
      {"manifest_name", run.manifest_name},
      {"split_seed", run.split_seed},
      {"split_ratio", run.split_ratio},
      {"color_space", std::string(to_string(run.space))},
      {"samples", samples},
      {"stats", run.stats ? stats_to_json(*run.stats) : json(nullptr)},
      {"partitions", partitions},
      {"failed", run.failure_count()},
  };
  return doc.dump(2) + "\n";
}

EvaluationRun run_from_json(const std::string& text) {
  EvaluationRun run;
  json stored_stats, stored_parts;
  try {
    const json doc = json::parse(text);
    run.model_name = doc.at("model_name").get<std::string>();
    run.train_dataset = doc.at("train_dataset").get<std::string>();
    run.manifest_name = doc.at("manifest_name").get<std::string>();
    run.split_seed = doc.at("split_seed").get<std::uint64_t>();
    run.split_ratio = doc.at("split_ratio").get<double>();
    run.space = color_space_from_string(doc.at("color_space").get<std::string>());
    for (const auto& j : doc.at("samples")) {
      SampleResult s;
      s.id = j.at("id").get<std::string>();
      s.scene = scene_from_name(j.at("scene_tag").get<std::string>());
      const json& e = j.at("angular_error_deg");
      if (e.is_null())
        s.failure = j.value("failure", std::string("failed"));
      else
        s.error_deg = e.get<double>();
      run.samples.push_back(std::move(s));
    }
    stored_stats = doc.at("stats");
    stored_parts = doc.value("partitions", json::object());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("run archive: ") + e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::Parse, std::string("run archive: ") + e.what());
  }

  finalize(run);
  const bool stats_ok =
      stored_stats.is_null()
          ? !run.stats.has_value()
          : (run.stats.has_value() && stats_close(*run.stats, stats_from_json(stored_stats)));
  bool parts_ok = stored_parts.size() == run.partitions.size();
  for (const auto& [tag, st] : run.partitions) {
    const auto key = std::string(to_string(tag));
    parts_ok = parts_ok && stored_parts.contains(key) &&
               stats_close(st, stats_from_json(stored_parts[key]));
  }
  if (!stats_ok || !parts_ok)
    throw Error(ErrorCode::Invariant,
                "run archive: stored statistics do not match the per-sample errors");
  return run;
}

void save_run(const EvaluationRun& run, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, path.string() + ": cannot open for writing");
  out << run_to_json(run);
  if (!out) throw Error(ErrorCode::Io, path.string() + ": write failed");
}

EvaluationRun load_run(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, path.string() + ": cannot open");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return run_from_json(ss.str());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

CrossMatrix cross_evaluate(const std::vector<EvaluationRun>& runs) {
  CrossMatrix m;
  std::set<std::string> trains, tests;
  for (const auto& r : runs) {
    trains.insert(r.train_dataset);
    tests.insert(r.manifest_name);
  }
  m.train_datasets.assign(trains.begin(), trains.end());
  m.test_datasets.assign(tests.begin(), tests.end());

  for (const auto& r : runs) {
    const std::pair key{r.train_dataset, r.manifest_name};
    if (!r.stats)
      throw Error(ErrorCode::IncompleteGrid, "run (" + key.first + ", " + key.second +
                                                 ") has no successful samples");
    if (!m.cells.emplace(key, *r.stats).second)
      throw Error(ErrorCode::IncompleteGrid,
                  "duplicate run for (" + key.first + ", " + key.second + ")");
  }
  for (const auto& tr : m.train_datasets)
    for (const auto& te : m.test_datasets)
      if (!m.cells.count({tr, te}))
        throw Error(ErrorCode::IncompleteGrid,
                    "missing run for (" + tr + ", " + te + ")");
  if (m.cells.empty()) throw Error(ErrorCode::IncompleteGrid, "no runs given");
  return m;
}

}  // namespace ccbench
