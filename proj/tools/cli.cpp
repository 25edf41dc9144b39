#include "cli.hpp"

#include <glob.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "ccbench/color.hpp"
#include "ccbench/dataset.hpp"
#include "ccbench/error.hpp"
#include "ccbench/estimators.hpp"
#include "ccbench/eval.hpp"
#include "ccbench/report.hpp"
#include "ccbench/synth.hpp"

namespace ccbench::cli {
namespace {

namespace fs = std::filesystem;

struct Common {
  std::optional<std::uint64_t> seed;
  std::string space = "linear";
  unsigned jobs = 1;
  std::string out;
};

void add_common(CLI::App* sub, Common& c, bool with_out = true) {
  sub->add_option("--seed", c.seed, "Master seed");
  sub->add_option("--space", c.space, "Working colour space")
      ->check(CLI::IsMember({"linear", "srgb"}));
  sub->add_option("--jobs", c.jobs, "Worker threads")->check(CLI::Range(1u, 1024u));
  if (with_out)
    sub->add_option("--out", c.out,
                    std::string("Output directory (default $") + kOutDirEnv + " or .)");
}

fs::path out_dir(const Common& c) {
  if (!c.out.empty()) return c.out;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  return ".";
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::Io:
    case ErrorCode::MissingFile:
      return kExitIo;
    case ErrorCode::IncompleteGrid:
      return kExitIncompleteGrid;
    default:
      return kExitUsage;
  }
}

int report_error(std::ostream& err, const Error& e, int code) {
  err << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
  return code;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, path.string() + ": cannot open for writing");
  f << text;
  if (!f) throw Error(ErrorCode::Io, path.string() + ": write failed");
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw Error(ErrorCode::Io, dir.string() + ": cannot create output directory");
}

std::string file_safe(const std::string& s) {
  std::string out;
  for (char ch : s) {
    const bool ok = std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' ||
                    ch == '_' || ch == '.';
    out += ok ? ch : '_';
  }
  return out;
}

std::string run_stem(const EvaluationRun& run) {
  return "run_" + file_safe(run.model_name) + "__" + file_safe(run.train_dataset) +
         "__" + file_safe(run.manifest_name) + "__" +
         std::string(to_string(run.space)) + "__seed" + std::to_string(run.split_seed);
}

void archive(const EvaluationRun& run, const fs::path& dir, std::ostream& out) {
  ensure_dir(dir);
  const fs::path stem = dir / run_stem(run);
  const fs::path csv = stem.string() + ".csv";
  const fs::path json = stem.string() + ".json";
  write_file(csv, render_report(run, ReportFormat::Csv));
  save_run(run, json);
  out << "\nwrote " << csv.string() << "\nwrote " << json.string() << "\n";
}

std::string valid_presets() {
  std::string s;
  for (Preset p : all_presets()) {
    if (!s.empty()) s += ", ";
    s += to_string(p);
  }
  return s;
}

std::string params_label(const EstimatorParams& p) {
  for (Preset preset : all_presets())
    if (preset_params(preset) == p) return std::string(to_string(preset));
  std::ostringstream os;
  os << "GREY_EDGE(n=" << p.order << ",p=";
  if (p.is_max_norm()) os << "inf"; else os << p.norm;
  os << ",sigma=" << p.sigma << ")";
  return os.str();
}

double parse_norm(const std::string& s) {
  if (s == "inf" || s == "infinity" || s == "max") return EstimatorParams::kInfinity;
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::Config, "--p must be a number or 'inf', got '" + s + "'");
}

Illuminant parse_triple(const std::string& s) {
  std::array<double, 3> v{};
  std::istringstream in(s);
  std::string part;
  std::size_t i = 0;
  while (std::getline(in, part, ',')) {
    if (i >= 3) break;
    try {
      std::size_t pos = 0;
      v[i] = std::stod(part, &pos);
      if (pos != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw Error(ErrorCode::Config, "--gt-illuminant: bad component '" + part + "'");
    }
    ++i;
  }
  if (i != 3 || in.rdbuf()->in_avail() > 0 || std::count(s.begin(), s.end(), ',') != 2)
    throw Error(ErrorCode::Config, "--gt-illuminant expects R,G,B, got '" + s + "'");
  try {
    return Illuminant(v);
  } catch (const Error& e) {
    throw Error(ErrorCode::Config, std::string("--gt-illuminant: ") + e.what());
  }
}


// --- subcommands -----------------------------------------------------------

struct SynthArgs {
  std::string config;
  std::size_t count = 0;
};

int cmd_synth(const SynthArgs& a, const Common& c, std::ostream& out, std::ostream& err) {
  SynthConfig cfg;
  try {
    cfg = load_synth_config(a.config);
    if (c.seed) cfg.seed = *c.seed;
  } catch (const Error& e) {
    return report_error(err, e, e.code() == ErrorCode::Io ? kExitIo : kExitUsage);
  }
  try {
    const fs::path dir = out_dir(c);
    ensure_dir(dir);
    emit_dataset(cfg, a.count, dir);
    out << (dir / "manifest.json").string() << "\n";
  } catch (const Error& e) {
    return report_error(err, e, exit_code_for(e.code()));
  }
  return kExitOk;
}

struct EstimateArgs {
  std::string manifest;
  std::string preset;
  std::optional<int> n;
  std::optional<std::string> p;
  std::optional<double> sigma;
  std::optional<std::uint64_t> split_seed;
  double split_ratio = 0.8;
  bool all = false;
};

int cmd_estimate(const EstimateArgs& a, const Common& c, std::ostream& out,
                 std::ostream& err) {
  EstimatorParams params;
  try {
    if (!a.preset.empty()) {
      const auto preset = preset_from_string(a.preset);
      if (!preset)
        throw Error(ErrorCode::Config, "unknown preset '" + a.preset +
                                           "'; valid presets: " + valid_presets());
      params = preset_params(*preset);
    } else if (!a.n && !a.p && !a.sigma) {
      throw Error(ErrorCode::Config,
                  "give --preset or explicit --n/--p/--sigma; valid presets: " +
                      valid_presets());
    }
    if (a.n) params.order = *a.n;
    if (a.p) params.norm = parse_norm(*a.p);
    if (a.sigma) params.sigma = *a.sigma;
    params.validate();
  } catch (const Error& e) {
    return report_error(err, e, kExitUsage);
  }

  try {
    const Manifest m = load_manifest(a.manifest);
    const std::uint64_t seed = a.split_seed.value_or(c.seed.value_or(0));
    const Split split = a.all ? full_split(m) : split_manifest(m, seed, a.split_ratio);
    const EvaluationRun run =
        evaluate_estimator(m, split, params, params_label(params),
                           color_space_from_string(c.space), EvalOptions{c.jobs});
    out << render_report(run, ReportFormat::Markdown);
    archive(run, out_dir(c), out);
  } catch (const Error& e) {
    return report_error(err, e, exit_code_for(e.code()));
  }
  return kExitOk;
}

struct EvaluateArgs {
  std::string manifest;
  std::string predictions;
  std::optional<std::uint64_t> split_seed;
  double split_ratio = 0.8;
  std::string train_dataset;
  std::string aggregator = "median";
  bool all = false;
};

int cmd_evaluate(const EvaluateArgs& a, const Common& c, std::ostream& out,
                 std::ostream& err) {
  Manifest m;
  Split split;
  try {
    m = load_manifest(a.manifest);
    const std::uint64_t seed = a.split_seed.value_or(c.seed.value_or(0));
    split = a.all ? full_split(m) : split_manifest(m, seed, a.split_ratio);
  } catch (const Error& e) {
    return report_error(err, e, exit_code_for(e.code()));
  }

  PredictionSet preds;
  try {
    preds = load_predictions(a.predictions, m, split);
    if (!a.train_dataset.empty()) preds.train_dataset = a.train_dataset;
  } catch (const Error& e) {
    return report_error(err, e, kExitBridge);
  }

  try {
    EvalOptions opts{c.jobs};
    opts.aggregator = a.aggregator == "mean" ? Aggregator::Mean : Aggregator::Median;
    const EvaluationRun run =
        evaluate(m, split, preds, color_space_from_string(c.space), opts);
    out << render_report(run, ReportFormat::Markdown);
    archive(run, out_dir(c), out);
  } catch (const Error& e) {
    return report_error(err, e, exit_code_for(e.code()));
  }
  return kExitOk;
}

int cmd_cross(const std::string& pattern, std::ostream& out, std::ostream& err) {
  glob_t g{};
  const int rc = ::glob(pattern.c_str(), 0, nullptr, &g);
  std::vector<std::string> files;
  if (rc == 0)
    for (std::size_t i = 0; i < g.gl_pathc; ++i) files.emplace_back(g.gl_pathv[i]);
  globfree(&g);
  if (files.empty()) {
    err << "error: no run archives match '" << pattern << "'\n";
    return kExitUsage;
  }
  std::sort(files.begin(), files.end());
  try {
    std::vector<EvaluationRun> runs;
    for (const auto& f : files) runs.push_back(load_run(f));
    out << render_report(cross_evaluate(runs), ReportFormat::Markdown);
  } catch (const Error& e) {
    return report_error(err, e, exit_code_for(e.code()));
  }
  return kExitOk;
}

struct ErrorMapArgs {
  std::string input;
  std::string prediction;
  std::string gt;
  std::string out;
};

int cmd_error_map(const ErrorMapArgs& a, std::ostream& out, std::ostream& err) {
  try {
    const Illuminant gt = parse_triple(a.gt);
    const Image input = load_image_auto(a.input);
    const Image pred = load_image_auto(a.prediction);
    if (!input.same_size(pred))
      throw Error(ErrorCode::InputDomain,
                  "input is " + std::to_string(input.width()) + "x" +
                      std::to_string(input.height()) + ", prediction is " +
                      std::to_string(pred.width()) + "x" + std::to_string(pred.height()));
    const ErrorMap map = write_error_map(pred, correct_von_kries(input, gt), a.out);
    double sum = 0.0, peak = 0.0;
    for (std::size_t i = 0; i < map.degrees.size(); ++i) {
      if (!map.valid[i]) continue;
      sum += map.degrees[i];
      peak = std::max(peak, map.degrees[i]);
    }
    const std::size_t n = map.valid_count();
    char buf[160];
    std::snprintf(buf, sizeof buf, "%zu valid pixels, mean %.1f deg, max %.1f deg\n", n,
                  n ? sum / static_cast<double>(n) : 0.0, peak);
    out << buf << "wrote " << a.out << "\n";
  } catch (const Error& e) {
    return report_error(err, e, exit_code_for(e.code()));
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Colour constancy benchmark toolkit", "ccbench"};
  app.require_subcommand(1, 1);

  Common common;

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic Mondrian dataset");
  synth->add_option("--config", synth_args.config, "Synthetic scene config (JSON)")
      ->required();
  synth->add_option("--count", synth_args.count, "Number of samples")
      ->required()
      ->check(CLI::PositiveNumber);
  add_common(synth, common);

  EstimateArgs est_args;
  auto* estimate = app.add_subcommand("estimate", "Score a grey-edge family estimator");
  estimate->add_option("--manifest", est_args.manifest, "Dataset manifest")->required();
  estimate->add_option("--preset", est_args.preset, "Estimator preset");
  estimate->add_option("--n", est_args.n, "Derivative order (0, 1, 2)");
  estimate->add_option("--p", est_args.p, "Minkowski norm (number or inf)");
  estimate->add_option("--sigma", est_args.sigma, "Gaussian scale in pixels");
  estimate->add_option("--split-seed", est_args.split_seed, "Train/test split seed");
  estimate->add_option("--split-ratio", est_args.split_ratio, "Training fraction")
      ->check(CLI::Range(0.0, 1.0));
  estimate->add_flag("--all", est_args.all, "Score every sample, not just the test split");
  add_common(estimate, common);

  EvaluateArgs eval_args;
  auto* evaluate_cmd =
      app.add_subcommand("evaluate", "Score model predictions from a bridge directory");
  evaluate_cmd->add_option("--manifest", eval_args.manifest, "Dataset manifest")
      ->required();
  evaluate_cmd->add_option("--predictions", eval_args.predictions,
                           "Prediction directory (predictions.json)")
      ->required();
  evaluate_cmd->add_option("--split-seed", eval_args.split_seed, "Train/test split seed");
  evaluate_cmd->add_option("--split-ratio", eval_args.split_ratio, "Training fraction")
      ->check(CLI::Range(0.0, 1.0));
  evaluate_cmd->add_option("--train-dataset", eval_args.train_dataset,
                           "Dataset the model was trained on (cross-dataset runs)");
  evaluate_cmd->add_option("--aggregator", eval_args.aggregator, "Ratio aggregator")
      ->check(CLI::IsMember({"median", "mean"}));
  evaluate_cmd->add_flag("--all", eval_args.all, "Score every sample");
  add_common(evaluate_cmd, common);

  std::string runs_glob;
  auto* cross = app.add_subcommand("cross", "Assemble archived runs into a cross matrix");
  cross->add_option("--runs", runs_glob, "Glob of archived run JSON files")->required();

  ErrorMapArgs map_args;
  auto* emap = app.add_subcommand("error-map", "Write a per-pixel angular error heatmap");
  emap->add_option("--input", map_args.input, "Input image (PNG)")->required();
  emap->add_option("--prediction", map_args.prediction, "Predicted white-balanced PNG")
      ->required();
  emap->add_option("--gt-illuminant", map_args.gt, "Ground truth as R,G,B")->required();
  emap->add_option("--out", map_args.out, "Output heatmap PNG")->required();

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.emplace_back("ccbench");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (synth->parsed()) return cmd_synth(synth_args, common, out, err);
  if (estimate->parsed()) return cmd_estimate(est_args, common, out, err);
  if (evaluate_cmd->parsed()) return cmd_evaluate(eval_args, common, out, err);
  if (cross->parsed()) return cmd_cross(runs_glob, out, err);
  if (emap->parsed()) return cmd_error_map(map_args, out, err);
  return kExitUsage;
}

}  // namespace ccbench::cli
