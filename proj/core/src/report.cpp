#include "ccbench/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "ccbench/error.hpp"
#include "ccbench/png_io.hpp"

namespace ccbench {
namespace {

constexpr const char* kHeaderColumns =
    " | Mean | Med. | Tri. | Best 25% | Worst 25% | Max |";
constexpr const char* kAlignRow = "|:---|---:|---:|---:|---:|---:|---:|";

std::string deg(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

std::string md_cells(const ErrorStats& s) {
  return " | " + deg(s.mean) + " | " + deg(s.median) + " | " + deg(s.trimean) +
         " | " + deg(s.best25) + " | " + deg(s.worst25) + " | " + deg(s.max) + " |";
}

std::string md_empty_cells() { return " | n/a | n/a | n/a | n/a | n/a | n/a |"; }

std::string csv_cells(const ErrorStats& s) {
  return deg(s.mean) + "," + deg(s.median) + "," + deg(s.trimean) + "," +
         deg(s.best25) + "," + deg(s.worst25) + "," + deg(s.max);
}

std::string scene_label(SceneTag tag) {
  switch (tag) {
    case SceneTag::Indoor: return "Indoor";
    case SceneTag::Outdoor: return "Outdoor";
    case SceneTag::Unknown: return "Unknown";
  }
  return "Unknown";
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

double parse_number(const std::string& s, std::size_t line_no) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::Parse,
                "csv line " + std::to_string(line_no) + ": not a number '" + s + "'");
  }
}

std::uint8_t lerp8(std::uint8_t a, std::uint8_t b, double t) {
  return static_cast<std::uint8_t>(
      std::lround(static_cast<double>(a) + t * (static_cast<double>(b) - a)));
}

}  // namespace

std::string render_report(const EvaluationRun& run, ReportFormat format) {
  std::ostringstream out;
  if (format == ReportFormat::Csv) {
    out << "id,angular_error_deg\n";
    for (const auto& s : run.samples)
      out << s.id << "," << (s.error_deg ? deg(*s.error_deg) : "failed") << "\n";
    out << "\nmetric,value\n";
    if (run.stats) {
      const auto& st = *run.stats;
      out << "mean," << deg(st.mean) << "\n"
          << "median," << deg(st.median) << "\n"
          << "trimean," << deg(st.trimean) << "\n"
          << "best25," << deg(st.best25) << "\n"
          << "worst25," << deg(st.worst25) << "\n"
          << "max," << deg(st.max) << "\n";
    }
    out << "failed," << run.failure_count() << "\n";
    return out.str();
  }

  out << "| Method" << kHeaderColumns << "\n" << kAlignRow << "\n";
  out << "| " << run.model_name
      << (run.stats ? md_cells(*run.stats) : md_empty_cells()) << "\n";

  const bool tagged = std::any_of(run.partitions.begin(), run.partitions.end(),
                                  [](const auto& p) { return p.first != SceneTag::Unknown; });
  if (tagged) {
    out << "\n| Scene" << kHeaderColumns << "\n" << kAlignRow << "\n";
    for (const auto& [tag, st] : run.partitions)
      out << "| " << scene_label(tag) << md_cells(st) << "\n";
  }

  const std::size_t total = run.samples.size();
  const std::size_t failed = run.failure_count();
  out << "\n" << run.manifest_name << " (trained on " << run.train_dataset
      << "), split seed " << run.split_seed << ", " << to_string(run.space)
      << " space: " << (total - failed) << " of " << total << " samples scored.\n";
  if (failed > 0) {
    out << "\nFailed samples (" << failed << "):\n";
    for (const auto& s : run.samples)
      if (!s.error_deg) out << "- " << s.id << ": " << s.failure << "\n";
  }
  return out.str();
}

std::string render_report(const CrossMatrix& matrix, ReportFormat format) {
  std::ostringstream out;
  auto row_order = [&](const std::string& train) {
    std::vector<std::string> tests;
    if (std::find(matrix.test_datasets.begin(), matrix.test_datasets.end(), train) !=
        matrix.test_datasets.end())
      tests.push_back(train);
    for (const auto& t : matrix.test_datasets)
      if (t != train) tests.push_back(t);
    return tests;
  };

  if (format == ReportFormat::Csv) {
    out << "train,test,mean,median,trimean,best25,worst25,max\n";
    for (const auto& tr : matrix.train_datasets)
      for (const auto& te : row_order(tr))
        out << tr << "," << te << "," << csv_cells(matrix.at(tr, te)) << "\n";
    return out.str();
  }
  out << "| Datasets (Train/Test)" << kHeaderColumns << "\n" << kAlignRow << "\n";
  for (const auto& tr : matrix.train_datasets)
    for (const auto& te : row_order(tr))
      out << "| " << tr << " / " << te << md_cells(matrix.at(tr, te)) << "\n";
  return out.str();
}

ParsedCsvReport parse_csv_report(const std::string& text) {
  const auto lines = split_lines(text);
  if (lines.empty() || lines[0] != "id,angular_error_deg")
    throw Error(ErrorCode::Parse, "csv: missing 'id,angular_error_deg' header");

  ParsedCsvReport report;
  std::size_t i = 1;
  for (; i < lines.size() && !lines[i].empty(); ++i) {
    const auto comma = lines[i].rfind(',');
    if (comma == std::string::npos)
      throw Error(ErrorCode::Parse, "csv line " + std::to_string(i + 1) + ": no comma");
    const std::string id = lines[i].substr(0, comma);
    const std::string value = lines[i].substr(comma + 1);
    if (value == "failed")
      report.samples.emplace_back(id, std::nullopt);
    else
      report.samples.emplace_back(id, parse_number(value, i + 1));
  }
  ++i;  // blank separator
  if (i >= lines.size() || lines[i] != "metric,value")
    throw Error(ErrorCode::Parse, "csv: missing 'metric,value' block");

  ErrorStats st;
  int seen = 0;
  for (++i; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto comma = lines[i].find(',');
    if (comma == std::string::npos)
      throw Error(ErrorCode::Parse, "csv line " + std::to_string(i + 1) + ": no comma");
    const std::string key = lines[i].substr(0, comma);
    const double v = parse_number(lines[i].substr(comma + 1), i + 1);
    if (key == "failed") {
      report.failed = static_cast<std::size_t>(v);
      continue;
    }
    double* slot = key == "mean"      ? &st.mean
                   : key == "median"  ? &st.median
                   : key == "trimean" ? &st.trimean
                   : key == "best25"  ? &st.best25
                   : key == "worst25" ? &st.worst25
                   : key == "max"     ? &st.max
                                      : nullptr;
    if (!slot)
      throw Error(ErrorCode::Parse,
                  "csv line " + std::to_string(i + 1) + ": unknown metric '" + key + "'");
    *slot = v;
    ++seen;
  }
  if (seen == 6) report.stats = st;
  return report;
}

Rgb8 error_color(double degrees) {
  static constexpr std::array<Rgb8, 5> stops = {{
      {0, 0, 255},    // 0
      {0, 255, 255},  // 7.5
      {0, 255, 0},    // 15
      {255, 255, 0},  // 22.5
      {255, 0, 0},    // 30
  }};
  if (!(degrees > 0.0)) return stops.front();
  const double t = std::min(degrees, kErrorMapMaxDeg) / kErrorMapMaxDeg * 4.0;
  const auto seg = std::min<std::size_t>(static_cast<std::size_t>(t), 3);
  const double f = t - static_cast<double>(seg);
  const Rgb8& a = stops[seg];
  const Rgb8& b = stops[seg + 1];
  return {lerp8(a[0], b[0], f), lerp8(a[1], b[1], f), lerp8(a[2], b[2], f)};
}

ErrorMap write_error_map(const Image& predicted_white, const Image& gt_white,
                         const std::filesystem::path& out_path) {
  ErrorMap map = error_map(predicted_white, gt_white);
  PngRaster r{map.width, map.height, 3, 8, {}};
  r.samples.resize(map.width * map.height * 3);
  for (std::size_t i = 0; i < map.degrees.size(); ++i) {
    const Rgb8 c = map.valid[i] ? error_color(map.degrees[i]) : kInvalidColor;
    for (std::size_t k = 0; k < 3; ++k) r.samples[i * 3 + k] = c[k];
  }
  write_png(out_path, r);
  return map;
}

}  // namespace ccbench
