#include "ccbench/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ccbench/error.hpp"

namespace ccbench {
namespace {

double quantile(const std::vector<double>& sorted, double q) {
  const double h = static_cast<double>(sorted.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double mean_range(const std::vector<double>& sorted, std::size_t first,
                  std::size_t count) {
  double sum = 0.0;
  for (std::size_t i = first; i < first + count; ++i) sum += sorted[i];
  return sum / static_cast<double>(count);
}

}  // namespace

ErrorStats summarize(std::span<const double> errors) {
  if (errors.empty())
    throw Error(ErrorCode::InputDomain, "summarize: empty error list");
  std::vector<double> x(errors.begin(), errors.end());
  for (double v : x)
    if (!std::isfinite(v))
      throw Error(ErrorCode::InputDomain, "summarize: non-finite error value");
  std::sort(x.begin(), x.end());

  const std::size_t n = x.size();
  const std::size_t k = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(static_cast<double>(n) / 4.0 + 0.5)));

  ErrorStats s;
  s.mean = mean_range(x, 0, n);
  s.median = n % 2 == 1 ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
  s.trimean = (quantile(x, 0.25) + 2.0 * quantile(x, 0.5) + quantile(x, 0.75)) / 4.0;
  s.best25 = mean_range(x, 0, k);
  s.worst25 = mean_range(x, n - k, k);
  s.max = x.back();
  return s;
}

}  // namespace ccbench
