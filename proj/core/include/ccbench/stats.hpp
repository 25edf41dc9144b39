#pragma once

#include <span>

namespace ccbench {

/// Six-number summary of per-image angular errors, in degrees.
struct ErrorStats {
  double mean = 0.0;
  double median = 0.0;
  double trimean = 0.0;
  double best25 = 0.0;   // mean of the k smallest errors
  double worst25 = 0.0;  // mean of the k largest errors
  double max = 0.0;

  friend bool operator==(const ErrorStats&, const ErrorStats&) = default;
};

/// Conventions (all computed on the ascending-sorted list x[0..N-1]):
///  - mean: x summed in ascending order, divided by N
///  - median: middle element, or the average of the two middles
///  - quartiles: linear interpolation at h = (N - 1) q,
///      Q(q) = x[floor h] + (h - floor h) (x[floor h + 1] - x[floor h])
///  - trimean: (Q1 + 2 Q2 + Q3) / 4
///  - k = max(1, floor(N / 4 + 0.5)); best25 / worst25 are the means of the
///    k smallest / largest values, each summed in ascending order
/// Throws InputDomain on an empty list or a non-finite value.
ErrorStats summarize(std::span<const double> errors);

}  // namespace ccbench
