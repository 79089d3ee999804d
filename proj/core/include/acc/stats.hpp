#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace acc::stats {

double mean(std::span<const double> values);

/// Sample standard deviation with the n - 1 denominator (0 for n < 2).
double standard_deviation(std::span<const double> values);

/// Mean of the two middle order statistics for even n.
double median(std::span<const double> values);

/// Median of |x_i - median(x)|, without a consistency factor.
double mad(std::span<const double> values);

/// Order statistic of rank ceil(m * alpha) counted from the smallest
/// (clamped to [1, m]).
double lower_quantile(std::span<const double> values, double alpha);

/// lower_quantile(0.75) - lower_quantile(0.25).
double interquartile_range(std::span<const double> values);

/// Smallest value whose cumulative normalized weight reaches alpha.
double weighted_quantile(std::span<const double> values, std::span<const double> weights,
                         double alpha);

/// Two-sample Kolmogorov-Smirnov statistic sup |F1 - F2|.
double ks_statistic(std::vector<double> a, std::vector<double> b);

}  // namespace acc::stats
