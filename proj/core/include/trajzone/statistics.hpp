#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

namespace trajzone {

/// The 19 trajectory-level statistics, in catalog order.
enum class Statistic : std::size_t {
  QuantMin,
  Quant05,
  Quant10,
  Quant25,
  QuantMedian,
  Quant75,
  Quant90,
  Quant95,
  QuantMax,
  Mean,
  Sd,
  Variance,
  Vcoef,
  Mad,
  Meanse,
  Skew,
  Kurt,
  Iqr,
  Range,
};

inline constexpr std::size_t kStatisticCount = 19;

std::string_view to_string(Statistic stat) noexcept;
std::optional<Statistic> parse_statistic(std::string_view name) noexcept;

using SeriesSummary = std::array<double, kStatisticCount>;

inline double get(const SeriesSummary& s, Statistic stat) noexcept {
  return s[static_cast<std::size_t>(stat)];
}

/// Linear-interpolation quantile of an ascending-sorted, non-empty range.
double quantile_sorted(std::span<const double> sorted, double p) noexcept;

/// All 19 statistics of a non-empty series.
///
/// Quantiles interpolate linearly between order statistics; sd and variance
/// use n - 1; skew is the adjusted Fisher-Pearson coefficient and kurt the
/// bias-adjusted excess kurtosis. Degenerate cases are 0: sd/variance/meanse
/// for n = 1, vcoef for mean 0, skew for n < 3 or zero spread, kurt for
/// n < 4 or zero spread.
SeriesSummary summarize_series(std::span<const double> values);

}  // namespace trajzone
