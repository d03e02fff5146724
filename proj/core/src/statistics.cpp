#include "trajzone/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace trajzone {
namespace {

constexpr std::string_view kNames[kStatisticCount] = {
    "quant_min", "quant_05", "quant_10", "quant_25", "quant_median", "quant_75", "quant_90",
    "quant_95",  "quant_max", "mean",    "sd",       "variance",     "vcoef",    "mad",
    "meanse",    "skew",     "kurt",     "iqr",      "range"};

}  // namespace

std::string_view to_string(Statistic stat) noexcept {
  return kNames[static_cast<std::size_t>(stat)];
}

std::optional<Statistic> parse_statistic(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kStatisticCount; ++i)
    if (kNames[i] == name) return static_cast<Statistic>(i);
  return std::nullopt;
}

double quantile_sorted(std::span<const double> sorted, double p) noexcept {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double h = (static_cast<double>(n) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= n) return sorted[n - 1];
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

SeriesSummary summarize_series(std::span<const double> values) {
  SeriesSummary out{};
  const std::size_t n = values.size();
  if (n == 0) return out;
  auto set = [&out](Statistic s, double v) { out[static_cast<std::size_t>(s)] = v; };

  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());

  const double q25 = quantile_sorted(sorted, 0.25);
  const double median = quantile_sorted(sorted, 0.5);
  const double q75 = quantile_sorted(sorted, 0.75);
  set(Statistic::QuantMin, sorted.front());
  set(Statistic::Quant05, quantile_sorted(sorted, 0.05));
  set(Statistic::Quant10, quantile_sorted(sorted, 0.10));
  set(Statistic::Quant25, q25);
  set(Statistic::QuantMedian, median);
  set(Statistic::Quant75, q75);
  set(Statistic::Quant90, quantile_sorted(sorted, 0.90));
  set(Statistic::Quant95, quantile_sorted(sorted, 0.95));
  set(Statistic::QuantMax, sorted.back());
  set(Statistic::Iqr, q75 - q25);
  set(Statistic::Range, sorted.back() - sorted.front());

  const double dn = static_cast<double>(n);
  double sum = 0.0;
  for (double v : sorted) sum += v;
  double mean = sum / dn;
  // Corrected two-pass mean; matters for large offsets with small spread.
  double residual = 0.0;
  for (double v : sorted) residual += v - mean;
  mean += residual / dn;
  set(Statistic::Mean, mean);

  // Constant series: every spread-based statistic is exactly 0.
  if (sorted.front() == sorted.back()) return out;

  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : values) {
    const double d = v - mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  const double ss = m2;
  m2 /= dn;
  m3 /= dn;
  m4 /= dn;

  std::vector<double> deviations(n);
  std::transform(sorted.begin(), sorted.end(), deviations.begin(),
                 [median](double v) { return std::abs(v - median); });
  std::sort(deviations.begin(), deviations.end());
  set(Statistic::Mad, quantile_sorted(deviations, 0.5));

  if (n < 2) return out;
  const double variance = ss / (dn - 1.0);
  const double sd = std::sqrt(variance);
  set(Statistic::Variance, variance);
  set(Statistic::Sd, sd);
  set(Statistic::Meanse, sd / std::sqrt(dn));
  set(Statistic::Vcoef, mean != 0.0 ? sd / mean : 0.0);

  if (m2 > 0.0 && n >= 3) {
    const double g1 = m3 / std::pow(m2, 1.5);
    set(Statistic::Skew, g1 * std::sqrt(dn * (dn - 1.0)) / (dn - 2.0));
  }
  if (m2 > 0.0 && n >= 4) {
    const double g2 = m4 / (m2 * m2) - 3.0;
    set(Statistic::Kurt, (dn - 1.0) / ((dn - 2.0) * (dn - 3.0)) * ((dn + 1.0) * g2 + 6.0));
  }
  return out;
}

}  // namespace trajzone
