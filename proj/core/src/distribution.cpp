#include "kces/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>
#include <fmt/os.h>

#include "kces/error.hpp"
#include "kces/random.hpp"

namespace kces {
namespace {

double quantile(std::vector<double> sorted, double q) {
  std::sort(sorted.begin(), sorted.end());
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::vector<double> minmax_normalize(std::span<const double> values) {
  std::vector<double> out(values.size(), 0.0);
  if (values.empty()) return out;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double range = *hi - *lo;
  if (!(range > 0.0)) return out;
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - *lo) / range;
  return out;
}

double silverman_bandwidth(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) return kMinBandwidth;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(n - 1));
  std::vector<double> copy(values.begin(), values.end());
  const double iqr = quantile(copy, 0.75) - quantile(copy, 0.25);
  double spread = sd;
  if (iqr > 0.0) spread = std::min(sd, iqr / 1.34);
  const double h = 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
  return std::max(h, kMinBandwidth);
}

KdeCurve kde(std::span<const double> values, double bandwidth, std::size_t points) {
  if (!(bandwidth > 0.0)) throw ConfigError("KDE bandwidth must be positive");
  if (points < 2) throw ConfigError("KDE needs at least two evaluation points");
  KdeCurve curve;
  curve.bandwidth = bandwidth;
  const double lo = -4.0 * bandwidth;
  const double hi = 1.0 + 4.0 * bandwidth;
  const double norm = 1.0 / (static_cast<double>(values.size()) * bandwidth * std::sqrt(2.0 * std::numbers::pi));
  for (std::size_t i = 0; i < points; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    double sum = 0.0;
    for (double v : values) {
      const double z = (x - v) / bandwidth;
      sum += std::exp(-0.5 * z * z);
    }
    curve.x.push_back(x);
    curve.density.push_back(values.empty() ? 0.0 : sum * norm);
  }
  return curve;
}

Histogram histogram01(std::span<const double> values, std::size_t bins) {
  if (bins == 0) throw ConfigError("histogram needs at least one bin");
  Histogram h;
  h.counts.assign(bins, 0);
  for (std::size_t b = 0; b <= bins; ++b) h.edges.push_back(static_cast<double>(b) / static_cast<double>(bins));
  for (double v : values) {
    auto b = static_cast<std::size_t>(std::floor(std::clamp(v, 0.0, 1.0) * static_cast<double>(bins)));
    ++h.counts[std::min(b, bins - 1)];
  }
  return h;
}

double trapezoid(std::span<const double> x, std::span<const double> y) {
  double sum = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) sum += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  return sum;
}

DistributionExport score_distribution(const KcScoreTable& table, std::string variant, std::size_t samples,
                                      std::uint64_t seed) {
  if (table.entries.empty()) throw ConfigError("cannot build a distribution from an empty score table");
  DistributionExport dist;
  dist.variant = std::move(variant);
  std::vector<Edge> all;
  for (const auto& [e, entry] : table.entries) all.push_back(e);
  if (samples == 0 || samples >= all.size()) {
    dist.truncated_sample = samples > all.size();
    dist.edges = all;
  } else {
    Rng rng(seed);
    dist.edges = sample_without_replacement(all, samples, rng);
    std::sort(dist.edges.begin(), dist.edges.end());
  }
  for (const auto& e : dist.edges) dist.raw_scores.push_back(table.entries.at(e).score);
  dist.sample_size = dist.edges.size();
  dist.normalized = minmax_normalize(dist.raw_scores);
  dist.curve = kde(dist.normalized, silverman_bandwidth(dist.normalized));
  dist.hist = histogram01(dist.normalized);
  return dist;
}

double kde_mode(const KdeCurve& curve) {
  const auto it = std::max_element(curve.density.begin(), curve.density.end());
  return curve.x[static_cast<std::size_t>(it - curve.density.begin())];
}

void write_distribution(const std::filesystem::path& path, const DistributionExport& dist) {
  auto out = fmt::output_file(path.string());
  out.print("# sample_size\t{}\n", dist.sample_size);
  out.print("# bandwidth\t{}\n", dist.curve.bandwidth);
  out.print("section,index,x,y\n");
  for (std::size_t i = 0; i < dist.raw_scores.size(); ++i) {
    out.print("score,{},{},{}\n", i, dist.raw_scores[i], dist.normalized[i]);
  }
  for (std::size_t i = 0; i < dist.curve.x.size(); ++i) {
    out.print("kde,{},{},{}\n", i, dist.curve.x[i], dist.curve.density[i]);
  }
  for (std::size_t i = 0; i < dist.hist.counts.size(); ++i) {
    out.print("hist,{},{},{}\n", i, dist.hist.edges[i], dist.hist.counts[i]);
  }
}

}  // namespace kces
