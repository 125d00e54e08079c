#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "kces/kc_score.hpp"

namespace kces {

/// Maps the observed minimum to 0 and maximum to 1. A constant input maps to 0.
std::vector<double> minmax_normalize(std::span<const double> values);

inline constexpr double kMinBandwidth = 2.0 / 255.0;

/// Silverman's rule 0.9 min(sd, IQR / 1.34) n^(-1/5), floored at kMinBandwidth.
double silverman_bandwidth(std::span<const double> values);

struct KdeCurve {
  std::vector<double> x;
  std::vector<double> density;
  double bandwidth = 0.0;
};

/// Gaussian KDE on `points` evenly spaced locations over [-4h, 1 + 4h].
KdeCurve kde(std::span<const double> values, double bandwidth, std::size_t points = 256);

struct Histogram {
  std::vector<double> edges;  // bins + 1 edges over [0, 1]
  std::vector<std::size_t> counts;
};

Histogram histogram01(std::span<const double> values, std::size_t bins = 50);

/// Trapezoid integral of a sampled curve.
double trapezoid(std::span<const double> x, std::span<const double> y);

struct DistributionExport {
  std::string variant;
  std::vector<Edge> edges;
  std::vector<double> raw_scores;
  std::vector<double> normalized;
  KdeCurve curve;
  Histogram hist;
  std::size_t sample_size = 0;
  bool truncated_sample = false;  // fewer edges than requested
};

/// Uniform sample of `samples` table entries (all when the table is smaller),
/// normalised, smoothed and binned. Sampled edges are listed in (u, v) order.
DistributionExport score_distribution(const KcScoreTable& table, std::string variant, std::size_t samples,
                                      std::uint64_t seed);

/// Location of the highest KDE value.
double kde_mode(const KdeCurve& curve);

/// Tidy CSV "section,index,x,y": score rows (raw, normalised), kde rows
/// (location, density) and hist rows (left edge, count).
void write_distribution(const std::filesystem::path& path, const DistributionExport& dist);

}  // namespace kces
