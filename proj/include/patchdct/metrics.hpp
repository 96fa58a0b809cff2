#ifndef PATCHDCT_METRICS_HPP
#define PATCHDCT_METRICS_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "patchdct/image.hpp"

namespace patchdct {

inline constexpr double kPsnrCap = 99.0;
inline constexpr double kDefaultEpsilonThreshold = 5.0;

double l2_distortion(const ImageTensor& x, const ImageTensor& y);
/// 10 log10(1 / MSE) for data range 1; kPsnrCap for identical images.
double psnr(const ImageTensor& x, const ImageTensor& y);
/// Mean SSIM, 11x11 Gaussian window (sigma 1.5), K1 = 0.01, K2 = 0.03,
/// data range 1, valid window positions only, averaged over channels.
double ssim(const ImageTensor& x, const ImageTensor& y);

/// Per-image outcome as seen by the metrics layer.
struct ImageOutcome {
  bool succeeded = false;
  double l2 = 0.0;
  double psnr = 0.0;
  double ssim = 0.0;
  std::uint64_t queries = 0;
};

/// Fraction of outcomes that succeeded within `budget` queries with l2 <= eps.
double success_rate(std::span<const ImageOutcome> outcomes, double epsilon_threshold, std::uint64_t budget);

struct SummaryStats {
  double mean = 0.0;
  double median = 0.0;
  bool operator==(const SummaryStats&) const = default;
};

struct MetricReport {
  std::size_t total = 0;
  std::size_t succeeded = 0;
  SummaryStats l2;
  SummaryStats psnr;
  SummaryStats ssim;
  bool operator==(const MetricReport&) const = default;
};

/// Lower-middle element for even counts. NaN for empty input.
double lower_median(std::vector<double> values);
double mean(std::span<const double> values);

/// Distortion statistics over the succeeded outcomes.
MetricReport aggregate(std::span<const ImageOutcome> outcomes);

}  // namespace patchdct

#endif  // PATCHDCT_METRICS_HPP
