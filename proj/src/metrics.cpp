#include "patchdct/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "patchdct/error.hpp"

namespace patchdct {

namespace {

void require_same_shape(const ImageTensor& x, const ImageTensor& y) {
  if (x.shape() != y.shape()) {
    throw ShapeMismatch("images differ in shape: " + x.shape().to_string() + " vs " + y.shape().to_string());
  }
}

double squared_error(const ImageTensor& x, const ImageTensor& y) {
  require_same_shape(x, y);
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x.values()[i] - y.values()[i];
    sum += d * d;
  }
  return sum;
}

constexpr std::size_t kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

std::array<double, kWindow> gaussian_window() {
  std::array<double, kWindow> w{};
  const double center = (kWindow - 1) / 2.0;
  for (std::size_t i = 0; i < kWindow; ++i) {
    const double t = static_cast<double>(i) - center;
    w[i] = std::exp(-t * t / (2.0 * kSigma * kSigma));
  }
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& v : w) v /= total;
  return w;
}

// Separable 'valid' filtering of one channel plane.
std::vector<double> filter_valid(const std::vector<double>& plane, std::size_t width, std::size_t height,
                                 const std::array<double, kWindow>& w) {
  const std::size_t out_w = width - kWindow + 1;
  const std::size_t out_h = height - kWindow + 1;
  std::vector<double> rows(height * out_w);
  for (std::size_t h = 0; h < height; ++h) {
    for (std::size_t x = 0; x < out_w; ++x) {
      double acc = 0.0;
      for (std::size_t k = 0; k < kWindow; ++k) acc += w[k] * plane[h * width + x + k];
      rows[h * out_w + x] = acc;
    }
  }
  std::vector<double> out(out_h * out_w);
  for (std::size_t y = 0; y < out_h; ++y) {
    for (std::size_t x = 0; x < out_w; ++x) {
      double acc = 0.0;
      for (std::size_t k = 0; k < kWindow; ++k) acc += w[k] * rows[(y + k) * out_w + x];
      out[y * out_w + x] = acc;
    }
  }
  return out;
}

}  // namespace

double l2_distortion(const ImageTensor& x, const ImageTensor& y) { return std::sqrt(squared_error(x, y)); }

double psnr(const ImageTensor& x, const ImageTensor& y) {
  const double mse = squared_error(x, y) / static_cast<double>(x.size());
  if (mse == 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(1.0 / mse));
}

double ssim(const ImageTensor& x, const ImageTensor& y) {
  require_same_shape(x, y);
  if (x.width() < kWindow || x.height() < kWindow) {
    throw ImageTooSmall("SSIM needs at least " + std::to_string(kWindow) + "x" + std::to_string(kWindow) +
                        " pixels, got " + x.shape().to_string());
  }
  const auto w = gaussian_window();
  const std::size_t width = x.width();
  const std::size_t height = x.height();
  const std::size_t pixels = width * height;
  double total = 0.0;
  for (std::size_t c = 0; c < x.channels(); ++c) {
    std::vector<double> a(pixels), b(pixels), aa(pixels), bb(pixels), ab(pixels);
    for (std::size_t p = 0; p < pixels; ++p) {
      a[p] = x.values()[p * x.channels() + c];
      b[p] = y.values()[p * x.channels() + c];
      aa[p] = a[p] * a[p];
      bb[p] = b[p] * b[p];
      ab[p] = a[p] * b[p];
    }
    const auto mu_a = filter_valid(a, width, height, w);
    const auto mu_b = filter_valid(b, width, height, w);
    const auto e_aa = filter_valid(aa, width, height, w);
    const auto e_bb = filter_valid(bb, width, height, w);
    const auto e_ab = filter_valid(ab, width, height, w);
    double sum = 0.0;
    for (std::size_t i = 0; i < mu_a.size(); ++i) {
      const double var_a = e_aa[i] - mu_a[i] * mu_a[i];
      const double var_b = e_bb[i] - mu_b[i] * mu_b[i];
      const double cov = e_ab[i] - mu_a[i] * mu_b[i];
      sum += ((2.0 * mu_a[i] * mu_b[i] + kC1) * (2.0 * cov + kC2)) /
             ((mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + kC1) * (var_a + var_b + kC2));
    }
    total += sum / static_cast<double>(mu_a.size());
  }
  return total / static_cast<double>(x.channels());
}

double success_rate(std::span<const ImageOutcome> outcomes, double epsilon_threshold, std::uint64_t budget) {
  if (outcomes.empty()) throw RangeError("success rate of an empty result set");
  const auto hits = std::count_if(outcomes.begin(), outcomes.end(), [&](const ImageOutcome& o) {
    return o.succeeded && o.l2 <= epsilon_threshold && o.queries <= budget;
  });
  return static_cast<double>(hits) / static_cast<double>(outcomes.size());
}

double lower_median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t k = (values.size() - 1) / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k), values.end());
  return values[k];
}

double mean(std::span<const double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  // Sorted summation makes the result independent of input order.
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  return std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(sorted.size());
}

MetricReport aggregate(std::span<const ImageOutcome> outcomes) {
  if (outcomes.empty()) throw RangeError("aggregate of an empty result set");
  std::vector<double> l2, psnr_values, ssim_values;
  for (const auto& o : outcomes) {
    if (!o.succeeded) continue;
    l2.push_back(o.l2);
    psnr_values.push_back(o.psnr);
    ssim_values.push_back(o.ssim);
  }
  MetricReport report;
  report.total = outcomes.size();
  report.succeeded = l2.size();
  report.l2 = {mean(l2), lower_median(l2)};
  report.psnr = {mean(psnr_values), lower_median(psnr_values)};
  report.ssim = {mean(ssim_values), lower_median(ssim_values)};
  return report;
}

}  // namespace patchdct
