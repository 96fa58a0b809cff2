#include "patchdct/masking.hpp"

#include <algorithm>
#include <cmath>

#include "patchdct/error.hpp"

namespace patchdct {

BinaryMask::BinaryMask(const GridLayout& layout, std::size_t order) : layout_(layout), order_(order) {
  if (order < 1 || order > layout.patch_size) {
    throw RangeError("low-frequency order " + std::to_string(order) + " outside [1, " +
                     std::to_string(layout.patch_size) + "]");
  }
}

double BinaryMask::rho() const {
  return static_cast<double>(order_) / static_cast<double>(layout_.patch_size);
}

bool BinaryMask::at(std::size_t h, std::size_t w) const {
  return contains(h % layout_.patch_size, w % layout_.patch_size);
}

BinaryMask lowfreq_mask(const GridLayout& layout, std::size_t order) { return BinaryMask(layout, order); }

std::vector<double> normalize_variances(std::span<const double> variances) {
  if (variances.empty()) throw RangeError("empty variance sequence");
  double peak = 0.0;
  for (double q : variances) {
    if (!(q >= 0.0) || !std::isfinite(q)) throw RangeError("variances must be finite and non-negative");
    peak = std::max(peak, q);
  }
  if (peak == 0.0) throw DegenerateInput("all patch variances are zero (constant image)");
  std::vector<double> out(variances.size());
  std::transform(variances.begin(), variances.end(), out.begin(), [peak](double q) { return q / peak; });
  return out;
}

WeightMask::WeightMask(Shape shape, std::vector<double> values, double alpha,
                       std::vector<double> normalized_variances)
    : shape_(shape),
      values_(std::move(values)),
      alpha_(alpha),
      normalized_variances_(std::move(normalized_variances)) {
  if (values_.size() != shape_.size()) throw ShapeMismatch("weight mask size does not match its shape");
}

WeightMask WeightMask::all_ones(const Shape& shape) {
  return WeightMask(shape, std::vector<double>(shape.size(), 1.0), 1.0, {});
}

std::size_t WeightMask::support_size() const {
  return static_cast<std::size_t>(std::count_if(values_.begin(), values_.end(), [](double v) { return v != 0.0; }));
}

WeightMask weight_mask(std::span<const double> normalized_variances, const BinaryMask& mask, double alpha) {
  const GridLayout& layout = mask.layout();
  if (normalized_variances.size() != layout.patch_count()) {
    throw LengthMismatch("got " + std::to_string(normalized_variances.size()) + " variances for " +
                         std::to_string(layout.patch_count()) + " patches");
  }
  if (!(alpha > 0.0)) throw RangeError("alpha must be positive");
  const Shape shape = layout.image_shape();
  const std::size_t d = layout.patch_size;
  std::vector<double> values(shape.size(), 0.0);
  for (std::size_t row = 0; row < layout.rows; ++row) {
    for (std::size_t col = 0; col < layout.cols; ++col) {
      const double weight = alpha * normalized_variances[row * layout.cols + col];
      for (std::size_t u = 0; u < mask.order(); ++u) {
        for (std::size_t v = 0; v < mask.order(); ++v) {
          const std::size_t pixel = ((row * d + u) * shape.width + col * d + v) * shape.channels;
          std::fill_n(values.begin() + pixel, shape.channels, weight);
        }
      }
    }
  }
  return WeightMask(shape, std::move(values), alpha,
                    std::vector<double>(normalized_variances.begin(), normalized_variances.end()));
}

}  // namespace patchdct
