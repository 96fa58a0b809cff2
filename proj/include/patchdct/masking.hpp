#ifndef PATCHDCT_MASKING_HPP
#define PATCHDCT_MASKING_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "patchdct/image.hpp"

namespace patchdct {

/// 0/1 indicator selecting the r x r lowest-frequency corner of every patch.
class BinaryMask {
 public:
  BinaryMask(const GridLayout& layout, std::size_t order);

  const GridLayout& layout() const { return layout_; }
  std::size_t order() const { return order_; }
  /// Dimension reduction ratio r / d.
  double rho() const;
  std::size_t ones_per_patch() const { return order_ * order_; }
  bool contains(std::size_t u, std::size_t v) const { return u < order_ && v < order_; }

  /// Indicator value at image position (h, w), identical for every channel.
  bool at(std::size_t h, std::size_t w) const;

 private:
  GridLayout layout_;
  std::size_t order_;
};

/// Throws RangeError unless 1 <= r <= d.
BinaryMask lowfreq_mask(const GridLayout& layout, std::size_t order);

/// q'_i = q_i / max(Q). Throws DegenerateInput when max(Q) == 0 and
/// RangeError on empty or negative input.
std::vector<double> normalize_variances(std::span<const double> variances);

/// Per-patch weighted mask M = alpha * q'_i * indicator, replicated over channels.
/// Stored image-shaped, congruent to DctMatrix::coefficients.
class WeightMask {
 public:
  WeightMask(Shape shape, std::vector<double> values, double alpha,
             std::vector<double> normalized_variances);

  /// M = 1 everywhere (full-dimensional pixel search).
  static WeightMask all_ones(const Shape& shape);

  const Shape& shape() const { return shape_; }
  double alpha() const { return alpha_; }
  const std::vector<double>& normalized_variances() const { return normalized_variances_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t support_size() const;

 private:
  Shape shape_;
  std::vector<double> values_;
  double alpha_;
  std::vector<double> normalized_variances_;
};

/// Throws LengthMismatch when |Q'| differs from the patch count and
/// RangeError when alpha <= 0.
WeightMask weight_mask(std::span<const double> normalized_variances, const BinaryMask& mask,
                       double alpha);

}  // namespace patchdct

#endif  // PATCHDCT_MASKING_HPP
