#ifndef PATCHDCT_FREQUENCY_HPP
#define PATCHDCT_FREQUENCY_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "patchdct/image.hpp"

namespace patchdct {

/// Orthonormal DCT-II basis of size d: basis(u, s) = a(u) cos((2s+1) u pi / 2d),
/// with a(0) = sqrt(1/d) and a(u) = sqrt(2/d) otherwise. Rows are basis vectors.
class DctBasis {
 public:
  explicit DctBasis(std::size_t d);

  std::size_t size() const { return d_; }
  double operator()(std::size_t u, std::size_t s) const { return matrix_[u * d_ + s]; }

  /// 2D transform of one d x d plane with stride `stride` between elements
  /// of a row and `row_stride` between rows. `in` and `out` use the same strides.
  void forward_plane(const double* in, double* out, std::size_t stride, std::size_t row_stride) const;
  void inverse_plane(const double* in, double* out, std::size_t stride, std::size_t row_stride) const;

 private:
  std::size_t d_;
  std::vector<double> matrix_;
};

/// Block DCT coefficients of an image: each d x d block of the image-shaped
/// array holds the coefficients (u, v) of the corresponding patch, per channel.
struct DctMatrix {
  GridLayout layout;
  ImageTensor coefficients;
};

/// Per-patch, per-channel orthonormal 2D DCT-II.
DctMatrix block_dct(const PatchGrid& grid);
PatchGrid block_idct(const DctMatrix& dct);

DctMatrix image_dct(const ImageTensor& image, std::size_t patch_size);
ImageTensor image_idct(const DctMatrix& dct);

/// Block transform working on flat image-shaped buffers, for the hot path.
class BlockTransform {
 public:
  BlockTransform(const Shape& shape, std::size_t patch_size);

  const GridLayout& layout() const { return layout_; }
  const Shape& shape() const { return shape_; }

  void forward(std::span<const double> pixels, std::span<double> coefficients) const;
  /// Zero coefficient rows are skipped, so sparse (masked) inputs are cheap.
  void inverse(std::span<const double> coefficients, std::span<double> pixels) const;

 private:
  Shape shape_;
  GridLayout layout_;
  DctBasis basis_;
};

}  // namespace patchdct

#endif  // PATCHDCT_FREQUENCY_HPP
