#include "patchdct/frequency.hpp"

#include <cmath>
#include <numbers>

#include "patchdct/error.hpp"

namespace patchdct {

DctBasis::DctBasis(std::size_t d) : d_(d), matrix_(d * d) {
  if (d == 0) throw DimensionMismatch("DCT size must be positive");
  const double n = static_cast<double>(d);
  for (std::size_t u = 0; u < d; ++u) {
    const double scale = u == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
    for (std::size_t s = 0; s < d; ++s) {
      matrix_[u * d + s] =
          scale * std::cos((2.0 * static_cast<double>(s) + 1.0) * static_cast<double>(u) * std::numbers::pi / (2.0 * n));
    }
  }
}

void DctBasis::forward_plane(const double* in, double* out, std::size_t stride, std::size_t row_stride) const {
  const std::size_t d = d_;
  std::vector<double> tmp(d * d, 0.0);
  // tmp = B X
  for (std::size_t u = 0; u < d; ++u) {
    for (std::size_t s = 0; s < d; ++s) {
      const double b = matrix_[u * d + s];
      const double* row = in + s * row_stride;
      for (std::size_t t = 0; t < d; ++t) tmp[u * d + t] += b * row[t * stride];
    }
  }
  // out = tmp B^T
  for (std::size_t u = 0; u < d; ++u) {
    for (std::size_t v = 0; v < d; ++v) {
      double acc = 0.0;
      for (std::size_t t = 0; t < d; ++t) acc += tmp[u * d + t] * matrix_[v * d + t];
      out[u * row_stride + v * stride] = acc;
    }
  }
}

void DctBasis::inverse_plane(const double* in, double* out, std::size_t stride, std::size_t row_stride) const {
  const std::size_t d = d_;
  std::vector<double> tmp(d * d, 0.0);
  std::vector<char> live(d, 0);
  // tmp = C B
  for (std::size_t u = 0; u < d; ++u) {
    const double* row = in + u * row_stride;
    for (std::size_t v = 0; v < d; ++v) {
      const double c = row[v * stride];
      if (c == 0.0) continue;
      live[u] = 1;
      const double* basis_row = &matrix_[v * d];
      for (std::size_t t = 0; t < d; ++t) tmp[u * d + t] += c * basis_row[t];
    }
  }
  // out = B^T tmp
  for (std::size_t s = 0; s < d; ++s) {
    double* out_row = out + s * row_stride;
    for (std::size_t t = 0; t < d; ++t) out_row[t * stride] = 0.0;
    for (std::size_t u = 0; u < d; ++u) {
      if (!live[u]) continue;
      const double b = matrix_[u * d + s];
      for (std::size_t t = 0; t < d; ++t) out_row[t * stride] += b * tmp[u * d + t];
    }
  }
}

BlockTransform::BlockTransform(const Shape& shape, std::size_t patch_size)
    : shape_(shape), layout_(GridLayout::for_image(shape, patch_size)), basis_(patch_size) {}

void BlockTransform::forward(std::span<const double> pixels, std::span<double> coefficients) const {
  if (pixels.size() != shape_.size() || coefficients.size() != shape_.size()) {
    throw ShapeMismatch("block transform buffer size mismatch");
  }
  const std::size_t d = layout_.patch_size;
  const std::size_t stride = shape_.channels;
  const std::size_t row_stride = shape_.width * shape_.channels;
  for (std::size_t row = 0; row < layout_.rows; ++row) {
    for (std::size_t col = 0; col < layout_.cols; ++col) {
      const std::size_t base = (row * d * shape_.width + col * d) * shape_.channels;
      for (std::size_t c = 0; c < shape_.channels; ++c) {
        basis_.forward_plane(pixels.data() + base + c, coefficients.data() + base + c, stride, row_stride);
      }
    }
  }
}

void BlockTransform::inverse(std::span<const double> coefficients, std::span<double> pixels) const {
  if (pixels.size() != shape_.size() || coefficients.size() != shape_.size()) {
    throw ShapeMismatch("block transform buffer size mismatch");
  }
  const std::size_t d = layout_.patch_size;
  const std::size_t stride = shape_.channels;
  const std::size_t row_stride = shape_.width * shape_.channels;
  for (std::size_t row = 0; row < layout_.rows; ++row) {
    for (std::size_t col = 0; col < layout_.cols; ++col) {
      const std::size_t base = (row * d * shape_.width + col * d) * shape_.channels;
      for (std::size_t c = 0; c < shape_.channels; ++c) {
        basis_.inverse_plane(coefficients.data() + base + c, pixels.data() + base + c, stride, row_stride);
      }
    }
  }
}

DctMatrix block_dct(const PatchGrid& grid) {
  // Patch storage and image storage share the (s, t, c) element order, so
  // the image-level transform is reused on the assembled grid.
  const ImageTensor image = assemble_patches(grid);
  return image_dct(image, grid.layout.patch_size);
}

PatchGrid block_idct(const DctMatrix& dct) {
  return crop_patches(image_idct(dct), dct.layout.patch_size);
}

DctMatrix image_dct(const ImageTensor& image, std::size_t patch_size) {
  BlockTransform transform(image.shape(), patch_size);
  ImageTensor coefficients(image.shape());
  transform.forward(image.values(), coefficients.values());
  return {transform.layout(), std::move(coefficients)};
}

ImageTensor image_idct(const DctMatrix& dct) {
  if (dct.coefficients.shape() != dct.layout.image_shape()) {
    throw InconsistentLayout("DCT matrix shape does not match its layout");
  }
  BlockTransform transform(dct.coefficients.shape(), dct.layout.patch_size);
  ImageTensor pixels(dct.coefficients.shape());
  transform.inverse(dct.coefficients.values(), pixels.values());
  return pixels;
}

}  // namespace patchdct
