#ifndef PATCHDCT_IMAGE_HPP
#define PATCHDCT_IMAGE_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace patchdct {

struct Shape {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t channels = 0;

  std::size_t size() const { return width * height * channels; }
  bool operator==(const Shape&) const = default;
  std::string to_string() const;
};

/// W x H x C intensities, stored row-major in (h, w, c) order.
///
/// Values are nominally in [0, 1]; search tensors may leave that range and
/// are clipped before they reach a classifier.
class ImageTensor {
 public:
  ImageTensor() = default;
  explicit ImageTensor(Shape shape, double fill = 0.0);
  ImageTensor(Shape shape, std::vector<double> data);

  const Shape& shape() const { return shape_; }
  std::size_t width() const { return shape_.width; }
  std::size_t height() const { return shape_.height; }
  std::size_t channels() const { return shape_.channels; }
  std::size_t size() const { return data_.size(); }

  std::size_t index(std::size_t h, std::size_t w, std::size_t c) const {
    return (h * shape_.width + w) * shape_.channels + c;
  }
  double& at(std::size_t h, std::size_t w, std::size_t c) { return data_[index(h, w, c)]; }
  double at(std::size_t h, std::size_t w, std::size_t c) const { return data_[index(h, w, c)]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool operator==(const ImageTensor&) const = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

/// Clamp every value to [0, 1].
void clip_unit(std::span<double> values);
ImageTensor clipped(ImageTensor image);

/// Patch decomposition geometry: rows x cols patches of d x d x C.
struct GridLayout {
  std::size_t patch_size = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t channels = 0;

  std::size_t patch_count() const { return rows * cols; }
  std::size_t values_per_patch() const { return patch_size * patch_size * channels; }
  Shape image_shape() const { return {cols * patch_size, rows * patch_size, channels}; }
  bool operator==(const GridLayout&) const = default;

  /// Layout of `shape` cut into d x d patches. Throws DimensionMismatch.
  static GridLayout for_image(const Shape& shape, std::size_t patch_size);
};

/// Non-overlapping patches in row-major order. Each patch is stored
/// (s, t, c) row-major: s is the row inside the patch, t the column.
struct PatchGrid {
  GridLayout layout;
  std::vector<std::vector<double>> patches;
};

PatchGrid crop_patches(const ImageTensor& image, std::size_t patch_size);
ImageTensor assemble_patches(const PatchGrid& grid);

/// Population variance of each patch, joint over all d*d*C values.
std::vector<double> patch_variances(const PatchGrid& grid);

/// Crop the centered width x height window.
ImageTensor center_crop(const ImageTensor& image, std::size_t width, std::size_t height);

}  // namespace patchdct

#endif  // PATCHDCT_IMAGE_HPP
