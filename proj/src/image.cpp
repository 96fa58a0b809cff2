#include "patchdct/image.hpp"

#include <algorithm>
#include <sstream>

#include "patchdct/error.hpp"

namespace patchdct {

std::string Shape::to_string() const {
  std::ostringstream out;
  out << width << "x" << height << "x" << channels;
  return out.str();
}

namespace {

void check_shape(const Shape& shape) {
  if (shape.width == 0 || shape.height == 0 || shape.channels == 0) {
    throw DimensionMismatch("image dimensions must be positive, got " + shape.to_string());
  }
}

}  // namespace

ImageTensor::ImageTensor(Shape shape, double fill) : shape_(shape), data_(shape.size(), fill) {
  check_shape(shape_);
}

ImageTensor::ImageTensor(Shape shape, std::vector<double> data) : shape_(shape), data_(std::move(data)) {
  check_shape(shape_);
  if (data_.size() != shape_.size()) {
    throw ShapeMismatch("data length " + std::to_string(data_.size()) + " does not match shape " +
                        shape_.to_string());
  }
}

void clip_unit(std::span<double> values) {
  for (double& v : values) v = std::clamp(v, 0.0, 1.0);
}

ImageTensor clipped(ImageTensor image) {
  clip_unit(image.values());
  return image;
}

GridLayout GridLayout::for_image(const Shape& shape, std::size_t patch_size) {
  if (patch_size == 0) throw DimensionMismatch("patch size must be positive");
  if (shape.width % patch_size != 0 || shape.height % patch_size != 0) {
    throw DimensionMismatch("image " + shape.to_string() + " is not divisible into " +
                            std::to_string(patch_size) + "x" + std::to_string(patch_size) + " patches");
  }
  return {patch_size, shape.height / patch_size, shape.width / patch_size, shape.channels};
}

PatchGrid crop_patches(const ImageTensor& image, std::size_t patch_size) {
  PatchGrid grid{GridLayout::for_image(image.shape(), patch_size), {}};
  const std::size_t d = patch_size;
  const std::size_t channels = image.channels();
  grid.patches.reserve(grid.layout.patch_count());
  for (std::size_t row = 0; row < grid.layout.rows; ++row) {
    for (std::size_t col = 0; col < grid.layout.cols; ++col) {
      std::vector<double> patch(grid.layout.values_per_patch());
      for (std::size_t s = 0; s < d; ++s) {
        const double* src = &image.values()[image.index(row * d + s, col * d, 0)];
        std::copy(src, src + d * channels, patch.begin() + s * d * channels);
      }
      grid.patches.push_back(std::move(patch));
    }
  }
  return grid;
}

ImageTensor assemble_patches(const PatchGrid& grid) {
  const GridLayout& layout = grid.layout;
  if (layout.patch_size == 0 || layout.rows == 0 || layout.cols == 0 || layout.channels == 0) {
    throw InconsistentLayout("grid layout has a zero dimension");
  }
  if (grid.patches.size() != layout.patch_count()) {
    throw InconsistentLayout("grid holds " + std::to_string(grid.patches.size()) + " patches, layout needs " +
                             std::to_string(layout.patch_count()));
  }
  ImageTensor image(layout.image_shape());
  const std::size_t d = layout.patch_size;
  const std::size_t row_values = d * layout.channels;
  for (std::size_t i = 0; i < grid.patches.size(); ++i) {
    const auto& patch = grid.patches[i];
    if (patch.size() != layout.values_per_patch()) {
      throw InconsistentLayout("patch " + std::to_string(i) + " has wrong size");
    }
    const std::size_t row = i / layout.cols;
    const std::size_t col = i % layout.cols;
    for (std::size_t s = 0; s < d; ++s) {
      std::copy(patch.begin() + s * row_values, patch.begin() + (s + 1) * row_values,
                image.values().begin() + image.index(row * d + s, col * d, 0));
    }
  }
  return image;
}

std::vector<double> patch_variances(const PatchGrid& grid) {
  if (grid.patches.empty()) throw InconsistentLayout("empty patch grid");
  std::vector<double> out;
  out.reserve(grid.patches.size());
  for (const auto& patch : grid.patches) {
    // Two passes on values shifted by the first one: well conditioned, and a
    // constant patch gives exactly zero.
    const double shift = patch.front();
    double sum = 0.0;
    for (double v : patch) sum += v - shift;
    const double mean = sum / static_cast<double>(patch.size());
    double squares = 0.0;
    for (double v : patch) squares += (v - shift - mean) * (v - shift - mean);
    out.push_back(squares / static_cast<double>(patch.size()));
  }
  return out;
}

ImageTensor center_crop(const ImageTensor& image, std::size_t width, std::size_t height) {
  if (width == 0 || height == 0 || width > image.width() || height > image.height()) {
    throw DimensionMismatch("cannot crop " + image.shape().to_string() + " to " + std::to_string(width) + "x" +
                            std::to_string(height));
  }
  const std::size_t top = (image.height() - height) / 2;
  const std::size_t left = (image.width() - width) / 2;
  ImageTensor out({width, height, image.channels()});
  for (std::size_t h = 0; h < height; ++h) {
    const double* src = &image.values()[image.index(top + h, left, 0)];
    std::copy(src, src + width * image.channels(), out.values().begin() + out.index(h, 0, 0));
  }
  return out;
}

}  // namespace patchdct
