#ifndef PATCHDCT_IMAGE_IO_HPP
#define PATCHDCT_IMAGE_IO_HPP

#include <filesystem>

#include "patchdct/image.hpp"

namespace patchdct {

/// 8-bit PNG, scaled to [0, 1]. Gray stays 1 channel, RGB(A) becomes 3.
ImageTensor load_png(const std::filesystem::path& path);
/// Values are clamped to [0, 1] and rounded to 8 bits.
void save_png(const ImageTensor& image, const std::filesystem::path& path);

// Raw tensor file: "IMGT", u32 W, u32 H, u32 C (little endian), then W*H*C
// little-endian f64 in (h, w, c) row-major order.
ImageTensor load_raw_tensor(const std::filesystem::path& path);
void save_raw_tensor(const ImageTensor& image, const std::filesystem::path& path);

/// Dispatch on extension: .png or .imgt.
ImageTensor load_image(const std::filesystem::path& path);

}  // namespace patchdct

#endif  // PATCHDCT_IMAGE_IO_HPP
