#include "patchdct/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "patchdct/error.hpp"

namespace patchdct {

static_assert(std::endian::native == std::endian::little, "raw tensor I/O assumes a little-endian host");

ImageTensor load_png(const std::filesystem::path& path) {
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.c_str())) {
    throw IoError("cannot read PNG " + path.string() + ": " + png.message);
  }
  const bool color = (png.format & PNG_FORMAT_FLAG_COLOR) != 0;
  png.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const std::size_t channels = color ? 3 : 1;
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(png));
  if (!png_image_finish_read(&png, nullptr, buffer.data(), 0, nullptr)) {
    std::string message = png.message;
    png_image_free(&png);
    throw IoError("cannot decode PNG " + path.string() + ": " + message);
  }
  std::vector<double> data(buffer.size());
  std::transform(buffer.begin(), buffer.end(), data.begin(), [](std::uint8_t v) { return v / 255.0; });
  return ImageTensor({png.width, png.height, channels}, std::move(data));
}

void save_png(const ImageTensor& image, const std::filesystem::path& path) {
  if (image.channels() != 1 && image.channels() != 3) {
    throw IoError("PNG output needs 1 or 3 channels, got " + std::to_string(image.channels()));
  }
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width());
  png.height = static_cast<png_uint_32>(image.height());
  png.format = image.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> buffer(image.size());
  std::transform(image.values().begin(), image.values().end(), buffer.begin(), [](double v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
  });
  if (!png_image_write_to_file(&png, path.c_str(), 0, buffer.data(), 0, nullptr)) {
    throw IoError("cannot write PNG " + path.string() + ": " + png.message);
  }
}

namespace {

constexpr std::array<char, 4> kMagic{'I', 'M', 'G', 'T'};

}  // namespace

ImageTensor load_raw_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::array<char, 4> magic{};
  std::uint32_t dims[3] = {0, 0, 0};
  in.read(magic.data(), magic.size());
  in.read(reinterpret_cast<char*>(dims), sizeof(dims));
  if (!in || magic != kMagic) throw IoError("bad raw tensor header in " + path.string());
  const Shape shape{dims[0], dims[1], dims[2]};
  std::vector<double> data(shape.size());
  in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size() * sizeof(double)));
  if (!in) throw IoError("truncated raw tensor " + path.string());
  return ImageTensor(shape, std::move(data));
}

void save_raw_tensor(const ImageTensor& image, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  const std::uint32_t dims[3] = {static_cast<std::uint32_t>(image.width()),
                                 static_cast<std::uint32_t>(image.height()),
                                 static_cast<std::uint32_t>(image.channels())};
  out.write(kMagic.data(), kMagic.size());
  out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
  out.write(reinterpret_cast<const char*>(image.values().data()),
            static_cast<std::streamsize>(image.size() * sizeof(double)));
  if (!out) throw IoError("failed writing " + path.string());
}

ImageTensor load_image(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".png" || ext == ".PNG") return load_png(path);
  if (ext == ".imgt") return load_raw_tensor(path);
  throw IoError("unsupported image format: " + path.string());
}

}  // namespace patchdct
