#include "patchdct/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "patchdct/rng.hpp"

namespace patchdct {

ImageTensor synthetic_image(std::uint64_t seed, const Shape& shape) {
  constexpr int kWaves = 6;
  constexpr double kMaxFrequency = 3.0;
  constexpr double kWaveAmplitude = 0.06;
  constexpr double kNoiseAmplitude = 0.03;

  Rng rng(seed);
  ImageTensor image(shape, 0.5);
  for (std::size_t c = 0; c < shape.channels; ++c) {
    for (int k = 0; k < kWaves; ++k) {
      const double fx = rng.uniform(0.0, kMaxFrequency);
      const double fy = rng.uniform(0.0, kMaxFrequency);
      const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
      for (std::size_t h = 0; h < shape.height; ++h) {
        for (std::size_t w = 0; w < shape.width; ++w) {
          const double arg = 2.0 * std::numbers::pi *
                                 (fx * static_cast<double>(w) / static_cast<double>(shape.width) +
                                  fy * static_cast<double>(h) / static_cast<double>(shape.height)) +
                             phase;
          image.at(h, w, c) += kWaveAmplitude * std::cos(arg);
        }
      }
    }
  }
  for (double& v : image.values()) v = std::clamp(v + kNoiseAmplitude * rng.uniform(-1.0, 1.0), 0.02, 0.98);
  return image;
}

}  // namespace patchdct
