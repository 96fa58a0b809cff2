// Independent reference computations shared by the test suites. Nothing here
// calls into the code under test beyond plain data types.
#ifndef PATCHDCT_TEST_SUPPORT_HPP
#define PATCHDCT_TEST_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "patchdct/image.hpp"
#include "patchdct/oracle.hpp"

namespace testsupport {

using patchdct::ImageTensor;
using patchdct::Shape;

inline std::vector<double> random_values(std::uint64_t seed, std::size_t n, double lo = 0.0, double hi = 1.0) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = dist(gen);
  return v;
}

inline std::vector<double> gaussian_values(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = dist(gen);
  return v;
}

inline ImageTensor random_image(std::uint64_t seed, Shape shape, double lo = 0.0, double hi = 1.0) {
  return ImageTensor(shape, random_values(seed, shape.size(), lo, hi));
}

// DCT-II straight from the definition, one d x d plane at a time.
// `patch` is (s, t, c) row-major; the result is (u, v, c) row-major.
inline std::vector<double> naive_dct(const std::vector<double>& patch, std::size_t d, std::size_t channels) {
  const double pi = std::numbers::pi;
  auto a = [d](std::size_t k) { return k == 0 ? std::sqrt(1.0 / d) : std::sqrt(2.0 / d); };
  std::vector<double> out(patch.size(), 0.0);
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t u = 0; u < d; ++u) {
      for (std::size_t v = 0; v < d; ++v) {
        double sum = 0.0;
        for (std::size_t s = 0; s < d; ++s) {
          for (std::size_t t = 0; t < d; ++t) {
            sum += patch[(s * d + t) * channels + c] * std::cos((2.0 * s + 1.0) * u * pi / (2.0 * d)) *
                   std::cos((2.0 * t + 1.0) * v * pi / (2.0 * d));
          }
        }
        out[(u * d + v) * channels + c] = a(u) * a(v) * sum;
      }
    }
  }
  return out;
}

// Inverse of naive_dct, also from the definition.
inline std::vector<double> naive_idct(const std::vector<double>& coef, std::size_t d, std::size_t channels) {
  const double pi = std::numbers::pi;
  auto a = [d](std::size_t k) { return k == 0 ? std::sqrt(1.0 / d) : std::sqrt(2.0 / d); };
  std::vector<double> out(coef.size(), 0.0);
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t s = 0; s < d; ++s) {
      for (std::size_t t = 0; t < d; ++t) {
        double sum = 0.0;
        for (std::size_t u = 0; u < d; ++u) {
          for (std::size_t v = 0; v < d; ++v) {
            sum += a(u) * a(v) * coef[(u * d + v) * channels + c] *
                   std::cos((2.0 * s + 1.0) * u * pi / (2.0 * d)) * std::cos((2.0 * t + 1.0) * v * pi / (2.0 * d));
          }
        }
        out[(s * d + t) * channels + c] = sum;
      }
    }
  }
  return out;
}

// Whole-image block DCT via the naive per-patch transform, image-shaped output.
inline std::vector<double> naive_block_dct(const ImageTensor& img, std::size_t d) {
  const Shape& sh = img.shape();
  std::vector<double> out(img.size());
  std::vector<double> patch(d * d * sh.channels);
  for (std::size_t pr = 0; pr < sh.height / d; ++pr) {
    for (std::size_t pc = 0; pc < sh.width / d; ++pc) {
      for (std::size_t s = 0; s < d; ++s)
        for (std::size_t t = 0; t < d; ++t)
          for (std::size_t c = 0; c < sh.channels; ++c)
            patch[(s * d + t) * sh.channels + c] = img.at(pr * d + s, pc * d + t, c);
      const auto coef = naive_dct(patch, d, sh.channels);
      for (std::size_t s = 0; s < d; ++s)
        for (std::size_t t = 0; t < d; ++t)
          for (std::size_t c = 0; c < sh.channels; ++c)
            out[img.index(pr * d + s, pc * d + t, c)] = coef[(s * d + t) * sh.channels + c];
    }
  }
  return out;
}

inline double two_pass_variance(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(v.size());
}

inline double norm(const std::vector<double>& v) {
  long double s = 0.0;
  for (double x : v) s += static_cast<long double>(x) * x;
  return static_cast<double>(std::sqrt(s));
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  long double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<long double>(a[i]) * b[i];
  return static_cast<double>(s);
}

// First scale on a uniform grid [0, hi] where the label of clip(x0 + s*u) differs from y0.
inline double line_scan(const patchdct::HardLabelOracle& oracle, const ImageTensor& x0, const std::vector<double>& u,
                        double hi, double step) {
  const patchdct::Label y0 = oracle.predict(x0);
  std::vector<double> buf(x0.size());
  for (double s = step; s <= hi + 1e-12; s += step) {
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = std::clamp(x0.values()[i] + s * u[i], 0.0, 1.0);
    if (oracle.predict(ImageTensor(x0.shape(), buf)) != y0) return s;
  }
  return std::numeric_limits<double>::infinity();
}

// Largest sum over patches and channels of coefficient (u,v) that a DC-only
// perturbation can produce after clipping. Each patch-channel gets its own
// shift t, scanned on [-1, 1] (beyond that the patch is constant).
inline double dc_clip_reach(const ImageTensor& x0, std::size_t d, std::size_t u, std::size_t v) {
  const double pi = std::acos(-1.0);
  auto basis = [&](std::size_t k, std::size_t s) {
    return std::sqrt((k == 0 ? 1.0 : 2.0) / static_cast<double>(d)) *
           std::cos(pi * static_cast<double>((2 * s + 1) * k) / static_cast<double>(2 * d));
  };
  double total = 0.0;
  for (std::size_t pr = 0; pr < x0.height() / d; ++pr) {
    for (std::size_t pc = 0; pc < x0.width() / d; ++pc) {
      for (std::size_t c = 0; c < x0.channels(); ++c) {
        double best = -std::numeric_limits<double>::infinity();
        for (int k = -2000; k <= 2000; ++k) {
          const double t = 5e-4 * k;
          double coef = 0.0;
          for (std::size_t s = 0; s < d; ++s)
            for (std::size_t w = 0; w < d; ++w)
              coef += basis(u, s) * basis(v, w) * std::clamp(x0.at(pr * d + s, pc * d + w, c) + t, 0.0, 1.0);
          best = std::max(best, coef);
        }
        total += best;
      }
    }
  }
  return total;
}

// Oracle returning a fixed label; counts calls.
class ConstantOracle : public patchdct::HardLabelOracle {
 public:
  explicit ConstantOracle(patchdct::Label label, int classes = 2) : label_(label), classes_(classes) {}
  patchdct::Label predict(const ImageTensor&) const override { return label_; }
  int num_classes() const override { return classes_; }

 private:
  patchdct::Label label_;
  int classes_;
};

}  // namespace testsupport

#endif  // PATCHDCT_TEST_SUPPORT_HPP
