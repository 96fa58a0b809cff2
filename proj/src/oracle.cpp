#include "patchdct/oracle.hpp"

#include <cmath>
#include <numeric>

#include "patchdct/error.hpp"
#include "patchdct/frequency.hpp"
#include "patchdct/rng.hpp"

namespace patchdct {

void QueryLedger::charge() {
  std::uint64_t current = used_.load();
  do {
    if (current >= budget_) {
      throw BudgetExhausted("query budget of " + std::to_string(budget_) + " exhausted");
    }
  } while (!used_.compare_exchange_weak(current, current + 1));
}

Label query(const HardLabelOracle& oracle, QueryLedger& ledger, ImageTensor x) {
  ledger.charge();
  clip_unit(x.values());
  try {
    return oracle.predict(x);
  } catch (const OracleError&) {
    throw;
  } catch (const std::exception& e) {
    // Whatever the model rejects is a failed query, not an engine error.
    throw OracleError(std::string("oracle rejected query: ") + e.what());
  }
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

void require_shape(const ImageTensor& x, const Shape& expected) {
  if (x.shape() != expected) {
    throw ShapeMismatch("oracle expects " + expected.to_string() + ", got " + x.shape().to_string());
  }
}

}  // namespace

LinearOracle::LinearOracle(ImageTensor weights, double bias) : weights_(std::move(weights)), bias_(bias) {
  if (dot(weights_.values(), weights_.values()) == 0.0) throw RangeError("linear oracle weights are all zero");
}

double LinearOracle::score(const ImageTensor& x) const {
  require_shape(x, weights_.shape());
  return dot(weights_.values(), x.values());
}

Label LinearOracle::predict(const ImageTensor& x) const { return score(x) > bias_ ? 1 : 0; }

double LinearOracle::distance_along(const ImageTensor& x0, const ImageTensor& direction) const {
  require_shape(direction, weights_.shape());
  const double norm = std::sqrt(dot(direction.values(), direction.values()));
  return (bias_ - score(x0)) / (dot(weights_.values(), direction.values()) / norm);
}

PatchOracle::PatchOracle(const Shape& shape, std::size_t patch_size, std::size_t target_patch, double threshold)
    : layout_(GridLayout::for_image(shape, patch_size)), target_(target_patch), threshold_(threshold) {
  if (target_patch >= layout_.patch_count()) {
    throw RangeError("patch index " + std::to_string(target_patch) + " out of range (" +
                     std::to_string(layout_.patch_count()) + " patches)");
  }
}

double PatchOracle::patch_mean(const ImageTensor& x) const {
  require_shape(x, layout_.image_shape());
  const std::size_t d = layout_.patch_size;
  const std::size_t row = target_ / layout_.cols;
  const std::size_t col = target_ % layout_.cols;
  double sum = 0.0;
  for (std::size_t s = 0; s < d; ++s) {
    const auto begin = x.values().begin() + static_cast<std::ptrdiff_t>(x.index(row * d + s, col * d, 0));
    sum = std::accumulate(begin, begin + static_cast<std::ptrdiff_t>(d * layout_.channels), sum);
  }
  return sum / static_cast<double>(layout_.values_per_patch());
}

Label PatchOracle::predict(const ImageTensor& x) const { return patch_mean(x) > threshold_ ? 1 : 0; }

MlpOracle::MlpOracle(std::uint64_t seed, int num_classes, const Shape& shape, std::size_t hidden)
    : shape_(shape), classes_(num_classes), hidden_(hidden) {
  if (num_classes < 2) throw RangeError("MLP oracle needs at least 2 classes");
  if (hidden == 0) throw RangeError("MLP oracle needs a hidden layer");
  const std::size_t inputs = shape.size();
  const auto k = static_cast<std::size_t>(num_classes);
  Rng rng(seed);
  // Inputs are centered to [-0.5, 0.5] (variance 1/12); this scale gives
  // unit-variance pre-activations for uniform random images.
  const double input_scale = std::sqrt(12.0 / static_cast<double>(inputs));
  const double output_scale = 1.0 / std::sqrt(static_cast<double>(hidden));
  w1_.resize(hidden * inputs);
  for (double& w : w1_) w = rng.normal() * input_scale;
  b1_.resize(hidden);
  for (double& b : b1_) b = 0.1 * rng.normal();
  w2_.resize(k * hidden);
  for (double& w : w2_) w = rng.normal() * output_scale;
  b2_.resize(k);
  for (double& b : b2_) b = 0.1 * rng.normal();
}

Label MlpOracle::predict(const ImageTensor& x) const {
  require_shape(x, shape_);
  const std::size_t inputs = shape_.size();
  std::vector<double> centered(x.values().begin(), x.values().end());
  for (double& v : centered) v -= 0.5;
  std::vector<double> activation(hidden_);
  for (std::size_t j = 0; j < hidden_; ++j) {
    activation[j] = std::tanh(b1_[j] + dot({&w1_[j * inputs], inputs}, centered));
  }
  Label best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < classes_; ++k) {
    const auto row = static_cast<std::size_t>(k) * hidden_;
    const double score = b2_[static_cast<std::size_t>(k)] + dot({&w2_[row], hidden_}, activation);
    if (score > best_score) {  // ties go to the lowest index
      best_score = score;
      best = k;
    }
  }
  return best;
}

std::unique_ptr<LinearOracle> make_frequency_probe_oracle(const Shape& shape, std::size_t patch_size,
                                                          std::size_t u, std::size_t v, double threshold) {
  const GridLayout layout = GridLayout::for_image(shape, patch_size);
  if (u >= patch_size || v >= patch_size) throw RangeError("frequency index outside the patch");
  DctMatrix indicator{layout, ImageTensor(shape)};
  for (std::size_t row = 0; row < layout.rows; ++row) {
    for (std::size_t col = 0; col < layout.cols; ++col) {
      for (std::size_t c = 0; c < shape.channels; ++c) {
        indicator.coefficients.at(row * patch_size + u, col * patch_size + v, c) = 1.0;
      }
    }
  }
  return std::make_unique<LinearOracle>(image_idct(indicator), threshold);
}

}  // namespace patchdct
