#ifndef PATCHDCT_ORACLE_HPP
#define PATCHDCT_ORACLE_HPP

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>

#include "patchdct/image.hpp"

namespace patchdct {

using Label = int;

/// A classifier that only reveals its top-1 label. Implementations must be
/// deterministic.
class HardLabelOracle {
 public:
  virtual ~HardLabelOracle() = default;
  virtual Label predict(const ImageTensor& x) const = 0;
  virtual int num_classes() const = 0;
  /// Whether predict may be called from several threads at once.
  virtual bool concurrent_safe() const { return true; }
};

/// Counts predict calls against a hard budget.
class QueryLedger {
 public:
  explicit QueryLedger(std::uint64_t budget) : budget_(budget) {}
  QueryLedger(const QueryLedger&) = delete;
  QueryLedger& operator=(const QueryLedger&) = delete;

  std::uint64_t used() const { return used_.load(); }
  std::uint64_t budget() const { return budget_; }
  std::uint64_t remaining() const { return budget_ - used(); }
  bool exhausted() const { return used() >= budget_; }

  /// Reserve one query. Throws BudgetExhausted when none is left.
  void charge();

 private:
  std::uint64_t budget_;
  std::atomic<std::uint64_t> used_{0};
};

/// The only path through which attack code reaches an oracle: charges the
/// ledger, clips to [0, 1], then predicts. A query whose predict throws has
/// still been charged; non-OracleError exceptions from predict are rethrown
/// as OracleError.
Label query(const HardLabelOracle& oracle, QueryLedger& ledger, ImageTensor x);

/// label = 1 if <w, x> > b else 0.
class LinearOracle : public HardLabelOracle {
 public:
  LinearOracle(ImageTensor weights, double bias);

  Label predict(const ImageTensor& x) const override;
  int num_classes() const override { return 2; }

  const ImageTensor& weights() const { return weights_; }
  double bias() const { return bias_; }
  double score(const ImageTensor& x) const;
  /// Signed distance from x0 to the hyperplane along `direction` (not
  /// necessarily unit): (b - <w, x0>) / <w, u> with u = direction / |direction|.
  double distance_along(const ImageTensor& x0, const ImageTensor& direction) const;

 private:
  ImageTensor weights_;
  double bias_;
};

/// label = 1 if the mean intensity of one d x d patch exceeds a threshold.
class PatchOracle : public HardLabelOracle {
 public:
  PatchOracle(const Shape& shape, std::size_t patch_size, std::size_t target_patch, double threshold);

  Label predict(const ImageTensor& x) const override;
  int num_classes() const override { return 2; }

  double patch_mean(const ImageTensor& x) const;
  std::size_t target_patch() const { return target_; }
  double threshold() const { return threshold_; }
  const GridLayout& layout() const { return layout_; }

 private:
  GridLayout layout_;
  std::size_t target_;
  double threshold_;
};

/// One hidden tanh layer with seeded weights; label = argmax of K outputs.
class MlpOracle : public HardLabelOracle {
 public:
  static constexpr std::size_t kDefaultHidden = 32;

  MlpOracle(std::uint64_t seed, int num_classes, const Shape& shape,
            std::size_t hidden = kDefaultHidden);

  Label predict(const ImageTensor& x) const override;
  int num_classes() const override { return classes_; }

 private:
  Shape shape_;
  int classes_;
  std::size_t hidden_;
  std::vector<double> w1_, b1_, w2_, b2_;
};

/// Linear oracle whose weights are the pixel image of a single block-DCT
/// coefficient (u, v), summed over every patch and channel. Perturbations
/// confined to other frequencies never change its label.
std::unique_ptr<LinearOracle> make_frequency_probe_oracle(const Shape& shape, std::size_t patch_size,
                                                          std::size_t u, std::size_t v,
                                                          double threshold);

/// Decorator counting predict calls as seen from the oracle side.
class CountingOracle : public HardLabelOracle {
 public:
  explicit CountingOracle(const HardLabelOracle& inner) : inner_(inner) {}

  Label predict(const ImageTensor& x) const override {
    ++calls_;
    return inner_.predict(x);
  }
  int num_classes() const override { return inner_.num_classes(); }
  bool concurrent_safe() const override { return inner_.concurrent_safe(); }
  std::uint64_t calls() const { return calls_.load(); }

 private:
  const HardLabelOracle& inner_;
  mutable std::atomic<std::uint64_t> calls_{0};
};

}  // namespace patchdct

#endif  // PATCHDCT_ORACLE_HPP
