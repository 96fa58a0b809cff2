#ifndef PATCHDCT_ATTACK_HPP
#define PATCHDCT_ATTACK_HPP

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "patchdct/frequency.hpp"
#include "patchdct/image.hpp"
#include "patchdct/masking.hpp"
#include "patchdct/oracle.hpp"
#include "patchdct/rng.hpp"

namespace patchdct {

enum class AttackDomain {
  kDctLowFrequency,  // block DCT, low-frequency variance-weighted mask
  kPixelFull,        // identity transform, all-ones mask (pixel Sign-OPT)
};

enum class ProbeDistribution { kGaussian, kUniform };

struct AttackConfig {
  std::size_t patch_size = 16;
  std::size_t order = 3;  // r; rho = r / d
  double alpha = 4.0;
  std::uint64_t budget = 4000;
  std::size_t init_samples = 100;  // T
  std::size_t probes = 100;        // J
  double eps_smooth = 0.01;        // relative to |theta'|
  double eta0 = 0.2;               // relative to current g
  double bs_tol = 1e-3;
  std::size_t max_step_trials = 15;
  std::size_t max_step_growth = 15;  // doublings after a first-trial accept; 0 disables
  std::uint64_t seed = 0;
  AttackDomain domain = AttackDomain::kDctLowFrequency;
  ProbeDistribution probe_distribution = ProbeDistribution::kGaussian;

  /// Throws ConfigError.
  void validate() const;
};

std::string to_string(AttackDomain domain);
AttackDomain parse_domain(const std::string& text);
std::string to_string(ProbeDistribution distribution);
ProbeDistribution parse_probe_distribution(const std::string& text);

/// Where the search happens: the origin image, the transform between search
/// coefficients and pixels, and the weight mask M over those coefficients.
class SearchSpace {
 public:
  /// Block DCT with the r x r variance-weighted mask. Throws
  /// DimensionMismatch, RangeError, or DegenerateInput (constant image).
  static SearchSpace low_frequency(const ImageTensor& x0, std::size_t patch_size, std::size_t order,
                                   double alpha);
  static SearchSpace pixel(const ImageTensor& x0);
  static SearchSpace from_config(const ImageTensor& x0, const AttackConfig& config);

  AttackDomain domain() const { return domain_; }
  const ImageTensor& origin() const { return origin_; }
  const WeightMask& mask() const { return mask_; }
  std::size_t dimension() const { return origin_.size(); }
  /// Block DCT of the origin; only present in the DCT domain.
  const std::optional<DctMatrix>& spectrum() const { return spectrum_; }

  /// origin + T^-1(scale * direction), not clipped.
  ImageTensor synthesize(std::span<const double> direction, double scale) const;
  /// Pixel-domain perturbation -> search coefficients.
  std::vector<double> to_coefficients(std::span<const double> pixels) const;

 private:
  SearchSpace(AttackDomain domain, ImageTensor origin, WeightMask mask);

  AttackDomain domain_;
  ImageTensor origin_;
  WeightMask mask_;
  std::optional<BlockTransform> transform_;
  std::optional<DctMatrix> spectrum_;
};

/// Everything a boundary query needs. Every predict goes through `ledger`.
struct AttackContext {
  const SearchSpace& space;
  const HardLabelOracle& oracle;
  QueryLedger& ledger;
  Label original_label;

  /// Label of clip(origin + T^-1(scale * unit)).
  Label probe(std::span<const double> unit, double scale) const;
};

/// Masked search direction theta' and its boundary distance g.
struct Direction {
  std::vector<double> theta;
  double norm = 0.0;
  double g = std::numeric_limits<double>::infinity();
  /// Label the oracle returned at distance g; the point was really queried.
  std::optional<Label> certificate;

  static Direction from_theta(std::vector<double> theta);
  std::vector<double> unit() const;
};

double l2_norm(std::span<const double> v);

/// theta' = theta (.) M. Throws ShapeMismatch.
std::vector<double> apply_mask(std::span<const double> theta, const WeightMask& mask);

/// Scale interval along a unit direction: `lo` is not adversarial (or 0),
/// `hi` is adversarial with label `hi_label`.
struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
  Label hi_label = 0;
};

inline constexpr double kCoarseStart = 0.1;
inline constexpr int kCoarseDoublings = 10;
inline constexpr int kInitHalvings = 5;

/// Doubling from kCoarseStart. If `known_hit` is given (an adversarial scale
/// already certified) doubling stops there. Throws DirectionFailure.
Bracket coarse_bracket(const AttackContext& ctx, std::span<const double> unit,
                       std::optional<Bracket> known_hit = std::nullopt);
/// Geometric expansion/contraction around `hint`, first steps hint*(1 +- tol).
Bracket bracket_around(const AttackContext& ctx, std::span<const double> unit, double hint, double tol);
/// Bisect until hi - lo <= tol * lo, or for at most `max_halvings` steps.
void refine_bracket(const AttackContext& ctx, std::span<const double> unit, Bracket& bracket, double tol,
                    int max_halvings = -1);

/// g(theta'): smallest scale (to relative tol) whose clipped image is
/// misclassified. Throws DirectionFailure; BudgetExhausted propagates.
double boundary_distance(const AttackContext& ctx, std::span<const double> theta, double tol,
                         std::optional<double> hint = std::nullopt);
/// Same search, keeping the certificate label.
Bracket boundary_search(const AttackContext& ctx, std::span<const double> theta, double tol,
                        std::optional<double> hint = std::nullopt);

/// Picks the best of a stream of random directions (cheap g estimates,
/// winner refined to full tolerance).
class InitialDirectionSearch {
 public:
  InitialDirectionSearch(const AttackContext& ctx, double tol);

  /// Mask and evaluate one raw candidate. Returns its evaluated g, or nullopt
  /// if it was skipped (not adversarial at the current best) or failed.
  std::optional<double> offer(std::span<const double> theta);

  bool has_best() const { return best_.has_value(); }
  /// Evaluated g per offered candidate, NaN where not evaluated.
  const std::vector<double>& evaluated() const { return evaluated_; }
  /// Throws InitializationFailure when no candidate crossed the boundary.
  Direction finish(bool refine = true);

 private:
  const AttackContext& ctx_;
  double tol_;
  std::vector<double> evaluated_;
  std::optional<Direction> best_;
  Bracket best_bracket_;
};

Direction initialize_direction(const AttackContext& ctx, Rng& rng, std::size_t samples, double tol,
                               std::vector<double>* evaluated = nullptr);

/// Averaged sign probes: sum_j sign_j (mu_j (.) M) / J, sign = +1 when the
/// probe keeps the original label. Each mu_j is drawn coordinate by coordinate
/// in index order. Consumes exactly J queries.
std::vector<double> estimate_sign_gradient(const AttackContext& ctx, const Direction& direction, Rng& rng,
                                           std::size_t probes, double eps_smooth,
                                           ProbeDistribution distribution = ProbeDistribution::kGaussian);

struct DescentOutcome {
  Direction direction;
  bool stalled = false;
  std::size_t trials = 0;
  double step = 0.0;  // accepted eta, 0 when stalled
};

/// Line search on theta' - eta * theta_hat starting at eta0 * g. A trial is
/// accepted iff the new boundary distance is below g * (1 - tol). Rejections
/// halve eta (at most `max_trials` trials in total). If the first trial is
/// accepted, eta keeps doubling while g keeps falling (at most `max_growth`).
DescentOutcome descend(const AttackContext& ctx, const Direction& direction,
                       std::span<const double> theta_hat, double eta0, double tol,
                       std::size_t max_trials = 15, std::size_t max_growth = 15);

struct Finalization {
  ImageTensor adversarial;
  Label label = 0;
  double g = 0.0;
  double l2 = 0.0;
  bool succeeded = false;
};

/// x_hat = clip(origin + T^-1(g * theta'/|theta'|)). Without a certificate the
/// point is queried and g is grown by 1.01 until the clipped image is adversarial.
Finalization finalize(const AttackContext& ctx, const Direction& direction);

/// Pluggable optimizer for the iteration loop.
class DirectionUpdater {
 public:
  virtual ~DirectionUpdater() = default;
  /// One iteration. Returns true when g decreased.
  virtual bool step(const AttackContext& ctx, Direction& direction, Rng& rng) = 0;
  virtual std::size_t stalls() const { return 0; }
};

/// Sign-gradient estimate + backtracking descent, with the stall policy
/// (after 3 consecutive stalls eps_smooth is halved once, floor 1e-4).
class SignOptUpdater : public DirectionUpdater {
 public:
  explicit SignOptUpdater(const AttackConfig& config);

  bool step(const AttackContext& ctx, Direction& direction, Rng& rng) override;
  std::size_t stalls() const override { return stalls_; }
  double eps_smooth() const { return eps_smooth_; }

 private:
  AttackConfig config_;
  double eps_smooth_;
  std::size_t consecutive_stalls_ = 0;
  std::size_t stalls_ = 0;
  bool eps_halved_ = false;
};

enum class AttackStatus {
  kSuccess,
  kAlreadyMisclassified,
  kDegenerateInput,
  kDimensionMismatch,
  kInitializationFailure,
  kBudgetExhausted,
  kOracleError,
};

std::string to_string(AttackStatus status);
AttackStatus parse_status(const std::string& text);

struct TracePoint {
  std::size_t iteration = 0;
  std::uint64_t queries = 0;
  double best_g = 0.0;
  bool operator==(const TracePoint&) const = default;
};

struct AttackResult {
  ImageTensor adversarial;
  Label initial_label = 0;
  Label final_label = 0;
  double l2 = 0.0;
  double g = 0.0;
  std::uint64_t queries_used = 0;
  std::vector<TracePoint> trace;
  bool succeeded = false;
  AttackStatus status = AttackStatus::kSuccess;
  std::string message;
  std::size_t iterations = 0;
  std::size_t stalls = 0;
};

struct AttackOptions {
  /// Ground truth; if the first prediction differs the attack stops there.
  std::optional<Label> expected_label;
  /// Defaults to SignOptUpdater.
  DirectionUpdater* updater = nullptr;
};

/// Whole pipeline: y0 query, search space, initialization, iterations while
/// budget remains, finalization. Errors become a failed result with a status.
AttackResult run_attack(const ImageTensor& x0, const HardLabelOracle& oracle, const AttackConfig& config,
                        const AttackOptions& options = {});

}  // namespace patchdct

#endif  // PATCHDCT_ATTACK_HPP
