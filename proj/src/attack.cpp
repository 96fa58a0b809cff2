#include "patchdct/attack.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "patchdct/error.hpp"

namespace patchdct {

void AttackConfig::validate() const {
  if (patch_size < 1) throw ConfigError("patch size must be >= 1");
  if (domain == AttackDomain::kDctLowFrequency && (order < 1 || order > patch_size)) {
    throw ConfigError("low-frequency order must lie in [1, patch size]");
  }
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
  if (budget < 1) throw ConfigError("query budget must be >= 1");
  if (init_samples < 1 || probes < 1 || max_step_trials < 1) throw ConfigError("counts must be >= 1");
  if (!(eps_smooth > 0.0) || !(eta0 > 0.0) || !(bs_tol > 0.0) || bs_tol >= 0.5) {
    throw ConfigError("eps_smooth, eta0 and bs_tol must be positive (bs_tol < 0.5)");
  }
}

std::string to_string(AttackDomain domain) {
  return domain == AttackDomain::kDctLowFrequency ? "dct_lowfreq" : "pixel_full";
}

AttackDomain parse_domain(const std::string& text) {
  if (text == "dct_lowfreq") return AttackDomain::kDctLowFrequency;
  if (text == "pixel_full") return AttackDomain::kPixelFull;
  throw ConfigError("unknown attack domain '" + text + "'");
}

std::string to_string(ProbeDistribution distribution) {
  return distribution == ProbeDistribution::kGaussian ? "gaussian" : "uniform";
}

ProbeDistribution parse_probe_distribution(const std::string& text) {
  if (text == "gaussian") return ProbeDistribution::kGaussian;
  if (text == "uniform") return ProbeDistribution::kUniform;
  throw ConfigError("unknown probe distribution '" + text + "'");
}

// ---------------------------------------------------------------------------
// Search space

SearchSpace::SearchSpace(AttackDomain domain, ImageTensor origin, WeightMask mask)
    : domain_(domain), origin_(std::move(origin)), mask_(std::move(mask)) {}

SearchSpace SearchSpace::low_frequency(const ImageTensor& x0, std::size_t patch_size, std::size_t order,
                                       double alpha) {
  const PatchGrid grid = crop_patches(x0, patch_size);
  const BinaryMask indicator = lowfreq_mask(grid.layout, order);
  const std::vector<double> normalized = normalize_variances(patch_variances(grid));
  SearchSpace space(AttackDomain::kDctLowFrequency, x0, weight_mask(normalized, indicator, alpha));
  space.spectrum_ = block_dct(grid);
  space.transform_.emplace(x0.shape(), patch_size);
  return space;
}

SearchSpace SearchSpace::pixel(const ImageTensor& x0) {
  return SearchSpace(AttackDomain::kPixelFull, x0, WeightMask::all_ones(x0.shape()));
}

SearchSpace SearchSpace::from_config(const ImageTensor& x0, const AttackConfig& config) {
  if (config.domain == AttackDomain::kPixelFull) return pixel(x0);
  return low_frequency(x0, config.patch_size, config.order, config.alpha);
}

ImageTensor SearchSpace::synthesize(std::span<const double> direction, double scale) const {
  if (direction.size() != origin_.size()) throw ShapeMismatch("direction does not match the image");
  ImageTensor x = origin_;
  auto out = x.values();
  if (transform_) {
    std::vector<double> perturbation(direction.size());
    transform_->inverse(direction, perturbation);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += scale * perturbation[i];
  } else {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += scale * direction[i];
  }
  return x;
}

std::vector<double> SearchSpace::to_coefficients(std::span<const double> pixels) const {
  if (pixels.size() != origin_.size()) throw ShapeMismatch("perturbation does not match the image");
  std::vector<double> out(pixels.begin(), pixels.end());
  if (transform_) transform_->forward(pixels, out);
  return out;
}

Label AttackContext::probe(std::span<const double> unit, double scale) const {
  return query(oracle, ledger, space.synthesize(unit, scale));
}

// ---------------------------------------------------------------------------
// Directions and boundary search

double l2_norm(std::span<const double> v) {
  return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

Direction Direction::from_theta(std::vector<double> theta) {
  Direction d;
  d.norm = l2_norm(theta);
  d.theta = std::move(theta);
  return d;
}

std::vector<double> Direction::unit() const {
  if (!(norm > 0.0)) throw DirectionFailure("zero direction");
  std::vector<double> u(theta);
  for (double& v : u) v /= norm;
  return u;
}

std::vector<double> apply_mask(std::span<const double> theta, const WeightMask& mask) {
  if (theta.size() != mask.values().size()) throw ShapeMismatch("direction does not match the weight mask");
  std::vector<double> out(theta.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = theta[i] * mask[i];
  return out;
}

namespace {

constexpr double kMaxReach = kCoarseStart * (1 << kCoarseDoublings);
constexpr double kScaleFloor = 1e-12;

Bracket contract_from(const AttackContext& ctx, std::span<const double> unit, double hi, Label hi_label,
                      double tol) {
  double step = tol;
  while (hi > kScaleFloor) {
    const double lo = hi * (1.0 - step);
    const Label label = ctx.probe(unit, lo);
    if (label == ctx.original_label) return {lo, hi, hi_label};
    hi = lo;
    hi_label = label;
    step = std::min(2.0 * step, 0.5);
  }
  return {0.0, hi, hi_label};
}

Bracket expand_from(const AttackContext& ctx, std::span<const double> unit, double lo, double tol) {
  double step = tol;
  while (lo <= kMaxReach) {
    const double hi = lo * (1.0 + step);
    const Label label = ctx.probe(unit, hi);
    if (label != ctx.original_label) return {lo, hi, label};
    lo = hi;
    step = std::min(2.0 * step, 1.0);
  }
  throw DirectionFailure("no boundary within reach " + std::to_string(kMaxReach));
}

}  // namespace

Bracket coarse_bracket(const AttackContext& ctx, std::span<const double> unit, std::optional<Bracket> known_hit) {
  double lo = 0.0;
  double scale = kCoarseStart;
  for (int k = 0; k <= kCoarseDoublings; ++k, scale *= 2.0) {
    if (known_hit && scale >= known_hit->hi) return {lo, known_hit->hi, known_hit->hi_label};
    const Label label = ctx.probe(unit, scale);
    if (label != ctx.original_label) return {lo, scale, label};
    lo = scale;
  }
  if (known_hit) return {lo, known_hit->hi, known_hit->hi_label};
  throw DirectionFailure("direction does not cross the decision boundary within reach " + std::to_string(kMaxReach));
}

Bracket bracket_around(const AttackContext& ctx, std::span<const double> unit, double hint, double tol) {
  if (!(hint > 0.0) || !std::isfinite(hint)) return coarse_bracket(ctx, unit);
  const Label label = ctx.probe(unit, hint);
  if (label != ctx.original_label) return contract_from(ctx, unit, hint, label, tol);
  return expand_from(ctx, unit, hint, tol);
}

void refine_bracket(const AttackContext& ctx, std::span<const double> unit, Bracket& bracket, double tol,
                    int max_halvings) {
  for (int n = 0; max_halvings < 0 || n < max_halvings; ++n) {
    const double width = bracket.hi - bracket.lo;
    if (width <= tol * bracket.lo || width <= kScaleFloor) break;
    const double mid = 0.5 * (bracket.lo + bracket.hi);
    const Label label = ctx.probe(unit, mid);
    if (label != ctx.original_label) {
      bracket.hi = mid;
      bracket.hi_label = label;
    } else {
      bracket.lo = mid;
    }
  }
}

Bracket boundary_search(const AttackContext& ctx, std::span<const double> theta, double tol,
                        std::optional<double> hint) {
  const Direction direction = Direction::from_theta({theta.begin(), theta.end()});
  const std::vector<double> unit = direction.unit();
  Bracket bracket = hint ? bracket_around(ctx, unit, *hint, tol) : coarse_bracket(ctx, unit);
  refine_bracket(ctx, unit, bracket, tol);
  return bracket;
}

double boundary_distance(const AttackContext& ctx, std::span<const double> theta, double tol,
                         std::optional<double> hint) {
  return boundary_search(ctx, theta, tol, hint).hi;
}

// ---------------------------------------------------------------------------
// Initialization

InitialDirectionSearch::InitialDirectionSearch(const AttackContext& ctx, double tol) : ctx_(ctx), tol_(tol) {
  if (ctx.space.mask().support_size() == 0) throw InitializationFailure("weight mask has empty support");
}

std::optional<double> InitialDirectionSearch::offer(std::span<const double> theta) {
  constexpr double kSkipped = std::numeric_limits<double>::quiet_NaN();
  Direction candidate = Direction::from_theta(apply_mask(theta, ctx_.space.mask()));
  if (!(candidate.norm > 0.0)) {
    evaluated_.push_back(kSkipped);
    return std::nullopt;
  }
  const std::vector<double> unit = candidate.unit();
  Bracket bracket;
  if (best_) {
    // A candidate that is not adversarial at the current best cannot beat it.
    const Label label = ctx_.probe(unit, best_bracket_.hi);
    if (label == ctx_.original_label) {
      evaluated_.push_back(kSkipped);
      return std::nullopt;
    }
    bracket = coarse_bracket(ctx_, unit, Bracket{0.0, best_bracket_.hi, label});
  } else {
    try {
      bracket = coarse_bracket(ctx_, unit);
    } catch (const DirectionFailure&) {
      evaluated_.push_back(kSkipped);
      return std::nullopt;
    }
  }
  refine_bracket(ctx_, unit, bracket, tol_, kInitHalvings);
  evaluated_.push_back(bracket.hi);
  if (!best_ || bracket.hi < best_bracket_.hi) {
    candidate.g = bracket.hi;
    candidate.certificate = bracket.hi_label;
    best_ = std::move(candidate);
    best_bracket_ = bracket;
  }
  return bracket.hi;
}

Direction InitialDirectionSearch::finish(bool refine) {
  if (!best_) {
    throw InitializationFailure("none of " + std::to_string(evaluated_.size()) +
                                " sampled directions crossed the decision boundary");
  }
  if (refine) {
    const std::vector<double> unit = best_->unit();
    try {
      refine_bracket(ctx_, unit, best_bracket_, tol_);
    } catch (const BudgetExhausted&) {
      // best_bracket_ still holds a certified adversarial scale
    }
  }
  Direction out = *best_;
  out.g = best_bracket_.hi;
  out.certificate = best_bracket_.hi_label;
  return out;
}

namespace {

std::vector<double> gaussian_vector(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.normal();
  return v;
}

}  // namespace

Direction initialize_direction(const AttackContext& ctx, Rng& rng, std::size_t samples, double tol,
                               std::vector<double>* evaluated) {
  InitialDirectionSearch search(ctx, tol);
  for (std::size_t t = 0; t < samples; ++t) search.offer(gaussian_vector(rng, ctx.space.dimension()));
  if (evaluated) *evaluated = search.evaluated();
  return search.finish();
}

// ---------------------------------------------------------------------------
// Iteration

std::vector<double> estimate_sign_gradient(const AttackContext& ctx, const Direction& direction, Rng& rng,
                                           std::size_t probes, double eps_smooth, ProbeDistribution distribution) {
  if (probes < 1) throw RangeError("need at least one probe");
  if (!(direction.norm > 0.0) || !std::isfinite(direction.g)) {
    throw DirectionFailure("sign estimate needs an initialized direction");
  }
  const WeightMask& mask = ctx.space.mask();
  const std::size_t n = direction.theta.size();
  const double eps = eps_smooth * direction.norm;
  const double uniform_half_width = std::sqrt(3.0);  // unit variance

  std::vector<double> sum(n, 0.0);
  std::vector<double> masked(n, 0.0);
  std::vector<double> probe_dir(n);
  for (std::size_t j = 0; j < probes; ++j) {
    // Only coordinates inside the mask support are drawn; the rest are
    // multiplied by zero anyway.
    for (std::size_t i = 0; i < n; ++i) {
      if (mask[i] == 0.0) continue;
      const double mu = distribution == ProbeDistribution::kGaussian
                            ? rng.normal()
                            : rng.uniform(-uniform_half_width, uniform_half_width);
      masked[i] = mu * mask[i];
    }
    for (std::size_t i = 0; i < n; ++i) probe_dir[i] = direction.theta[i] + eps * masked[i];
    const double norm = l2_norm(probe_dir);
    for (double& v : probe_dir) v /= norm;
    const double sign = ctx.probe(probe_dir, direction.g) == ctx.original_label ? 1.0 : -1.0;
    for (std::size_t i = 0; i < n; ++i) sum[i] += sign * masked[i];
  }
  for (double& v : sum) v /= static_cast<double>(probes);
  return sum;
}

DescentOutcome descend(const AttackContext& ctx, const Direction& direction, std::span<const double> theta_hat,
                       double eta0, double tol, std::size_t max_trials, std::size_t max_growth) {
  if (theta_hat.size() != direction.theta.size()) throw ShapeMismatch("gradient estimate size mismatch");
  DescentOutcome outcome{direction, true, 0, 0.0};
  if (std::all_of(theta_hat.begin(), theta_hat.end(), [](double v) { return v == 0.0; })) return outcome;

  const double limit = direction.g * (1.0 - tol);
  double eta = eta0 * direction.g;
  std::vector<double> candidate(direction.theta.size());
  for (std::size_t trial = 0; trial < max_trials; ++trial, eta *= 0.5) {
    outcome.trials = trial + 1;
    for (std::size_t i = 0; i < candidate.size(); ++i) candidate[i] = direction.theta[i] - eta * theta_hat[i];
    Direction next = Direction::from_theta(candidate);
    if (!(next.norm > 0.0)) continue;
    const std::vector<double> unit = next.unit();
    const Label label = ctx.probe(unit, limit);
    if (label == ctx.original_label) continue;
    Bracket bracket = contract_from(ctx, unit, limit, label, tol);
    refine_bracket(ctx, unit, bracket, tol);
    next.g = bracket.hi;
    next.certificate = bracket.hi_label;
    outcome.direction = std::move(next);
    outcome.stalled = false;
    outcome.step = eta;
    // Accepted on the first trial: keep doubling while g keeps falling.
    if (trial == 0) {
      for (std::size_t grow = 0; grow < max_growth; ++grow) {
        const double bigger = outcome.step * 2.0;
        for (std::size_t i = 0; i < candidate.size(); ++i) candidate[i] = direction.theta[i] - bigger * theta_hat[i];
        Direction grown = Direction::from_theta(candidate);
        if (!(grown.norm > 0.0)) break;
        const std::vector<double> grown_unit = grown.unit();
        const double grown_limit = outcome.direction.g * (1.0 - tol);
        const Label grown_label = ctx.probe(grown_unit, grown_limit);
        if (grown_label == ctx.original_label) break;
        Bracket b = contract_from(ctx, grown_unit, grown_limit, grown_label, tol);
        refine_bracket(ctx, grown_unit, b, tol);
        grown.g = b.hi;
        grown.certificate = b.hi_label;
        outcome.direction = std::move(grown);
        outcome.step = bigger;
      }
    }
    return outcome;
  }
  return outcome;
}

Finalization finalize(const AttackContext& ctx, const Direction& direction) {
  if (!(direction.norm > 0.0) || !std::isfinite(direction.g)) {
    throw RangeError("finalize needs an initialized, non-zero direction");
  }
  const std::vector<double> unit = direction.unit();
  Finalization out;
  out.g = direction.g;
  out.adversarial = clipped(ctx.space.synthesize(unit, out.g));
  if (direction.certificate) {
    out.label = *direction.certificate;
  } else {
    try {
      for (;;) {
        out.label = query(ctx.oracle, ctx.ledger, out.adversarial);
        if (out.label != ctx.original_label) break;
        out.g *= 1.01;
        out.adversarial = clipped(ctx.space.synthesize(unit, out.g));
      }
    } catch (const BudgetExhausted&) {
      out.label = ctx.original_label;
    }
  }
  out.succeeded = out.label != ctx.original_label;
  std::vector<double> diff(out.adversarial.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = out.adversarial.values()[i] - ctx.space.origin().values()[i];
  out.l2 = l2_norm(diff);
  return out;
}

SignOptUpdater::SignOptUpdater(const AttackConfig& config) : config_(config), eps_smooth_(config.eps_smooth) {}

bool SignOptUpdater::step(const AttackContext& ctx, Direction& direction, Rng& rng) {
  constexpr std::size_t kStallsBeforeShrink = 3;
  constexpr double kEpsFloor = 1e-4;
  const std::vector<double> estimate =
      estimate_sign_gradient(ctx, direction, rng, config_.probes, eps_smooth_, config_.probe_distribution);
  DescentOutcome outcome = descend(ctx, direction, estimate, config_.eta0, config_.bs_tol, config_.max_step_trials,
                                   config_.max_step_growth);
  if (!outcome.stalled) {
    direction = std::move(outcome.direction);
    consecutive_stalls_ = 0;
    return true;
  }
  ++stalls_;
  if (++consecutive_stalls_ >= kStallsBeforeShrink && !eps_halved_) {
    eps_smooth_ = std::max(eps_smooth_ / 2.0, kEpsFloor);
    eps_halved_ = true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Driver

std::string to_string(AttackStatus status) {
  switch (status) {
    case AttackStatus::kSuccess: return "success";
    case AttackStatus::kAlreadyMisclassified: return "already_misclassified";
    case AttackStatus::kDegenerateInput: return "degenerate_input";
    case AttackStatus::kDimensionMismatch: return "dimension_mismatch";
    case AttackStatus::kInitializationFailure: return "initialization_failure";
    case AttackStatus::kBudgetExhausted: return "budget_exhausted";
    case AttackStatus::kOracleError: return "oracle_error";
  }
  return "unknown";
}

AttackStatus parse_status(const std::string& text) {
  for (auto status : {AttackStatus::kSuccess, AttackStatus::kAlreadyMisclassified, AttackStatus::kDegenerateInput,
                      AttackStatus::kDimensionMismatch, AttackStatus::kInitializationFailure,
                      AttackStatus::kBudgetExhausted, AttackStatus::kOracleError}) {
    if (to_string(status) == text) return status;
  }
  throw ConfigError("unknown attack status '" + text + "'");
}

AttackResult run_attack(const ImageTensor& x0, const HardLabelOracle& oracle, const AttackConfig& config,
                        const AttackOptions& options) {
  config.validate();
  QueryLedger ledger(config.budget);
  AttackResult result;
  result.adversarial = clipped(x0);

  auto fail = [&](AttackStatus status, const std::string& message) {
    result.succeeded = false;
    result.status = status;
    result.message = message;
    result.final_label = result.initial_label;
    result.queries_used = ledger.used();
    return result;
  };

  try {
    result.initial_label = query(oracle, ledger, x0);
  } catch (const OracleError& e) {
    return fail(AttackStatus::kOracleError, e.what());
  }
  result.final_label = result.initial_label;
  if (options.expected_label && *options.expected_label != result.initial_label) {
    return fail(AttackStatus::kAlreadyMisclassified, "oracle label " + std::to_string(result.initial_label) +
                                                         " differs from ground truth " +
                                                         std::to_string(*options.expected_label));
  }

  std::optional<SearchSpace> space;
  try {
    space.emplace(SearchSpace::from_config(x0, config));
  } catch (const DegenerateInput& e) {
    return fail(AttackStatus::kDegenerateInput, e.what());
  } catch (const DimensionMismatch& e) {
    return fail(AttackStatus::kDimensionMismatch, e.what());
  }

  const AttackContext ctx{*space, oracle, ledger, result.initial_label};
  Rng rng(config.seed);
  SignOptUpdater default_updater(config);
  DirectionUpdater& updater = options.updater ? *options.updater : default_updater;

  std::optional<Direction> direction;
  std::string stop_reason;
  AttackStatus stop_status = AttackStatus::kSuccess;
  try {
    InitialDirectionSearch search(ctx, config.bs_tol);
    bool exhausted = false;
    try {
      for (std::size_t t = 0; t < config.init_samples; ++t) search.offer(gaussian_vector(rng, ctx.space.dimension()));
    } catch (const BudgetExhausted&) {
      exhausted = true;
    }
    if (!search.has_best()) {
      return exhausted ? fail(AttackStatus::kBudgetExhausted, "budget exhausted before any adversarial direction")
                       : fail(AttackStatus::kInitializationFailure,
                              "no sampled direction crossed the decision boundary");
    }
    direction = search.finish(!exhausted);
    result.trace.push_back({0, ledger.used(), direction->g});

    std::size_t iteration = 0;
    while (!ledger.exhausted()) {
      ++iteration;
      try {
        updater.step(ctx, *direction, rng);
      } catch (const BudgetExhausted&) {
        break;
      }
      result.trace.push_back({iteration, ledger.used(), direction->g});
    }
    if (result.trace.back().queries != ledger.used()) {
      result.trace.push_back({iteration, ledger.used(), direction->g});
    }
    result.iterations = iteration;
  } catch (const OracleError& e) {
    stop_status = AttackStatus::kOracleError;
    stop_reason = e.what();
    if (!direction) return fail(stop_status, stop_reason);
  } catch (const InitializationFailure& e) {
    return fail(AttackStatus::kInitializationFailure, e.what());
  }

  const Finalization fin = finalize(ctx, *direction);
  result.adversarial = fin.adversarial;
  result.final_label = fin.label;
  result.g = fin.g;
  result.l2 = fin.l2;
  result.succeeded = fin.succeeded;
  result.status = fin.succeeded ? stop_status : AttackStatus::kBudgetExhausted;
  result.message = stop_reason;
  result.stalls = updater.stalls();
  result.queries_used = ledger.used();
  return result;
}

}  // namespace patchdct
