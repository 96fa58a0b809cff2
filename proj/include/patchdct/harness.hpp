#ifndef PATCHDCT_HARNESS_HPP
#define PATCHDCT_HARNESS_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "patchdct/attack.hpp"
#include "patchdct/metrics.hpp"
#include "patchdct/oracle.hpp"

namespace patchdct {

/// Which classifier to attack.
struct OracleSpec {
  std::string kind = "patch";  // linear | patch | mlp | freqprobe | remote
  std::size_t patch_size = 16;  // patch, freqprobe: the oracle's own block size
  std::size_t patch_index = 0;  // patch
  double threshold = 0.5;       // linear (mean intensity), patch (mean), freqprobe (coefficient sum)
  std::uint64_t seed = 0;       // mlp
  int num_classes = 2;          // mlp
  std::size_t freq_u = 0;       // freqprobe
  std::size_t freq_v = 1;
  std::string endpoint;         // remote
};

struct InputSpec {
  std::string directory;  // *.png / *.imgt, optional labels.csv (name,label)
  std::size_t synthetic_count = 0;
  std::size_t synthetic_size = 32;
  std::size_t synthetic_channels = 3;
  std::uint64_t synthetic_seed = 0;
  std::size_t crop = 0;  // center crop to crop x crop; 0 = largest multiple of the patch size
};

struct SweepAxes {
  std::vector<double> orders;
  std::vector<double> alphas;
  std::vector<double> patch_sizes;
};

enum class SweepAxis { kOrder, kAlpha, kPatchSize };
std::string to_string(SweepAxis axis);
SweepAxis parse_sweep_axis(const std::string& text);

struct ExperimentConfig {
  AttackConfig attack;
  OracleSpec oracle;
  InputSpec input;
  std::string output_dir;
  SweepAxes sweep;
  std::vector<double> thresholds{3.0, 5.0, 8.0};
  unsigned jobs = 1;

  /// Throws ConfigError.
  void validate() const;
};

nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig experiment_config_from_json(const nlohmann::json& json);

struct InputImage {
  std::string name;
  ImageTensor image;
  std::optional<Label> label;
};

std::vector<InputImage> load_inputs(const InputSpec& spec, std::size_t patch_size);

/// Throws ConfigError for unknown kinds or parameters that do not fit `shape`.
std::unique_ptr<HardLabelOracle> build_oracle(const OracleSpec& spec, const Shape& shape);

/// Center crop to the largest multiple of `patch_size` in each dimension.
ImageTensor crop_to_multiple(const ImageTensor& image, std::size_t patch_size);

/// Per-image summary of one attack.
struct ImageRecord {
  std::string name;
  std::uint64_t seed = 0;
  AttackStatus status = AttackStatus::kSuccess;
  bool succeeded = false;
  bool skipped = false;
  Label initial_label = 0;
  Label final_label = 0;
  double l2 = 0.0;
  double g = 0.0;
  double psnr = 0.0;
  double ssim = 0.0;
  std::uint64_t queries = 0;
  std::uint64_t oracle_calls = 0;
  std::size_t iterations = 0;
  std::size_t stalls = 0;
  std::string message;
  std::vector<TracePoint> trace;
};

ImageOutcome to_outcome(const ImageRecord& record);

struct RunRecord {
  ExperimentConfig config;
  std::vector<ImageRecord> images;
  MetricReport report;
  std::vector<double> success_rates;  // parallel to config.thresholds
  double wall_clock_seconds = 0.0;
  std::string engine_version;
  std::string timestamp;
};

/// Everything except wall clock and timestamp.
nlohmann::json content_json(const RunRecord& record);
nlohmann::json to_json(const RunRecord& record);
bool operator==(const RunRecord& a, const RunRecord& b);

std::string engine_version();

/// Attacks every input with a fresh ledger. Images whose known label the
/// oracle already gets wrong are recorded as skipped. When
/// config.output_dir is set the record, traces and adversarial PNGs are written there.
RunRecord run_experiment(const ExperimentConfig& config, const std::vector<InputImage>& inputs);
RunRecord run_experiment(const ExperimentConfig& config);

// results.jsonl, summary.json, traces/<name>.csv
void write_run_record(const RunRecord& record, const std::filesystem::path& dir);
RunRecord load_run_record(const std::filesystem::path& dir);

struct SweepRow {
  SweepAxis axis = SweepAxis::kOrder;
  double value = 0.0;
  std::size_t attacked = 0;    // images not skipped
  std::size_t attackable = 0;  // images with an adversarial example
  double mean_l2 = 0.0;
  double median_l2 = 0.0;
  std::vector<double> success_rates;  // parallel to thresholds
  std::string error;                  // non-empty when the cell failed
};

/// One run_experiment per axis value; a failing cell is recorded, not fatal.
/// Cell outputs go to <output_dir>/<axis>_<value>/ when output_dir is set.
std::vector<SweepRow> sweep(const ExperimentConfig& config, SweepAxis axis, const std::vector<double>& values,
                            const std::vector<InputImage>& inputs);
void write_sweep_table(const std::vector<SweepRow>& rows, const std::vector<double>& thresholds,
                       const std::filesystem::path& path);

struct CurvePoint {
  std::uint64_t queries = 0;
  std::size_t images = 0;  // images with an adversarial example by then
  double mean_l2 = 0.0;
  double median_l2 = 0.0;
  bool operator==(const CurvePoint&) const = default;
};

/// Best-so-far boundary distance across images, evaluated at every query
/// count that appears in any trace.
std::vector<CurvePoint> emit_curves(const RunRecord& record);
void write_curves(const std::vector<CurvePoint>& curve, const std::filesystem::path& path);

}  // namespace patchdct

#endif  // PATCHDCT_HARNESS_HPP
