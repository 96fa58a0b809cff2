#include "patchdct/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "patchdct/error.hpp"
#include "patchdct/image_io.hpp"
#include "patchdct/remote_oracle.hpp"
#include "patchdct/synthetic.hpp"

namespace patchdct {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// JSON has no NaN/inf; they travel as null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
double number(const json& j) { return j.is_null() ? kNaN : j.get<double>(); }

std::string format_value(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

json stats_json(const SummaryStats& s) { return {{"mean", number(s.mean)}, {"median", number(s.median)}}; }
SummaryStats stats_from(const json& j) { return {number(j.at("mean")), number(j.at("median"))}; }

json report_json(const MetricReport& r) {
  return {{"total", r.total}, {"succeeded", r.succeeded}, {"l2", stats_json(r.l2)},
          {"psnr", stats_json(r.psnr)}, {"ssim", stats_json(r.ssim)}};
}

MetricReport report_from(const json& j) {
  MetricReport r;
  r.total = j.at("total").get<std::size_t>();
  r.succeeded = j.at("succeeded").get<std::size_t>();
  r.l2 = stats_from(j.at("l2"));
  r.psnr = stats_from(j.at("psnr"));
  r.ssim = stats_from(j.at("ssim"));
  return r;
}

json image_json(const ImageRecord& r, bool with_trace) {
  json j = {{"name", r.name},
            {"seed", r.seed},
            {"status", to_string(r.status)},
            {"succeeded", r.succeeded},
            {"skipped", r.skipped},
            {"initial_label", r.initial_label},
            {"final_label", r.final_label},
            {"l2", number(r.l2)},
            {"g", number(r.g)},
            {"psnr", number(r.psnr)},
            {"ssim", number(r.ssim)},
            {"queries", r.queries},
            {"oracle_calls", r.oracle_calls},
            {"iterations", r.iterations},
            {"stalls", r.stalls},
            {"message", r.message}};
  if (with_trace) {
    json trace = json::array();
    for (const auto& p : r.trace) trace.push_back({p.iteration, p.queries, number(p.best_g)});
    j["trace"] = std::move(trace);
  }
  return j;
}

ImageRecord image_from(const json& j) {
  ImageRecord r;
  r.name = j.at("name").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.status = parse_status(j.at("status").get<std::string>());
  r.succeeded = j.at("succeeded").get<bool>();
  r.skipped = j.at("skipped").get<bool>();
  r.initial_label = j.at("initial_label").get<Label>();
  r.final_label = j.at("final_label").get<Label>();
  r.l2 = number(j.at("l2"));
  r.g = number(j.at("g"));
  r.psnr = number(j.at("psnr"));
  r.ssim = number(j.at("ssim"));
  r.queries = j.at("queries").get<std::uint64_t>();
  r.oracle_calls = j.at("oracle_calls").get<std::uint64_t>();
  r.iterations = j.at("iterations").get<std::size_t>();
  r.stalls = j.at("stalls").get<std::size_t>();
  r.message = j.at("message").get<std::string>();
  if (j.contains("trace")) {
    for (const auto& p : j.at("trace")) {
      r.trace.push_back({p.at(0).get<std::size_t>(), p.at(1).get<std::uint64_t>(), number(p.at(2))});
    }
  }
  return r;
}

std::vector<ImageOutcome> attacked_outcomes(const std::vector<ImageRecord>& images) {
  std::vector<ImageOutcome> out;
  for (const auto& r : images) {
    if (!r.skipped) out.push_back(to_outcome(r));
  }
  return out;
}

void summarize(RunRecord& record) {
  const auto outcomes = attacked_outcomes(record.images);
  record.success_rates.clear();
  if (outcomes.empty()) {
    record.report = MetricReport{0, 0, {kNaN, kNaN}, {kNaN, kNaN}, {kNaN, kNaN}};
    record.success_rates.assign(record.config.thresholds.size(), kNaN);
    return;
  }
  record.report = aggregate(outcomes);
  for (double eps : record.config.thresholds) {
    record.success_rates.push_back(success_rate(outcomes, eps, record.config.attack.budget));
  }
}

std::string safe_name(std::string name) {
  for (char& c : name) {
    if (c == '/' || c == '\\' || c == ' ') c = '_';
  }
  return name;
}

}  // namespace

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kOrder: return "r";
    case SweepAxis::kAlpha: return "alpha";
    case SweepAxis::kPatchSize: return "d";
  }
  return "?";
}

SweepAxis parse_sweep_axis(const std::string& text) {
  if (text == "r") return SweepAxis::kOrder;
  if (text == "alpha") return SweepAxis::kAlpha;
  if (text == "d") return SweepAxis::kPatchSize;
  throw ConfigError("unknown sweep axis '" + text + "' (expected r, alpha or d)");
}

void ExperimentConfig::validate() const {
  attack.validate();
  static const std::vector<std::string> kinds{"linear", "patch", "mlp", "freqprobe", "remote"};
  if (std::find(kinds.begin(), kinds.end(), oracle.kind) == kinds.end()) {
    throw ConfigError("unknown oracle kind '" + oracle.kind + "'");
  }
  if (oracle.kind == "remote" && oracle.endpoint.empty()) throw ConfigError("remote oracle needs an endpoint");
  if (input.directory.empty() && input.synthetic_count == 0) {
    throw ConfigError("no inputs: give an input directory or a synthetic image count");
  }
  if (thresholds.empty()) throw ConfigError("need at least one success threshold");
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
}

json to_json(const ExperimentConfig& c) {
  const AttackConfig& a = c.attack;
  return {
      {"attack",
       {{"patch_size", a.patch_size},
        {"order", a.order},
        {"alpha", a.alpha},
        {"budget", a.budget},
        {"init_samples", a.init_samples},
        {"probes", a.probes},
        {"eps_smooth", a.eps_smooth},
        {"eta0", a.eta0},
        {"bs_tol", a.bs_tol},
        {"max_step_trials", a.max_step_trials},
        {"max_step_growth", a.max_step_growth},
        {"seed", a.seed},
        {"domain", to_string(a.domain)},
        {"probe_distribution", to_string(a.probe_distribution)}}},
      {"oracle",
       {{"kind", c.oracle.kind},
        {"patch_size", c.oracle.patch_size},
        {"patch_index", c.oracle.patch_index},
        {"threshold", c.oracle.threshold},
        {"seed", c.oracle.seed},
        {"num_classes", c.oracle.num_classes},
        {"freq_u", c.oracle.freq_u},
        {"freq_v", c.oracle.freq_v},
        {"endpoint", c.oracle.endpoint}}},
      {"input",
       {{"directory", c.input.directory},
        {"synthetic_count", c.input.synthetic_count},
        {"synthetic_size", c.input.synthetic_size},
        {"synthetic_channels", c.input.synthetic_channels},
        {"synthetic_seed", c.input.synthetic_seed},
        {"crop", c.input.crop}}},
      {"output_dir", c.output_dir},
      {"sweep", {{"r", c.sweep.orders}, {"alpha", c.sweep.alphas}, {"d", c.sweep.patch_sizes}}},
      {"thresholds", c.thresholds},
      {"jobs", c.jobs},
  };
}

ExperimentConfig experiment_config_from_json(const json& j) {
  try {
    ExperimentConfig c;
    const json& a = j.at("attack");
    c.attack.patch_size = a.at("patch_size").get<std::size_t>();
    c.attack.order = a.at("order").get<std::size_t>();
    c.attack.alpha = a.at("alpha").get<double>();
    c.attack.budget = a.at("budget").get<std::uint64_t>();
    c.attack.init_samples = a.at("init_samples").get<std::size_t>();
    c.attack.probes = a.at("probes").get<std::size_t>();
    c.attack.eps_smooth = a.at("eps_smooth").get<double>();
    c.attack.eta0 = a.at("eta0").get<double>();
    c.attack.bs_tol = a.at("bs_tol").get<double>();
    c.attack.max_step_trials = a.at("max_step_trials").get<std::size_t>();
    c.attack.max_step_growth = a.at("max_step_growth").get<std::size_t>();
    c.attack.seed = a.at("seed").get<std::uint64_t>();
    c.attack.domain = parse_domain(a.at("domain").get<std::string>());
    c.attack.probe_distribution = parse_probe_distribution(a.at("probe_distribution").get<std::string>());
    const json& o = j.at("oracle");
    c.oracle.kind = o.at("kind").get<std::string>();
    c.oracle.patch_size = o.at("patch_size").get<std::size_t>();
    c.oracle.patch_index = o.at("patch_index").get<std::size_t>();
    c.oracle.threshold = o.at("threshold").get<double>();
    c.oracle.seed = o.at("seed").get<std::uint64_t>();
    c.oracle.num_classes = o.at("num_classes").get<int>();
    c.oracle.freq_u = o.at("freq_u").get<std::size_t>();
    c.oracle.freq_v = o.at("freq_v").get<std::size_t>();
    c.oracle.endpoint = o.at("endpoint").get<std::string>();
    const json& in = j.at("input");
    c.input.directory = in.at("directory").get<std::string>();
    c.input.synthetic_count = in.at("synthetic_count").get<std::size_t>();
    c.input.synthetic_size = in.at("synthetic_size").get<std::size_t>();
    c.input.synthetic_channels = in.at("synthetic_channels").get<std::size_t>();
    c.input.synthetic_seed = in.at("synthetic_seed").get<std::uint64_t>();
    c.input.crop = in.at("crop").get<std::size_t>();
    c.output_dir = j.at("output_dir").get<std::string>();
    c.sweep.orders = j.at("sweep").at("r").get<std::vector<double>>();
    c.sweep.alphas = j.at("sweep").at("alpha").get<std::vector<double>>();
    c.sweep.patch_sizes = j.at("sweep").at("d").get<std::vector<double>>();
    c.thresholds = j.at("thresholds").get<std::vector<double>>();
    c.jobs = j.at("jobs").get<unsigned>();
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed experiment config: ") + e.what());
  }
}

ImageTensor crop_to_multiple(const ImageTensor& image, std::size_t patch_size) {
  if (patch_size == 0) throw ConfigError("patch size must be positive");
  const std::size_t w = image.width() / patch_size * patch_size;
  const std::size_t h = image.height() / patch_size * patch_size;
  if (w == 0 || h == 0) {
    throw DimensionMismatch("image " + image.shape().to_string() + " is smaller than one " +
                            std::to_string(patch_size) + "-pixel patch");
  }
  if (w == image.width() && h == image.height()) return image;
  return center_crop(image, w, h);
}

std::vector<InputImage> load_inputs(const InputSpec& spec, std::size_t patch_size) {
  std::vector<InputImage> inputs;
  auto prepare = [&](ImageTensor image) {
    if (spec.crop > 0) image = center_crop(image, spec.crop, spec.crop);
    return crop_to_multiple(image, patch_size);
  };
  if (!spec.directory.empty()) {
    const fs::path dir(spec.directory);
    if (!fs::is_directory(dir)) throw ConfigError("input directory not found: " + spec.directory);
    std::map<std::string, Label> labels;
    if (std::ifstream csv(dir / "labels.csv"); csv) {
      std::string line;
      while (std::getline(csv, line)) {
        const auto comma = line.find(',');
        if (line.empty() || comma == std::string::npos) continue;
        try {
          labels[line.substr(0, comma)] = std::stoi(line.substr(comma + 1));
        } catch (const std::exception&) {
          // header or junk line
        }
      }
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      const auto ext = entry.path().extension().string();
      if (entry.is_regular_file() && (ext == ".png" || ext == ".imgt")) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
      InputImage input{file.stem().string(), prepare(load_image(file)), std::nullopt};
      if (auto it = labels.find(file.filename().string()); it != labels.end()) input.label = it->second;
      if (auto it = labels.find(file.stem().string()); it != labels.end()) input.label = it->second;
      inputs.push_back(std::move(input));
    }
  }
  for (std::size_t i = 0; i < spec.synthetic_count; ++i) {
    std::ostringstream name;
    name << "synthetic_" << std::setw(4) << std::setfill('0') << i;
    const Shape shape{spec.synthetic_size, spec.synthetic_size, spec.synthetic_channels};
    inputs.push_back({name.str(), prepare(synthetic_image(Rng::derive_seed(spec.synthetic_seed, i), shape)),
                      std::nullopt});
  }
  return inputs;
}

std::unique_ptr<HardLabelOracle> build_oracle(const OracleSpec& spec, const Shape& shape) {
  try {
    if (spec.kind == "linear") {
      const double n = static_cast<double>(shape.size());
      return std::make_unique<LinearOracle>(ImageTensor(shape, 1.0 / std::sqrt(n)), spec.threshold * std::sqrt(n));
    }
    if (spec.kind == "patch") {
      return std::make_unique<PatchOracle>(shape, spec.patch_size, spec.patch_index, spec.threshold);
    }
    if (spec.kind == "mlp") return std::make_unique<MlpOracle>(spec.seed, spec.num_classes, shape);
    if (spec.kind == "freqprobe") {
      return make_frequency_probe_oracle(shape, spec.patch_size, spec.freq_u, spec.freq_v, spec.threshold);
    }
    if (spec.kind == "remote") return std::make_unique<RemoteOracle>(spec.endpoint);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError("oracle '" + spec.kind + "' does not fit " + shape.to_string() + ": " + e.what());
  }
  throw ConfigError("unknown oracle kind '" + spec.kind + "'");
}

ImageOutcome to_outcome(const ImageRecord& r) { return {r.succeeded, r.l2, r.psnr, r.ssim, r.queries}; }

json content_json(const RunRecord& record) {
  json images = json::array();
  for (const auto& r : record.images) images.push_back(image_json(r, true));
  json rates = json::array();
  for (double v : record.success_rates) rates.push_back(number(v));
  return {{"engine_version", record.engine_version},
          {"config", to_json(record.config)},
          {"report", report_json(record.report)},
          {"success_rates", rates},
          {"images", images}};
}

json to_json(const RunRecord& record) {
  json j = content_json(record);
  j["wall_clock_seconds"] = record.wall_clock_seconds;
  j["timestamp"] = record.timestamp;
  return j;
}

bool operator==(const RunRecord& a, const RunRecord& b) { return to_json(a) == to_json(b); }

std::string engine_version() { return PATCHDCT_VERSION; }

RunRecord run_experiment(const ExperimentConfig& config, const std::vector<InputImage>& inputs) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  RunRecord record;
  record.config = config;
  record.engine_version = engine_version();
  record.timestamp = utc_timestamp();
  record.images.resize(inputs.size());

  // One oracle per distinct shape, built up front so config errors surface
  // before any query is spent.
  std::map<std::string, std::shared_ptr<const HardLabelOracle>> oracles;
  bool concurrent = true;
  for (const auto& input : inputs) {
    auto& slot = oracles[input.image.shape().to_string()];
    if (!slot) slot = build_oracle(config.oracle, input.image.shape());
    concurrent = concurrent && slot->concurrent_safe();
  }

  auto attack_one = [&](std::size_t index) {
    const InputImage& input = inputs[index];
    const CountingOracle counter(*oracles.at(input.image.shape().to_string()));
    AttackConfig attack = config.attack;
    attack.seed = Rng::derive_seed(config.attack.seed, index);
    AttackOptions options;
    options.expected_label = input.label;
    const AttackResult result = run_attack(input.image, counter, attack, options);

    ImageRecord& r = record.images[index];
    r.name = input.name;
    r.seed = attack.seed;
    r.status = result.status;
    r.succeeded = result.succeeded;
    r.skipped = result.status == AttackStatus::kAlreadyMisclassified;
    r.initial_label = result.initial_label;
    r.final_label = result.final_label;
    r.l2 = result.l2;
    r.g = result.g;
    r.queries = result.queries_used;
    r.oracle_calls = counter.calls();
    r.iterations = result.iterations;
    r.stalls = result.stalls;
    r.message = result.message;
    r.trace = result.trace;
    r.psnr = kNaN;
    r.ssim = kNaN;
    if (result.succeeded) {
      r.psnr = psnr(input.image, result.adversarial);
      try {
        r.ssim = ssim(input.image, result.adversarial);
      } catch (const ImageTooSmall&) {
      }
      if (!config.output_dir.empty() &&
          (result.adversarial.channels() == 1 || result.adversarial.channels() == 3)) {
        const fs::path dir = fs::path(config.output_dir) / "adversarial";
        fs::create_directories(dir);
        save_png(result.adversarial, dir / (safe_name(input.name) + ".adv.png"));
      }
    }
  };

  const unsigned workers = concurrent ? std::min<unsigned>(config.jobs, static_cast<unsigned>(inputs.size())) : 1;
  if (workers <= 1) {
    for (std::size_t i = 0; i < inputs.size(); ++i) attack_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < inputs.size(); i = next++) {
          try {
            attack_one(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
  }

  summarize(record);
  record.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!config.output_dir.empty()) write_run_record(record, config.output_dir);
  return record;
}

RunRecord run_experiment(const ExperimentConfig& config) {
  config.validate();
  return run_experiment(config, load_inputs(config.input, config.attack.patch_size));
}

void write_run_record(const RunRecord& record, const fs::path& dir) {
  fs::create_directories(dir / "traces");
  json summary = to_json(record);
  summary.erase("images");
  summary["image_count"] = record.images.size();
  {
    std::ofstream out(dir / "summary.json");
    out << summary.dump(2) << "\n";
    if (!out) throw IoError("failed writing " + (dir / "summary.json").string());
  }
  std::ofstream results(dir / "results.jsonl");
  for (const auto& r : record.images) {
    results << image_json(r, false).dump() << "\n";
    std::ofstream trace(dir / "traces" / (safe_name(r.name) + ".csv"));
    trace << "iteration,queries,best_g\n" << std::setprecision(17);
    for (const auto& p : r.trace) trace << p.iteration << "," << p.queries << "," << p.best_g << "\n";
  }
  if (!results) throw IoError("failed writing " + (dir / "results.jsonl").string());
  write_curves(emit_curves(record), dir / "curves.csv");
}

RunRecord load_run_record(const fs::path& dir) {
  std::ifstream in(dir / "summary.json");
  if (!in) throw IoError("no summary.json in " + dir.string());
  RunRecord record;
  try {
    const json summary = json::parse(in);
    record.config = experiment_config_from_json(summary.at("config"));
    record.report = report_from(summary.at("report"));
    for (const auto& v : summary.at("success_rates")) record.success_rates.push_back(number(v));
    record.engine_version = summary.at("engine_version").get<std::string>();
    record.wall_clock_seconds = summary.at("wall_clock_seconds").get<double>();
    record.timestamp = summary.at("timestamp").get<std::string>();

    std::ifstream results(dir / "results.jsonl");
    std::string line;
    while (std::getline(results, line)) {
      if (line.empty()) continue;
      ImageRecord r = image_from(json::parse(line));
      std::ifstream trace(dir / "traces" / (safe_name(r.name) + ".csv"));
      std::string row;
      std::getline(trace, row);  // header
      while (std::getline(trace, row)) {
        std::istringstream fields(row);
        std::string iteration, queries, best_g;
        std::getline(fields, iteration, ',');
        std::getline(fields, queries, ',');
        std::getline(fields, best_g, ',');
        r.trace.push_back({std::stoull(iteration), std::stoull(queries), std::stod(best_g)});
      }
      record.images.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw IoError("malformed run record in " + dir.string() + ": " + e.what());
  }
  return record;
}

std::vector<SweepRow> sweep(const ExperimentConfig& config, SweepAxis axis, const std::vector<double>& values,
                            const std::vector<InputImage>& inputs) {
  if (values.empty()) throw ConfigError("sweep axis " + to_string(axis) + " has no values");
  std::vector<SweepRow> rows;
  for (double value : values) {
    SweepRow row;
    row.axis = axis;
    row.value = value;
    ExperimentConfig cell = config;
    std::vector<InputImage> cell_inputs = inputs;
    try {
      switch (axis) {
        case SweepAxis::kOrder:
          cell.attack.order = static_cast<std::size_t>(value);
          break;
        case SweepAxis::kAlpha:
          cell.attack.alpha = value;
          break;
        case SweepAxis::kPatchSize:
          cell.attack.patch_size = static_cast<std::size_t>(value);
          for (auto& input : cell_inputs) input.image = crop_to_multiple(input.image, cell.attack.patch_size);
          break;
      }
      if (!config.output_dir.empty()) {
        cell.output_dir = (fs::path(config.output_dir) / (to_string(axis) + "_" + format_value(value))).string();
      }
      const RunRecord record = run_experiment(cell, cell_inputs);
      row.attacked = record.report.total;
      row.attackable = record.report.succeeded;
      row.mean_l2 = record.report.l2.mean;
      row.median_l2 = record.report.l2.median;
      row.success_rates = record.success_rates;
    } catch (const Error& e) {
      row.error = e.what();
      row.mean_l2 = row.median_l2 = kNaN;
      row.success_rates.assign(config.thresholds.size(), kNaN);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_sweep_table(const std::vector<SweepRow>& rows, const std::vector<double>& thresholds,
                       const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  out << "axis,value,attacked,attackable,mean_l2,median_l2";
  for (double eps : thresholds) out << ",success_at_" << format_value(eps);
  out << ",error\n" << std::setprecision(17);
  for (const auto& row : rows) {
    out << to_string(row.axis) << "," << row.value << "," << row.attacked << "," << row.attackable << ","
        << row.mean_l2 << "," << row.median_l2;
    for (double rate : row.success_rates) out << "," << rate;
    std::string error = row.error;
    std::replace(error.begin(), error.end(), ',', ';');
    out << "," << error << "\n";
  }
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<CurvePoint> emit_curves(const RunRecord& record) {
  std::vector<const ImageRecord*> traced;
  std::vector<std::uint64_t> steps;
  for (const auto& r : record.images) {
    if (r.skipped || r.trace.empty()) continue;
    traced.push_back(&r);
    for (const auto& p : r.trace) steps.push_back(p.queries);
  }
  std::sort(steps.begin(), steps.end());
  steps.erase(std::unique(steps.begin(), steps.end()), steps.end());
  // Start once every image has a point, so the series never jumps up as images join.
  std::uint64_t first = 0;
  for (const ImageRecord* r : traced) first = std::max(first, r->trace.front().queries);
  steps.erase(steps.begin(), std::lower_bound(steps.begin(), steps.end(), first));

  std::vector<CurvePoint> curve;
  std::vector<double> best;
  for (std::uint64_t q : steps) {
    best.clear();
    for (const ImageRecord* r : traced) {
      // Traces are non-increasing in g, so the last point within budget is the best.
      const auto it = std::upper_bound(r->trace.begin(), r->trace.end(), q,
                                       [](std::uint64_t value, const TracePoint& p) { return value < p.queries; });
      best.push_back(std::prev(it)->best_g);
    }
    curve.push_back({q, best.size(), mean(best), lower_median(best)});
  }
  return curve;
}

void write_curves(const std::vector<CurvePoint>& curve, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  out << "queries,images,mean_l2,median_l2\n" << std::setprecision(17);
  for (const auto& p : curve) out << p.queries << "," << p.images << "," << p.mean_l2 << "," << p.median_l2 << "\n";
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace patchdct
