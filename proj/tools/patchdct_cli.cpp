// Command-line front end: attack, sweep, report.
#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iomanip>
#include <iostream>

#include "patchdct/error.hpp"
#include "patchdct/harness.hpp"

namespace {

using namespace patchdct;

void print_report(const RunRecord& record) {
  const auto& r = record.report;
  std::cout << std::setprecision(6);
  std::cout << "images:     " << record.images.size() << " (" << r.total << " attacked, " << r.succeeded
            << " succeeded)\n";
  std::cout << "L2:         mean " << r.l2.mean << "  median " << r.l2.median << "\n";
  std::cout << "PSNR:       mean " << r.psnr.mean << "  median " << r.psnr.median << "\n";
  std::cout << "SSIM:       mean " << r.ssim.mean << "  median " << r.ssim.median << "\n";
  for (std::size_t i = 0; i < record.config.thresholds.size() && i < record.success_rates.size(); ++i) {
    std::cout << "success@" << record.config.thresholds[i] << ": " << record.success_rates[i] << "\n";
  }
  for (const auto& img : record.images) {
    std::cout << "  " << std::left << std::setw(20) << img.name << std::right << " " << std::setw(22)
              << to_string(img.status) << "  l2=" << img.l2 << "  queries=" << img.queries << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hard-label patch-DCT adversarial attack harness"};
  app.set_version_flag("--version", engine_version());
  app.set_config("--config", "", "TOML/INI config file; keys match the long flag names");
  app.require_subcommand(1);

  ExperimentConfig config;
  AttackConfig& a = config.attack;
  std::string domain = to_string(a.domain);
  std::string probes_dist = to_string(a.probe_distribution);

  app.add_option("--seed", a.seed, "Master seed (required for attack and sweep)");
  app.add_option("--patch-size", a.patch_size, "Patch size d")->capture_default_str();
  app.add_option("--order", a.order, "Low-frequency order r")->capture_default_str();
  app.add_option("--alpha", a.alpha, "Variance weight scale")->capture_default_str();
  app.add_option("--budget", a.budget, "Query budget per image")->capture_default_str();
  app.add_option("--init-samples", a.init_samples, "Random directions tried at initialization")
      ->capture_default_str();
  app.add_option("--probes", a.probes, "Probes per gradient estimate")->capture_default_str();
  app.add_option("--eps-smooth", a.eps_smooth, "Relative smoothing radius")->capture_default_str();
  app.add_option("--eta0", a.eta0, "Initial relative step size")->capture_default_str();
  app.add_option("--bs-tol", a.bs_tol, "Relative boundary-search tolerance")->capture_default_str();
  app.add_option("--max-step-trials", a.max_step_trials, "Step backtracking trials")->capture_default_str();
  app.add_option("--max-step-growth", a.max_step_growth, "Step growth doublings (0 disables)")
      ->capture_default_str();
  app.add_option("--domain", domain, "Search domain")
      ->check(CLI::IsMember({"dct_lowfreq", "pixel_full"}))
      ->capture_default_str();
  app.add_option("--probe-distribution", probes_dist, "Probe distribution")
      ->check(CLI::IsMember({"gaussian", "uniform"}))
      ->capture_default_str();

  app.add_option("--oracle", config.oracle.kind, "linear | patch | mlp | freqprobe | remote")
      ->check(CLI::IsMember({"linear", "patch", "mlp", "freqprobe", "remote"}))
      ->capture_default_str();
  app.add_option("--oracle-patch-size", config.oracle.patch_size, "Block size of patch/freqprobe oracles")
      ->capture_default_str();
  app.add_option("--patch-index", config.oracle.patch_index, "Patch watched by the patch oracle")
      ->capture_default_str();
  app.add_option("--threshold", config.oracle.threshold, "Decision threshold of toy oracles")
      ->capture_default_str();
  app.add_option("--oracle-seed", config.oracle.seed, "MLP oracle weight seed")->capture_default_str();
  app.add_option("--num-classes", config.oracle.num_classes, "MLP oracle class count")->capture_default_str();
  app.add_option("--freq-u", config.oracle.freq_u, "freqprobe coefficient row")->capture_default_str();
  app.add_option("--freq-v", config.oracle.freq_v, "freqprobe coefficient column")->capture_default_str();
  app.add_option("--endpoint", config.oracle.endpoint, "Remote oracle base URL, e.g. http://host:8000");

  app.add_option("--input-dir", config.input.directory, "Directory of .png/.imgt images (+ labels.csv)");
  app.add_option("--synthetic", config.input.synthetic_count, "Number of synthetic images")
      ->capture_default_str();
  app.add_option("--synthetic-size", config.input.synthetic_size, "Synthetic image side")->capture_default_str();
  app.add_option("--synthetic-channels", config.input.synthetic_channels, "Synthetic image channels")
      ->capture_default_str();
  app.add_option("--synthetic-seed", config.input.synthetic_seed, "Synthetic generator seed")
      ->capture_default_str();
  app.add_option("--crop", config.input.crop, "Center crop side (0: largest multiple of d)")
      ->capture_default_str();
  app.add_option("--output,-o", config.output_dir, "Output directory");
  app.add_option("--thresholds", config.thresholds, "L2 success thresholds")->capture_default_str();
  app.add_option("--jobs,-j", config.jobs, "Concurrent images (concurrent-safe oracles only)")
      ->capture_default_str();
  app.add_option("--sweep-r", config.sweep.orders, "r values for 'sweep --axis r'");
  app.add_option("--sweep-alpha", config.sweep.alphas, "alpha values for 'sweep --axis alpha'");
  app.add_option("--sweep-d", config.sweep.patch_sizes, "d values for 'sweep --axis d'");

  auto* attack = app.add_subcommand("attack", "Attack every input image and persist a run record");
  attack->fallthrough();

  std::string axis_name;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run one experiment per value of an axis");
  sweep_cmd->fallthrough();
  sweep_cmd->add_option("--axis", axis_name, "r | alpha | d")->required()->check(
      CLI::IsMember({"r", "alpha", "d"}));

  std::string run_dir;
  std::string curves_path;
  auto* report = app.add_subcommand("report", "Summarize a persisted run and emit curves");
  report->add_option("run", run_dir, "Run output directory")->required();
  report->add_option("--curves", curves_path, "Write curve CSV here (default: <run>/curves.csv)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*report) {
      const RunRecord record = load_run_record(run_dir);
      print_report(record);
      const std::filesystem::path out = curves_path.empty() ? std::filesystem::path(run_dir) / "curves.csv"
                                                            : std::filesystem::path(curves_path);
      write_curves(emit_curves(record), out);
      std::cout << "curves: " << out.string() << "\n";
      return 0;
    }

    if (app.count("--seed") == 0) {
      std::cerr << "error: --seed is required (runs never draw entropy implicitly)\n";
      return 2;
    }
    a.domain = parse_domain(domain);
    a.probe_distribution = parse_probe_distribution(probes_dist);
    config.validate();

    if (*attack) {
      const RunRecord record = run_experiment(config);
      print_report(record);
      if (!config.output_dir.empty()) std::cout << "run record: " << config.output_dir << "\n";
      return 0;
    }

    const SweepAxis axis = parse_sweep_axis(axis_name);
    const std::vector<double>& values = axis == SweepAxis::kOrder   ? config.sweep.orders
                                        : axis == SweepAxis::kAlpha ? config.sweep.alphas
                                                                    : config.sweep.patch_sizes;
    if (values.empty()) throw ConfigError("sweep axis " + axis_name + " needs values (--sweep-" + axis_name + ")");
    const auto inputs = load_inputs(config.input, config.attack.patch_size);
    const auto rows = sweep(config, axis, values, inputs);
    std::cout << std::setprecision(6) << axis_name << "\tattacked\tattackable\tmean_l2\tmedian_l2\terror\n";
    for (const auto& row : rows) {
      std::cout << row.value << "\t" << row.attacked << "\t" << row.attackable << "\t" << row.mean_l2 << "\t"
                << row.median_l2 << "\t" << row.error << "\n";
    }
    if (!config.output_dir.empty()) {
      const auto table = std::filesystem::path(config.output_dir) / ("sweep_" + axis_name + ".csv");
      write_sweep_table(rows, config.thresholds, table);
      std::cout << "table: " << table.string() << "\n";
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
