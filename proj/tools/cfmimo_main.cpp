// cfmimo: command-line front end for sweeps, single drops and FLOP counts.
//
// Exit codes: 0 success, 1 configuration error, 2 runtime/numerical error,
// 3 I/O error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cfmimo/config.hpp"
#include "cfmimo/csv.hpp"
#include "cfmimo/evaluation.hpp"
#include "cfmimo/harness.hpp"

namespace {

using namespace cfmimo;

enum ExitCode { kOk = 0, kConfig = 1, kRuntime = 2, kIo = 3 };

struct CommonOptions {
  std::string config_file;
  std::vector<std::string> settings;
  // Convenience flags; each maps onto one config key.
  std::optional<std::string> snr;
  std::optional<std::string> alpha;
  std::optional<std::string> drops;
  std::optional<std::string> precoders;
  std::optional<std::string> seed;
  std::optional<std::string> output;
  std::optional<std::string> workers;
};

void add_common(CLI::App& app, CommonOptions& o) {
  app.add_option("-c,--config", o.config_file, "key=value config file");
  app.add_option("-s,--set", o.settings, "override one key, e.g. --set system.L=9")
      ->type_name("KEY=VALUE");
  app.add_option("--snr", o.snr, "snr_grid_db (list or start:step:stop)");
  app.add_option("--alpha", o.alpha, "alpha_grid (comma list)");
  app.add_option("--drops", o.drops, "n_drops");
  app.add_option("--precoders", o.precoders, "precoders (comma list of zf,mmse,robust)");
  app.add_option("--seed", o.seed, "master_seed");
  app.add_option("-o,--output", o.output, "output_path");
  app.add_option("-j,--workers", o.workers, "worker threads (0 = all cores)");
}

ExperimentConfig build_config(const CommonOptions& o) {
  ExperimentConfig cfg;
  if (!o.config_file.empty()) apply_settings(cfg, read_key_values(o.config_file));
  for (const std::string& kv : o.settings) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("--set expects KEY=VALUE, got '" + kv + "'");
    }
    apply_settings(cfg, parse_key_values(kv));
  }
  const std::pair<const char*, const std::optional<std::string>*> flags[] = {
      {"snr_grid_db", &o.snr},   {"alpha_grid", &o.alpha},   {"n_drops", &o.drops},
      {"precoders", &o.precoders}, {"master_seed", &o.seed}, {"output_path", &o.output},
      {"workers", &o.workers},
  };
  for (const auto& [key, value] : flags) {
    if (value->has_value()) apply_setting(cfg, key, **value);
  }
  cfg.validate();
  return cfg;
}

int run_sweep_command(const CommonOptions& o, bool quiet) {
  const ExperimentConfig cfg = build_config(o);
  const auto path = resolve_output_path(cfg.output_path);
  const SweepResult res = run_sweep(cfg);
  emit_csv(res, path);
  if (!quiet) {
    std::cout << render_csv(res.rows);
    int skipped = 0;
    for (const CellCount& c : res.cells) skipped += c.skipped;
    std::cerr << "wrote " << path.string() << " and " << manifest_path_for(path).string()
              << " (" << res.rows.size() << " rows, " << skipped << " skipped drops)\n";
  }
  return kOk;
}

int run_drop_command(const CommonOptions& o, int snr_index, int alpha_index, int trial,
                     bool show_trace) {
  const ExperimentConfig cfg = build_config(o);
  if (snr_index < 0 || snr_index >= static_cast<int>(cfg.snr_grid_db.size()) ||
      alpha_index < 0 || alpha_index >= static_cast<int>(cfg.alpha_grid.size())) {
    throw ConfigError("grid index out of range");
  }
  if (trial < 0) throw ConfigError("--trial must be >= 0");
  const DropResult d = run_drop(cfg, {snr_index, alpha_index}, trial);
  std::printf("seed=%llu snr_db=%s alpha=%s active_pairs=%d clamped_pairs=%d\n",
              static_cast<unsigned long long>(d.seed), format_double(d.snr_db).c_str(),
              format_double(d.alpha).c_str(), d.active_pairs, d.clamped_pairs);
  std::printf("scheduled_ues=");
  for (std::size_t i = 0; i < d.scheduled_ues.size(); ++i) {
    std::printf("%s%d", i ? "," : "", d.scheduled_ues[i]);
  }
  std::printf("\n");
  for (const PrecoderResult& r : d.precoders) {
    const std::string name(to_string(r.kind));
    if (!r.ok) {
      std::printf("%s skipped: %s\n", name.c_str(), r.skip_reason.c_str());
      continue;
    }
    std::printf("%s sum_rate=%.12g objective=%.12g iterations=%d jitter=%s\n", name.c_str(),
                r.sum_rate, r.objective, r.iterations, r.jitter_applied ? "yes" : "no");
    if (show_trace) {
      for (const IterationRecord& t : r.trace) {
        std::printf("  iter=%d h=%.6g lambda=%.6g J=%.6g rel_change=%.3g min_eig=%.3g%s\n",
                    t.iteration, t.h, t.lambda, t.objective, t.relative_change,
                    t.min_eigenvalue, t.jitter_applied ? " jitter" : "");
      }
    }
  }
  return kOk;
}

int run_flops_command(const CommonOptions& o, bool breakdown) {
  const ExperimentConfig cfg = build_config(o);
  const int m = cfg.system.num_antennas();
  const int n = cfg.system.num_scheduled;
  std::printf("method,M,n,i_max,flops\n");
  for (PrecoderKind kind : cfg.precoders) {
    const FlopReport rep = flop_count(kind, m, n, cfg.robust.i_max);
    std::printf("%s,%d,%d,%d,%.12g\n", std::string(to_string(kind)).c_str(), m, n,
                cfg.robust.i_max, rep.flops);
    if (breakdown) {
      for (const FlopStep& s : rep.breakdown) {
        std::printf("# %s.%s=%.12g\n", std::string(to_string(kind)).c_str(),
                    s.name.c_str(), s.flops);
      }
    }
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cell-free massive MIMO downlink precoding simulator"};
  app.set_version_flag("--version", code_version());
  app.require_subcommand(1);

  bool list_keys = false;
  app.add_flag("--list-keys", list_keys, "print every config key with its default and exit");

  CommonOptions sweep_opts;
  bool quiet = false;
  auto* sweep = app.add_subcommand("sweep", "run the SNR x alpha Monte Carlo sweep");
  add_common(*sweep, sweep_opts);
  sweep->add_flag("-q,--quiet", quiet, "do not echo the CSV to stdout");

  CommonOptions drop_opts;
  int snr_index = 0;
  int alpha_index = 0;
  int trial = 0;
  bool trace = false;
  auto* drop = app.add_subcommand("drop", "run and report a single drop");
  add_common(*drop, drop_opts);
  drop->add_option("--snr-index", snr_index, "index into snr_grid_db");
  drop->add_option("--alpha-index", alpha_index, "index into alpha_grid");
  drop->add_option("--trial", trial, "trial index");
  drop->add_flag("--trace", trace, "print the robust iteration trace");

  CommonOptions flops_opts;
  bool breakdown = false;
  auto* flops = app.add_subcommand("flops", "print the analytic FLOP counts");
  add_common(*flops, flops_opts);
  flops->add_flag("--breakdown", breakdown, "also print per-step counts");

  auto* keys = app.add_subcommand("keys", "print every config key with its default value");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (list_keys || keys->parsed()) {
      for (const auto& [k, v] : to_key_values(ExperimentConfig{})) std::cout << k << " = " << v << '\n';
      return kOk;
    }
    if (sweep->parsed()) return run_sweep_command(sweep_opts, quiet);
    if (drop->parsed()) return run_drop_command(drop_opts, snr_index, alpha_index, trial, trace);
    if (flops->parsed()) return run_flops_command(flops_opts, breakdown);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kOk;
}
