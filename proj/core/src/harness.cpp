#include "cfmimo/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "cfmimo/evaluation.hpp"

namespace cfmimo {
namespace {

// SplitMix64 finalizer; a bijection on 64-bit words.
std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

PrecoderOutput run_precoder(PrecoderKind kind, const CMatrix& g_hat_s,
                            const ErrorStatistics& psi, const LinkParams& link,
                            const RobustSettings& robust) {
  switch (kind) {
    case PrecoderKind::kZf: return zf_precoder(g_hat_s, link.power_budget);
    case PrecoderKind::kMmse: return mmse_precoder(g_hat_s, link);
    case PrecoderKind::kRobust: return robust_precoder(g_hat_s, psi, link, robust);
  }
  throw ConfigError("unknown precoder kind");
}

}  // namespace

std::uint64_t substream_seed(std::uint64_t master_seed, int grid_index,
                             int trial_index) {
  const std::uint64_t id =
      (static_cast<std::uint64_t>(static_cast<std::uint32_t>(grid_index)) << 32) |
      static_cast<std::uint32_t>(trial_index);
  return mix64(mix64(id) ^ master_seed);
}

int grid_index(const ExperimentConfig& cfg, const GridPoint& point) {
  return point.alpha_index * static_cast<int>(cfg.snr_grid_db.size()) +
         point.snr_index;
}

SystemConfig drop_system(const ExperimentConfig& cfg, const GridPoint& point,
                         int trial_index) {
  SystemConfig sys = cfg.system;
  const double snr_db = cfg.snr_grid_db.at(static_cast<std::size_t>(point.snr_index));
  sys.alpha = cfg.alpha_grid.at(static_cast<std::size_t>(point.alpha_index));
  sys.rho_f = sys.sigma_w2 * std::pow(10.0, snr_db / 10.0);
  sys.rng_seed = substream_seed(cfg.master_seed, grid_index(cfg, point), trial_index);
  return sys;
}

DropResult run_drop(const ExperimentConfig& cfg, const GridPoint& point,
                    int trial_index) {
  const SystemConfig sys = drop_system(cfg, point, trial_index);
  Rng rng(sys.rng_seed);

  const NetworkLayout layout = generate_layout(sys, rng);
  const LsfMatrix lsf = compute_lsf(layout, sys, rng);
  const std::vector<int> scheduled = schedule_users(lsf, sys);
  const RMatrix beta_s = lsf.columns(scheduled);
  const Mask mask = select_aps(beta_s, sys);
  const ChannelSet ch = draw_channel(lsf, scheduled, mask, sys, rng);
  const ErrorStatistics psi = error_covariance_psi(beta_s, mask, sys.alpha);
  const LinkParams link{sys.rho_f, sys.sigma_w2, sys.power_budget};

  DropResult drop;
  drop.seed = sys.rng_seed;
  drop.snr_db = cfg.snr_grid_db[static_cast<std::size_t>(point.snr_index)];
  drop.alpha = sys.alpha;
  drop.scheduled_ues = scheduled;
  drop.active_pairs = static_cast<int>(mask.cast<int>().sum());
  drop.clamped_pairs = lsf.clamped_pairs;

  for (PrecoderKind kind : cfg.precoders) {
    PrecoderResult r;
    r.kind = kind;
    try {
      const PrecoderOutput out = run_precoder(kind, ch.g_hat_s, psi, link, cfg.robust);
      const RMatrix r_tilde = residual_covariance(out.p, beta_s, mask, sys.alpha,
                                                  sys.rho_f, sys.sigma_w2);
      r.sum_rate = sum_rate(ch.g_hat_s, out.p, sys.rho_f, r_tilde).sum_rate;
      r.objective = mse_objective(out.p, out.h, ch.g_hat_s, psi, sys.rho_f,
                                  sys.sigma_w2);
      r.iterations = out.iterations_run;
      r.jitter_applied = out.jitter_applied;
      r.trace = out.trace;
      r.ok = true;
    } catch (const NumericalError& e) {
      r.ok = false;
      r.skip_reason = e.what();
    }
    drop.precoders.push_back(std::move(r));
  }
  return drop;
}

SweepRow aggregate(std::span<const DropResult> drops, std::size_t slot,
                   double snr_db, double alpha, PrecoderKind kind) {
  SweepRow row;
  row.snr_db = snr_db;
  row.alpha = alpha;
  row.precoder = kind;

  double sum = 0.0;
  double iterations = 0.0;
  int count = 0;
  for (const DropResult& d : drops) {
    const PrecoderResult& r = d.precoders[slot];
    if (!r.ok) continue;
    sum += r.sum_rate;
    iterations += r.iterations;
    ++count;
  }
  if (count == 0) return row;
  row.mean_sum_rate = sum / count;
  row.mean_iterations = iterations / count;
  if (count > 1) {
    double ss = 0.0;
    for (const DropResult& d : drops) {
      const PrecoderResult& r = d.precoders[slot];
      if (r.ok) ss += (r.sum_rate - row.mean_sum_rate) * (r.sum_rate - row.mean_sum_rate);
    }
    row.std_err = std::sqrt(ss / (count - 1)) / std::sqrt(static_cast<double>(count));
  }
  return row;
}

SweepResult run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto num_snr = static_cast<int>(cfg.snr_grid_db.size());
  const auto num_alpha = static_cast<int>(cfg.alpha_grid.size());
  const int num_cells = num_snr * num_alpha;
  const std::size_t total =
      static_cast<std::size_t>(num_cells) * static_cast<std::size_t>(cfg.n_drops);

  std::vector<DropResult> results(total);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t job = next++; job < total; job = next++) {
      const auto cell = static_cast<int>(job / static_cast<std::size_t>(cfg.n_drops));
      const auto trial = static_cast<int>(job % static_cast<std::size_t>(cfg.n_drops));
      const GridPoint point{cell % num_snr, cell / num_snr};
      try {
        results[job] = run_drop(cfg, point, trial);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = total;
      }
    }
  };

  unsigned threads = cfg.workers > 0 ? static_cast<unsigned>(cfg.workers)
                                     : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, total));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);

  SweepResult result;
  result.config = cfg;
  const int m = cfg.system.num_antennas();
  const int n = cfg.system.num_scheduled;
  for (int cell = 0; cell < num_cells; ++cell) {
    const GridPoint point{cell % num_snr, cell / num_snr};
    const double snr = cfg.snr_grid_db[static_cast<std::size_t>(point.snr_index)];
    const double alpha = cfg.alpha_grid[static_cast<std::size_t>(point.alpha_index)];
    const std::span<const DropResult> drops(
        results.data() + static_cast<std::size_t>(cell) * static_cast<std::size_t>(cfg.n_drops),
        static_cast<std::size_t>(cfg.n_drops));

    for (std::size_t slot = 0; slot < cfg.precoders.size(); ++slot) {
      const PrecoderKind kind = cfg.precoders[slot];
      SweepRow row = aggregate(drops, slot, snr, alpha, kind);
      row.flops = flop_count(kind, m, n, cfg.robust.i_max).flops;
      result.rows.push_back(row);

      CellCount count{snr, alpha, kind, 0, 0, {}};
      for (const DropResult& d : drops) {
        const PrecoderResult& r = d.precoders[slot];
        if (r.ok) {
          ++count.recorded;
        } else {
          ++count.skipped;
          if (count.first_skip_reason.empty()) count.first_skip_reason = r.skip_reason;
        }
      }
      result.cells.push_back(std::move(count));
    }
  }
  return result;
}

}  // namespace cfmimo
