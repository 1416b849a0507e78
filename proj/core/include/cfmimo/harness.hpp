#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cfmimo/config.hpp"
#include "cfmimo/network_model.hpp"
#include "cfmimo/precoding.hpp"

namespace cfmimo {

struct GridPoint {
  int snr_index = 0;
  int alpha_index = 0;
};

/// Seed of the random substream for one (grid point, trial). Distinct
/// (grid point, trial) pairs always map to distinct seeds: the pair is packed
/// into a unique 64-bit id and pushed through bijective mixing.
std::uint64_t substream_seed(std::uint64_t master_seed, int grid_index,
                             int trial_index);

/// Linear index of a grid point (alpha-major).
int grid_index(const ExperimentConfig& cfg, const GridPoint& point);

struct PrecoderResult {
  PrecoderKind kind = PrecoderKind::kMmse;
  bool ok = false;
  std::string skip_reason;  // set when !ok
  double sum_rate = 0.0;
  int iterations = 0;
  double objective = 0.0;
  bool jitter_applied = false;
  std::vector<IterationRecord> trace;
};

struct DropResult {
  std::uint64_t seed = 0;
  double snr_db = 0.0;
  double alpha = 0.0;
  std::vector<int> scheduled_ues;
  int active_pairs = 0;  // ones in the M x n mask
  int clamped_pairs = 0;
  std::vector<PrecoderResult> precoders;  // in cfg.precoders order
};

/// The per-drop system: cfg.system with rho_f, alpha and rng_seed filled in
/// for the grid point and trial.
SystemConfig drop_system(const ExperimentConfig& cfg, const GridPoint& point,
                         int trial_index);

/// layout -> LSF -> scheduling -> AP mask -> channel -> Psi -> precoders ->
/// sum-rate. Precoder failures are recorded as skipped entries.
DropResult run_drop(const ExperimentConfig& cfg, const GridPoint& point,
                    int trial_index);

struct SweepRow {
  double snr_db = 0.0;
  double alpha = 0.0;
  PrecoderKind precoder = PrecoderKind::kMmse;
  double mean_sum_rate = 0.0;
  double std_err = 0.0;
  double mean_iterations = 0.0;
  double flops = 0.0;

  bool operator==(const SweepRow&) const = default;
};

struct CellCount {
  double snr_db = 0.0;
  double alpha = 0.0;
  PrecoderKind precoder = PrecoderKind::kMmse;
  int recorded = 0;
  int skipped = 0;
  /// First skip reason seen in trial order, empty if none.
  std::string first_skip_reason;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<CellCount> cells;  // parallel to rows
  ExperimentConfig config;
};

/// Runs the full grid x n_drops. Trials may run on several threads; results
/// are reduced in trial order so the output never depends on the worker
/// count.
SweepResult run_sweep(const ExperimentConfig& cfg);

/// Arithmetic mean and standard error over the recorded drops of one
/// precoder (mean 0 / stderr 0 when none were recorded).
SweepRow aggregate(std::span<const DropResult> drops, std::size_t slot,
                   double snr_db, double alpha, PrecoderKind kind);

}  // namespace cfmimo
