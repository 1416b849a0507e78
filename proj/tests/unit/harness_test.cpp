#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "cfmimo/csv.hpp"
#include "cfmimo/harness.hpp"

namespace cfmimo {
namespace {

ExperimentConfig tiny_config() {
  ExperimentConfig cfg;
  cfg.system.num_aps = 4;
  cfg.system.antennas_per_ap = 2;
  cfg.system.num_ues = 16;
  cfg.system.num_scheduled = 4;
  cfg.snr_grid_db = {0.0, 10.0};
  cfg.alpha_grid = {0.0, 0.15};
  cfg.n_drops = 6;
  cfg.workers = 1;
  return cfg;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

TEST(SubstreamSeed, DistinctAcrossGridAndTrials) {
  std::set<std::uint64_t> seen;
  for (int g = 0; g < 50; ++g) {
    for (int t = 0; t < 200; ++t) seen.insert(substream_seed(1, g, t));
  }
  EXPECT_EQ(seen.size(), 50u * 200u);
  EXPECT_NE(substream_seed(1, 0, 0), substream_seed(2, 0, 0));
}

TEST(DropSystem, SetsSnrAlphaAndSeed) {
  const ExperimentConfig cfg = tiny_config();
  const SystemConfig sys = drop_system(cfg, {1, 1}, 3);
  EXPECT_NEAR(sys.rho_f, 10.0 * cfg.system.sigma_w2, 1e-12);
  EXPECT_EQ(sys.alpha, 0.15);
  EXPECT_EQ(sys.rng_seed, substream_seed(cfg.master_seed, 3, 3));
}

TEST(RunDrop, DeterministicAndComplete) {
  const ExperimentConfig cfg = tiny_config();
  const DropResult a = run_drop(cfg, {1, 1}, 2);
  const DropResult b = run_drop(cfg, {1, 1}, 2);
  ASSERT_EQ(a.precoders.size(), 3u);
  for (std::size_t i = 0; i < a.precoders.size(); ++i) {
    EXPECT_EQ(a.precoders[i].ok, b.precoders[i].ok);
    EXPECT_EQ(a.precoders[i].sum_rate, b.precoders[i].sum_rate);
    EXPECT_EQ(a.precoders[i].kind, cfg.precoders[i]);
  }
  EXPECT_EQ(a.scheduled_ues, b.scheduled_ues);
  EXPECT_EQ(a.scheduled_ues.size(), 4u);
  EXPECT_GE(a.active_pairs, 4 * 2);
}

TEST(Aggregate, MeanAndStandardErrorOverRecordedDrops) {
  std::vector<DropResult> drops(4);
  const double rates[] = {1.0, 2.0, 3.0, 100.0};
  for (std::size_t i = 0; i < drops.size(); ++i) {
    PrecoderResult r;
    r.kind = PrecoderKind::kMmse;
    r.ok = i < 3;
    r.sum_rate = rates[i];
    r.iterations = static_cast<int>(i);
    drops[i].precoders.push_back(r);
  }
  const SweepRow row = aggregate(drops, 0, 5.0, 0.1, PrecoderKind::kMmse);
  EXPECT_DOUBLE_EQ(row.mean_sum_rate, 2.0);
  EXPECT_DOUBLE_EQ(row.mean_iterations, 1.0);
  EXPECT_DOUBLE_EQ(row.std_err, 1.0 / std::sqrt(3.0));
  EXPECT_EQ(row.snr_db, 5.0);
}

TEST(Aggregate, NothingRecorded) {
  std::vector<DropResult> drops(2);
  for (auto& d : drops) d.precoders.push_back(PrecoderResult{});
  const SweepRow row = aggregate(drops, 0, 0.0, 0.0, PrecoderKind::kZf);
  EXPECT_EQ(row.mean_sum_rate, 0.0);
  EXPECT_EQ(row.std_err, 0.0);
}

TEST(RunSweep, RowsFollowGridAndPrecoderOrder) {
  ExperimentConfig cfg = tiny_config();
  const SweepResult res = run_sweep(cfg);
  ASSERT_EQ(res.rows.size(), 2u * 2u * 3u);
  ASSERT_EQ(res.cells.size(), res.rows.size());
  std::size_t i = 0;
  for (double alpha : cfg.alpha_grid) {
    for (double snr : cfg.snr_grid_db) {
      for (PrecoderKind kind : cfg.precoders) {
        EXPECT_EQ(res.rows[i].alpha, alpha);
        EXPECT_EQ(res.rows[i].snr_db, snr);
        EXPECT_EQ(res.rows[i].precoder, kind);
        EXPECT_EQ(res.cells[i].recorded + res.cells[i].skipped, cfg.n_drops);
        EXPECT_GT(res.rows[i].flops, 0.0);
        ++i;
      }
    }
  }
}

TEST(RunSweep, PrecoderFilter) {
  ExperimentConfig cfg = tiny_config();
  cfg.precoders = {PrecoderKind::kZf};
  const SweepResult res = run_sweep(cfg);
  ASSERT_EQ(res.rows.size(), 4u);
  for (const SweepRow& r : res.rows) {
    EXPECT_EQ(r.precoder, PrecoderKind::kZf);
    EXPECT_EQ(r.mean_iterations, 0.0);
  }
}

TEST(RunSweep, IndependentOfWorkerCount) {
  ExperimentConfig one = tiny_config();
  ExperimentConfig many = one;
  many.workers = 3;
  EXPECT_EQ(run_sweep(one).rows, run_sweep(many).rows);
}

TEST(RunSweep, SameSeedSameBytes) {
  const ExperimentConfig cfg = tiny_config();
  const SweepResult a = run_sweep(cfg);
  const SweepResult b = run_sweep(cfg);
  EXPECT_EQ(render_csv(a.rows), render_csv(b.rows));
  EXPECT_EQ(render_manifest(a), render_manifest(b));
  ExperimentConfig other = cfg;
  other.master_seed = 2;
  EXPECT_NE(render_csv(run_sweep(other).rows), render_csv(a.rows));
}

TEST(Csv, HeaderOnlyForNoRows) {
  EXPECT_EQ(render_csv({}), std::string(kCsvHeader) + "\n");
  EXPECT_TRUE(parse_csv(render_csv({})).empty());
}

TEST(Csv, ParseRoundTripIsExact) {
  const SweepResult res = run_sweep(tiny_config());
  EXPECT_EQ(parse_csv(render_csv(res.rows)), res.rows);
}

TEST(Csv, RejectsWrongHeaderAndFieldCount) {
  EXPECT_THROW(parse_csv("snr,alpha\n"), ConfigError);
  EXPECT_THROW(parse_csv(std::string(kCsvHeader) + "\n1,2,zf\n"), ConfigError);
  EXPECT_THROW(parse_csv(std::string(kCsvHeader) + "\n1,2,zf,x,1,1,1\n"), ConfigError);
}

TEST(Csv, ManifestSitsNextToCsv) {
  EXPECT_EQ(manifest_path_for("out/run.csv"), std::filesystem::path("out/run.manifest"));
}

TEST(Csv, EmitWritesBothFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "cfmimo_emit_test";
  std::filesystem::remove_all(dir);
  const SweepResult res = run_sweep(tiny_config());
  emit_csv(res, dir / "nested" / "r.csv");
  EXPECT_EQ(slurp(dir / "nested" / "r.csv"), render_csv(res.rows));
  const std::string manifest = slurp(dir / "nested" / "r.manifest");
  EXPECT_NE(manifest.find("master_seed=1\n"), std::string::npos);
  EXPECT_NE(manifest.find("code_version="), std::string::npos);
  EXPECT_NE(manifest.find(".robust.recorded="), std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST(Csv, UnwritablePathThrowsIoError) {
  const auto dir = std::filesystem::temp_directory_path() / "cfmimo_blocker";
  std::filesystem::remove_all(dir);
  { std::ofstream(dir) << "x"; }  // a file where a directory is needed
  EXPECT_THROW(emit_csv(SweepResult{}, dir / "sub" / "r.csv"), IoError);
  std::filesystem::remove_all(dir);
}

TEST(Csv, OutputDirectoryOverride) {
  ::setenv(kOutputDirEnv, "/tmp/elsewhere", 1);
  EXPECT_EQ(resolve_output_path("runs/a.csv"), std::filesystem::path("/tmp/elsewhere/a.csv"));
  ::unsetenv(kOutputDirEnv);
  EXPECT_EQ(resolve_output_path("runs/a.csv"), std::filesystem::path("runs/a.csv"));
}

}  // namespace
}  // namespace cfmimo
