#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "olrnn/cells.hpp"
#include "olrnn/credit.hpp"
#include "olrnn/diagnostics.hpp"
#include "olrnn/optim.hpp"
#include "olrnn/tasks.hpp"

namespace olrnn {

enum class RunMode { Standard, FrozenBaseline, RtrlReference, OptimizerSwitch };

const char* run_mode_name(RunMode m);
RunMode run_mode_from_name(std::string_view s);

struct ExperimentConfig {
  CellSpec cell;
  CreditSpec credit;
  OptimSpec optim;
  TaskSpec task;
  long train_steps = 20000;
  long adapt_steps = 5000;
  long eval_window = 2000;
  int diag_every = 0;   // snapshot period; 0 disables diagnostics
  long diag_start = 0;  // first step eligible for snapshots
  int mse_every = 0;    // bucketed per-step MSE series period; 0 disables
  RunMode mode = RunMode::Standard;
  std::optional<OptimSpec> switch_optim;  // OptimizerSwitch target
  std::string checkpoint_save;            // params written at the shift
  std::string checkpoint_load;            // params read before the run
  long resume_step = 0;                   // stream position when resuming
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};

  long total_steps() const { return train_steps + adapt_steps; }
  // Binds task.shift_step to train_steps and the reference mode to full RTRL.
  void normalize();
  void validate() const;
  std::uint64_t hash(std::uint64_t seed) const;  // content hash incl. the seed
  std::string to_json_string() const;
  static ExperimentConfig from_json_string(const std::string& text);
};

struct RunResult {
  std::uint64_t seed = 0;
  double pre_shift_mse = std::numeric_limits<double>::quiet_NaN();
  double post_shift_mse = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> recovery_pct;
  bool diverged = false;
  long diverged_at = -1;
  std::vector<DiagSnapshot> diag;
  std::vector<std::pair<long, double>> mse_series;  // bucket start -> mean MSE
  double wall_time_sec = 0.0;
  long steps_run = 0;
  std::uint64_t config_hash = 0;
};

RunResult run_stream(const ExperimentConfig& config, std::uint64_t seed);

// 100 * (m_frozen - m_post) / (m_frozen - m_rtrl); the denominator must
// exceed delta or the reference is ill-conditioned.
struct IllConditionedReference : Error {
  using Error::Error;
};
double recovery(double m_frozen, double m_post, double m_rtrl, double delta = 1e-6);

// ---- grids ----------------------------------------------------------------

struct GridCell {
  std::string group;  // cell identity shared across the lr axis
  std::vector<std::pair<std::string, std::string>> coords;
  ExperimentConfig config;
};

struct GridOptions {
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  int threads = 1;
  std::string cache_dir;  // empty disables the on-disk result cache
  double ill_conditioned_delta = 1e-6;
  double reference_lr = 1e-3;  // companions: full RTRL + Adam at this lr
  std::function<void(const std::string&)> log;  // optional progress sink
};

struct RunRow {
  std::string group;
  std::vector<std::pair<std::string, std::string>> coords;
  double lr = 0.0;
  std::uint64_t seed = 0;
  RunResult run;
  double m_frozen = std::numeric_limits<double>::quiet_NaN();
  double m_rtrl = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> recovery_pct;
  bool reference_ill_conditioned = false;
};

struct LrStats {
  double lr = 0.0;
  double mean_recovery = std::numeric_limits<double>::quiet_NaN();
  double std_recovery = std::numeric_limits<double>::quiet_NaN();
  double mean_pre = std::numeric_limits<double>::quiet_NaN();
  double mean_post = std::numeric_limits<double>::quiet_NaN();
  int n_diverged = 0;
  int n_ill_conditioned = 0;
  std::vector<double> seed_recoveries;  // recovery per seed, order of seeds
};

struct GroupSummary {
  std::string group;
  std::vector<std::pair<std::string, std::string>> coords;
  std::vector<LrStats> per_lr;
  std::size_t best_index = 0;  // lowest mean post-shift MSE
  const LrStats& best() const { return per_lr.at(best_index); }
};

struct GridResult {
  std::vector<RunRow> rows;
  std::vector<RunRow> companion_rows;  // the shared frozen / RTRL reference runs
  std::vector<GroupSummary> groups;
  const GroupSummary& group(std::string_view name) const;
};

GridResult run_grid(const std::vector<GridCell>& cells, const GridOptions& options);

// The reference pair every cell of a (task, cell, seed) shares: one full-RTRL
// run and its frozen twin (identical pre-shift computation, updates stopped
// at the shift).
std::pair<RunResult, RunResult> run_reference_pair(const ExperimentConfig& reference,
                                                   std::uint64_t seed);

ExperimentConfig reference_config(const ExperimentConfig& cell_config, double lr);

namespace detail {
std::string run_result_to_json(const RunResult& r);
RunResult run_result_from_json(const std::string& text);
std::optional<RunResult> cache_get(const std::string& dir, std::uint64_t key);
void cache_put(const std::string& dir, std::uint64_t key, const RunResult& r);
}  // namespace detail

// ---- reports ---------------------------------------------------------------

void write_results_csv(const std::string& path, const GridResult& grid);
void write_diag_csv(const std::string& path, const GridResult& grid);
void write_mse_csv(const std::string& path, const GridResult& grid);
void write_summary_json(const std::string& path, const GridResult& grid);
void write_stream_csv(const std::string& path, const TaskSpec& spec,
                      std::uint64_t seed, long count);

}  // namespace olrnn
