#pragma once

#include "olrnn/harness.hpp"

namespace olrnn {

// Canonical experiment definitions used by both the CLI and the verification
// suite. Budgets are per-preset defaults; learning-rate grids come from the
// per-optimizer table below.

struct PresetOptions {
  Index n_hidden = 64;
  long train_steps = 20000;
  long adapt_steps = 5000;
  long eval_window = 2000;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
};

// Per-(optimizer, task) learning-rate grid; the defaults are shared.
std::vector<double> lr_grid_for(OptimMethod method, TaskKind task);

ExperimentConfig base_config(TaskKind task, Arch arch, const PresetOptions& opt);

// Decay {0.95, 0} x optimizer {SGD, Adam} on the sine shift, plain streaming
// gradients (no clipping).
std::vector<GridCell> preset_grid_2x2(const PresetOptions& opt);

// Trace-decay sweep under Adam on the sine shift.
std::vector<GridCell> preset_sweep_decay(const PresetOptions& opt);

// Six optimizers with immediate-derivative gradients and unit gradient
// clipping, on sine and delayed streams.
std::vector<GridCell> preset_isolate_optim(const PresetOptions& opt);

// SGD and Adam across the four cell architectures, clipped gradients.
std::vector<GridCell> preset_cross_arch(const PresetOptions& opt);

// Train with Adam, swap the optimizer at the shift.
std::vector<GridCell> preset_switch_control(const PresetOptions& opt);

// ---- measurement protocols ---------------------------------------------------

struct DiagnoseSeedReport {
  std::uint64_t seed = 0;
  double vanilla_ratio = 0.0;       // post-shift windowed ||g_out|| / ||g_rec||
  double ctrnn_ratio = 0.0;
  double self_prop_mean = 0.0;      // over trained-regime samples
  double radius_in_range_frac = 0.0;  // share of samples in (0.2, 1.0)
  std::vector<double> radius_samples;
  double staleness_mag_ratio = 0.0;  // decay-0.95 trace vs immediate at t=500
  double staleness_cosine = 0.0;
};

struct DiagnoseReport {
  std::vector<DiagnoseSeedReport> seeds;
  GridResult vanilla_grid;  // carries the diagnostic snapshot series
  GridResult ctrnn_grid;
};

struct DiagnoseOptions {
  PresetOptions preset;
  std::string cache_dir;
  int threads = 1;
  long staleness_at = 500;  // trace age probed after training
  std::function<void(const std::string&)> log;
};

DiagnoseReport run_diagnose(const DiagnoseOptions& opt);

// Analytic memory table over a hidden-size sweep.
struct MemScaleRow {
  Index n_hidden;
  MemoryEstimate rtrl;
  MemoryEstimate trace;
};
std::vector<MemScaleRow> memscale_table(Arch arch, const std::vector<Index>& sizes,
                                        OptimMethod optim, int bpe);
void write_memscale_csv(const std::string& path, const std::vector<MemScaleRow>& rows);

// Wall-clock comparison of the credit methods at fixed size (per-step cost).
struct TimingRow {
  std::string label;
  double wall_time_sec = 0.0;
  long steps = 0;
  double sec_per_step() const { return steps > 0 ? wall_time_sec / double(steps) : 0.0; }
};
std::vector<TimingRow> run_timing(Index n_hidden, long trace_steps, long rtrl_steps,
                                  const std::string& cache_dir);

}  // namespace olrnn
