#include "olrnn/presets.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace olrnn {

std::vector<double> lr_grid_for(OptimMethod method, TaskKind task) {
  (void)method;
  (void)task;
  return {1e-2, 3e-3, 1e-3};
}

ExperimentConfig base_config(TaskKind task, Arch arch, const PresetOptions& opt) {
  ExperimentConfig cfg;
  cfg.cell.arch = arch;
  cfg.cell.n_hidden = opt.n_hidden;
  cfg.task.kind = task;
  cfg.cell.n_in = cfg.task.dim();
  cfg.cell.n_out = cfg.task.dim();
  if (task == TaskKind::Lorenz) cfg.task.noise_std = 0.0;
  cfg.credit.method = CreditMethod::Trace;
  cfg.credit.decay = 0.0;
  cfg.optim.method = OptimMethod::AdamFull;
  cfg.train_steps = opt.train_steps;
  cfg.adapt_steps = opt.adapt_steps;
  cfg.eval_window = opt.eval_window;
  cfg.seeds = opt.seeds;
  cfg.normalize();
  return cfg;
}

namespace {

std::string fmt(double v) {
  std::ostringstream ss;
  ss << v;
  return ss.str();
}

void expand_lr(std::vector<GridCell>& cells, GridCell cell, TaskKind task) {
  for (double lr : lr_grid_for(cell.config.optim.method, task)) {
    GridCell c = cell;
    c.config.optim.lr = lr;
    cells.push_back(std::move(c));
  }
}

}  // namespace

std::vector<GridCell> preset_grid_2x2(const PresetOptions& opt) {
  std::vector<GridCell> cells;
  for (double decay : {0.95, 0.0}) {
    for (OptimMethod method : {OptimMethod::Sgd, OptimMethod::AdamFull}) {
      GridCell cell;
      cell.config = base_config(TaskKind::SineShift, Arch::VanillaRnn, opt);
      cell.config.credit.decay = decay;
      cell.config.optim.method = method;
      cell.group = "decay=" + fmt(decay) + "|optim=" + optim_method_name(method);
      cell.coords = {{"task", "sine"},
                     {"decay", fmt(decay)},
                     {"optim", optim_method_name(method)}};
      expand_lr(cells, std::move(cell), TaskKind::SineShift);
    }
  }
  return cells;
}

std::vector<GridCell> preset_sweep_decay(const PresetOptions& opt) {
  std::vector<GridCell> cells;
  for (double decay : {0.001, 0.01, 0.1, 0.3, 0.5, 0.7, 0.95}) {
    GridCell cell;
    cell.config = base_config(TaskKind::SineShift, Arch::VanillaRnn, opt);
    cell.config.credit.decay = decay;
    cell.group = "decay=" + fmt(decay);
    cell.coords = {{"task", "sine"}, {"decay", fmt(decay)}, {"optim", "adam"}};
    expand_lr(cells, std::move(cell), TaskKind::SineShift);
  }
  return cells;
}

std::vector<GridCell> preset_isolate_optim(const PresetOptions& opt) {
  std::vector<GridCell> cells;
  const OptimMethod methods[] = {OptimMethod::Sgd,        OptimMethod::SgdMomentum,
                                 OptimMethod::AdamB1Only, OptimMethod::RmsProp,
                                 OptimMethod::AdamB2Only, OptimMethod::AdamFull};
  for (TaskKind task : {TaskKind::SineShift, TaskKind::Delayed}) {
    for (OptimMethod method : methods) {
      GridCell cell;
      cell.config = base_config(task, Arch::VanillaRnn, opt);
      cell.config.credit.clip_norm = 1.0;
      cell.config.optim.method = method;
      cell.group = std::string("task=") + task_name(task) +
                   "|optim=" + optim_method_name(method);
      cell.coords = {{"task", task_name(task)},
                     {"decay", "0"},
                     {"optim", optim_method_name(method)}};
      expand_lr(cells, std::move(cell), task);
    }
  }
  return cells;
}

std::vector<GridCell> preset_cross_arch(const PresetOptions& opt) {
  std::vector<GridCell> cells;
  for (Arch arch : {Arch::VanillaRnn, Arch::Gru, Arch::Lstm, Arch::Ctrnn}) {
    for (OptimMethod method : {OptimMethod::Sgd, OptimMethod::AdamFull}) {
      GridCell cell;
      cell.config = base_config(TaskKind::SineShift, arch, opt);
      cell.config.credit.clip_norm = 1.0;
      cell.config.optim.method = method;
      cell.group = std::string("arch=") + arch_name(arch) +
                   "|optim=" + optim_method_name(method);
      cell.coords = {{"task", "sine"},
                     {"arch", arch_name(arch)},
                     {"optim", optim_method_name(method)}};
      expand_lr(cells, std::move(cell), TaskKind::SineShift);
    }
  }
  return cells;
}

std::vector<GridCell> preset_switch_control(const PresetOptions& opt) {
  std::vector<GridCell> cells;
  const OptimMethod targets[] = {OptimMethod::Sgd, OptimMethod::AdamFull,
                                 OptimMethod::AdamB2Only};
  for (OptimMethod target : targets) {
    GridCell cell;
    cell.config = base_config(TaskKind::SineShift, Arch::VanillaRnn, opt);
    cell.config.credit.clip_norm = 1.0;
    cell.config.mode = RunMode::OptimizerSwitch;
    cell.config.optim.method = OptimMethod::AdamFull;
    cell.config.optim.lr = 1e-3;
    OptimSpec sw;
    sw.method = target;
    cell.config.switch_optim = sw;
    cell.group = std::string("switch_to=") + optim_method_name(target);
    cell.coords = {{"task", "sine"},
                   {"optim", "adam"},
                   {"switch_to", optim_method_name(target)}};
    // The lr axis applies to the post-shift optimizer; training stays fixed.
    for (double lr : lr_grid_for(target, TaskKind::SineShift)) {
      GridCell c = cell;
      c.config.switch_optim->lr = lr;
      c.config.optim.lr = 1e-3;
      cells.push_back(std::move(c));
    }
  }
  return cells;
}

// ---- diagnose ----------------------------------------------------------------

namespace {

// Post-training probe: freeze the parameters, keep streaming, and accumulate a
// decayed trace next to the per-step immediate derivative.
DiagnoseSeedReport staleness_probe(const ExperimentConfig& trained_cfg,
                                   std::uint64_t seed, long probe_steps,
                                   double decay) {
  ExperimentConfig cfg = trained_cfg;
  cfg.normalize();

  // Re-train deterministically (cheap relative to the grid runs) by replaying
  // the exact standard run up to the shift, then probe.
  Rng rng(seed);
  ParamSet params = make_params(cfg.cell, rng);
  CellState state = init_state(cfg.cell);
  TaskStream stream(cfg.task, seed);
  auto layout = state_group_layout(cfg.cell);
  const Index sd = cfg.cell.state_dim();
  CreditState credit(cfg.credit, layout, sd);
  Sensitivity dbuf(layout, sd);
  OptimState optim_state = OptimState::for_params(cfg.optim, params);
  Vector delta_state = Vector::Zero(sd);

  for (long t = 0; t < cfg.train_steps; ++t) {
    StreamSample sample = stream.next();
    auto [next, y] = forward(cfg.cell, params, state, sample.x);
    if (!sample.warmup) {
      OutputGradient og = output_gradient(cfg.cell, params, next, y, sample.y);
      immediate_derivative(cfg.cell, params, state, next, sample.x, dbuf);
      Matrix jac;
      if (credit.needs_jacobian())
        jac = state_jacobian(cfg.cell, params, state, next, sample.x);
      const Sensitivity& sens =
          credit.step(credit.needs_jacobian() ? &jac : nullptr, dbuf);
      delta_state.head(og.delta_h.size()) = og.delta_h;
      GradMap grads = assemble_gradient(sens, delta_state, std::move(og.out_grads),
                                        cfg.credit.clip_norm);
      optim_step(cfg.optim, optim_state, params, grads);
    }
    state = std::move(next);
  }

  Sensitivity trace(layout, sd);
  Sensitivity dprobe(layout, sd);
  DiagnoseSeedReport rep;
  rep.seed = seed;
  for (long k = 0; k < probe_steps; ++k) {
    StreamSample sample = stream.next();
    auto [next, y] = forward(cfg.cell, params, state, sample.x);
    immediate_derivative(cfg.cell, params, state, next, sample.x, dprobe);
    trace.data() *= decay;
    trace.data() += dprobe.data();
    state = std::move(next);
  }
  TraceStaleness ts = trace_staleness(trace, dprobe);
  rep.staleness_mag_ratio = ts.mag_ratio;
  rep.staleness_cosine = ts.cosine;
  return rep;
}

GridCell diag_cell(TaskKind task, Arch arch, const PresetOptions& opt) {
  GridCell cell;
  cell.config = base_config(task, arch, opt);
  cell.config.optim.lr = 1e-3;
  cell.config.diag_every = 100;
  cell.config.diag_start = opt.train_steps / 2;  // trained regime only
  cell.group = std::string("diag|arch=") + arch_name(arch);
  cell.coords = {{"task", task_name(task)}, {"arch", arch_name(arch)}};
  return cell;
}

double windowed_ratio_post_shift(const GridResult& grid, const std::string& group,
                                 std::uint64_t seed, long shift) {
  double out_sum = 0.0, rec_sum = 0.0;
  long n = 0;
  for (const auto& row : grid.rows) {
    if (row.group != group || row.seed != seed) continue;
    for (const auto& snap : row.run.diag) {
      if (snap.t < shift) continue;
      double rec = 0.0, outn = 0.0;
      for (const auto& [name, v] : snap.grad_norms) {
        if (name.rfind("w_h", 0) == 0) rec += v * v;
        if (name == "w_out") outn = v;
      }
      out_sum += outn;
      rec_sum += std::sqrt(rec);
      ++n;
    }
  }
  if (n == 0 || rec_sum == 0.0) return std::numeric_limits<double>::infinity();
  return out_sum / rec_sum;
}

}  // namespace

DiagnoseReport run_diagnose(const DiagnoseOptions& opt) {
  DiagnoseReport report;

  GridOptions gopt;
  gopt.seeds = opt.preset.seeds;
  gopt.threads = opt.threads;
  gopt.cache_dir = opt.cache_dir;
  gopt.log = opt.log;

  std::vector<GridCell> vanilla{diag_cell(TaskKind::SineShift, Arch::VanillaRnn, opt.preset)};
  std::vector<GridCell> ctrnn{diag_cell(TaskKind::SineShift, Arch::Ctrnn, opt.preset)};
  report.vanilla_grid = run_grid(vanilla, gopt);
  report.ctrnn_grid = run_grid(ctrnn, gopt);

  const long shift = opt.preset.train_steps;
  for (auto seed : opt.preset.seeds) {
    DiagnoseSeedReport rep =
        staleness_probe(vanilla[0].config, seed, opt.staleness_at, 0.95);
    rep.vanilla_ratio =
        windowed_ratio_post_shift(report.vanilla_grid, vanilla[0].group, seed, shift);
    rep.ctrnn_ratio =
        windowed_ratio_post_shift(report.ctrnn_grid, ctrnn[0].group, seed, shift);

    // Trained-regime stability measurements from the snapshot series.
    double sp_sum = 0.0;
    long sp_n = 0, in_range = 0;
    for (const auto& row : report.vanilla_grid.rows) {
      if (row.seed != seed) continue;
      for (const auto& snap : row.run.diag) {
        sp_sum += snap.self_prop;
        ++sp_n;
        rep.radius_samples.push_back(snap.spec_radius);
        if (snap.spec_radius > 0.2 && snap.spec_radius < 1.0) ++in_range;
      }
    }
    rep.self_prop_mean = sp_n > 0 ? sp_sum / double(sp_n) : 0.0;
    rep.radius_in_range_frac =
        sp_n > 0 ? double(in_range) / double(sp_n) : 0.0;
    report.seeds.push_back(std::move(rep));
  }
  return report;
}

// ---- memory / timing ----------------------------------------------------------

std::vector<MemScaleRow> memscale_table(Arch arch, const std::vector<Index>& sizes,
                                        OptimMethod optim, int bpe) {
  std::vector<MemScaleRow> rows;
  for (Index n : sizes) {
    CellSpec cell;
    cell.arch = arch;
    cell.n_hidden = n;
    cell.n_in = 1;
    cell.n_out = 1;
    MemScaleRow row{n, memory_model(CreditMethod::FullRtrl, cell, optim, bpe),
                    memory_model(CreditMethod::Trace, cell, optim, bpe)};
    rows.push_back(row);
  }
  return rows;
}

void write_memscale_csv(const std::string& path, const std::vector<MemScaleRow>& rows) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw FormatError("cannot open '" + path + "' for writing");
  os << "n_hidden,method,bytes_sensitivity,bytes_params,bytes_optstate,bytes_total\n";
  for (const auto& r : rows) {
    os << r.n_hidden << ",full_rtrl," << r.rtrl.bytes_sensitivity << ","
       << r.rtrl.bytes_params << "," << r.rtrl.bytes_optstate << ","
       << r.rtrl.bytes_total << "\n";
    os << r.n_hidden << ",trace," << r.trace.bytes_sensitivity << ","
       << r.trace.bytes_params << "," << r.trace.bytes_optstate << ","
       << r.trace.bytes_total << "\n";
  }
}

std::vector<TimingRow> run_timing(Index n_hidden, long trace_steps, long rtrl_steps,
                                  const std::string& cache_dir) {
  auto timed_config = [&](CreditMethod method, double decay, long steps) {
    PresetOptions opt;
    opt.n_hidden = n_hidden;
    opt.train_steps = steps / 2;
    opt.adapt_steps = steps - steps / 2;
    opt.eval_window = std::min<long>(500, steps / 2);
    ExperimentConfig cfg = base_config(TaskKind::SineShift, Arch::VanillaRnn, opt);
    cfg.credit.method = method;
    cfg.credit.decay = decay;
    cfg.optim.method = OptimMethod::AdamFull;
    cfg.optim.lr = 1e-3;
    cfg.normalize();
    return cfg;
  };

  struct Item {
    std::string label;
    ExperimentConfig cfg;
  };
  const Item items[] = {
      {"trace_decay_0", timed_config(CreditMethod::Trace, 0.0, trace_steps)},
      {"trace_decay_0.95", timed_config(CreditMethod::Trace, 0.95, trace_steps)},
      {"full_rtrl", timed_config(CreditMethod::FullRtrl, 0.0, rtrl_steps)},
  };

  std::vector<TimingRow> rows;
  for (const auto& item : items) {
    TimingRow row;
    row.label = item.label;
    // Wall time is part of the result, so timing entries can reuse the cache.
    std::uint64_t key = item.cfg.hash(1);
    RunResult res;
    if (auto cached = detail::cache_get(cache_dir, key)) {
      res = *cached;
    } else {
      res = run_stream(item.cfg, 1);
      detail::cache_put(cache_dir, key, res);
    }
    row.wall_time_sec = res.wall_time_sec;
    row.steps = res.steps_run;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace olrnn
