#include "olrnn/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "olrnn/checkpoint.hpp"

namespace olrnn {

const char* run_mode_name(RunMode m) {
  switch (m) {
    case RunMode::Standard: return "standard";
    case RunMode::FrozenBaseline: return "frozen";
    case RunMode::RtrlReference: return "rtrl_reference";
    case RunMode::OptimizerSwitch: return "optimizer_switch";
  }
  return "?";
}

RunMode run_mode_from_name(std::string_view s) {
  if (s == "standard") return RunMode::Standard;
  if (s == "frozen") return RunMode::FrozenBaseline;
  if (s == "rtrl_reference") return RunMode::RtrlReference;
  if (s == "optimizer_switch") return RunMode::OptimizerSwitch;
  throw ConfigError("unknown run mode '" + std::string(s) + "'");
}

void ExperimentConfig::normalize() {
  task.shift_step = train_steps;
  if (mode == RunMode::RtrlReference) {
    credit.method = CreditMethod::FullRtrl;
  }
}

void ExperimentConfig::validate() const {
  cell.validate();
  credit.validate();
  optim.validate();
  task.validate();
  if (train_steps < 1) throw ConfigError("config: train_steps must be >= 1");
  if (adapt_steps < 0) throw ConfigError("config: adapt_steps must be >= 0");
  if (eval_window < 1) throw ConfigError("config: eval_window must be >= 1");
  if (eval_window > train_steps)
    throw ConfigError("config: eval_window exceeds train_steps");
  if (adapt_steps > 0 && eval_window > adapt_steps)
    throw ConfigError("config: eval_window exceeds adapt_steps");
  if (task.shift_step != train_steps)
    throw ConfigError("config: call normalize() before running");
  if (mode == RunMode::OptimizerSwitch && !switch_optim)
    throw ConfigError("config: optimizer_switch mode needs switch_optim");
  if (cell.n_in != task.dim() || cell.n_out != task.dim())
    throw ConfigError("config: cell I/O dims must match the task dimension");
  if (task.kind == TaskKind::Delayed && long(task.delay) >= train_steps)
    throw ConfigError("config: delayed warmup exceeds the training phase");
  if (resume_step < 0 || resume_step > total_steps())
    throw ConfigError("config: resume_step out of range");
}

// ---- engine -----------------------------------------------------------------

namespace {

struct EngineInit {
  std::optional<ParamSet> params;
  std::optional<CellState> state;
  long start_step = 0;
  std::optional<double> pre_mse_override;
  bool replay_state = false;  // rebuild the hidden state by replaying inputs
};

struct ShiftCapture {
  bool want = false;
  bool captured = false;
  ParamSet params;
  CellState state;
};

RunResult run_engine(const ExperimentConfig& raw, std::uint64_t seed, EngineInit init,
                     ShiftCapture* capture) {
  ExperimentConfig cfg = raw;
  cfg.normalize();
  cfg.validate();

  const auto t_begin = std::chrono::steady_clock::now();
  const Index n_out = cfg.cell.n_out;
  const Index sd = cfg.cell.state_dim();
  const long shift = cfg.train_steps;
  const long total = cfg.total_steps();

  RunResult res;
  res.seed = seed;
  res.config_hash = cfg.hash(seed);

  Rng rng(seed);
  ParamSet params =
      init.params ? std::move(*init.params) : make_params(cfg.cell, rng);
  CellState state = init.state ? std::move(*init.state) : init_state(cfg.cell);

  TaskStream stream(cfg.task, seed);
  if (init.replay_state && init.start_step > 0) {
    // Hidden-state burn-in with the loaded parameters, no updates.
    for (long t = 0; t < init.start_step; ++t) {
      auto [s2, y] = forward(cfg.cell, params, state, stream.next().x);
      state = std::move(s2);
    }
  } else {
    stream.advance_to(init.start_step);
  }

  auto layout = state_group_layout(cfg.cell);
  CreditState credit(cfg.credit, layout, sd);
  Sensitivity dbuf(layout, sd);
  OptimSpec optim_spec = cfg.optim;
  OptimState optim_state = OptimState::for_params(optim_spec, params);
  Vector delta_state = Vector::Zero(sd);

  double pre_sum = 0.0, post_sum = 0.0;
  long pre_n = 0, post_n = 0;
  const long pre_lo = shift - cfg.eval_window;
  const long post_lo = total - cfg.eval_window;
  double bucket_sum = 0.0;
  long bucket_n = 0, bucket_start = init.start_step;

  const bool diag_on = cfg.diag_every > 0;

  for (long t = init.start_step; t < total; ++t) {
    if (cfg.mode == RunMode::OptimizerSwitch && t == shift) {
      optim_spec = *cfg.switch_optim;
      optim_state = switch_optimizer(optim_spec, params);
      credit.reset();
    }

    StreamSample sample = stream.next();
    CellState next;
    Vector y;
    try {
      auto out = forward(cfg.cell, params, state, sample.x);
      next = std::move(out.first);
      y = std::move(out.second);
    } catch (const NumericError&) {
      res.diverged = true;
      res.diverged_at = t;
      break;
    }

    if (!sample.warmup) {
      double mse = (y - sample.y).squaredNorm() / double(n_out);
      if (t >= pre_lo && t < shift) pre_sum += mse, ++pre_n;
      if (t >= post_lo) post_sum += mse, ++post_n;
      if (cfg.mse_every > 0) {
        bucket_sum += mse;
        ++bucket_n;
        if ((t + 1 - bucket_start) >= cfg.mse_every) {
          res.mse_series.emplace_back(bucket_start, bucket_sum / double(bucket_n));
          bucket_sum = 0.0;
          bucket_n = 0;
          bucket_start = t + 1;
        }
      }
    }

    const bool frozen_now = cfg.mode == RunMode::FrozenBaseline && t >= shift;
    const bool learning = !frozen_now && !sample.warmup;
    const bool diag_now = diag_on && t >= cfg.diag_start && t % cfg.diag_every == 0;

    if (learning) {
      OutputGradient og = output_gradient(cfg.cell, params, next, y, sample.y);
      immediate_derivative(cfg.cell, params, state, next, sample.x, dbuf);

      Matrix jac;
      const bool need_jac = credit.needs_jacobian() || diag_now;
      if (need_jac) jac = state_jacobian(cfg.cell, params, state, next, sample.x);

      const Sensitivity& sens =
          credit.step(credit.needs_jacobian() ? &jac : nullptr, dbuf);
      delta_state.head(og.delta_h.size()) = og.delta_h;
      GradMap grads = assemble_gradient(sens, delta_state, std::move(og.out_grads),
                                        cfg.credit.clip_norm);

      if (diag_now) {
        DiagSnapshot snap;
        snap.t = t;
        if (params.has("w_hh")) snap.self_prop = self_propagation(next.h, params.at("w_hh"));
        Rng diag_rng = Rng::at(seed ^ 0x9E3779B97F4A7C15ull, std::uint64_t(t));
        snap.spec_radius = spectral_radius_of_state_jacobian(jac, 200, diag_rng);
        GradNormReport rep = grad_norm_report(grads);
        snap.grad_norms = std::move(rep.norms);
        snap.ratio_out_over_rec = rep.ratio_out_over_rec;
        if (cfg.credit.method == CreditMethod::Trace && cfg.credit.decay > 0.0) {
          try {
            TraceStaleness ts = trace_staleness(sens, dbuf);
            snap.trace_mag_ratio = ts.mag_ratio;
            snap.trace_cosine = ts.cosine;
          } catch (const UndefinedCosineError&) {
            snap.trace_mag_ratio = 1.0;
            snap.trace_cosine = 1.0;
          }
        } else {
          snap.trace_mag_ratio = 1.0;
          snap.trace_cosine = 1.0;
        }
        res.diag.push_back(std::move(snap));
      }

      try {
        optim_step(optim_spec, optim_state, params, grads);
      } catch (const NumericError&) {
        res.diverged = true;
        res.diverged_at = t;
        break;
      }
    }

    state = std::move(next);
    res.steps_run = t - init.start_step + 1;

    if (t == shift - 1) {
      if (capture && capture->want) {
        capture->params = params;
        capture->state = state;
        capture->captured = true;
      }
      if (!cfg.checkpoint_save.empty())
        checkpoint_save(cfg.checkpoint_save, cfg.cell, params);
    }
  }

  res.pre_shift_mse = pre_n > 0 ? pre_sum / double(pre_n)
                                : init.pre_mse_override.value_or(
                                      std::numeric_limits<double>::quiet_NaN());
  res.post_shift_mse =
      post_n > 0 ? post_sum / double(post_n) : std::numeric_limits<double>::quiet_NaN();
  res.wall_time_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
  return res;
}

}  // namespace

RunResult run_stream(const ExperimentConfig& config, std::uint64_t seed) {
  EngineInit init;
  if (!config.checkpoint_load.empty()) {
    Checkpoint cp = checkpoint_load(config.checkpoint_load);
    init.params = std::move(cp.params);
    init.start_step = config.resume_step;
    init.replay_state = config.resume_step > 0;
  }
  return run_engine(config, seed, std::move(init), nullptr);
}

double recovery(double m_frozen, double m_post, double m_rtrl, double delta) {
  if (!std::isfinite(m_frozen) || !std::isfinite(m_post) || !std::isfinite(m_rtrl))
    throw IllConditionedReference("recovery: non-finite reference MSE");
  if (!(m_frozen - m_rtrl > delta))
    throw IllConditionedReference("recovery: frozen/reference gap below margin");
  return 100.0 * (m_frozen - m_post) / (m_frozen - m_rtrl);
}

ExperimentConfig reference_config(const ExperimentConfig& cell_config, double lr) {
  ExperimentConfig ref = cell_config;
  ref.mode = RunMode::RtrlReference;
  ref.credit = CreditSpec{};
  ref.credit.method = CreditMethod::FullRtrl;
  ref.optim = OptimSpec{};
  ref.optim.method = OptimMethod::AdamFull;
  ref.optim.lr = lr;
  ref.switch_optim.reset();
  ref.checkpoint_save.clear();
  ref.checkpoint_load.clear();
  ref.resume_step = 0;
  ref.diag_every = 0;
  ref.normalize();
  return ref;
}

std::pair<RunResult, RunResult> run_reference_pair(const ExperimentConfig& reference,
                                                   std::uint64_t seed) {
  ExperimentConfig ref = reference;
  ref.normalize();

  ShiftCapture cap;
  cap.want = true;
  RunResult rtrl = run_engine(ref, seed, EngineInit{}, &cap);

  RunResult frozen;
  if (cap.captured) {
    ExperimentConfig fr = ref;
    fr.mode = RunMode::FrozenBaseline;
    EngineInit init;
    init.params = std::move(cap.params);
    init.state = std::move(cap.state);
    init.start_step = fr.train_steps;
    init.pre_mse_override = rtrl.pre_shift_mse;
    frozen = run_engine(fr, seed, std::move(init), nullptr);
    frozen.config_hash = fr.hash(seed);
  } else {
    // Reference diverged before the shift: the frozen twin shares its fate.
    frozen = rtrl;
  }
  return {std::move(rtrl), std::move(frozen)};
}

// ---- result cache -----------------------------------------------------------

namespace {

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

namespace detail {

std::optional<RunResult> cache_get(const std::string& dir, std::uint64_t key) {
  if (dir.empty()) return std::nullopt;
  std::filesystem::path p = std::filesystem::path(dir) / (hash_hex(key) + ".json");
  std::ifstream is(p);
  if (!is) return std::nullopt;
  std::stringstream ss;
  ss << is.rdbuf();
  try {
    return detail::run_result_from_json(ss.str());
  } catch (const std::exception&) {
    return std::nullopt;  // stale or corrupt entry: recompute
  }
}

void cache_put(const std::string& dir, std::uint64_t key, const RunResult& r) {
  if (dir.empty()) return;
  std::filesystem::create_directories(dir);
  std::filesystem::path p = std::filesystem::path(dir) / (hash_hex(key) + ".json");
  std::ofstream os(p, std::ios::trunc);
  os << run_result_to_json(r);
}

}  // namespace detail

namespace {

using detail::cache_get;
using detail::cache_put;

void run_jobs(std::vector<std::function<void()>> jobs, int threads) {
  if (threads <= 1 || jobs.size() <= 1) {
    for (auto& j : jobs) j();
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      jobs[i]();
    }
  };
  std::vector<std::thread> pool;
  int k = std::min<int>(threads, int(jobs.size()));
  pool.reserve(std::size_t(k));
  for (int i = 0; i < k; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double x : xs) s += x;
  return s / double(xs.size());
}

double std_of(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  double m = mean_of(xs), s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / double(xs.size() - 1));
}

}  // namespace

const GroupSummary& GridResult::group(std::string_view name) const {
  for (const auto& g : groups)
    if (g.group == name) return g;
  throw ConfigError("grid: no group named '" + std::string(name) + "'");
}

GridResult run_grid(const std::vector<GridCell>& cells, const GridOptions& options) {
  if (cells.empty()) throw ConfigError("grid: no cells");
  auto log = [&](const std::string& s) {
    if (options.log) options.log(s);
  };

  // Phase 1: the shared frozen / RTRL companions, one per (reference config,
  // seed). Cells that agree on task, cell and protocol share automatically.
  struct CompanionJob {
    ExperimentConfig ref;
    std::uint64_t seed;
    std::uint64_t key;  // hash of the reference config + seed
    RunResult rtrl, frozen;
  };
  std::vector<CompanionJob> companions;
  std::map<std::uint64_t, std::size_t> companion_index;
  for (const auto& cell : cells) {
    ExperimentConfig ref = reference_config(cell.config, options.reference_lr);
    for (auto seed : options.seeds) {
      std::uint64_t key = ref.hash(seed);
      if (companion_index.count(key)) continue;
      companion_index[key] = companions.size();
      companions.push_back({ref, seed, key, {}, {}});
    }
  }

  std::vector<std::function<void()>> jobs;
  for (auto& job : companions) {
    jobs.push_back([&job, &options, &log] {
      std::uint64_t frozen_key = mix64(job.key ^ 0xF0F0F0F0F0F0F0F0ull);
      auto cached_r = cache_get(options.cache_dir, job.key);
      auto cached_f = cache_get(options.cache_dir, frozen_key);
      if (cached_r && cached_f) {
        job.rtrl = *cached_r;
        job.frozen = *cached_f;
        return;
      }
      log("companion seed=" + std::to_string(job.seed));
      auto [rtrl, frozen] = run_reference_pair(job.ref, job.seed);
      job.rtrl = rtrl;
      job.frozen = frozen;
      cache_put(options.cache_dir, job.key, job.rtrl);
      cache_put(options.cache_dir, frozen_key, job.frozen);
    });
  }
  run_jobs(std::move(jobs), options.threads);

  // Phase 2: the cells themselves.
  struct CellJob {
    const GridCell* cell;
    std::uint64_t seed;
    RunResult run;
  };
  std::vector<CellJob> cell_jobs;
  for (const auto& cell : cells)
    for (auto seed : options.seeds) cell_jobs.push_back({&cell, seed, {}});

  jobs.clear();
  for (auto& job : cell_jobs) {
    jobs.push_back([&job, &options, &log] {
      ExperimentConfig cfg = job.cell->config;
      cfg.normalize();
      std::uint64_t key = cfg.hash(job.seed);
      if (auto cached = cache_get(options.cache_dir, key)) {
        job.run = *cached;
        return;
      }
      log("cell " + job.cell->group + " lr=" + std::to_string(cfg.optim.lr) +
          " seed=" + std::to_string(job.seed));
      job.run = run_stream(cfg, job.seed);
      cache_put(options.cache_dir, key, job.run);
    });
  }
  run_jobs(std::move(jobs), options.threads);

  // Phase 3: recovery against the shared companions, then aggregation.
  GridResult grid;
  for (auto& job : cell_jobs) {
    RunRow row;
    row.group = job.cell->group;
    row.coords = job.cell->coords;
    row.lr = job.cell->config.optim.lr;
    row.seed = job.seed;
    row.run = std::move(job.run);

    ExperimentConfig ref = reference_config(job.cell->config, options.reference_lr);
    const CompanionJob& comp = companions[companion_index.at(ref.hash(job.seed))];
    row.m_frozen = comp.frozen.post_shift_mse;
    row.m_rtrl = comp.rtrl.post_shift_mse;

    // A diverged adaptation counts as no improvement over frozen, flagged.
    double m_post = row.run.post_shift_mse;
    if (row.run.diverged || !std::isfinite(m_post)) m_post = row.m_frozen;
    try {
      row.recovery_pct =
          recovery(row.m_frozen, m_post, row.m_rtrl, options.ill_conditioned_delta);
      row.run.recovery_pct = row.recovery_pct;
    } catch (const IllConditionedReference&) {
      row.reference_ill_conditioned = true;
    }
    grid.rows.push_back(std::move(row));
  }

  for (const auto& job : companions) {
    RunRow r;
    r.group = "__rtrl_reference";
    r.lr = job.ref.optim.lr;
    r.seed = job.seed;
    r.run = job.rtrl;
    grid.companion_rows.push_back(r);
    r.group = "__frozen";
    r.run = job.frozen;
    grid.companion_rows.push_back(std::move(r));
  }

  // Group rows by cell, then by lr.
  for (const auto& cell : cells) {
    bool seen = false;
    for (const auto& g : grid.groups) seen |= g.group == cell.group;
    if (seen) continue;
    GroupSummary gs;
    gs.group = cell.group;
    gs.coords = cell.coords;
    std::vector<double> lrs;
    for (const auto& c : cells)
      if (c.group == cell.group) lrs.push_back(c.config.optim.lr);
    std::sort(lrs.begin(), lrs.end());
    lrs.erase(std::unique(lrs.begin(), lrs.end()), lrs.end());
    for (double lr : lrs) {
      LrStats st;
      st.lr = lr;
      std::vector<double> recs, pres, posts;
      for (const auto& row : grid.rows) {
        if (row.group != cell.group || row.lr != lr) continue;
        if (row.recovery_pct) {
          recs.push_back(*row.recovery_pct);
          st.seed_recoveries.push_back(*row.recovery_pct);
        }
        if (row.reference_ill_conditioned) ++st.n_ill_conditioned;
        if (row.run.diverged) ++st.n_diverged;
        if (std::isfinite(row.run.pre_shift_mse)) pres.push_back(row.run.pre_shift_mse);
        double mp = row.run.post_shift_mse;
        if (row.run.diverged || !std::isfinite(mp)) mp = row.m_frozen;
        if (std::isfinite(mp)) posts.push_back(mp);
      }
      st.mean_recovery = mean_of(recs);
      st.std_recovery = std_of(recs);
      st.mean_pre = mean_of(pres);
      st.mean_post = mean_of(posts);
      gs.per_lr.push_back(std::move(st));
    }
    // Best lr: lowest mean post-shift MSE (more stable than the recovery
    // percentage when the reference gap is small).
    std::size_t best = 0;
    for (std::size_t i = 1; i < gs.per_lr.size(); ++i) {
      double a = gs.per_lr[i].mean_post, b = gs.per_lr[best].mean_post;
      if (std::isfinite(a) && (!std::isfinite(b) || a < b)) best = i;
    }
    gs.best_index = best;
    grid.groups.push_back(std::move(gs));
  }
  return grid;
}

// ---- reports ---------------------------------------------------------------

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string fmt_double(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream ss;
  ss.precision(12);
  ss << v;
  return ss.str();
}

}  // namespace

void write_results_csv(const std::string& path, const GridResult& grid) {
  // Column set depends only on the grid's coordinate keys.
  std::vector<std::string> coord_keys;
  for (const auto& row : grid.rows)
    for (const auto& [k, v] : row.coords)
      if (std::find(coord_keys.begin(), coord_keys.end(), k) == coord_keys.end())
        coord_keys.push_back(k);

  std::ofstream os(path, std::ios::trunc);
  if (!os) throw FormatError("cannot open '" + path + "' for writing");
  os << "group";
  for (const auto& k : coord_keys) os << "," << csv_escape(k);
  os << ",lr,seed,pre_shift_mse,post_shift_mse,m_frozen,m_rtrl,recovery_pct,"
        "ill_conditioned,diverged,diverged_at,wall_time_sec,steps\n";

  auto emit = [&](const RunRow& row) {
    os << csv_escape(row.group);
    for (const auto& k : coord_keys) {
      std::string v;
      for (const auto& [ck, cv] : row.coords)
        if (ck == k) v = cv;
      os << "," << csv_escape(v);
    }
    os << "," << fmt_double(row.lr) << "," << row.seed << ","
       << fmt_double(row.run.pre_shift_mse) << ","
       << fmt_double(row.run.post_shift_mse) << "," << fmt_double(row.m_frozen)
       << "," << fmt_double(row.m_rtrl) << ","
       << (row.recovery_pct ? fmt_double(*row.recovery_pct) : "") << ","
       << (row.reference_ill_conditioned ? 1 : 0) << "," << (row.run.diverged ? 1 : 0)
       << "," << row.run.diverged_at << "," << fmt_double(row.run.wall_time_sec)
       << "," << row.run.steps_run << "\n";
  };
  for (const auto& row : grid.rows) emit(row);
  for (const auto& row : grid.companion_rows) emit(row);
}

void write_diag_csv(const std::string& path, const GridResult& grid) {
  std::vector<std::string> norm_keys;
  auto scan = [&](const RunRow& row) {
    for (const auto& snap : row.run.diag)
      for (const auto& [k, v] : snap.grad_norms)
        if (std::find(norm_keys.begin(), norm_keys.end(), k) == norm_keys.end())
          norm_keys.push_back(k);
  };
  for (const auto& row : grid.rows) scan(row);
  for (const auto& row : grid.companion_rows) scan(row);
  std::sort(norm_keys.begin(), norm_keys.end());

  std::ofstream os(path, std::ios::trunc);
  if (!os) throw FormatError("cannot open '" + path + "' for writing");
  os << "group,lr,seed,t,self_prop,spec_radius,ratio_out_over_rec,trace_mag_ratio,"
        "trace_cosine";
  for (const auto& k : norm_keys) os << ",norm_" << csv_escape(k);
  os << "\n";
  auto emit = [&](const RunRow& row) {
    for (const auto& snap : row.run.diag) {
      os << csv_escape(row.group) << "," << fmt_double(row.lr) << "," << row.seed
         << "," << snap.t << "," << fmt_double(snap.self_prop) << ","
         << fmt_double(snap.spec_radius) << "," << fmt_double(snap.ratio_out_over_rec)
         << "," << fmt_double(snap.trace_mag_ratio) << ","
         << fmt_double(snap.trace_cosine);
      for (const auto& k : norm_keys) {
        auto it = snap.grad_norms.find(k);
        os << "," << (it == snap.grad_norms.end() ? "" : fmt_double(it->second));
      }
      os << "\n";
    }
  };
  for (const auto& row : grid.rows) emit(row);
  for (const auto& row : grid.companion_rows) emit(row);
}

void write_mse_csv(const std::string& path, const GridResult& grid) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw FormatError("cannot open '" + path + "' for writing");
  os << "group,lr,seed,t,mse\n";
  auto emit = [&](const RunRow& row) {
    for (const auto& [t, m] : row.run.mse_series)
      os << csv_escape(row.group) << "," << fmt_double(row.lr) << "," << row.seed
         << "," << t << "," << fmt_double(m) << "\n";
  };
  for (const auto& row : grid.rows) emit(row);
  for (const auto& row : grid.companion_rows) emit(row);
}

void write_stream_csv(const std::string& path, const TaskSpec& spec,
                      std::uint64_t seed, long count) {
  TaskSpec s = spec;
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw FormatError("cannot open '" + path + "' for writing");
  os << "t,phase,warmup";
  for (Index i = 0; i < s.dim(); ++i) os << ",x" << i;
  for (Index i = 0; i < s.dim(); ++i) os << ",y" << i;
  os << "\n";
  TaskStream stream(s, seed);
  for (long t = 0; t < count; ++t) {
    StreamSample sample = stream.next();
    os << sample.t << "," << (sample.phase == Phase::PreShift ? "pre" : "post") << ","
       << (sample.warmup ? 1 : 0);
    for (Index i = 0; i < sample.x.size(); ++i) os << "," << fmt_double(sample.x[i]);
    for (Index i = 0; i < sample.y.size(); ++i) os << "," << fmt_double(sample.y[i]);
    os << "\n";
  }
}

}  // namespace olrnn
