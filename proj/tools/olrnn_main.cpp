// Command-line harness: single runs, config-driven grids, and the canned
// experiment presets, with CSV/JSON emission.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "olrnn/presets.hpp"

namespace fs = std::filesystem;
using namespace olrnn;

namespace {

struct CommonOpts {
  std::string out = "results";
  std::string format = "csv";
  std::string cache;
  std::string seeds;
  int threads = int(std::thread::hardware_concurrency());
  long train_steps = -1;
  long adapt_steps = -1;
  long eval_window = -1;
  Index n_hidden = -1;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--format", o.format, "csv|json (summary.json is always written)")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--cache", o.cache, "result cache directory (reruns are skipped)");
  cmd->add_option("--seeds", o.seeds, "comma-separated seed list");
  cmd->add_option("--threads", o.threads, "worker threads for grid cells");
  cmd->add_option("--train-steps", o.train_steps, "pre-shift steps");
  cmd->add_option("--adapt-steps", o.adapt_steps, "post-shift steps");
  cmd->add_option("--eval-window", o.eval_window, "MSE window length");
  cmd->add_option("--n", o.n_hidden, "hidden units");
  cmd->add_flag("--quiet", o.quiet, "suppress progress lines");
}

std::vector<std::uint64_t> parse_seeds(const std::string& s) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) seeds.push_back(std::stoull(tok));
  }
  if (seeds.empty()) throw ConfigError("--seeds: no seeds parsed");
  return seeds;
}

PresetOptions preset_options(const CommonOpts& o, const PresetOptions& defaults) {
  PresetOptions p = defaults;
  if (!o.seeds.empty()) p.seeds = parse_seeds(o.seeds);
  if (o.train_steps > 0) p.train_steps = o.train_steps;
  if (o.adapt_steps > 0) p.adapt_steps = o.adapt_steps;
  if (o.eval_window > 0) p.eval_window = o.eval_window;
  if (o.n_hidden > 0) p.n_hidden = o.n_hidden;
  return p;
}

GridOptions grid_options(const CommonOpts& o, const PresetOptions& p) {
  GridOptions g;
  g.seeds = p.seeds;
  g.threads = std::max(1, o.threads);
  g.cache_dir = o.cache;
  if (!o.quiet)
    g.log = [](const std::string& s) { std::fprintf(stderr, "[run] %s\n", s.c_str()); };
  return g;
}

void emit_grid(const GridResult& grid, const CommonOpts& o) {
  fs::create_directories(o.out);
  write_results_csv((fs::path(o.out) / "results.csv").string(), grid);
  write_diag_csv((fs::path(o.out) / "diag.csv").string(), grid);
  write_summary_json((fs::path(o.out) / "summary.json").string(), grid);
  if (!o.quiet) {
    for (const auto& g : grid.groups) {
      const auto& b = g.best();
      std::fprintf(stderr, "%-44s lr=%-8g recovery %7.1f +- %5.1f  post-mse %.5f\n",
                   g.group.c_str(), b.lr, b.mean_recovery, b.std_recovery,
                   b.mean_post);
    }
    std::fprintf(stderr, "wrote %s/{results.csv,diag.csv,summary.json}\n",
                 o.out.c_str());
  }
}

int run_preset(std::vector<GridCell> cells, const CommonOpts& o,
               const PresetOptions& p) {
  GridResult grid = run_grid(cells, grid_options(o, p));
  emit_grid(grid, o);
  return 0;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return ExperimentConfig::from_json_string(ss.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"online recurrent-network adaptation harness"};
  app.require_subcommand(1);

  CommonOpts o;

  // run: one config, all its seeds
  auto* cmd_run = app.add_subcommand("run", "run a single experiment config");
  std::string run_config, dump_stream;
  cmd_run->add_option("--config", run_config, "experiment config (json)")->required();
  cmd_run->add_option("--dump-stream", dump_stream, "also write the raw task stream");
  add_common(cmd_run, o);

  // grid: base config + axes
  auto* cmd_grid = app.add_subcommand("grid", "run a cartesian grid from an axes file");
  std::string grid_config;
  cmd_grid->add_option("--config", grid_config, "axes file (json: base + axes)")
      ->required();
  add_common(cmd_grid, o);

  auto* cmd_2x2 = app.add_subcommand("grid-2x2", "trace decay x optimizer on sine");
  add_common(cmd_2x2, o);
  auto* cmd_sweep = app.add_subcommand("sweep-decay", "trace-decay sweep under Adam");
  add_common(cmd_sweep, o);
  auto* cmd_iso = app.add_subcommand("isolate-optim",
                                     "six optimizers, clipped immediate gradients");
  add_common(cmd_iso, o);
  auto* cmd_arch = app.add_subcommand("cross-arch", "SGD vs Adam across architectures");
  add_common(cmd_arch, o);
  auto* cmd_switch =
      app.add_subcommand("switch-control", "train with Adam, swap optimizer at shift");
  add_common(cmd_switch, o);

  auto* cmd_mem = app.add_subcommand("memscale", "analytic memory table");
  std::string mem_sizes = "64,128,256,512,1024";
  std::string mem_arch = "gru";
  int mem_bpe = 4;
  cmd_mem->add_option("--sizes", mem_sizes, "hidden sizes");
  cmd_mem->add_option("--arch", mem_arch, "architecture");
  cmd_mem->add_option("--bpe", mem_bpe, "bytes per element (4 or 8)");
  add_common(cmd_mem, o);

  auto* cmd_diag =
      app.add_subcommand("diagnose", "gradient-scale, trace-staleness and stability probes");
  add_common(cmd_diag, o);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cmd_run) {
      ExperimentConfig cfg = load_config(run_config);
      cfg.normalize();
      if (!o.seeds.empty()) cfg.seeds = parse_seeds(o.seeds);
      if (!dump_stream.empty())
        write_stream_csv(dump_stream, cfg.task, cfg.seeds.at(0), cfg.total_steps());
      std::vector<GridCell> cells;
      GridCell cell;
      cell.group = "run";
      cell.coords = {{"task", task_name(cfg.task.kind)},
                     {"arch", arch_name(cfg.cell.arch)},
                     {"optim", optim_method_name(cfg.optim.method)}};
      cell.config = cfg;
      cells.push_back(cell);
      PresetOptions p;
      p.seeds = cfg.seeds;
      return run_preset(std::move(cells), o, p);
    }
    if (*cmd_grid) {
      std::ifstream is(grid_config);
      if (!is) throw ConfigError("cannot open axes file '" + grid_config + "'");
      std::stringstream ss;
      ss << is.rdbuf();
      nlohmann::json j = nlohmann::json::parse(ss.str());
      ExperimentConfig base =
          ExperimentConfig::from_json_string(j.at("base").dump());
      base.normalize();
      std::vector<GridCell> cells;
      auto axes = j.value("axes", nlohmann::json::object());
      std::vector<double> decays = axes.value("decay", std::vector<double>{base.credit.decay});
      std::vector<std::string> optims =
          axes.value("optim", std::vector<std::string>{optim_method_name(base.optim.method)});
      std::vector<double> lrs = axes.value("lr", std::vector<double>{base.optim.lr});
      std::vector<std::string> archs =
          axes.value("arch", std::vector<std::string>{arch_name(base.cell.arch)});
      std::vector<Index> ns = axes.value("n_hidden", std::vector<Index>{base.cell.n_hidden});
      for (const auto& arch : archs)
        for (Index n : ns)
          for (double decay : decays)
            for (const auto& om : optims) {
              GridCell cell;
              cell.config = base;
              cell.config.cell.arch = arch_from_name(arch);
              cell.config.cell.n_hidden = n;
              cell.config.credit.decay = decay;
              cell.config.optim.method = optim_method_from_name(om);
              cell.group = "arch=" + arch + "|n=" + std::to_string(n) +
                           "|decay=" + std::to_string(decay) + "|optim=" + om;
              cell.coords = {{"arch", arch},
                             {"n_hidden", std::to_string(n)},
                             {"decay", std::to_string(decay)},
                             {"optim", om}};
              for (double lr : lrs) {
                GridCell c = cell;
                c.config.optim.lr = lr;
                cells.push_back(std::move(c));
              }
            }
      PresetOptions p;
      p.seeds = base.seeds;
      if (!o.seeds.empty()) p.seeds = parse_seeds(o.seeds);
      return run_preset(std::move(cells), o, p);
    }
    if (*cmd_2x2)
      return run_preset(preset_grid_2x2(preset_options(o, PresetOptions{})), o,
                        preset_options(o, PresetOptions{}));
    if (*cmd_sweep)
      return run_preset(preset_sweep_decay(preset_options(o, PresetOptions{})), o,
                        preset_options(o, PresetOptions{}));
    if (*cmd_iso)
      return run_preset(preset_isolate_optim(preset_options(o, PresetOptions{})), o,
                        preset_options(o, PresetOptions{}));
    if (*cmd_arch) {
      PresetOptions defaults;
      defaults.train_steps = 10000;  // four architectures, one RTRL reference each
      defaults.adapt_steps = 4000;
      defaults.eval_window = 1500;
      return run_preset(preset_cross_arch(preset_options(o, defaults)), o,
                        preset_options(o, defaults));
    }
    if (*cmd_switch)
      return run_preset(preset_switch_control(preset_options(o, PresetOptions{})), o,
                        preset_options(o, PresetOptions{}));
    if (*cmd_mem) {
      std::vector<Index> sizes;
      std::stringstream ss(mem_sizes);
      std::string tok;
      while (std::getline(ss, tok, ',')) sizes.push_back(std::stol(tok));
      auto rows = memscale_table(arch_from_name(mem_arch), sizes, OptimMethod::Sgd, mem_bpe);
      fs::create_directories(o.out);
      write_memscale_csv((fs::path(o.out) / "memscale.csv").string(), rows);
      for (const auto& r : rows)
        std::printf("n=%-6ld rtrl=%.3e bytes  trace=%.3e bytes  ratio=%.1f\n",
                    long(r.n_hidden), double(r.rtrl.bytes_sensitivity),
                    double(r.trace.bytes_sensitivity),
                    double(r.rtrl.bytes_sensitivity) / double(r.trace.bytes_sensitivity));
      return 0;
    }
    if (*cmd_diag) {
      DiagnoseOptions d;
      d.preset = preset_options(o, PresetOptions{});
      d.cache_dir = o.cache;
      d.threads = std::max(1, o.threads);
      if (!o.quiet)
        d.log = [](const std::string& s) { std::fprintf(stderr, "[run] %s\n", s.c_str()); };
      DiagnoseReport rep = run_diagnose(d);
      fs::create_directories(o.out);
      write_diag_csv((fs::path(o.out) / "diag.csv").string(), rep.vanilla_grid);
      nlohmann::json js = nlohmann::json::array();
      for (const auto& s : rep.seeds) {
        js.push_back({{"seed", s.seed},
                      {"vanilla_ratio_out_over_rec", s.vanilla_ratio},
                      {"ctrnn_ratio_out_over_rec", s.ctrnn_ratio},
                      {"self_prop_mean", s.self_prop_mean},
                      {"radius_in_range_frac", s.radius_in_range_frac},
                      {"staleness_mag_ratio", s.staleness_mag_ratio},
                      {"staleness_cosine", s.staleness_cosine}});
        std::printf(
            "seed %llu: ratio(vanilla)=%.1f ratio(ctrnn)=%.1f self_prop=%.4f "
            "radius_in_range=%.2f staleness=(%.2fx, cos %.3f)\n",
            (unsigned long long)s.seed, s.vanilla_ratio, s.ctrnn_ratio,
            s.self_prop_mean, s.radius_in_range_frac, s.staleness_mag_ratio,
            s.staleness_cosine);
      }
      std::ofstream os(fs::path(o.out) / "summary.json");
      os << js.dump(2) << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
