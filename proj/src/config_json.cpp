#include <fstream>

#include <nlohmann/json.hpp>

#include "olrnn/harness.hpp"

// Single translation unit owning every JSON mapping: experiment configs
// (round-trip, hashing), cached run results, and the summary report.

namespace olrnn {

using nlohmann::json;

namespace {

json cell_to_json(const CellSpec& c) {
  return json{{"arch", arch_name(c.arch)},   {"n_in", c.n_in},
              {"n_hidden", c.n_hidden},      {"n_out", c.n_out},
              {"ctrnn_tau", c.ctrnn_tau},    {"ctrnn_dt", c.ctrnn_dt},
              {"rec_gain", c.rec_gain},
              {"in_gain", c.in_gain}};
}

CellSpec cell_from_json(const json& j) {
  CellSpec c;
  c.arch = arch_from_name(j.at("arch").get<std::string>());
  c.n_in = j.at("n_in").get<Index>();
  c.n_hidden = j.at("n_hidden").get<Index>();
  c.n_out = j.at("n_out").get<Index>();
  c.ctrnn_tau = j.value("ctrnn_tau", 10.0);
  c.ctrnn_dt = j.value("ctrnn_dt", 1.0);
  c.rec_gain = j.value("rec_gain", 0.4);
  c.in_gain = j.value("in_gain", 1.0);
  return c;
}

json credit_to_json(const CreditSpec& c) {
  json j{{"method", credit_method_name(c.method)},
         {"decay", c.decay},
         {"k", c.k}};
  if (c.clip_norm) j["clip_norm"] = *c.clip_norm;
  return j;
}

CreditSpec credit_from_json(const json& j) {
  CreditSpec c;
  c.method = credit_method_from_name(j.at("method").get<std::string>());
  c.decay = j.value("decay", 0.0);
  c.k = j.value("k", Index(1));
  if (j.contains("clip_norm") && !j.at("clip_norm").is_null())
    c.clip_norm = j.at("clip_norm").get<double>();
  return c;
}

json optim_to_json(const OptimSpec& o) {
  return json{{"method", optim_method_name(o.method)},
              {"lr", o.lr},
              {"beta1", o.beta1},
              {"beta2", o.beta2},
              {"alpha", o.alpha},
              {"eps", o.eps},
              {"momentum", o.momentum}};
}

OptimSpec optim_from_json(const json& j) {
  OptimSpec o;
  o.method = optim_method_from_name(j.at("method").get<std::string>());
  o.lr = j.value("lr", 1e-3);
  o.beta1 = j.value("beta1", 0.9);
  o.beta2 = j.value("beta2", 0.999);
  o.alpha = j.value("alpha", 0.99);
  o.eps = j.value("eps", 1e-8);
  o.momentum = j.value("momentum", 0.9);
  return o;
}

json task_to_json(const TaskSpec& t) {
  return json{{"task", task_name(t.kind)},
              {"shift_step", t.shift_step},
              {"f1", t.f1},
              {"f2", t.f2},
              {"delay", t.delay},
              {"rho1", t.rho1},
              {"rho2", t.rho2},
              {"sigma", t.sigma},
              {"beta", t.beta},
              {"lorenz_dt", t.lorenz_dt},
              {"noise_std", t.noise_std},
              {"seed", t.seed}};
}

TaskSpec task_from_json(const json& j) {
  TaskSpec t;
  t.kind = task_from_name(j.at("task").get<std::string>());
  t.shift_step = j.value("shift_step", 20000L);
  t.f1 = j.value("f1", 0.05);
  t.f2 = j.value("f2", 0.10);
  t.delay = j.value("delay", 50);
  t.rho1 = j.value("rho1", 28.0);
  t.rho2 = j.value("rho2", 35.0);
  t.sigma = j.value("sigma", 10.0);
  t.beta = j.value("beta", 8.0 / 3.0);
  t.lorenz_dt = j.value("lorenz_dt", 0.01);
  t.noise_std = j.value("noise_std", 0.01);
  t.seed = j.value("seed", std::uint64_t(0));
  return t;
}

json config_to_json(const ExperimentConfig& c) {
  json j{{"cell", cell_to_json(c.cell)},
         {"credit", credit_to_json(c.credit)},
         {"optim", optim_to_json(c.optim)},
         {"task", task_to_json(c.task)},
         {"train_steps", c.train_steps},
         {"adapt_steps", c.adapt_steps},
         {"eval_window", c.eval_window},
         {"diag_every", c.diag_every},
         {"diag_start", c.diag_start},
         {"mse_every", c.mse_every},
         {"mode", run_mode_name(c.mode)},
         {"seeds", c.seeds},
         {"resume_step", c.resume_step}};
  if (c.switch_optim) j["switch_optim"] = optim_to_json(*c.switch_optim);
  if (!c.checkpoint_save.empty()) j["checkpoint_save"] = c.checkpoint_save;
  if (!c.checkpoint_load.empty()) j["checkpoint_load"] = c.checkpoint_load;
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  c.cell = cell_from_json(j.at("cell"));
  c.credit = credit_from_json(j.at("credit"));
  c.optim = optim_from_json(j.at("optim"));
  c.task = task_from_json(j.at("task"));
  c.train_steps = j.value("train_steps", 20000L);
  c.adapt_steps = j.value("adapt_steps", 5000L);
  c.eval_window = j.value("eval_window", 2000L);
  c.diag_every = j.value("diag_every", 0);
  c.diag_start = j.value("diag_start", 0L);
  c.mse_every = j.value("mse_every", 0);
  c.mode = run_mode_from_name(j.value("mode", std::string("standard")));
  if (j.contains("switch_optim")) c.switch_optim = optim_from_json(j.at("switch_optim"));
  if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  c.checkpoint_save = j.value("checkpoint_save", std::string());
  c.checkpoint_load = j.value("checkpoint_load", std::string());
  c.resume_step = j.value("resume_step", 0L);
  return c;
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

std::string ExperimentConfig::to_json_string() const {
  return config_to_json(*this).dump(2);
}

ExperimentConfig ExperimentConfig::from_json_string(const std::string& text) {
  return config_from_json(json::parse(text));
}

std::uint64_t ExperimentConfig::hash(std::uint64_t seed) const {
  // Bump when the run semantics change so stale cache entries die.
  constexpr int kSchema = 1;
  json j = config_to_json(*this);
  j["__seed"] = seed;
  j["__schema"] = kSchema;
  return fnv1a(j.dump());
}

namespace detail {

std::string run_result_to_json(const RunResult& r) {
  json j{{"seed", r.seed},
         {"pre_shift_mse", r.pre_shift_mse},
         {"post_shift_mse", r.post_shift_mse},
         {"diverged", r.diverged},
         {"diverged_at", r.diverged_at},
         {"wall_time_sec", r.wall_time_sec},
         {"steps_run", r.steps_run},
         {"config_hash", r.config_hash}};
  if (r.recovery_pct) j["recovery_pct"] = *r.recovery_pct;
  json series = json::array();
  for (const auto& [t, m] : r.mse_series) series.push_back(json::array({t, m}));
  j["mse_series"] = std::move(series);
  json diag = json::array();
  for (const auto& s : r.diag) {
    json js{{"t", s.t},
            {"self_prop", s.self_prop},
            {"spec_radius", s.spec_radius},
            {"ratio_out_over_rec", s.ratio_out_over_rec},
            {"trace_mag_ratio", s.trace_mag_ratio},
            {"trace_cosine", s.trace_cosine},
            {"grad_norms", s.grad_norms}};
    diag.push_back(std::move(js));
  }
  j["diag"] = std::move(diag);
  return j.dump();
}

RunResult run_result_from_json(const std::string& text) {
  json j = json::parse(text);
  RunResult r;
  r.seed = j.at("seed").get<std::uint64_t>();
  r.pre_shift_mse = j.at("pre_shift_mse").is_null()
                        ? std::numeric_limits<double>::quiet_NaN()
                        : j.at("pre_shift_mse").get<double>();
  r.post_shift_mse = j.at("post_shift_mse").is_null()
                         ? std::numeric_limits<double>::quiet_NaN()
                         : j.at("post_shift_mse").get<double>();
  if (j.contains("recovery_pct")) r.recovery_pct = j.at("recovery_pct").get<double>();
  r.diverged = j.at("diverged").get<bool>();
  r.diverged_at = j.at("diverged_at").get<long>();
  r.wall_time_sec = j.at("wall_time_sec").get<double>();
  r.steps_run = j.at("steps_run").get<long>();
  r.config_hash = j.at("config_hash").get<std::uint64_t>();
  if (j.contains("mse_series"))
    for (const auto& e : j.at("mse_series"))
      r.mse_series.emplace_back(e.at(0).get<long>(), e.at(1).get<double>());
  for (const auto& js : j.at("diag")) {
    DiagSnapshot s;
    s.t = js.at("t").get<long>();
    s.self_prop = js.at("self_prop").get<double>();
    s.spec_radius = js.at("spec_radius").get<double>();
    s.ratio_out_over_rec = js.at("ratio_out_over_rec").is_null()
                               ? std::numeric_limits<double>::infinity()
                               : js.at("ratio_out_over_rec").get<double>();
    s.trace_mag_ratio = js.at("trace_mag_ratio").get<double>();
    s.trace_cosine = js.at("trace_cosine").get<double>();
    s.grad_norms =
        js.at("grad_norms").get<std::map<std::string, double, std::less<>>>();
    r.diag.push_back(std::move(s));
  }
  return r;
}

}  // namespace detail

void write_summary_json(const std::string& path, const GridResult& grid) {
  json groups = json::array();
  for (const auto& g : grid.groups) {
    json per_lr = json::array();
    for (const auto& st : g.per_lr) {
      per_lr.push_back(json{{"lr", st.lr},
                            {"mean_recovery", st.mean_recovery},
                            {"std_recovery", st.std_recovery},
                            {"mean_pre_mse", st.mean_pre},
                            {"mean_post_mse", st.mean_post},
                            {"n_diverged", st.n_diverged},
                            {"n_ill_conditioned", st.n_ill_conditioned},
                            {"seed_recoveries", st.seed_recoveries}});
    }
    json coords = json::object();
    for (const auto& [k, v] : g.coords) coords[k] = v;
    groups.push_back(json{{"group", g.group},
                          {"coords", std::move(coords)},
                          {"per_lr", std::move(per_lr)},
                          {"best_lr", g.best().lr},
                          {"best", json{{"mean_recovery", g.best().mean_recovery},
                                        {"std_recovery", g.best().std_recovery},
                                        {"mean_post_mse", g.best().mean_post},
                                        {"seed_recoveries", g.best().seed_recoveries}}}});
  }
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw FormatError("cannot open '" + path + "' for writing");
  os << json{{"groups", std::move(groups)}}.dump(2) << "\n";
}

}  // namespace olrnn
