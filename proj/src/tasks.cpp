#include "olrnn/tasks.hpp"

#include <cmath>
#include <numbers>

namespace olrnn {

const char* task_name(TaskKind t) {
  switch (t) {
    case TaskKind::SineShift: return "sine";
    case TaskKind::Delayed: return "delayed";
    case TaskKind::Lorenz: return "lorenz";
  }
  return "?";
}

TaskKind task_from_name(std::string_view s) {
  if (s == "sine") return TaskKind::SineShift;
  if (s == "delayed") return TaskKind::Delayed;
  if (s == "lorenz") return TaskKind::Lorenz;
  throw ConfigError("unknown task '" + std::string(s) + "'");
}

void TaskSpec::validate() const {
  if (shift_step <= 0) throw ConfigError("task: shift_step must be > 0");
  if (noise_std < 0.0) throw ConfigError("task: noise_std must be >= 0");
  if (kind == TaskKind::Delayed) {
    if (delay <= 0) throw ConfigError("task: delay must be > 0");
    if (long(delay) >= shift_step)
      throw ConfigError("task: delay must precede the shift");
  }
  if (kind == TaskKind::Lorenz && !(lorenz_dt > 0.0))
    throw ConfigError("task: lorenz_dt must be > 0");
}

Vector lorenz_deriv(const Vector& s, double rho, double sigma, double beta) {
  Vector d(3);
  d[0] = sigma * (s[1] - s[0]);
  d[1] = s[0] * (rho - s[2]) - s[1];
  d[2] = s[0] * s[1] - beta * s[2];
  return d;
}

Vector lorenz_rk4_step(const Vector& s, double dt, double rho, double sigma,
                       double beta) {
  Vector k1 = lorenz_deriv(s, rho, sigma, beta);
  Vector k2 = lorenz_deriv(s + 0.5 * dt * k1, rho, sigma, beta);
  Vector k3 = lorenz_deriv(s + 0.5 * dt * k2, rho, sigma, beta);
  Vector k4 = lorenz_deriv(s + dt * k3, rho, sigma, beta);
  return s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

namespace {

constexpr double kLorenzScaleXY = 30.0;
constexpr double kLorenzScaleZ = 50.0;

Vector lorenz_normalize(const Vector& s) {
  Vector v(3);
  v[0] = s[0] / kLorenzScaleXY;
  v[1] = s[1] / kLorenzScaleXY;
  v[2] = s[2] / kLorenzScaleZ;
  return v;
}

Vector lorenz_initial() {
  Vector s(3);
  s << 0.0, 1.0, 1.05;
  return s;
}

}  // namespace

TaskStream::TaskStream(const TaskSpec& spec, std::uint64_t run_seed) : spec_(spec) {
  spec_.validate();
  noise_seed_ = mix64(mix64(spec_.seed) ^ run_seed);
  if (spec_.kind == TaskKind::Lorenz) lorenz_reset();
}

double TaskStream::phase_at(long t) const {
  // Phase-continuous frequency switch.
  double pre = double(std::min(t, spec_.shift_step));
  double post = double(std::max<long>(t - spec_.shift_step, 0));
  return 2.0 * std::numbers::pi * (spec_.f1 * pre + spec_.f2 * post);
}

double TaskStream::noise_at(long t) const {
  if (spec_.noise_std == 0.0) return 0.0;
  return spec_.noise_std * Rng::at(noise_seed_, std::uint64_t(t)).normal();
}

void TaskStream::lorenz_reset() {
  lorenz_s_ = lorenz_initial();
  double rho = spec_.rho1;
  lorenz_next_ = lorenz_rk4_step(lorenz_s_, spec_.lorenz_dt, rho, spec_.sigma, spec_.beta);
}

void TaskStream::lorenz_advance() {
  lorenz_s_ = lorenz_next_;
  double rho = (t_ < spec_.shift_step) ? spec_.rho1 : spec_.rho2;
  lorenz_next_ =
      lorenz_rk4_step(lorenz_s_, spec_.lorenz_dt, rho, spec_.sigma, spec_.beta);
}

StreamSample TaskStream::next() {
  StreamSample s;
  s.t = t_;
  s.phase = (t_ < spec_.shift_step) ? Phase::PreShift : Phase::PostShift;

  switch (spec_.kind) {
    case TaskKind::SineShift: {
      s.x = Vector::Constant(1, std::sin(phase_at(t_)) + noise_at(t_));
      s.y = Vector::Constant(1, std::sin(phase_at(t_ + 1)));
      break;
    }
    case TaskKind::Delayed: {
      s.x = Vector::Constant(1, std::sin(phase_at(t_)) + noise_at(t_));
      if (t_ < long(spec_.delay)) {
        s.y = Vector::Zero(1);
        s.warmup = true;
      } else {
        // Clean value from `delay` steps back; noise exists only at emission.
        s.y = Vector::Constant(1, std::sin(phase_at(t_ - spec_.delay)));
      }
      break;
    }
    case TaskKind::Lorenz: {
      s.x = lorenz_normalize(lorenz_s_);
      if (spec_.noise_std > 0.0) {
        Rng nrng = Rng::at(noise_seed_, std::uint64_t(t_));
        for (Index i = 0; i < 3; ++i) s.x[i] += spec_.noise_std * nrng.normal();
      }
      s.y = lorenz_normalize(lorenz_next_);
      break;
    }
  }

  ++t_;
  if (spec_.kind == TaskKind::Lorenz) lorenz_advance();
  return s;
}

void TaskStream::advance_to(long t) {
  if (t < 0) throw ConfigError("task: cannot seek before 0");
  if (spec_.kind == TaskKind::Lorenz) {
    if (t < t_) {
      t_ = 0;
      lorenz_reset();
    }
    while (t_ < t) {
      ++t_;
      lorenz_advance();
    }
  } else {
    t_ = t;
  }
}

std::vector<StreamSample> reference_trajectory(const TaskSpec& spec,
                                               std::uint64_t run_seed, long count) {
  if (count <= 0) throw ConfigError("reference_trajectory: count must be > 0");
  TaskStream stream(spec, run_seed);
  std::vector<StreamSample> out;
  out.reserve(std::size_t(count));
  for (long t = 0; t < count; ++t) out.push_back(stream.next());
  return out;
}

}  // namespace olrnn
