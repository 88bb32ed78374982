#pragma once

#include <string_view>
#include <vector>

#include "olrnn/rng.hpp"
#include "olrnn/types.hpp"

namespace olrnn {

enum class TaskKind { SineShift, Delayed, Lorenz };

const char* task_name(TaskKind t);
TaskKind task_from_name(std::string_view s);

enum class Phase { PreShift, PostShift };

struct StreamSample {
  Vector x;
  Vector y;
  long t = 0;
  Phase phase = Phase::PreShift;
  bool warmup = false;  // target not yet defined (delayed task history fill)
};

struct TaskSpec {
  TaskKind kind = TaskKind::SineShift;
  long shift_step = 20000;
  double f1 = 0.05;       // cycles/step before the shift
  double f2 = 0.10;       // after
  int delay = 50;         // delayed task horizon
  double rho1 = 28.0;     // Lorenz rho before/after
  double rho2 = 35.0;
  double sigma = 10.0;
  double beta = 8.0 / 3.0;
  double lorenz_dt = 0.01;
  double noise_std = 0.01;  // input noise at emission; targets stay clean
  std::uint64_t seed = 0;

  Index dim() const { return kind == TaskKind::Lorenz ? 3 : 1; }
  void validate() const;
};

// Lorenz right-hand side and one RK4 step; exposed for convergence tests.
Vector lorenz_deriv(const Vector& s, double rho, double sigma, double beta);
Vector lorenz_rk4_step(const Vector& s, double dt, double rho, double sigma,
                       double beta);

// Streaming generator. Every sample is a pure function of (spec, run_seed, t):
// the sine phase has a closed form and the noise stream is counter-based, so
// advance_to() is exact and two streams agree bitwise wherever their
// pre-shift parameters agree.
class TaskStream {
 public:
  TaskStream(const TaskSpec& spec, std::uint64_t run_seed);

  StreamSample next();
  void advance_to(long t);  // regenerates state; Lorenz re-integrates
  long position() const { return t_; }
  const TaskSpec& spec() const { return spec_; }

 private:
  double phase_at(long t) const;
  double noise_at(long t) const;
  void lorenz_reset();
  void lorenz_advance();  // s_ <- next, recompute next

  TaskSpec spec_;
  std::uint64_t noise_seed_ = 0;
  long t_ = 0;
  Vector lorenz_s_, lorenz_next_;
};

std::vector<StreamSample> reference_trajectory(const TaskSpec& spec,
                                               std::uint64_t run_seed, long count);

}  // namespace olrnn
