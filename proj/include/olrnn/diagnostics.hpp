#pragma once

#include <cstdint>
#include <optional>

#include "olrnn/cells.hpp"
#include "olrnn/credit.hpp"
#include "olrnn/optim.hpp"

namespace olrnn {

struct DiagSnapshot {
  long t = 0;
  double self_prop = 0.0;          // mean |(1 - h^2) * diag(w_hh)|
  double spec_radius = 0.0;        // dominant |eigenvalue| of the state Jacobian
  std::map<std::string, double, std::less<>> grad_norms;
  double ratio_out_over_rec = 0.0;  // +inf when the recurrent norm is zero
  double trace_mag_ratio = 0.0;     // ||e|| / ||D||
  double trace_cosine = 0.0;
};

// Per-neuron self-propagation through the recurrent diagonal.
double self_propagation(const Vector& h, const Matrix& w_hh);

struct GradNormReport {
  std::map<std::string, double, std::less<>> norms;
  double ratio_out_over_rec = 0.0;
};

// Euclidean norm per group plus the output/recurrent scale ratio. The
// recurrent norm pools every w_h* group (w_hh for the simple cells); a zero
// recurrent norm reports the ratio as +infinity rather than failing.
GradNormReport grad_norm_report(const GradMap& grads);

// Accumulates per-step norms over a window; ratio of means.
class GradNormWindow {
 public:
  void add(const GradMap& grads);
  GradNormReport mean() const;
  long count() const { return count_; }
  void reset();

 private:
  std::map<std::string, double, std::less<>> sums_;
  double out_sum_ = 0.0, rec_sum_ = 0.0;
  long count_ = 0;
};

struct TraceStaleness {
  double mag_ratio = 0.0;
  double cosine = 0.0;
};

TraceStaleness trace_staleness(const Sensitivity& e, const Sensitivity& d);

struct MemoryEstimate {
  CreditMethod method = CreditMethod::Trace;
  Index n_hidden = 0, n_in = 0, n_out = 0;
  std::uint64_t bytes_sensitivity = 0;
  std::uint64_t bytes_params = 0;
  std::uint64_t bytes_optstate = 0;
  std::uint64_t bytes_total = 0;
};

// Shape arithmetic only; never allocates. Sensitivity accounting: full RTRL
// and sparse-k keep state_dim x |theta_state| entries, the trace keeps one
// entry per state-map parameter. Optimizer state: two moments for the Adam
// family, one for RMSprop/momentum, none for SGD.
MemoryEstimate memory_model(CreditMethod method, const CellSpec& cell,
                            OptimMethod optim, int bytes_per_element);

// Dominant |eigenvalue| magnitude of a state Jacobian (power iteration).
double spectral_radius_of_state_jacobian(const Matrix& jac, int iters, Rng& rng);

}  // namespace olrnn
