#pragma once

#include <memory>
#include <utility>

#include "olrnn/rng.hpp"
#include "olrnn/sensitivity.hpp"

namespace olrnn {

enum class Arch { VanillaRnn, Gru, Lstm, Ctrnn };

const char* arch_name(Arch a);
Arch arch_from_name(std::string_view s);

struct CellSpec {
  Arch arch = Arch::VanillaRnn;
  Index n_in = 1;
  Index n_hidden = 64;
  Index n_out = 1;
  double ctrnn_tau = 10.0;  // CTRNN only
  double ctrnn_dt = 1.0;    // CTRNN only
  // Recurrent-weight init is Gaussian with std rec_gain / sqrt(n_hidden);
  // rec_gain sets the initial spectral radius (and with it how much raw
  // memory an untrained network starts with). Input weights are Gaussian
  // with std in_gain / sqrt(n_in) (plain fan-in scaling).
  double rec_gain = 0.4;
  double in_gain = 1.0;

  // Dimension of the state the credit recursion propagates through.
  // LSTM carries [h; c]; everything else just h.
  Index state_dim() const { return arch == Arch::Lstm ? 2 * n_hidden : n_hidden; }
  double leak() const { return ctrnn_dt / ctrnn_tau; }
  void validate() const;
};

struct CellState {
  Vector h;
  Vector c;  // LSTM cell state

  // Intermediates cached by forward() for the Jacobian/derivative calls.
  struct Cache {
    Vector z, r, hcand;        // GRU gates and candidate
    Vector gi, gf, go, gg;     // LSTM gates
    Vector tanh_c;             // LSTM tanh(c_t)
    Vector u;                  // CTRNN tanh of the recurrent drive
    bool valid = false;
  } cache;
};

// State-map groups only (w_out / b_out excluded), name-sorted with offsets.
std::shared_ptr<const GroupLayout> state_group_layout(const CellSpec& spec);

// Shape table for every group including the output head, name-sorted.
std::vector<GroupInfo> param_shapes(const CellSpec& spec);

// Gaussian 1/sqrt(n_hidden) weights, zero biases except the LSTM forget
// bias at +1, Gaussian output head.
ParamSet make_params(const CellSpec& spec, Rng& rng);

CellState init_state(const CellSpec& spec);

// One step of the state map plus the linear readout y = w_out h + b_out.
// The returned state caches activation intermediates.
std::pair<CellState, Vector> forward(const CellSpec& spec, const ParamSet& params,
                                     const CellState& state, const Vector& x);

// Exact d state_t / d state_{t-1} for the step that produced state_new from
// state_prev under x. (state_dim x state_dim).
Matrix state_jacobian(const CellSpec& spec, const ParamSet& params,
                      const CellState& state_prev, const CellState& state_new,
                      const Vector& x);

// d state_t / d theta with state_{t-1} held fixed, written into out.
// Only the step's structural entries are overwritten: out must start zero
// and must only ever be filled by this function for the same spec.
void immediate_derivative(const CellSpec& spec, const ParamSet& params,
                          const CellState& state_prev, const CellState& state_new,
                          const Vector& x, Sensitivity& out);

struct OutputGradient {
  Vector delta_h;     // dL/dh under L = 1/2 ||y_pred - y_true||^2
  GradMap out_grads;  // w_out, b_out
};

OutputGradient output_gradient(const CellSpec& spec, const ParamSet& params,
                               const CellState& state, const Vector& y_pred,
                               const Vector& y_true);

}  // namespace olrnn
