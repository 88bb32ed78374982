#pragma once

#include <optional>
#include <string_view>

#include "olrnn/sensitivity.hpp"

namespace olrnn {

enum class CreditMethod { FullRtrl, Trace, SparseK };

const char* credit_method_name(CreditMethod m);
CreditMethod credit_method_from_name(std::string_view s);

struct CreditSpec {
  CreditMethod method = CreditMethod::Trace;
  double decay = 0.0;                   // Trace only, in [0, 1)
  Index k = 1;                          // SparseK only
  std::optional<double> clip_norm;      // global-norm clip on the full gradient
  void validate() const;
};

// P <- J P + D, evaluated as P * J^T + D in the transposed storage.
// scratch must match P's shape; P and scratch swap, no allocation.
void rtrl_step(Sensitivity& p, const Matrix& jac, const Sensitivity& d,
               Sensitivity& scratch);
Sensitivity rtrl_step(const Sensitivity& p, const Matrix& jac, const Sensitivity& d);

// e <- decay * e + D. decay == 0 skips the scale-add entirely and swaps the
// buffers, so e becomes D bitwise and no history pass runs.
void trace_step(Sensitivity& e, double decay, Sensitivity& d);
Sensitivity trace_step(const Sensitivity& e, double decay, const Sensitivity& d);

// Propagation mask: column j feeds row i iff (j - i) mod n is in {1..k-1}.
// k = 1 is the empty mask (no propagation at all); the diagonal is never
// selected.
Matrix ring_mask(Index n, Index k);
void sparse_step(Sensitivity& p, const Matrix& jac, Index k, const Sensitivity& d,
                 Sensitivity& scratch, Matrix& masked_jac);
Sensitivity sparse_step(const Sensitivity& p, const Matrix& jac, Index k,
                        const Sensitivity& d);

// Contract the sensitivity against dL/dstate, append the output-head
// gradients, optionally rescale everything to global norm <= clip_norm.
GradMap assemble_gradient(const Sensitivity& s, const Vector& delta_state,
                          GradMap out_grads, std::optional<double> clip_norm);

// Owns the per-stream credit state and its scratch. step() consumes d
// (the caller's immediate-derivative buffer may be swapped out; it stays a
// valid zero-structured fill target).
class CreditState {
 public:
  CreditState(const CreditSpec& spec, std::shared_ptr<const GroupLayout> layout,
              Index state_dim);

  const Sensitivity& step(const Matrix* jac, Sensitivity& d);
  void reset();
  bool needs_jacobian() const;

  // Bytes of persistent sensitivity-shaped storage held by this object
  // (excludes the caller's flowing immediate-derivative buffer).
  std::size_t persistent_sensitivity_bytes() const;

  const CreditSpec& spec() const { return spec_; }

 private:
  CreditSpec spec_;
  Sensitivity sens_;
  Sensitivity scratch_;
  Matrix masked_jac_;
  const Sensitivity* current_ = nullptr;
};

}  // namespace olrnn
