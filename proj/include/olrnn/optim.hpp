#pragma once

#include <string_view>

#include "olrnn/params.hpp"

namespace olrnn {

enum class OptimMethod { Sgd, SgdMomentum, AdamFull, AdamB1Only, AdamB2Only, RmsProp };

const char* optim_method_name(OptimMethod m);
OptimMethod optim_method_from_name(std::string_view s);

struct OptimSpec {
  OptimMethod method = OptimMethod::AdamFull;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double alpha = 0.99;      // RMSprop second-moment decay
  double eps = 1e-8;        // applied outside the square root
  double momentum = 0.9;    // heavy-ball coefficient
  void validate() const;

  // True for the methods whose update divides by a running second moment.
  bool beta2_normalized() const {
    return method == OptimMethod::AdamFull || method == OptimMethod::AdamB2Only ||
           method == OptimMethod::RmsProp;
  }
};

// First/second-moment accumulators per parameter group. Adam variants carry
// both maps, RMSprop only v, momentum only m, SGD neither.
class OptimState {
 public:
  OptimState() = default;
  static OptimState for_params(const OptimSpec& spec, const ParamSet& params);

  long step_count() const { return t_; }
  const Matrix& m(std::string_view group) const;
  const Matrix& v(std::string_view group) const;
  std::size_t bytes() const;

  friend void optim_step(const OptimSpec&, OptimState&, ParamSet&, const GradMap&);

 private:
  GradMap m_, v_;
  long t_ = 0;
};

// One update over every group. Grads must cover all parameter groups.
void optim_step(const OptimSpec& spec, OptimState& state, ParamSet& params,
                const GradMap& grads);

// Fresh zeroed state for the new spec; parameters are untouched.
OptimState switch_optimizer(const OptimSpec& new_spec, const ParamSet& params);

}  // namespace olrnn
