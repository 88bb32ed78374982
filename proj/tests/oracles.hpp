#pragma once

// Test-only reference implementations, independent of the library's analytic
// paths: central finite differences over states and parameters, and fully
// unrolled loss gradients. Everything here goes through forward() only.

#include <functional>
#include <vector>

#include "olrnn/cells.hpp"
#include "olrnn/credit.hpp"

namespace oracle {

using namespace olrnn;

inline Vector combined_state(const CellSpec& spec, const CellState& s) {
  Vector v(spec.state_dim());
  v.head(s.h.size()) = s.h;
  if (spec.arch == Arch::Lstm) v.tail(s.c.size()) = s.c;
  return v;
}

inline CellState state_from_combined(const CellSpec& spec, const Vector& v) {
  CellState s;
  s.h = v.head(spec.n_hidden);
  if (spec.arch == Arch::Lstm) s.c = v.tail(spec.n_hidden);
  return s;
}

// d state_new / d state_prev by central differences (columns = perturbed
// component of the previous state).
inline Matrix fd_state_jacobian(const CellSpec& spec, const ParamSet& params,
                                const CellState& state_prev, const Vector& x,
                                double eps = 1e-5) {
  const Index sd = spec.state_dim();
  Matrix jac(sd, sd);
  Vector base = combined_state(spec, state_prev);
  for (Index j = 0; j < sd; ++j) {
    Vector plus = base, minus = base;
    plus[j] += eps;
    minus[j] -= eps;
    Vector sp = combined_state(spec, forward(spec, params, state_from_combined(spec, plus), x).first);
    Vector sm = combined_state(spec, forward(spec, params, state_from_combined(spec, minus), x).first);
    jac.col(j) = (sp - sm) / (2.0 * eps);
  }
  return jac;
}

// d state_new / d theta with state_prev held fixed, as (param x state) rows
// matching the Sensitivity storage.
inline Matrix fd_immediate(const CellSpec& spec, const ParamSet& params,
                           const GroupLayout& layout, const CellState& state_prev,
                           const Vector& x, double eps = 1e-5) {
  Matrix out(layout.total(), spec.state_dim());
  ParamSet work = params;
  for (const auto& g : layout.groups()) {
    Matrix& t = work.at(g.name);
    for (Index r = 0; r < g.rows; ++r)
      for (Index c = 0; c < g.cols; ++c) {
        double saved = t(r, c);
        t(r, c) = saved + eps;
        Vector sp = combined_state(spec, forward(spec, work, state_prev, x).first);
        t(r, c) = saved - eps;
        Vector sm = combined_state(spec, forward(spec, work, state_prev, x).first);
        t(r, c) = saved;
        out.row(g.offset + r * g.cols + c) = ((sp - sm) / (2.0 * eps)).transpose();
      }
  }
  return out;
}

// Final-step squared-error loss of a T-step rollout from the zero state.
inline double rollout_loss(const CellSpec& spec, const ParamSet& params,
                           const std::vector<Vector>& inputs, const Vector& y_target) {
  CellState state = init_state(spec);
  Vector y;
  for (const auto& x : inputs) {
    auto out = forward(spec, params, state, x);
    state = std::move(out.first);
    y = std::move(out.second);
  }
  return 0.5 * (y - y_target).squaredNorm();
}

// d rollout_loss / d theta over every group, by central differences.
inline GradMap fd_unrolled_gradient(const CellSpec& spec, const ParamSet& params,
                                    const std::vector<Vector>& inputs,
                                    const Vector& y_target, double eps = 1e-5) {
  GradMap grads;
  ParamSet work = params;
  for (const auto& [name, tensor] : params) {
    Matrix g(tensor.rows(), tensor.cols());
    Matrix& t = work.at(name);
    for (Index r = 0; r < tensor.rows(); ++r)
      for (Index c = 0; c < tensor.cols(); ++c) {
        double saved = t(r, c);
        t(r, c) = saved + eps;
        double lp = rollout_loss(spec, work, inputs, y_target);
        t(r, c) = saved - eps;
        double lm = rollout_loss(spec, work, inputs, y_target);
        t(r, c) = saved;
        g(r, c) = (lp - lm) / (2.0 * eps);
      }
    grads[name] = std::move(g);
  }
  return grads;
}

// The same final-step gradient through the forward sensitivity recursion.
inline GradMap rtrl_rollout_gradient(const CellSpec& spec, const ParamSet& params,
                                     const std::vector<Vector>& inputs,
                                     const Vector& y_target) {
  auto layout = state_group_layout(spec);
  const Index sd = spec.state_dim();
  Sensitivity p(layout, sd), d(layout, sd), scratch(layout, sd);
  CellState state = init_state(spec);
  Vector y;
  CellState next;
  for (const auto& x : inputs) {
    auto out = forward(spec, params, state, x);
    next = std::move(out.first);
    y = std::move(out.second);
    immediate_derivative(spec, params, state, next, x, d);
    Matrix jac = state_jacobian(spec, params, state, next, x);
    rtrl_step(p, jac, d, scratch);
    state = std::move(next);
  }
  OutputGradient og = output_gradient(spec, params, state, y, y_target);
  Vector delta = Vector::Zero(sd);
  delta.head(og.delta_h.size()) = og.delta_h;
  return assemble_gradient(p, delta, std::move(og.out_grads), std::nullopt);
}

// Relative error with a scale floor: central differences at eps = 1e-5 carry
// ~1e-10 absolute noise, which would swamp the ratio on near-zero entries.
inline double rel_err(double a, double b) {
  double scale = std::max({std::abs(a), std::abs(b), 1e-4});
  return std::abs(a - b) / scale;
}

inline double max_rel_err(const Matrix& a, const Matrix& b) {
  double worst = 0.0;
  for (Index r = 0; r < a.rows(); ++r)
    for (Index c = 0; c < a.cols(); ++c)
      worst = std::max(worst, rel_err(a(r, c), b(r, c)));
  return worst;
}

// Random cell inputs for property checks; bounded so tanh stays unsaturated.
inline CellState random_state(const CellSpec& spec, Rng& rng) {
  CellState s = init_state(spec);
  for (Index i = 0; i < s.h.size(); ++i) s.h[i] = 0.8 * (2.0 * rng.uniform() - 1.0);
  if (spec.arch == Arch::Lstm)
    for (Index i = 0; i < s.c.size(); ++i) s.c[i] = 1.2 * (2.0 * rng.uniform() - 1.0);
  return s;
}

inline Vector random_input(const CellSpec& spec, Rng& rng) {
  Vector x(spec.n_in);
  for (Index i = 0; i < x.size(); ++i) x[i] = rng.normal();
  return x;
}

}  // namespace oracle
