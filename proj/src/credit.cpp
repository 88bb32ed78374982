#include "olrnn/credit.hpp"

#include <cmath>

namespace olrnn {

const char* credit_method_name(CreditMethod m) {
  switch (m) {
    case CreditMethod::FullRtrl: return "full_rtrl";
    case CreditMethod::Trace: return "trace";
    case CreditMethod::SparseK: return "sparse_k";
  }
  return "?";
}

CreditMethod credit_method_from_name(std::string_view s) {
  if (s == "full_rtrl") return CreditMethod::FullRtrl;
  if (s == "trace") return CreditMethod::Trace;
  if (s == "sparse_k") return CreditMethod::SparseK;
  throw ConfigError("unknown credit method '" + std::string(s) + "'");
}

void CreditSpec::validate() const {
  if (method == CreditMethod::Trace && !(decay >= 0.0 && decay < 1.0))
    throw ParamError("credit: decay must lie in [0, 1)");
  if (method == CreditMethod::SparseK && k < 1)
    throw ParamError("credit: k must be >= 1");
  if (clip_norm && !(*clip_norm > 0.0))
    throw ParamError("credit: clip_norm must be > 0");
}

namespace {

void check_conform(const Sensitivity& p, const Matrix& jac, const Sensitivity& d) {
  if (!p.same_shape(d)) throw ShapeError("credit step: sensitivity shapes differ");
  if (jac.rows() != jac.cols() || jac.rows() != p.state_dim())
    throw ShapeError("credit step: jacobian must be state_dim x state_dim");
}

}  // namespace

void rtrl_step(Sensitivity& p, const Matrix& jac, const Sensitivity& d,
               Sensitivity& scratch) {
  check_conform(p, jac, d);
  if (!scratch.same_shape(p)) throw ShapeError("credit step: scratch shape");
  scratch.data().noalias() = p.data() * jac.transpose();
  scratch.data() += d.data();
  if (!scratch.all_finite()) throw NumericError("rtrl_step: sensitivity diverged");
  p.data().swap(scratch.data());
}

Sensitivity rtrl_step(const Sensitivity& p, const Matrix& jac, const Sensitivity& d) {
  Sensitivity out(p.layout_ptr(), p.state_dim());
  Sensitivity prev = p;
  rtrl_step(prev, jac, d, out);
  return prev;
}

void trace_step(Sensitivity& e, double decay, Sensitivity& d) {
  if (!(decay >= 0.0 && decay < 1.0))
    throw ParamError("trace_step: decay must lie in [0, 1)");
  if (!e.same_shape(d)) throw ShapeError("trace_step: shapes differ");
  if (decay == 0.0) {
    e.data().swap(d.data());  // fast path: no pass over the history buffer
    return;
  }
  e.data() *= decay;
  e.data() += d.data();
}

Sensitivity trace_step(const Sensitivity& e, double decay, const Sensitivity& d) {
  Sensitivity out = e;
  Sensitivity din = d;
  trace_step(out, decay, din);
  return out;
}

Matrix ring_mask(Index n, Index k) {
  Matrix m = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      Index lag = ((j - i) % n + n) % n;
      if (lag >= 1 && lag <= k - 1) m(i, j) = 1.0;
    }
  return m;
}

void sparse_step(Sensitivity& p, const Matrix& jac, Index k, const Sensitivity& d,
                 Sensitivity& scratch, Matrix& masked_jac) {
  check_conform(p, jac, d);
  if (k < 1) throw ParamError("sparse_step: k must be >= 1");
  if (k == 1) {
    // Empty mask: the recursion degenerates to the immediate derivative.
    p.data() = d.data();
    return;
  }
  const Index n = jac.rows();
  masked_jac = jac.cwiseProduct(ring_mask(n, k));
  rtrl_step(p, masked_jac, d, scratch);
}

Sensitivity sparse_step(const Sensitivity& p, const Matrix& jac, Index k,
                        const Sensitivity& d) {
  Sensitivity out = p;
  Sensitivity scratch(p.layout_ptr(), p.state_dim());
  Matrix mj;
  sparse_step(out, jac, k, d, scratch, mj);
  return out;
}

GradMap assemble_gradient(const Sensitivity& s, const Vector& delta_state,
                          GradMap out_grads, std::optional<double> clip_norm) {
  if (delta_state.size() != s.state_dim())
    throw ShapeError("assemble_gradient: delta length mismatch");
  Vector flat = s.data() * delta_state;

  GradMap grads = std::move(out_grads);
  for (const auto& g : s.layout().groups()) {
    // Flat segment is row-major over the group's (rows, cols).
    grads[g.name] = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic,
                                                    Eigen::Dynamic, Eigen::RowMajor>>(
        flat.data() + g.offset, g.rows, g.cols);
  }

  if (clip_norm) {
    double sq = 0.0;
    for (const auto& [name, g] : grads) sq += g.squaredNorm();
    double norm = std::sqrt(sq);
    if (norm > *clip_norm && norm > 0.0) {
      double scale = *clip_norm / norm;
      for (auto& [name, g] : grads) g *= scale;
    }
  }
  return grads;
}

CreditState::CreditState(const CreditSpec& spec,
                         std::shared_ptr<const GroupLayout> layout, Index state_dim)
    : spec_(spec) {
  spec_.validate();
  const bool trace0 = spec_.method == CreditMethod::Trace && spec_.decay == 0.0;
  if (!trace0) sens_ = Sensitivity(layout, state_dim);
  if (spec_.method != CreditMethod::Trace)
    scratch_ = Sensitivity(std::move(layout), state_dim);
}

bool CreditState::needs_jacobian() const {
  return spec_.method == CreditMethod::FullRtrl ||
         (spec_.method == CreditMethod::SparseK && spec_.k > 1);
}

const Sensitivity& CreditState::step(const Matrix* jac, Sensitivity& d) {
  switch (spec_.method) {
    case CreditMethod::FullRtrl:
      if (!jac) throw ShapeError("credit: rtrl step requires a jacobian");
      rtrl_step(sens_, *jac, d, scratch_);
      current_ = &sens_;
      break;
    case CreditMethod::Trace:
      if (spec_.decay == 0.0) {
        current_ = &d;  // no history kept at all
      } else {
        trace_step(sens_, spec_.decay, d);
        current_ = &sens_;
      }
      break;
    case CreditMethod::SparseK:
      if (spec_.k == 1) {
        current_ = &d;
      } else {
        if (!jac) throw ShapeError("credit: sparse step requires a jacobian");
        sparse_step(sens_, *jac, spec_.k, d, scratch_, masked_jac_);
        current_ = &sens_;
      }
      break;
  }
  return *current_;
}

void CreditState::reset() {
  if (sens_.param_count() > 0) sens_.set_zero();
  current_ = nullptr;
}

std::size_t CreditState::persistent_sensitivity_bytes() const {
  return sens_.bytes() + scratch_.bytes();
}

}  // namespace olrnn
