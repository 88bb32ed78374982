#include "olrnn/diagnostics.hpp"

#include <cmath>
#include <limits>

#include "olrnn/linalg.hpp"

namespace olrnn {

double self_propagation(const Vector& h, const Matrix& w_hh) {
  if (w_hh.rows() != w_hh.cols() || w_hh.rows() != h.size())
    throw ShapeError("self_propagation: shapes do not conform");
  double acc = 0.0;
  for (Index i = 0; i < h.size(); ++i)
    acc += std::abs((1.0 - h[i] * h[i]) * w_hh(i, i));
  return acc / double(h.size());
}

namespace {

bool is_recurrent_group(std::string_view name) {
  return name.size() >= 3 && name[0] == 'w' && name[1] == '_' && name[2] == 'h';
}

double ratio_or_inf(double out_norm, double rec_norm) {
  if (rec_norm == 0.0) return std::numeric_limits<double>::infinity();
  return out_norm / rec_norm;
}

}  // namespace

GradNormReport grad_norm_report(const GradMap& grads) {
  GradNormReport rep;
  double rec_sq = 0.0, out_norm = 0.0;
  for (const auto& [name, g] : grads) {
    double n = g.norm();
    rep.norms[name] = n;
    if (is_recurrent_group(name)) rec_sq += n * n;
    if (name == "w_out") out_norm = n;
  }
  if (rec_sq == 0.0 && out_norm == 0.0 && grads.empty())
    throw ShapeError("grad_norm_report: empty gradient map");
  rep.ratio_out_over_rec = ratio_or_inf(out_norm, std::sqrt(rec_sq));
  return rep;
}

void GradNormWindow::add(const GradMap& grads) {
  GradNormReport rep = grad_norm_report(grads);
  double rec_sq = 0.0;
  for (const auto& [name, n] : rep.norms) {
    sums_[name] += n;
    if (is_recurrent_group(name)) rec_sq += n * n;
  }
  out_sum_ += rep.norms.count("w_out") ? rep.norms["w_out"] : 0.0;
  rec_sum_ += std::sqrt(rec_sq);
  ++count_;
}

GradNormReport GradNormWindow::mean() const {
  GradNormReport rep;
  if (count_ == 0) return rep;
  for (const auto& [name, s] : sums_) rep.norms[name] = s / double(count_);
  rep.ratio_out_over_rec = ratio_or_inf(out_sum_ / double(count_), rec_sum_ / double(count_));
  return rep;
}

void GradNormWindow::reset() {
  sums_.clear();
  out_sum_ = rec_sum_ = 0.0;
  count_ = 0;
}

TraceStaleness trace_staleness(const Sensitivity& e, const Sensitivity& d) {
  if (!e.same_shape(d)) throw ShapeError("trace_staleness: shapes differ");
  double nd = d.data().norm();
  if (nd == 0.0)
    throw UndefinedCosineError("trace_staleness: zero immediate derivative");
  double ne = e.data().norm();
  TraceStaleness ts;
  ts.mag_ratio = ne / nd;
  ts.cosine = (ne == 0.0) ? 0.0 : cosine_flat(e.data(), d.data());
  return ts;
}

MemoryEstimate memory_model(CreditMethod method, const CellSpec& cell,
                            OptimMethod optim, int bytes_per_element) {
  if (bytes_per_element != 4 && bytes_per_element != 8)
    throw ParamError("memory_model: bytes_per_element must be 4 or 8");
  const std::uint64_t bpe = std::uint64_t(bytes_per_element);

  std::uint64_t theta_state = 0, theta_total = 0;
  for (const auto& g : param_shapes(cell)) {
    std::uint64_t sz = std::uint64_t(g.rows) * std::uint64_t(g.cols);
    theta_total += sz;
    if (g.name != "w_out" && g.name != "b_out") theta_state += sz;
  }
  const std::uint64_t state_dim = std::uint64_t(cell.state_dim());

  MemoryEstimate est;
  est.method = method;
  est.n_hidden = cell.n_hidden;
  est.n_in = cell.n_in;
  est.n_out = cell.n_out;
  est.bytes_params = theta_total * bpe;

  switch (method) {
    case CreditMethod::FullRtrl:
    case CreditMethod::SparseK:  // dense storage, masked propagation
      est.bytes_sensitivity = state_dim * theta_state * bpe;
      break;
    case CreditMethod::Trace:
      est.bytes_sensitivity = theta_state * bpe;
      break;
  }

  switch (optim) {
    case OptimMethod::Sgd:
      est.bytes_optstate = 0;
      break;
    case OptimMethod::SgdMomentum:
    case OptimMethod::RmsProp:
      est.bytes_optstate = theta_total * bpe;
      break;
    case OptimMethod::AdamFull:
    case OptimMethod::AdamB1Only:
    case OptimMethod::AdamB2Only:
      est.bytes_optstate = 2 * theta_total * bpe;
      break;
  }

  est.bytes_total = est.bytes_sensitivity + est.bytes_params + est.bytes_optstate;
  return est;
}

double spectral_radius_of_state_jacobian(const Matrix& jac, int iters, Rng& rng) {
  return dominant_eigen_magnitude(jac, iters, rng);
}

}  // namespace olrnn
