#include "olrnn/optim.hpp"

#include <cmath>

namespace olrnn {

const char* optim_method_name(OptimMethod m) {
  switch (m) {
    case OptimMethod::Sgd: return "sgd";
    case OptimMethod::SgdMomentum: return "sgd_momentum";
    case OptimMethod::AdamFull: return "adam";
    case OptimMethod::AdamB1Only: return "adam_b1_only";
    case OptimMethod::AdamB2Only: return "adam_b2_only";
    case OptimMethod::RmsProp: return "rmsprop";
  }
  return "?";
}

OptimMethod optim_method_from_name(std::string_view s) {
  if (s == "sgd") return OptimMethod::Sgd;
  if (s == "sgd_momentum") return OptimMethod::SgdMomentum;
  if (s == "adam") return OptimMethod::AdamFull;
  if (s == "adam_b1_only") return OptimMethod::AdamB1Only;
  if (s == "adam_b2_only") return OptimMethod::AdamB2Only;
  if (s == "rmsprop") return OptimMethod::RmsProp;
  throw ConfigError("unknown optimizer '" + std::string(s) + "'");
}

void OptimSpec::validate() const {
  if (!(lr > 0.0)) throw ParamError("optim: lr must be > 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw ParamError("optim: beta1 in [0,1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw ParamError("optim: beta2 in [0,1)");
  if (!(alpha >= 0.0 && alpha < 1.0)) throw ParamError("optim: alpha in [0,1)");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ParamError("optim: momentum in [0,1)");
  if (!(eps > 0.0)) throw ParamError("optim: eps must be > 0");
}

OptimState OptimState::for_params(const OptimSpec& spec, const ParamSet& params) {
  spec.validate();
  OptimState s;
  const bool needs_m = spec.method == OptimMethod::SgdMomentum ||
                       spec.method == OptimMethod::AdamFull ||
                       spec.method == OptimMethod::AdamB1Only ||
                       spec.method == OptimMethod::AdamB2Only;
  const bool needs_v = spec.method == OptimMethod::AdamFull ||
                       spec.method == OptimMethod::AdamB1Only ||
                       spec.method == OptimMethod::AdamB2Only ||
                       spec.method == OptimMethod::RmsProp;
  for (const auto& [name, t] : params) {
    if (needs_m) s.m_[name] = Matrix::Zero(t.rows(), t.cols());
    if (needs_v) s.v_[name] = Matrix::Zero(t.rows(), t.cols());
  }
  return s;
}

const Matrix& OptimState::m(std::string_view group) const {
  auto it = m_.find(group);
  if (it == m_.end()) throw ShapeError("optim state: no first moment for group");
  return it->second;
}

const Matrix& OptimState::v(std::string_view group) const {
  auto it = v_.find(group);
  if (it == v_.end()) throw ShapeError("optim state: no second moment for group");
  return it->second;
}

std::size_t OptimState::bytes() const {
  std::size_t b = 0;
  for (const auto& [name, t] : m_) b += std::size_t(t.size()) * sizeof(double);
  for (const auto& [name, t] : v_) b += std::size_t(t.size()) * sizeof(double);
  return b;
}

void optim_step(const OptimSpec& spec, OptimState& state, ParamSet& params,
                const GradMap& grads) {
  state.t_ += 1;
  const long t = state.t_;

  for (auto& [name, theta] : params) {
    auto git = grads.find(name);
    if (git == grads.end())
      throw ShapeError("optim_step: missing gradient for group '" + name + "'");
    const Matrix& g = git->second;
    if (g.rows() != theta.rows() || g.cols() != theta.cols())
      throw ShapeError("optim_step: gradient shape mismatch for '" + name + "'");

    switch (spec.method) {
      case OptimMethod::Sgd:
        theta -= spec.lr * g;
        break;
      case OptimMethod::SgdMomentum: {
        Matrix& m = state.m_[name];
        m = spec.momentum * m + g;
        theta -= spec.lr * m;
        break;
      }
      case OptimMethod::AdamFull: {
        Matrix& m = state.m_[name];
        Matrix& v = state.v_[name];
        m = spec.beta1 * m + (1.0 - spec.beta1) * g;
        v.array() = spec.beta2 * v.array() + (1.0 - spec.beta2) * g.array().square();
        double c1 = 1.0 - std::pow(spec.beta1, double(t));
        double c2 = 1.0 - std::pow(spec.beta2, double(t));
        theta.array() -=
            spec.lr * (m.array() / c1) / ((v.array() / c2).sqrt() + spec.eps);
        break;
      }
      case OptimMethod::AdamB1Only: {
        Matrix& m = state.m_[name];
        Matrix& v = state.v_[name];
        m = spec.beta1 * m + (1.0 - spec.beta1) * g;
        v.array() = spec.beta2 * v.array() + (1.0 - spec.beta2) * g.array().square();
        double c1 = 1.0 - std::pow(spec.beta1, double(t));
        theta.array() -= spec.lr * (m.array() / c1);
        break;
      }
      case OptimMethod::AdamB2Only: {
        Matrix& v = state.v_[name];
        v.array() = spec.beta2 * v.array() + (1.0 - spec.beta2) * g.array().square();
        double c2 = 1.0 - std::pow(spec.beta2, double(t));
        theta.array() -= spec.lr * g.array() / ((v.array() / c2).sqrt() + spec.eps);
        break;
      }
      case OptimMethod::RmsProp: {
        Matrix& v = state.v_[name];
        v.array() = spec.alpha * v.array() + (1.0 - spec.alpha) * g.array().square();
        theta.array() -= spec.lr * g.array() / (v.array().sqrt() + spec.eps);
        break;
      }
    }
    if (!theta.allFinite())
      throw NumericError("optim_step: non-finite update in group '" + name + "'");
  }
}

OptimState switch_optimizer(const OptimSpec& new_spec, const ParamSet& params) {
  return OptimState::for_params(new_spec, params);
}

}  // namespace olrnn
