#include "olrnn/cells.hpp"

#include <algorithm>
#include <cmath>

#include "olrnn/linalg.hpp"

namespace olrnn {

namespace {

Vector sigmoid(const Vector& a) {
  return (1.0 / (1.0 + (-a.array()).exp())).matrix();
}

Vector affine(const ParamSet& p, std::string_view w_x, std::string_view w_h,
              std::string_view b, const Vector& x, const Vector& h) {
  return p.at(w_x) * x + p.at(w_h) * h + p.at(b).col(0);
}

void check_forward_args(const CellSpec& spec, const CellState& state, const Vector& x) {
  if (x.size() != spec.n_in)
    throw ShapeError("forward: input length " + std::to_string(x.size()) +
                     ", expected " + std::to_string(spec.n_in));
  if (state.h.size() != spec.n_hidden)
    throw ShapeError("forward: state length mismatch");
  if (spec.arch == Arch::Lstm && state.c.size() != spec.n_hidden)
    throw ShapeError("forward: LSTM state missing cell vector");
}

}  // namespace

const char* arch_name(Arch a) {
  switch (a) {
    case Arch::VanillaRnn: return "vanilla";
    case Arch::Gru: return "gru";
    case Arch::Lstm: return "lstm";
    case Arch::Ctrnn: return "ctrnn";
  }
  return "?";
}

Arch arch_from_name(std::string_view s) {
  if (s == "vanilla") return Arch::VanillaRnn;
  if (s == "gru") return Arch::Gru;
  if (s == "lstm") return Arch::Lstm;
  if (s == "ctrnn") return Arch::Ctrnn;
  throw ConfigError("unknown architecture '" + std::string(s) + "'");
}

void CellSpec::validate() const {
  if (n_hidden < 1 || n_in < 1 || n_out < 1)
    throw ConfigError("cell: dimensions must be >= 1");
  if (arch == Arch::Ctrnn) {
    double l = leak();
    if (!(l > 0.0 && l <= 1.0))
      throw ConfigError("cell: ctrnn_dt/ctrnn_tau must lie in (0, 1]");
  }
}

std::vector<GroupInfo> param_shapes(const CellSpec& spec) {
  const Index n = spec.n_hidden, ni = spec.n_in, no = spec.n_out;
  std::vector<GroupInfo> shapes;
  auto add = [&](std::string name, Index r, Index c) {
    shapes.push_back({std::move(name), r, c, 0});
  };
  switch (spec.arch) {
    case Arch::VanillaRnn:
    case Arch::Ctrnn:
      add("b_h", n, 1);
      add("w_hh", n, n);
      add("w_xh", n, ni);
      break;
    case Arch::Gru:
      for (const char* g : {"z", "r", "c"}) {
        add(std::string("b_") + g, n, 1);
        add(std::string("w_h") + g, n, n);
        add(std::string("w_x") + g, n, ni);
      }
      break;
    case Arch::Lstm:
      for (const char* g : {"i", "f", "o", "g"}) {
        add(std::string("b_") + g, n, 1);
        add(std::string("w_h") + g, n, n);
        add(std::string("w_x") + g, n, ni);
      }
      break;
  }
  add("b_out", no, 1);
  add("w_out", no, n);
  std::sort(shapes.begin(), shapes.end(),
            [](const GroupInfo& a, const GroupInfo& b) { return a.name < b.name; });
  return shapes;
}

std::shared_ptr<const GroupLayout> state_group_layout(const CellSpec& spec) {
  std::vector<GroupInfo> state;
  for (auto& g : param_shapes(spec))
    if (g.name != "w_out" && g.name != "b_out") state.push_back(g);
  return std::make_shared<const GroupLayout>(std::move(state));
}

ParamSet make_params(const CellSpec& spec, Rng& rng) {
  spec.validate();
  const double scale = 1.0 / std::sqrt(double(spec.n_hidden));
  ParamSet params;
  const double in_scale = spec.in_gain / std::sqrt(double(spec.n_in));
  for (const auto& g : param_shapes(spec)) {
    if (g.name[0] == 'w') {
      // Every matrix gets fan-in scaling: recurrent ones carry rec_gain over
      // 1/sqrt(n_hidden), input ones in_gain over 1/sqrt(n_in).
      double s = g.name[2] == 'x' ? in_scale
                 : g.name == "w_out" ? scale
                                     : spec.rec_gain * scale;
      params.insert(g.name, gauss_init(rng, g.rows, g.cols, s));
    } else {
      Matrix b = Matrix::Zero(g.rows, g.cols);
      if (spec.arch == Arch::Lstm && g.name == "b_f") b.setOnes();
      params.insert(g.name, std::move(b));
    }
  }
  return params;
}

CellState init_state(const CellSpec& spec) {
  CellState s;
  s.h = Vector::Zero(spec.n_hidden);
  if (spec.arch == Arch::Lstm) s.c = Vector::Zero(spec.n_hidden);
  return s;
}

std::pair<CellState, Vector> forward(const CellSpec& spec, const ParamSet& params,
                                     const CellState& state, const Vector& x) {
  check_forward_args(spec, state, x);
  const Vector& h = state.h;
  CellState next;

  switch (spec.arch) {
    case Arch::VanillaRnn: {
      next.h = affine(params, "w_xh", "w_hh", "b_h", x, h).array().tanh();
      break;
    }
    case Arch::Ctrnn: {
      const double k = spec.leak();
      next.cache.u = affine(params, "w_xh", "w_hh", "b_h", x, h).array().tanh();
      next.h = (1.0 - k) * h + k * next.cache.u;
      break;
    }
    case Arch::Gru: {
      Vector z = sigmoid(affine(params, "w_xz", "w_hz", "b_z", x, h));
      Vector r = sigmoid(affine(params, "w_xr", "w_hr", "b_r", x, h));
      Vector rh = r.cwiseProduct(h);
      Vector hc =
          (params.at("w_xc") * x + params.at("w_hc") * rh + params.at("b_c").col(0))
              .array()
              .tanh();
      next.h = ((1.0 - z.array()) * h.array() + z.array() * hc.array()).matrix();
      next.cache.z = std::move(z);
      next.cache.r = std::move(r);
      next.cache.hcand = std::move(hc);
      break;
    }
    case Arch::Lstm: {
      Vector gi = sigmoid(affine(params, "w_xi", "w_hi", "b_i", x, h));
      Vector gf = sigmoid(affine(params, "w_xf", "w_hf", "b_f", x, h));
      Vector go = sigmoid(affine(params, "w_xo", "w_ho", "b_o", x, h));
      Vector gg = affine(params, "w_xg", "w_hg", "b_g", x, h).array().tanh();
      next.c = gf.cwiseProduct(state.c) + gi.cwiseProduct(gg);
      next.cache.tanh_c = next.c.array().tanh();
      next.h = go.cwiseProduct(next.cache.tanh_c);
      next.cache.gi = std::move(gi);
      next.cache.gf = std::move(gf);
      next.cache.go = std::move(go);
      next.cache.gg = std::move(gg);
      break;
    }
  }
  next.cache.valid = true;

  Vector y = params.at("w_out") * next.h + params.at("b_out").col(0);
  if (!next.h.allFinite() || !y.allFinite() ||
      (next.c.size() > 0 && !next.c.allFinite()))
    throw NumericError("forward: non-finite state");
  return {std::move(next), std::move(y)};
}

Matrix state_jacobian(const CellSpec& spec, const ParamSet& params,
                      const CellState& state_prev, const CellState& state_new,
                      const Vector& x) {
  check_forward_args(spec, state_prev, x);
  if (!state_new.cache.valid && spec.arch != Arch::VanillaRnn)
    throw ShapeError("state_jacobian: state_new was not produced by forward");
  const Index n = spec.n_hidden;
  const Vector& hp = state_prev.h;

  switch (spec.arch) {
    case Arch::VanillaRnn: {
      Vector d = (1.0 - state_new.h.array().square()).matrix();
      return d.asDiagonal() * params.at("w_hh");
    }
    case Arch::Ctrnn: {
      const double k = spec.leak();
      Vector du = (1.0 - state_new.cache.u.array().square()).matrix();
      Matrix j = k * (du.asDiagonal() * params.at("w_hh"));
      j.diagonal().array() += 1.0 - k;
      return j;
    }
    case Arch::Gru: {
      const auto& cc = state_new.cache;
      Vector dz = cc.z.array() * (1.0 - cc.z.array());
      Vector dr = cc.r.array() * (1.0 - cc.r.array());
      Vector dhc = 1.0 - cc.hcand.array().square();
      Matrix rh_h = Matrix(cc.r.asDiagonal());
      rh_h.noalias() += hp.asDiagonal() * Matrix(dr.asDiagonal() * params.at("w_hr"));
      Matrix j = Matrix::Zero(n, n);
      j.diagonal() = (1.0 - cc.z.array()).matrix();
      j.noalias() += Vector((cc.hcand - hp)).asDiagonal() *
                     Matrix(dz.asDiagonal() * params.at("w_hz"));
      j.noalias() +=
          cc.z.asDiagonal() * Matrix(dhc.asDiagonal() * (params.at("w_hc") * rh_h));
      return j;
    }
    case Arch::Lstm: {
      const auto& cc = state_new.cache;
      Vector di = cc.gi.array() * (1.0 - cc.gi.array());
      Vector df = cc.gf.array() * (1.0 - cc.gf.array());
      Vector do_ = cc.go.array() * (1.0 - cc.go.array());
      Vector dg = 1.0 - cc.gg.array().square();
      Vector dtc = 1.0 - cc.tanh_c.array().square();

      Vector ci = cc.gg.cwiseProduct(di);
      Vector cf = state_prev.c.cwiseProduct(df);
      Vector cg = cc.gi.cwiseProduct(dg);
      Vector odtc = cc.go.cwiseProduct(dtc);

      Matrix c_h = ci.asDiagonal() * params.at("w_hi");
      c_h.noalias() += cf.asDiagonal() * params.at("w_hf");
      c_h.noalias() += cg.asDiagonal() * params.at("w_hg");

      Matrix h_h = odtc.asDiagonal() * c_h;
      h_h.noalias() +=
          Vector(cc.tanh_c.cwiseProduct(do_)).asDiagonal() * params.at("w_ho");

      Matrix j = Matrix::Zero(2 * n, 2 * n);
      j.topLeftCorner(n, n) = h_h;
      j.topRightCorner(n, n).diagonal() = odtc.cwiseProduct(cc.gf);
      j.bottomLeftCorner(n, n) = c_h;
      j.bottomRightCorner(n, n).diagonal() = cc.gf;
      return j;
    }
  }
  throw ConfigError("state_jacobian: unreachable");
}

void immediate_derivative(const CellSpec& spec, const ParamSet& params,
                          const CellState& state_prev, const CellState& state_new,
                          const Vector& x, Sensitivity& out) {
  check_forward_args(spec, state_prev, x);
  if (out.state_dim() != spec.state_dim())
    throw ShapeError("immediate_derivative: sensitivity state dim mismatch");
  const Index n = spec.n_hidden, ni = spec.n_in;
  const Vector& hp = state_prev.h;
  Matrix& d = out.data();
  const auto& lay = out.layout();

  auto fill_rowwise = [&](const GroupInfo& g, const Vector& coef, const Vector& src,
                          Index col_base) {
    // d state[i] / d theta[i, :] = coef[i] * src, one contiguous run per column.
    for (Index i = 0; i < n; ++i)
      d.col(col_base + i).segment(g.offset + i * g.cols, g.cols) = coef[i] * src;
  };
  auto fill_diag = [&](const GroupInfo& g, const Vector& coef, Index col_base) {
    for (Index i = 0; i < n; ++i) d(g.offset + i, col_base + i) = coef[i];
  };

  switch (spec.arch) {
    case Arch::VanillaRnn:
    case Arch::Ctrnn: {
      Vector coef;
      if (spec.arch == Arch::VanillaRnn) {
        coef = (1.0 - state_new.h.array().square()).matrix();
      } else {
        coef = spec.leak() * (1.0 - state_new.cache.u.array().square());
      }
      fill_rowwise(lay.at("w_hh"), coef, hp, 0);
      fill_rowwise(lay.at("w_xh"), coef, x, 0);
      fill_diag(lay.at("b_h"), coef, 0);
      break;
    }
    case Arch::Gru: {
      const auto& cc = state_new.cache;
      Vector dz = cc.z.array() * (1.0 - cc.z.array());
      Vector dr = cc.r.array() * (1.0 - cc.r.array());
      Vector dhc = 1.0 - cc.hcand.array().square();
      Vector az = (cc.hcand - hp).cwiseProduct(dz);
      Vector ac = cc.z.cwiseProduct(dhc);
      Vector rh = cc.r.cwiseProduct(hp);

      fill_rowwise(lay.at("w_hz"), az, hp, 0);
      fill_rowwise(lay.at("w_xz"), az, x, 0);
      fill_diag(lay.at("b_z"), az, 0);
      fill_rowwise(lay.at("w_hc"), ac, rh, 0);
      fill_rowwise(lay.at("w_xc"), ac, x, 0);
      fill_diag(lay.at("b_c"), ac, 0);

      // Reset gate reaches every state component through w_hc: dense blocks.
      Matrix m = ac.asDiagonal() * params.at("w_hc") *
                 Matrix(Vector(dr.cwiseProduct(hp)).asDiagonal());
      const auto& g_br = lay.at("b_r");
      d.block(g_br.offset, 0, n, n) = m.transpose();
      const auto& g_whr = lay.at("w_hr");
      for (Index p = 0; p < n; ++p)
        d.block(g_whr.offset + p * n, 0, n, n).noalias() = hp * m.col(p).transpose();
      const auto& g_wxr = lay.at("w_xr");
      for (Index p = 0; p < n; ++p)
        d.block(g_wxr.offset + p * ni, 0, ni, n).noalias() = x * m.col(p).transpose();
      break;
    }
    case Arch::Lstm: {
      const auto& cc = state_new.cache;
      Vector di = cc.gi.array() * (1.0 - cc.gi.array());
      Vector df = cc.gf.array() * (1.0 - cc.gf.array());
      Vector do_ = cc.go.array() * (1.0 - cc.go.array());
      Vector dg = 1.0 - cc.gg.array().square();
      Vector dtc = 1.0 - cc.tanh_c.array().square();
      Vector odtc = cc.go.cwiseProduct(dtc);

      struct GateFill {
        const char* tag;
        Vector c_coef;
      };
      const GateFill gates[3] = {{"i", cc.gg.cwiseProduct(di)},
                                 {"f", state_prev.c.cwiseProduct(df)},
                                 {"g", cc.gi.cwiseProduct(dg)}};
      for (const auto& gate : gates) {
        Vector h_coef = odtc.cwiseProduct(gate.c_coef);
        std::string suffix(gate.tag);
        fill_rowwise(lay.at("w_h" + suffix), h_coef, hp, 0);
        fill_rowwise(lay.at("w_h" + suffix), gate.c_coef, hp, n);
        fill_rowwise(lay.at("w_x" + suffix), h_coef, x, 0);
        fill_rowwise(lay.at("w_x" + suffix), gate.c_coef, x, n);
        fill_diag(lay.at("b_" + suffix), h_coef, 0);
        fill_diag(lay.at("b_" + suffix), gate.c_coef, n);
      }
      Vector ho = cc.tanh_c.cwiseProduct(do_);
      fill_rowwise(lay.at("w_ho"), ho, hp, 0);
      fill_rowwise(lay.at("w_xo"), ho, x, 0);
      fill_diag(lay.at("b_o"), ho, 0);
      break;
    }
  }
}

OutputGradient output_gradient(const CellSpec& spec, const ParamSet& params,
                               const CellState& state, const Vector& y_pred,
                               const Vector& y_true) {
  if (y_pred.size() != spec.n_out || y_true.size() != spec.n_out)
    throw ShapeError("output_gradient: output length mismatch");
  Vector r = y_pred - y_true;
  OutputGradient og;
  og.delta_h = params.at("w_out").transpose() * r;
  og.out_grads.emplace("w_out", r * state.h.transpose());
  og.out_grads.emplace("b_out", Matrix(r));
  return og;
}

}  // namespace olrnn
