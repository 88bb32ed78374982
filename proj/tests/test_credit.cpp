#include <doctest.h>

#include "olrnn/linalg.hpp"
#include "oracles.hpp"

using namespace olrnn;

TEST_SUITE_BEGIN("credit");

namespace {

CellSpec probe_spec(Arch arch, Index n) {
  CellSpec s;
  s.arch = arch;
  s.n_in = 1;
  s.n_hidden = n;
  s.n_out = 1;
  return s;
}

Sensitivity random_sensitivity(std::shared_ptr<const GroupLayout> layout, Index sd,
                               Rng& rng) {
  Sensitivity s(layout, sd);
  s.data() = gauss_init(rng, s.param_count(), sd, 1.0);
  return s;
}

}  // namespace

TEST_CASE("rtrl_step: zero jacobian keeps only the direct term") {
  CellSpec spec = probe_spec(Arch::VanillaRnn, 5);
  auto layout = state_group_layout(spec);
  Rng rng(1);
  Sensitivity p = random_sensitivity(layout, 5, rng);
  Sensitivity d = random_sensitivity(layout, 5, rng);
  Sensitivity out = rtrl_step(p, Matrix::Zero(5, 5), d);
  CHECK(out.data() == d.data());
}

TEST_CASE("rtrl_step: identity jacobian with zero direct term carries") {
  CellSpec spec = probe_spec(Arch::VanillaRnn, 5);
  auto layout = state_group_layout(spec);
  Rng rng(2);
  Sensitivity p = random_sensitivity(layout, 5, rng);
  Sensitivity d(layout, 5);
  Sensitivity out = rtrl_step(p, Matrix::Identity(5, 5), d);
  CHECK(out.data() == p.data());
}

TEST_CASE("rtrl accumulates the exact recurrent-weight derivative (scalar)") {
  // h_t = tanh(w h_{t-1} + x_t): after T steps the sensitivity column for w
  // must equal d h_T / d w of the unrolled map.
  CellSpec spec = probe_spec(Arch::VanillaRnn, 1);
  ParamSet params;
  params.insert("b_h", Matrix::Zero(1, 1));
  params.insert("w_hh", Matrix::Constant(1, 1, 0.7));
  params.insert("w_xh", Matrix::Ones(1, 1));
  params.insert("w_out", Matrix::Ones(1, 1));
  params.insert("b_out", Matrix::Zero(1, 1));

  Rng rng(3);
  std::vector<Vector> xs;
  for (int t = 0; t < 10; ++t) xs.push_back(Vector::Constant(1, rng.normal()));

  auto layout = state_group_layout(spec);
  Sensitivity p(layout, 1), d(layout, 1), scratch(layout, 1);
  CellState st = init_state(spec);
  for (const auto& x : xs) {
    auto [next, y] = forward(spec, params, st, x);
    immediate_derivative(spec, params, st, next, x, d);
    Matrix jac = state_jacobian(spec, params, st, next, x);
    rtrl_step(p, jac, d, scratch);
    st = std::move(next);
  }
  double sens_w = p.entry("w_hh", 0, 0, 0);

  const double eps = 1e-6;
  auto roll = [&](double w) {
    double h = 0.0;
    for (const auto& x : xs) h = std::tanh(w * h + x[0]);
    return h;
  };
  double fd = (roll(0.7 + eps) - roll(0.7 - eps)) / (2 * eps);
  CHECK(oracle::rel_err(sens_w, fd) < 1e-6);
}

TEST_CASE("trace_step: decay 0 returns the direct term bitwise, no history") {
  CellSpec spec = probe_spec(Arch::VanillaRnn, 4);
  auto layout = state_group_layout(spec);
  Rng rng(4);
  const Sensitivity e = random_sensitivity(layout, 4, rng);
  const Sensitivity d = random_sensitivity(layout, 4, rng);
  Sensitivity out = trace_step(e, 0.0, d);
  CHECK(out.data() == d.data());
}

TEST_CASE("trace_step: geometric accumulation of a constant direct term") {
  CellSpec spec = probe_spec(Arch::VanillaRnn, 1);
  auto layout = state_group_layout(spec);
  Sensitivity e(layout, 1), d(layout, 1);
  d.data().setOnes();
  for (int t = 0; t < 10; ++t) {
    Sensitivity din = d;  // trace_step consumes its input
    trace_step(e, 0.95, din);
  }
  double expected = (1.0 - std::pow(0.95, 10)) / 0.05;  // 8.0252...
  CHECK(e.data()(0, 0) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(e.data()(0, 0) == doctest::Approx(8.0253).epsilon(1e-4));
}

TEST_CASE("trace weighting of a 10-step-old contribution at decay 0.95") {
  // One unit impulse followed by zero direct terms: after 10 more steps the
  // impulse is weighted by 0.95^10 ~ 0.60.
  CellSpec spec = probe_spec(Arch::VanillaRnn, 1);
  auto layout = state_group_layout(spec);
  Sensitivity e(layout, 1), zero(layout, 1), impulse(layout, 1);
  impulse.data().setOnes();
  Sensitivity din = impulse;
  trace_step(e, 0.95, din);
  for (int t = 0; t < 10; ++t) {
    Sensitivity z = zero;
    trace_step(e, 0.95, z);
  }
  CHECK(e.data()(0, 0) == doctest::Approx(std::pow(0.95, 10)).epsilon(1e-12));
  CHECK(e.data()(0, 0) == doctest::Approx(0.5987).epsilon(1e-4));
}

TEST_CASE("trace_step rejects decay outside [0,1)") {
  CellSpec spec = probe_spec(Arch::VanillaRnn, 2);
  auto layout = state_group_layout(spec);
  Sensitivity e(layout, 2), d(layout, 2);
  CHECK_THROWS_AS(trace_step(e, 1.0, d), ParamError);
  CHECK_THROWS_AS(trace_step(e, -0.1, d), ParamError);
}

TEST_CASE("monotone staleness: trace norm is nondecreasing in decay") {
  CellSpec spec = probe_spec(Arch::VanillaRnn, 3);
  auto layout = state_group_layout(spec);
  Rng rng(5);
  Sensitivity d = random_sensitivity(layout, 3, rng);
  const double lams[] = {0.0, 0.2, 0.5, 0.8, 0.95};
  for (int steps : {1, 5, 20}) {
    double prev_norm = -1.0;
    for (double lam : lams) {
      Sensitivity e(layout, 3);
      for (int t = 0; t < steps; ++t) {
        Sensitivity din = d;
        trace_step(e, lam, din);  // decay 0 swaps: e ends up holding d
      }
      double n = e.data().norm();
      CHECK(n >= prev_norm - 1e-12);
      prev_norm = n;
    }
  }
}

TEST_CASE("ring mask: k=1 empty, k=4 selects three lags, no diagonal ever") {
  CHECK(ring_mask(8, 1).norm() == 0.0);
  Matrix m4 = ring_mask(8, 4);
  for (Index i = 0; i < 8; ++i) {
    CHECK(m4(i, i) == 0.0);
    CHECK(m4.row(i).sum() == 3.0);
    for (Index lag = 1; lag <= 3; ++lag) CHECK(m4(i, (i + lag) % 8) == 1.0);
  }
}

TEST_CASE("sparse_step: k=1 equals the direct term") {
  CellSpec spec = probe_spec(Arch::VanillaRnn, 8);
  auto layout = state_group_layout(spec);
  Rng rng(6);
  Sensitivity p = random_sensitivity(layout, 8, rng);
  Sensitivity d = random_sensitivity(layout, 8, rng);
  Matrix jac = gauss_init(rng, 8, 8, 1.0);
  Sensitivity out = sparse_step(p, jac, 1, d);
  CHECK(out.data() == d.data());
}

TEST_CASE("sparse_step: k=4 equals rtrl with the explicitly masked jacobian") {
  CellSpec spec = probe_spec(Arch::VanillaRnn, 8);
  auto layout = state_group_layout(spec);
  Rng rng(7);
  Sensitivity p = random_sensitivity(layout, 8, rng);
  Sensitivity d = random_sensitivity(layout, 8, rng);
  Matrix jac = gauss_init(rng, 8, 8, 1.0);

  Sensitivity got = sparse_step(p, jac, 4, d);
  // Dense-masked reference, built without the ring helper.
  Matrix masked = Matrix::Zero(8, 8);
  for (Index i = 0; i < 8; ++i)
    for (Index lag = 1; lag <= 3; ++lag) masked(i, (i + lag) % 8) = jac(i, (i + lag) % 8);
  Sensitivity want = rtrl_step(p, masked, d);
  CHECK(got.data().isApprox(want.data(), 1e-15));
}

TEST_CASE("sparse_step: k=n propagates everything except the diagonal") {
  CellSpec spec = probe_spec(Arch::VanillaRnn, 6);
  auto layout = state_group_layout(spec);
  Rng rng(8);
  Sensitivity p = random_sensitivity(layout, 6, rng);
  Sensitivity d = random_sensitivity(layout, 6, rng);
  Matrix jac = gauss_init(rng, 6, 6, 1.0);
  Matrix offdiag = jac;
  offdiag.diagonal().setZero();
  Sensitivity got = sparse_step(p, jac, 6, d);
  Sensitivity want = rtrl_step(p, offdiag, d);
  CHECK(got.data().isApprox(want.data(), 1e-15));
}

TEST_CASE("assemble_gradient: zero error signal zeroes the state-map groups") {
  CellSpec spec = probe_spec(Arch::VanillaRnn, 5);
  auto layout = state_group_layout(spec);
  Rng rng(9);
  Sensitivity s = random_sensitivity(layout, 5, rng);
  GradMap out;
  out["w_out"] = Matrix::Ones(1, 5);
  out["b_out"] = Matrix::Ones(1, 1);
  GradMap grads = assemble_gradient(s, Vector::Zero(5), out, std::nullopt);
  CHECK(grads.at("w_hh").norm() == 0.0);
  CHECK(grads.at("w_xh").norm() == 0.0);
  CHECK(grads.at("b_h").norm() == 0.0);
  CHECK(grads.at("w_out").norm() > 0.0);  // output head passes through
}

TEST_CASE("assemble_gradient: clipping rescales to the target norm") {
  CellSpec spec = probe_spec(Arch::VanillaRnn, 4);
  auto layout = state_group_layout(spec);
  Sensitivity s(layout, 4);
  s.data().setOnes();
  Vector delta = Vector::Ones(4);
  GradMap unclipped = assemble_gradient(s, delta, {}, std::nullopt);
  double norm0 = 0.0;
  for (const auto& [k, g] : unclipped) norm0 += g.squaredNorm();
  norm0 = std::sqrt(norm0);
  REQUIRE(norm0 > 1.0);

  GradMap clipped = assemble_gradient(s, delta, {}, 1.0);
  double norm1 = 0.0, dot = 0.0;
  for (const auto& [k, g] : clipped) {
    norm1 += g.squaredNorm();
    dot += (g.array() * unclipped.at(k).array()).sum();
  }
  norm1 = std::sqrt(norm1);
  CHECK(norm1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dot / (norm0 * norm1) == doctest::Approx(1.0).epsilon(1e-12));  // direction kept
}

TEST_CASE("rtrl equals the unrolled finite-difference gradient (all cells)") {
  for (Arch arch : {Arch::VanillaRnn, Arch::Gru, Arch::Lstm, Arch::Ctrnn}) {
    CellSpec spec = probe_spec(arch, 4);
    Rng rng(500 + int(arch));
    ParamSet params = make_params(spec, rng);
    std::vector<Vector> xs;
    for (int t = 0; t < 8; ++t) xs.push_back(oracle::random_input(spec, rng));
    Vector target = Vector::Constant(1, 0.3);

    GradMap got = oracle::rtrl_rollout_gradient(spec, params, xs, target);
    GradMap fd = oracle::fd_unrolled_gradient(spec, params, xs, target);
    for (const auto& [name, g] : fd)
      CHECK(oracle::max_rel_err(got.at(name), g) < 1e-5);
  }
}

TEST_CASE("trace(0) and full rtrl coincide on a length-1 history") {
  CellSpec spec = probe_spec(Arch::VanillaRnn, 6);
  Rng rng(10);
  ParamSet params = make_params(spec, rng);
  auto layout = state_group_layout(spec);
  CellState st = init_state(spec);
  Vector x = oracle::random_input(spec, rng);
  auto [next, y] = forward(spec, params, st, x);
  Sensitivity d1(layout, 6), d2(layout, 6);
  immediate_derivative(spec, params, st, next, x, d1);
  immediate_derivative(spec, params, st, next, x, d2);
  Matrix jac = state_jacobian(spec, params, st, next, x);

  const Sensitivity p(layout, 6);  // fresh
  Sensitivity rtrl_out = rtrl_step(p, jac, d1);
  const Sensitivity e(layout, 6);
  Sensitivity trace_out = trace_step(e, 0.0, Sensitivity(d2));
  CHECK(rtrl_out.data() == trace_out.data());
}

TEST_CASE("credit state: decay-0 holds no persistent buffer, others do") {
  CellSpec spec = probe_spec(Arch::VanillaRnn, 16);
  auto layout = state_group_layout(spec);
  const Index sd = spec.state_dim();
  const std::size_t one_buffer =
      std::size_t(layout->total()) * std::size_t(sd) * sizeof(double);

  CreditSpec trace0{CreditMethod::Trace, 0.0, 1, std::nullopt};
  CHECK(CreditState(trace0, layout, sd).persistent_sensitivity_bytes() == 0);

  CreditSpec trace95{CreditMethod::Trace, 0.95, 1, std::nullopt};
  CHECK(CreditState(trace95, layout, sd).persistent_sensitivity_bytes() == one_buffer);

  CreditSpec rtrl{CreditMethod::FullRtrl, 0.0, 1, std::nullopt};
  CHECK(CreditState(rtrl, layout, sd).persistent_sensitivity_bytes() == 2 * one_buffer);
}

TEST_CASE("credit spec validation") {
  CreditSpec bad{CreditMethod::Trace, 1.0, 1, std::nullopt};
  CHECK_THROWS_AS(bad.validate(), ParamError);
  CreditSpec badk{CreditMethod::SparseK, 0.0, 0, std::nullopt};
  CHECK_THROWS_AS(badk.validate(), ParamError);
  CreditSpec badclip{CreditMethod::Trace, 0.0, 1, -1.0};
  CHECK_THROWS_AS(badclip.validate(), ParamError);
}

TEST_SUITE_END();
