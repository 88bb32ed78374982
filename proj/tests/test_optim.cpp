#include <doctest.h>

#include "olrnn/optim.hpp"
#include "olrnn/linalg.hpp"

using namespace olrnn;

TEST_SUITE_BEGIN("optim");

namespace {

ParamSet scalar_params(double value = 1.0) {
  ParamSet p;
  p.insert("w", Matrix::Constant(1, 1, value));
  return p;
}

GradMap scalar_grad(double g) {
  GradMap m;
  m["w"] = Matrix::Constant(1, 1, g);
  return m;
}

const OptimMethod kAll[] = {OptimMethod::Sgd,        OptimMethod::SgdMomentum,
                            OptimMethod::AdamFull,   OptimMethod::AdamB1Only,
                            OptimMethod::AdamB2Only, OptimMethod::RmsProp};

}  // namespace

TEST_CASE("zero gradient leaves parameters unchanged for every method") {
  for (OptimMethod method : kAll) {
    OptimSpec spec;
    spec.method = method;
    ParamSet p = scalar_params(2.5);
    OptimState st = OptimState::for_params(spec, p);
    for (int t = 0; t < 3; ++t) optim_step(spec, st, p, scalar_grad(0.0));
    CHECK(p.at("w")(0, 0) == 2.5);
    CHECK(st.step_count() == 3);
  }
}

TEST_CASE("adam first step: bias correction gives update ~ -lr") {
  OptimSpec spec;
  spec.method = OptimMethod::AdamFull;
  spec.lr = 1e-3;
  ParamSet p = scalar_params(0.0);
  OptimState st = OptimState::for_params(spec, p);
  optim_step(spec, st, p, scalar_grad(1.0));
  // m_hat = 1, v_hat = 1: step is lr / (1 + eps).
  double expected = -1e-3 / (1.0 + 1e-8);
  CHECK(p.at("w")(0, 0) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("adam first step magnitude is lr regardless of gradient scale") {
  for (double g : {1.0, 1e-4}) {
    OptimSpec spec;
    spec.method = OptimMethod::AdamFull;
    spec.lr = 1e-3;
    ParamSet p = scalar_params(0.0);
    OptimState st = OptimState::for_params(spec, p);
    optim_step(spec, st, p, scalar_grad(g));
    CHECK(std::abs(p.at("w")(0, 0)) == doctest::Approx(1e-3).epsilon(1e-3));
  }
}

TEST_CASE("second-moment methods are invariant to gradient scale; sgd is not") {
  // Fixed gradient sequence and the same sequence scaled by c = 100.
  Rng rng(1);
  std::vector<double> gs;
  for (int t = 0; t < 50; ++t) gs.push_back(rng.normal());
  const double c = 100.0;

  for (OptimMethod method : {OptimMethod::AdamB2Only, OptimMethod::RmsProp}) {
    OptimSpec spec;
    spec.method = method;
    spec.lr = 1e-3;
    ParamSet p1 = scalar_params(0.0), p2 = scalar_params(0.0);
    OptimState s1 = OptimState::for_params(spec, p1);
    OptimState s2 = OptimState::for_params(spec, p2);
    for (double g : gs) {
      optim_step(spec, s1, p1, scalar_grad(g));
      optim_step(spec, s2, p2, scalar_grad(c * g));
    }
    CHECK(std::abs(p1.at("w")(0, 0) - p2.at("w")(0, 0)) < 1e-6);
  }

  OptimSpec sgd;
  sgd.method = OptimMethod::Sgd;
  sgd.lr = 1e-3;
  ParamSet p1 = scalar_params(0.0), p2 = scalar_params(0.0);
  OptimState s1 = OptimState::for_params(sgd, p1), s2 = OptimState::for_params(sgd, p2);
  for (double g : gs) {
    optim_step(sgd, s1, p1, scalar_grad(g));
    optim_step(sgd, s2, p2, scalar_grad(c * g));
  }
  CHECK(p2.at("w")(0, 0) == doctest::Approx(c * p1.at("w")(0, 0)).epsilon(1e-12));
}

TEST_CASE("second moment is nonnegative and bounded by the largest g^2") {
  OptimSpec spec;
  spec.method = OptimMethod::AdamFull;
  Rng rng(2);
  ParamSet p = scalar_params(0.0);
  OptimState st = OptimState::for_params(spec, p);
  double max_g2 = 0.0;
  for (int t = 0; t < 200; ++t) {
    double g = rng.normal();
    max_g2 = std::max(max_g2, g * g);
    optim_step(spec, st, p, scalar_grad(g));
    double v = st.v("w")(0, 0);
    CHECK(v >= 0.0);
    CHECK(v <= max_g2 + 1e-15);
  }
}

TEST_CASE("adam b1-only with beta1 = 0 reduces exactly to sgd") {
  OptimSpec b1;
  b1.method = OptimMethod::AdamB1Only;
  b1.beta1 = 0.0;
  b1.lr = 3e-3;
  OptimSpec sgd;
  sgd.method = OptimMethod::Sgd;
  sgd.lr = 3e-3;
  Rng rng(3);
  ParamSet p1 = scalar_params(1.0), p2 = scalar_params(1.0);
  OptimState s1 = OptimState::for_params(b1, p1), s2 = OptimState::for_params(sgd, p2);
  for (int t = 0; t < 100; ++t) {
    double g = rng.normal();
    optim_step(b1, s1, p1, scalar_grad(g));
    optim_step(sgd, s2, p2, scalar_grad(g));
    CHECK(p1.at("w")(0, 0) == p2.at("w")(0, 0));
  }
}

TEST_CASE("rmsprop second moment reaches (1 - alpha^T) g^2 for constant g") {
  OptimSpec spec;
  spec.method = OptimMethod::RmsProp;
  spec.alpha = 0.99;
  const double g = 1.7;
  ParamSet p = scalar_params(0.0);
  OptimState st = OptimState::for_params(spec, p);
  for (int t = 0; t < 100; ++t) optim_step(spec, st, p, scalar_grad(g));
  double expected = (1.0 - std::pow(0.99, 100)) * g * g;
  CHECK(st.v("w")(0, 0) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected / (g * g) == doctest::Approx(0.634).epsilon(1e-2));
}

TEST_CASE("switch_optimizer returns zeroed state, parameters untouched") {
  OptimSpec adam;
  adam.method = OptimMethod::AdamFull;
  ParamSet p = scalar_params(1.0);
  OptimState st = OptimState::for_params(adam, p);
  for (int t = 0; t < 10; ++t) optim_step(adam, st, p, scalar_grad(0.5));
  double theta_after = p.at("w")(0, 0);
  CHECK(st.m("w")(0, 0) != 0.0);

  OptimSpec sgd;
  sgd.method = OptimMethod::Sgd;
  OptimState fresh = switch_optimizer(sgd, p);
  CHECK(fresh.step_count() == 0);
  CHECK(p.at("w")(0, 0) == theta_after);

  // Switching to the same spec behaves like a cold restart.
  OptimState restart = switch_optimizer(adam, p);
  CHECK(restart.step_count() == 0);
  CHECK(restart.m("w")(0, 0) == 0.0);
  CHECK(restart.v("w")(0, 0) == 0.0);

  // Switching to the b2-only variant uses the raw gradient in the numerator:
  // two different gradients with equal |g| produce equal-magnitude steps.
  OptimSpec b2;
  b2.method = OptimMethod::AdamB2Only;
  b2.lr = 1e-3;
  ParamSet pa = scalar_params(0.0), pb = scalar_params(0.0);
  OptimState sa = switch_optimizer(b2, pa), sb = switch_optimizer(b2, pb);
  optim_step(b2, sa, pa, scalar_grad(0.3));
  optim_step(b2, sb, pb, scalar_grad(-0.3));
  CHECK(pa.at("w")(0, 0) == doctest::Approx(-pb.at("w")(0, 0)).epsilon(1e-12));
}

TEST_CASE("missing or misshapen gradients are rejected") {
  OptimSpec spec;
  spec.method = OptimMethod::Sgd;
  ParamSet p = scalar_params(1.0);
  OptimState st = OptimState::for_params(spec, p);
  GradMap empty;
  CHECK_THROWS_AS(optim_step(spec, st, p, empty), ShapeError);
  GradMap wrong;
  wrong["w"] = Matrix::Zero(2, 2);
  CHECK_THROWS_AS(optim_step(spec, st, p, wrong), ShapeError);
}

TEST_CASE("spec validation bounds") {
  OptimSpec bad;
  bad.lr = 0.0;
  CHECK_THROWS_AS(bad.validate(), ParamError);
  OptimSpec b2;
  b2.beta2 = 1.0;
  CHECK_THROWS_AS(b2.validate(), ParamError);
}

TEST_SUITE_END();
