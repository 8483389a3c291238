#include <gtest/gtest.h>

#include <cmath>

#include "idsgan/errors.hpp"
#include "idsgan/optim.hpp"

namespace idsgan {
namespace {

void set_grad(Tensor& t, std::vector<double> g) {
  auto buf = t.grad_buffer();
  std::copy(g.begin(), g.end(), buf.begin());
}

TEST(Adam, ZeroGradientLeavesParametersAndCountsStep) {
  std::vector<Tensor> params{Tensor({3}, {1.0, -2.0, 0.5}, true)};
  set_grad(params[0], {0.0, 0.0, 0.0});
  AdamState state;
  adam_step(params, state, AdamConfig{});
  EXPECT_EQ(params[0].vector(), (std::vector<double>{1.0, -2.0, 0.5}));
  EXPECT_EQ(state.t, 1u);
  ASSERT_EQ(state.m.size(), 1u);
  EXPECT_EQ(state.m[0].size(), 3u);
  EXPECT_EQ(state.v[0].size(), 3u);
}

TEST(Adam, MissingGradientCountsAsZero) {
  std::vector<Tensor> params{Tensor({2}, {1.0, 2.0}, true)};
  AdamState state;
  adam_step(params, state, AdamConfig{});
  EXPECT_EQ(params[0].vector(), (std::vector<double>{1.0, 2.0}));
  EXPECT_EQ(state.t, 1u);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  std::vector<Tensor> params{Tensor({4}, {0.0, 0.0, 0.0, 0.0}, true)};
  set_grad(params[0], {3.0, -0.2, 1e-3, -50.0});
  AdamState state;
  AdamConfig config;
  adam_step(params, state, config);
  const auto p = params[0].vector();
  // m_hat / sqrt(v_hat) = g / |g| at t = 1, so each step is lr * sign(g) up to eps.
  EXPECT_NEAR(p[0], -config.learning_rate, 1e-10);
  EXPECT_NEAR(p[1], config.learning_rate, 1e-10);
  EXPECT_NEAR(p[2], -config.learning_rate, 1e-8);
  EXPECT_NEAR(p[3], config.learning_rate, 1e-10);
}

TEST(Adam, TwoStepsMatchHandUnrolledRecurrence) {
  const AdamConfig c{0.01, 0.8, 0.9, 1e-8};
  const double g = 0.5, x0 = 1.0;
  std::vector<Tensor> params{Tensor({1}, {x0}, true)};
  AdamState state;
  set_grad(params[0], {g});
  adam_step(params, state, c);
  set_grad(params[0], {g});
  adam_step(params, state, c);

  double m = 0.0, v = 0.0, x = x0;
  for (int t = 1; t <= 2; ++t) {
    m = c.beta1 * m + (1 - c.beta1) * g;
    v = c.beta2 * v + (1 - c.beta2) * g * g;
    const double m_hat = m / (1 - std::pow(c.beta1, t));
    const double v_hat = v / (1 - std::pow(c.beta2, t));
    x -= c.learning_rate * m_hat / (std::sqrt(v_hat) + c.epsilon);
  }
  EXPECT_NEAR(state.m[0][0], m, 1e-15);
  EXPECT_NEAR(state.v[0][0], v, 1e-15);
  EXPECT_NEAR(params[0].item(), x, 1e-15);
  EXPECT_EQ(state.t, 2u);
}

TEST(Adam, RejectsNonPositiveLearningRate) {
  std::vector<Tensor> params{Tensor({1}, {0.0}, true)};
  AdamState state;
  EXPECT_THROW(adam_step(params, state, AdamConfig{0.0}), UsageError);
  EXPECT_THROW(adam_step(params, state, AdamConfig{-1.0}), UsageError);
}

TEST(Adam, DefaultsAreCanonical) {
  const AdamConfig c;
  EXPECT_EQ(c.learning_rate, 0.001);
  EXPECT_EQ(c.beta1, 0.9);
  EXPECT_EQ(c.beta2, 0.999);
  EXPECT_EQ(c.epsilon, 1e-8);
}

}  // namespace
}  // namespace idsgan
