#include "idsgan/optim.hpp"

#include <cmath>

#include "idsgan/errors.hpp"

namespace idsgan {

void adam_step(std::span<Tensor> params, AdamState& state, const AdamConfig& config) {
  if (!(config.learning_rate > 0.0)) throw UsageError("adam: learning rate must be positive");
  if (state.m.empty() && state.v.empty()) {
    for (const Tensor& p : params) {
      state.m.emplace_back(p.size(), 0.0);
      state.v.emplace_back(p.size(), 0.0);
    }
  }
  if (state.m.size() != params.size() || state.v.size() != params.size()) {
    throw ShapeError("adam: optimizer state tracks " + std::to_string(state.m.size()) +
                     " parameters, got " + std::to_string(params.size()));
  }
  state.t += 1;
  const double t = static_cast<double>(state.t);
  const double m_correction = 1.0 - std::pow(config.beta1, t);
  const double v_correction = 1.0 - std::pow(config.beta2, t);

  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& p = params[i];
    auto& m = state.m[i];
    auto& v = state.v[i];
    if (m.size() != p.size() || v.size() != p.size()) {
      throw ShapeError("adam: moment shape does not mirror parameter " + std::to_string(i));
    }
    auto values = p.values();
    const auto grad = p.grad();
    const bool has_grad = !grad.empty();
    for (std::size_t j = 0; j < values.size(); ++j) {
      const double g = has_grad ? grad[j] : 0.0;
      m[j] = config.beta1 * m[j] + (1.0 - config.beta1) * g;
      v[j] = config.beta2 * v[j] + (1.0 - config.beta2) * g * g;
      const double m_hat = m[j] / m_correction;
      const double v_hat = v[j] / v_correction;
      values[j] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
    }
  }
}

}  // namespace idsgan
