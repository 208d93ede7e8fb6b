#include "graspforge/engine/optim.hpp"

#include <cmath>

#include "graspforge/core/error.hpp"

namespace graspforge::engine {

void ParameterSet::insert(const std::string& id, Tensor value) {
  if (!tensors_.emplace(id, std::move(value)).second) throw StateError("duplicate parameter id '" + id + "'");
}

void ParameterSet::assign(const std::string& id, Tensor value) {
  Tensor& slot = mutable_at(id);
  if (slot.shape() != value.shape())
    throw DimensionError("parameter '" + id + "' has shape " + shape_string(slot.shape()) + ", cannot assign " +
                         shape_string(value.shape()));
  slot = std::move(value);
}

const Tensor& ParameterSet::at(const std::string& id) const {
  auto it = tensors_.find(id);
  if (it == tensors_.end()) throw StateError("unknown parameter '" + id + "'");
  return it->second;
}

Tensor& ParameterSet::mutable_at(const std::string& id) {
  auto it = tensors_.find(id);
  if (it == tensors_.end()) throw StateError("unknown parameter '" + id + "'");
  return it->second;
}

std::size_t ParameterSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& [id, t] : tensors_) n += t.size();
  return n;
}

OptimizerState OptimizerState::for_parameters(const ParameterSet& params, const std::vector<std::string>& ids,
                                              AdamSettings settings) {
  if (!(settings.learning_rate > 0.0)) throw ConfigError("Adam learning rate must be positive");
  OptimizerState s;
  s.settings = settings;
  for (const auto& id : ids) {
    const Tensor& p = params.at(id);
    s.first_moment.emplace(id, Tensor(p.shape()));
    s.second_moment.emplace(id, Tensor(p.shape()));
  }
  return s;
}

void adam_step(ParameterSet& params, const std::map<std::string, Tensor>& grads, OptimizerState& state) {
  for (const auto& [id, m] : state.first_moment) {
    auto it = grads.find(id);
    if (it == grads.end()) throw StateError("adam_step: missing gradient for parameter '" + id + "'");
    require_same_shape(params.at(id), it->second, "adam_step");
    require_same_shape(params.at(id), m, "adam_step");
  }
  state.step += 1;
  const auto& s = state.settings;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(s.beta1, t);
  const double c2 = 1.0 - std::pow(s.beta2, t);
  for (auto& [id, m] : state.first_moment) {
    Tensor& v = state.second_moment.at(id);
    Tensor& p = params.mutable_at(id);
    const Tensor& g = grads.at(id);
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = s.beta1 * m[i] + (1.0 - s.beta1) * g[i];
      v[i] = s.beta2 * v[i] + (1.0 - s.beta2) * g[i] * g[i];
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      p[i] -= s.learning_rate * m_hat / (std::sqrt(v_hat) + s.epsilon);
    }
  }
}

}  // namespace graspforge::engine
