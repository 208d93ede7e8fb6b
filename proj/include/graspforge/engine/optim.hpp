#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "graspforge/engine/tensor.hpp"

namespace graspforge::engine {

// Named tensors: trainable weights plus non-trainable state such as batchnorm
// running statistics. Ids are unique and a tensor's shape never changes once
// inserted.
class ParameterSet {
 public:
  void insert(const std::string& id, Tensor value);
  /// Replace the value of an existing parameter; the shape must match.
  void assign(const std::string& id, Tensor value);

  const Tensor& at(const std::string& id) const;
  Tensor& mutable_at(const std::string& id);
  bool contains(const std::string& id) const { return tensors_.contains(id); }
  std::size_t size() const noexcept { return tensors_.size(); }
  std::size_t scalar_count() const;

  const std::map<std::string, Tensor>& tensors() const noexcept { return tensors_; }

  friend bool operator==(const ParameterSet&, const ParameterSet&) = default;

 private:
  std::map<std::string, Tensor> tensors_;
};

struct AdamSettings {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct OptimizerState {
  AdamSettings settings;
  std::uint64_t step = 0;
  std::map<std::string, Tensor> first_moment;
  std::map<std::string, Tensor> second_moment;

  /// Zero moments for each listed parameter.
  static OptimizerState for_parameters(const ParameterSet& params, const std::vector<std::string>& ids,
                                       AdamSettings settings);
};

/// One bias-corrected Adam update of every parameter tracked by `state`.
/// Throws StateError if a tracked parameter has no gradient.
void adam_step(ParameterSet& params, const std::map<std::string, Tensor>& grads, OptimizerState& state);

}  // namespace graspforge::engine
