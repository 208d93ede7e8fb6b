#pragma once

// Tape-based reverse-mode differentiation.
//
// A Graph records every value produced during a forward pass together with a
// closure that propagates the output gradient to the node's inputs. Nodes are
// appended in evaluation order, so a single reverse sweep is a valid
// topological order. Parameters are leaves keyed by their id; a parameter
// used several times in one pass shares a single node.

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "graspforge/engine/kernels.hpp"
#include "graspforge/engine/tensor.hpp"

namespace graspforge::engine {

class Graph;

class Var {
 public:
  Var() = default;
  bool valid() const noexcept { return graph_ != nullptr; }
  std::size_t index() const noexcept { return index_; }

 private:
  friend class Graph;
  Var(const Graph* graph, std::size_t index) : graph_(graph), index_(index) {}
  const Graph* graph_ = nullptr;
  std::size_t index_ = 0;
};

class Graph {
 public:
  using BackwardFn = std::function<void(Graph&, std::size_t self)>;
  using ParameterFilter = std::function<bool(std::string_view id)>;

  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var constant(Tensor value);
  /// Leaf parameter. Repeated calls with the same id return the same node.
  Var parameter(const std::string& id, const Tensor& value);

  const Tensor& value(Var v) const;
  std::size_t size() const noexcept { return nodes_.size(); }

  /// Reverse sweep from a scalar node into every reachable parameter.
  void backward(Var loss);
  /// Reverse sweep restricted to parameters accepted by `filter`. Nodes that
  /// cannot reach such a parameter are skipped entirely.
  void backward(Var loss, const ParameterFilter& filter);

  const Tensor& grad(Var v) const;
  /// Gradients of every parameter reached by the last backward pass.
  std::map<std::string, Tensor> parameter_grads() const;

  // --- interface for op implementations ---
  Var record(Tensor value, std::vector<std::size_t> inputs, BackwardFn fn);
  const Tensor& value_at(std::size_t node) const { return nodes_[node].value; }
  const Tensor& grad_at(std::size_t node) const { return nodes_[node].grad; }
  const std::vector<std::size_t>& inputs_of(std::size_t node) const { return nodes_[node].inputs; }
  bool wants_grad(std::size_t node) const { return node < active_.size() && active_[node]; }
  void accumulate(std::size_t node, const Tensor& g);

  std::size_t checked(Var v) const;

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool has_grad = false;
    std::vector<std::size_t> inputs;
    BackwardFn backward;
    std::string parameter_id;
  };

  std::vector<Node> nodes_;
  std::map<std::string, std::size_t, std::less<>> parameters_;
  std::vector<char> active_;
  bool backward_done_ = false;
};

// --- differentiable operations ---

Var conv3d(Graph& g, Var input, Var kernel, Var bias, ConvGeometry geom);
Var conv3d_transposed(Graph& g, Var input, Var kernel, Var bias, ConvGeometry geom);

struct BatchStats {
  Tensor mean;
  Tensor var;  // biased
  std::size_t count = 0;
};

/// Batch normalization. In train mode the batch statistics are written to
/// `stats` (when non-null) so the caller can update running statistics.
Var batch_norm(Graph& g, Var input, Var scale, Var shift, BatchNormMode mode, const Tensor& running_mean,
               const Tensor& running_var, BatchStats* stats = nullptr, const BatchNormParams& params = {});

Var relu(Graph& g, Var x);
Var sigmoid(Graph& g, Var x);
/// x [N, in] times weight [out, in] transposed, plus bias [out].
Var linear(Graph& g, Var x, Var weight, Var bias);
Var reshape(Graph& g, Var x, Shape shape);
Var add(Graph& g, Var a, Var b);
Var sub(Graph& g, Var a, Var b);
Var scale(Graph& g, Var x, double factor);
/// ca * a + cb * b.
Var affine_combine(Graph& g, Var a, Var b, double ca, double cb);
/// Row-wise latent interpolation: out[i] = alpha[i] * z[i] + (1 - alpha[i]) * z[partner[i]].
Var latent_mix(Graph& g, Var z, std::vector<std::size_t> partner, std::vector<double> alpha);
Var sub_constant(Graph& g, Var x, Tensor constant);
Var sum(Graph& g, Var x);
/// Mean of squared entries, as a scalar.
Var mean_square(Graph& g, Var x);
/// Mean binary cross-entropy against a fixed target, as a scalar.
Var bce(Graph& g, Var prediction, Tensor target);

}  // namespace graspforge::engine
