#include "graspforge/engine/autograd.hpp"

#include <Eigen/Core>

#include <cmath>
#include <memory>

#include "graspforge/core/error.hpp"

namespace graspforge::engine {
namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using ConstMapMat = Eigen::Map<const RowMat>;

ConstMapMat as_matrix(const Tensor& t, std::size_t rows, std::size_t cols) {
  return ConstMapMat(t.raw(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

}  // namespace

// ---------------------------------------------------------------------------
// Graph

Var Graph::constant(Tensor value) { return record(std::move(value), {}, nullptr); }

Var Graph::parameter(const std::string& id, const Tensor& value) {
  if (auto it = parameters_.find(id); it != parameters_.end()) return Var(this, it->second);
  Var v = record(value, {}, nullptr);
  nodes_[v.index()].parameter_id = id;
  parameters_.emplace(id, v.index());
  return v;
}

std::size_t Graph::checked(Var v) const {
  if (!v.valid() || v.graph_ != this || v.index() >= nodes_.size())
    throw StateError("variable does not belong to this graph");
  return v.index();
}

const Tensor& Graph::value(Var v) const { return nodes_[checked(v)].value; }

Var Graph::record(Tensor value, std::vector<std::size_t> inputs, BackwardFn fn) {
  nodes_.push_back(Node{std::move(value), Tensor(), false, std::move(inputs), std::move(fn), {}});
  backward_done_ = false;
  return Var(this, nodes_.size() - 1);
}

void Graph::backward(Var loss) {
  backward(loss, [](std::string_view) { return true; });
}

void Graph::backward(Var loss, const ParameterFilter& filter) {
  if (!loss.valid() || nodes_.empty()) throw StateError("backward called before any forward pass");
  const std::size_t root = checked(loss);
  if (nodes_[root].value.size() != 1) throw DimensionError("backward requires a scalar loss");

  // A node is active when some selected parameter is among its ancestors.
  active_.assign(nodes_.size(), 0);
  for (std::size_t i = 0; i <= root; ++i) {
    const Node& n = nodes_[i];
    if (!n.parameter_id.empty()) {
      active_[i] = filter(n.parameter_id) ? 1 : 0;
      continue;
    }
    for (std::size_t in : n.inputs)
      if (active_[in]) {
        active_[i] = 1;
        break;
      }
  }
  for (Node& n : nodes_) {
    n.grad = Tensor();
    n.has_grad = false;
  }
  nodes_[root].grad = Tensor(nodes_[root].value.shape(), 1.0);
  nodes_[root].has_grad = true;
  for (std::size_t i = root + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!active_[i] || !n.has_grad || !n.backward) continue;
    n.backward(*this, i);
  }
  backward_done_ = true;
}

void Graph::accumulate(std::size_t node, const Tensor& g) {
  if (!wants_grad(node)) return;
  Node& n = nodes_[node];
  if (!n.has_grad) {
    require_same_shape(n.value, g, "gradient accumulation");
    n.grad = g;
    n.has_grad = true;
  } else {
    n.grad += g;
  }
}

const Tensor& Graph::grad(Var v) const {
  const std::size_t i = checked(v);
  if (!backward_done_) throw StateError("gradient requested before backward");
  if (!nodes_[i].has_grad) throw StateError("node received no gradient in the last backward pass");
  return nodes_[i].grad;
}

std::map<std::string, Tensor> Graph::parameter_grads() const {
  if (!backward_done_) throw StateError("gradients requested before backward");
  std::map<std::string, Tensor> out;
  for (const auto& [id, idx] : parameters_)
    if (nodes_[idx].has_grad) out.emplace(id, nodes_[idx].grad);
  return out;
}

// ---------------------------------------------------------------------------
// Operations

Var conv3d(Graph& g, Var input, Var kernel, Var bias, ConvGeometry geom) {
  const std::size_t xi = g.checked(input), wi = g.checked(kernel), bi = g.checked(bias);
  Tensor out = conv3d_forward(g.value_at(xi), g.value_at(wi), g.value_at(bi), geom);
  return g.record(std::move(out), {xi, wi, bi}, [geom](Graph& gr, std::size_t self) {
    const auto& in = gr.inputs_of(self);
    const Tensor& dy = gr.grad_at(self);
    const Tensor& x = gr.value_at(in[0]);
    const Tensor& w = gr.value_at(in[1]);
    if (gr.wants_grad(in[0])) gr.accumulate(in[0], conv3d_backward_input(dy, w, x.shape(), geom));
    if (gr.wants_grad(in[1])) gr.accumulate(in[1], conv3d_backward_kernel(x, dy, w.shape(), geom));
    if (gr.wants_grad(in[2])) gr.accumulate(in[2], conv_backward_bias(dy));
  });
}

Var conv3d_transposed(Graph& g, Var input, Var kernel, Var bias, ConvGeometry geom) {
  const std::size_t xi = g.checked(input), wi = g.checked(kernel), bi = g.checked(bias);
  Tensor out = conv3d_transposed_forward(g.value_at(xi), g.value_at(wi), g.value_at(bi), geom);
  return g.record(std::move(out), {xi, wi, bi}, [geom](Graph& gr, std::size_t self) {
    const auto& in = gr.inputs_of(self);
    const Tensor& dy = gr.grad_at(self);
    const Tensor& x = gr.value_at(in[0]);
    const Tensor& w = gr.value_at(in[1]);
    // The transposed convolution is the input-adjoint of conv3d with the same
    // kernel, so its input gradient is a plain convolution of dy.
    if (gr.wants_grad(in[0])) {
      Tensor zero_bias(Shape{w.dim(0)});
      gr.accumulate(in[0], conv3d_forward(dy, w, zero_bias, geom));
    }
    if (gr.wants_grad(in[1])) gr.accumulate(in[1], conv3d_backward_kernel(dy, x, w.shape(), geom));
    if (gr.wants_grad(in[2])) gr.accumulate(in[2], conv_backward_bias(dy));
  });
}

Var batch_norm(Graph& g, Var input, Var scale, Var shift, BatchNormMode mode, const Tensor& running_mean,
               const Tensor& running_var, BatchStats* stats, const BatchNormParams& params) {
  const std::size_t xi = g.checked(input), si = g.checked(scale), hi = g.checked(shift);
  auto fwd = std::make_shared<BatchNormResult>(
      batchnorm_forward(g.value_at(xi), g.value_at(si), g.value_at(hi), mode, running_mean, running_var, params));
  if (stats) *stats = BatchStats{fwd->batch_mean, fwd->batch_var, fwd->count_per_channel};
  Tensor out = std::move(fwd->output);
  fwd->output = Tensor();
  return g.record(std::move(out), {xi, si, hi}, [fwd, mode](Graph& gr, std::size_t self) {
    const auto& in = gr.inputs_of(self);
    BatchNormGrads grads = batchnorm_backward(gr.grad_at(self), *fwd, gr.value_at(in[1]), mode);
    gr.accumulate(in[0], grads.input);
    gr.accumulate(in[1], grads.scale);
    gr.accumulate(in[2], grads.shift);
  });
}

Var relu(Graph& g, Var x) {
  const std::size_t xi = g.checked(x);
  Tensor out = g.value_at(xi);
  for (double& v : out.data()) v = v > 0.0 ? v : 0.0;
  return g.record(std::move(out), {xi}, [](Graph& gr, std::size_t self) {
    const std::size_t in = gr.inputs_of(self)[0];
    if (!gr.wants_grad(in)) return;
    const Tensor& xv = gr.value_at(in);
    Tensor dx = gr.grad_at(self);
    for (std::size_t i = 0; i < dx.size(); ++i)
      if (xv[i] <= 0.0) dx[i] = 0.0;
    gr.accumulate(in, dx);
  });
}

Var sigmoid(Graph& g, Var x) {
  const std::size_t xi = g.checked(x);
  Tensor out = g.value_at(xi);
  for (double& v : out.data()) {
    if (v >= 0.0) {
      v = 1.0 / (1.0 + std::exp(-v));
    } else {
      const double e = std::exp(v);
      v = e / (1.0 + e);
    }
  }
  return g.record(std::move(out), {xi}, [](Graph& gr, std::size_t self) {
    const std::size_t in = gr.inputs_of(self)[0];
    if (!gr.wants_grad(in)) return;
    const Tensor& y = gr.value_at(self);
    Tensor dx = gr.grad_at(self);
    for (std::size_t i = 0; i < dx.size(); ++i) dx[i] *= y[i] * (1.0 - y[i]);
    gr.accumulate(in, dx);
  });
}

Var linear(Graph& g, Var x, Var weight, Var bias) {
  const std::size_t xi = g.checked(x), wi = g.checked(weight), bi = g.checked(bias);
  const Tensor& xv = g.value_at(xi);
  const Tensor& wv = g.value_at(wi);
  const Tensor& bv = g.value_at(bi);
  if (xv.rank() != 2 || wv.rank() != 2 || wv.dim(1) != xv.dim(1) || bv.size() != wv.dim(0))
    throw DimensionError("linear: incompatible shapes x" + shape_string(xv.shape()) + " W" +
                         shape_string(wv.shape()) + " b" + shape_string(bv.shape()));
  const std::size_t n = xv.dim(0), in_dim = xv.dim(1), out_dim = wv.dim(0);
  Tensor out(Shape{n, out_dim});
  MapMat om(out.raw(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(out_dim));
  om.noalias() = as_matrix(xv, n, in_dim) * as_matrix(wv, out_dim, in_dim).transpose();
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < out_dim; ++c) out[r * out_dim + c] += bv[c];
  return g.record(std::move(out), {xi, wi, bi}, [n, in_dim, out_dim](Graph& gr, std::size_t self) {
    const auto& in = gr.inputs_of(self);
    const Tensor& dy = gr.grad_at(self);
    auto dym = as_matrix(dy, n, out_dim);
    if (gr.wants_grad(in[0])) {
      Tensor dx(Shape{n, in_dim});
      MapMat(dx.raw(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(in_dim)).noalias() =
          dym * as_matrix(gr.value_at(in[1]), out_dim, in_dim);
      gr.accumulate(in[0], dx);
    }
    if (gr.wants_grad(in[1])) {
      Tensor dw(Shape{out_dim, in_dim});
      MapMat(dw.raw(), static_cast<Eigen::Index>(out_dim), static_cast<Eigen::Index>(in_dim)).noalias() =
          dym.transpose() * as_matrix(gr.value_at(in[0]), n, in_dim);
      gr.accumulate(in[1], dw);
    }
    if (gr.wants_grad(in[2])) {
      Tensor db(Shape{out_dim});
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < out_dim; ++c) db[c] += dy[r * out_dim + c];
      gr.accumulate(in[2], db);
    }
  });
}

Var reshape(Graph& g, Var x, Shape shape) {
  const std::size_t xi = g.checked(x);
  Tensor out = g.value_at(xi).reshaped(std::move(shape));
  return g.record(std::move(out), {xi}, [](Graph& gr, std::size_t self) {
    const std::size_t in = gr.inputs_of(self)[0];
    if (gr.wants_grad(in)) gr.accumulate(in, gr.grad_at(self).reshaped(gr.value_at(in).shape()));
  });
}

Var affine_combine(Graph& g, Var a, Var b, double ca, double cb) {
  const std::size_t ai = g.checked(a), bi = g.checked(b);
  require_same_shape(g.value_at(ai), g.value_at(bi), "affine_combine");
  Tensor out(g.value_at(ai).shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = ca * g.value_at(ai)[i] + cb * g.value_at(bi)[i];
  return g.record(std::move(out), {ai, bi}, [ca, cb](Graph& gr, std::size_t self) {
    const auto& in = gr.inputs_of(self);
    for (int k = 0; k < 2; ++k) {
      if (!gr.wants_grad(in[k])) continue;
      Tensor d = gr.grad_at(self);
      d *= k == 0 ? ca : cb;
      gr.accumulate(in[k], d);
    }
  });
}

Var add(Graph& g, Var a, Var b) { return affine_combine(g, a, b, 1.0, 1.0); }
Var sub(Graph& g, Var a, Var b) { return affine_combine(g, a, b, 1.0, -1.0); }

Var scale(Graph& g, Var x, double factor) {
  const std::size_t xi = g.checked(x);
  Tensor out = g.value_at(xi);
  out *= factor;
  return g.record(std::move(out), {xi}, [factor](Graph& gr, std::size_t self) {
    const std::size_t in = gr.inputs_of(self)[0];
    if (!gr.wants_grad(in)) return;
    Tensor d = gr.grad_at(self);
    d *= factor;
    gr.accumulate(in, d);
  });
}

Var latent_mix(Graph& g, Var z, std::vector<std::size_t> partner, std::vector<double> alpha) {
  const std::size_t zi = g.checked(z);
  const Tensor& zv = g.value_at(zi);
  if (zv.rank() != 2) throw DimensionError("latent_mix: expected [N, dim] latents");
  const std::size_t n = zv.dim(0), d = zv.dim(1);
  if (partner.size() != n || alpha.size() != n) throw DimensionError("latent_mix: partner/alpha length mismatch");
  for (std::size_t p : partner)
    if (p >= n) throw DimensionError("latent_mix: partner index out of range");
  Tensor out(zv.shape());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j)
      out[i * d + j] = alpha[i] * zv[i * d + j] + (1.0 - alpha[i]) * zv[partner[i] * d + j];
  return g.record(std::move(out), {zi}, [partner = std::move(partner), alpha = std::move(alpha), n, d](
                                            Graph& gr, std::size_t self) {
    const std::size_t in = gr.inputs_of(self)[0];
    if (!gr.wants_grad(in)) return;
    const Tensor& dy = gr.grad_at(self);
    Tensor dz(Shape{n, d});
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        dz[i * d + j] += alpha[i] * dy[i * d + j];
        dz[partner[i] * d + j] += (1.0 - alpha[i]) * dy[i * d + j];
      }
    gr.accumulate(in, dz);
  });
}

Var sub_constant(Graph& g, Var x, Tensor constant) {
  const std::size_t xi = g.checked(x);
  Tensor out = g.value_at(xi);
  require_same_shape(out, constant, "sub_constant");
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= constant[i];
  return g.record(std::move(out), {xi}, [](Graph& gr, std::size_t self) {
    const std::size_t in = gr.inputs_of(self)[0];
    if (gr.wants_grad(in)) gr.accumulate(in, gr.grad_at(self));
  });
}

Var sum(Graph& g, Var x) {
  const std::size_t xi = g.checked(x);
  double s = 0.0;
  for (double v : g.value_at(xi).data()) s += v;
  return g.record(Tensor::scalar(s), {xi}, [](Graph& gr, std::size_t self) {
    const std::size_t in = gr.inputs_of(self)[0];
    if (gr.wants_grad(in)) gr.accumulate(in, Tensor(gr.value_at(in).shape(), gr.grad_at(self).item()));
  });
}

Var mean_square(Graph& g, Var x) {
  const std::size_t xi = g.checked(x);
  const Tensor& xv = g.value_at(xi);
  double s = 0.0;
  for (double v : xv.data()) s += v * v;
  s /= static_cast<double>(xv.size());
  return g.record(Tensor::scalar(s), {xi}, [](Graph& gr, std::size_t self) {
    const std::size_t in = gr.inputs_of(self)[0];
    if (!gr.wants_grad(in)) return;
    Tensor d = gr.value_at(in);
    d *= 2.0 * gr.grad_at(self).item() / static_cast<double>(d.size());
    gr.accumulate(in, d);
  });
}

Var bce(Graph& g, Var prediction, Tensor target) {
  const std::size_t pi = g.checked(prediction);
  const double loss = bce_loss(g.value_at(pi), target);
  return g.record(Tensor::scalar(loss), {pi},
                  [target = std::move(target)](Graph& gr, std::size_t self) {
                    const std::size_t in = gr.inputs_of(self)[0];
                    if (!gr.wants_grad(in)) return;
                    Tensor d = bce_backward(gr.value_at(in), target);
                    d *= gr.grad_at(self).item();
                    gr.accumulate(in, d);
                  });
}

}  // namespace graspforge::engine
