#include "graspforge/model/losses.hpp"

#include <string>

#include "graspforge/core/error.hpp"

namespace graspforge::model {

using engine::Shape;
using engine::Tensor;
using engine::Var;

namespace {

void check_alpha(std::span<const double> alpha) {
  for (double a : alpha)
    if (!(a >= 0.0 && a <= 1.0)) throw DataError("interpolation weight " + std::to_string(a) + " outside [0, 1]");
}

double mean_square(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace

CriticLoss critic_loss(NetworkBuilder& net, engine::Graph& g, Var x, Var x_hat, Var x_hat_alpha,
                       const std::vector<double>& alpha, double gamma) {
  check_alpha(alpha);
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw DataError("gamma must lie in [0, 1]");
  Var c_alpha = net.critic(x_hat_alpha);
  if (g.value(c_alpha).size() != alpha.size())
    throw DimensionError("critic batch of " + std::to_string(g.value(c_alpha).size()) + " with " +
                         std::to_string(alpha.size()) + " interpolation weights");
  Var mixture = engine::affine_combine(g, x, x_hat, gamma, 1.0 - gamma);
  Var c_mix = net.critic(mixture);
  Var term_alpha = engine::mean_square(g, engine::sub_constant(g, c_alpha, Tensor(Shape{alpha.size(), 1}, alpha)));
  Var term_mix = engine::mean_square(g, c_mix);
  return {engine::add(g, term_alpha, term_mix), c_alpha};
}

Var ae_loss(engine::Graph& g, Var x_hat, const Tensor& x, Var critic_on_interpolant, double lambda) {
  if (!(lambda >= 0.0)) throw DataError("lambda must be non-negative");
  Var reconstruction = engine::bce(g, x_hat, x);
  return engine::affine_combine(g, reconstruction, engine::mean_square(g, critic_on_interpolant), 1.0, lambda);
}

AdversarialLosses adversarial_losses(NetworkBuilder& net, engine::Graph& g, const Tensor& x,
                                     const std::vector<std::size_t>& partner, const std::vector<double>& alpha,
                                     double gamma, double lambda) {
  Var xv = g.constant(x);
  Var z = net.encode(xv);
  Var x_hat = net.decode(z);
  Var x_hat_alpha = net.decode(engine::latent_mix(g, z, partner, alpha));
  const CriticLoss lc = critic_loss(net, g, xv, x_hat, x_hat_alpha, alpha, gamma);
  return {x_hat, lc.loss, ae_loss(g, x_hat, x, lc.critic_on_interpolant, lambda)};
}

double critic_loss_value(std::span<const double> critic_on_interpolant, std::span<const double> alpha,
                         std::span<const double> critic_on_mixture) {
  check_alpha(alpha);
  if (critic_on_interpolant.size() != alpha.size() || critic_on_mixture.size() != alpha.size())
    throw DimensionError("critic outputs and interpolation weights differ in batch size");
  std::vector<double> diff(alpha.size());
  for (std::size_t i = 0; i < alpha.size(); ++i) diff[i] = critic_on_interpolant[i] - alpha[i];
  return mean_square(diff) + mean_square(critic_on_mixture);
}

double ae_loss_value(double bce, double lambda, std::span<const double> critic_on_interpolant) {
  return bce + lambda * mean_square(critic_on_interpolant);
}

}  // namespace graspforge::model
