#pragma once

#include <span>
#include <vector>

#include "graspforge/engine/autograd.hpp"
#include "graspforge/model/ae_critic.hpp"

namespace graspforge::model {

struct CriticLoss {
  engine::Var loss;
  engine::Var critic_on_interpolant;  // C(x_hat_alpha), [N, 1]
};

/// Critic objective: mean (C(x_hat_alpha) - alpha)^2 + mean C(gamma x + (1 - gamma) x_hat)^2.
/// Throws DataError if an alpha lies outside [0, 1], DimensionError on a batch mismatch.
CriticLoss critic_loss(NetworkBuilder& net, engine::Graph& g, engine::Var x, engine::Var x_hat,
                       engine::Var x_hat_alpha, const std::vector<double>& alpha, double gamma);

/// Autoencoder objective: BCE(x_hat, x) + lambda * mean C(x_hat_alpha)^2.
engine::Var ae_loss(engine::Graph& g, engine::Var x_hat, const engine::Tensor& x, engine::Var critic_on_interpolant,
                    double lambda);

struct AdversarialLosses {
  engine::Var reconstruction;  // x_hat
  engine::Var critic_loss;
  engine::Var ae_loss;
};

/// The phase-2 forward pass on a batch: encode, decode, decode the latents
/// mixed with `partner` rows at weights `alpha`, then both objectives.
AdversarialLosses adversarial_losses(NetworkBuilder& net, engine::Graph& g, const engine::Tensor& x,
                                     const std::vector<std::size_t>& partner, const std::vector<double>& alpha,
                                     double gamma, double lambda);

// Closed forms of the same objectives on precomputed network outputs.
double critic_loss_value(std::span<const double> critic_on_interpolant, std::span<const double> alpha,
                         std::span<const double> critic_on_mixture);
double ae_loss_value(double bce, double lambda, std::span<const double> critic_on_interpolant);

}  // namespace graspforge::model
