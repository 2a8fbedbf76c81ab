#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace tbrain {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

class Rng;

/// Pre-activation argument bound applied before exponentiation.
inline constexpr double kSigmoidClamp = 500.0;

double sigmoid(double x);
Vector sigmoid(const Vector& x);

/// Pre-activations `pre` (q) and post-activations `post` (gamma) of the n
/// ensembles of the representation layer.
struct RepresentationState {
  Vector pre;
  Vector post;

  RepresentationState() = default;
  /// Neutral state: pre = 0, post = 1/2.
  explicit RepresentationState(Eigen::Index n);
  /// Takes pre-activations and activates them.
  static RepresentationState from_pre(Vector pre);

  [[nodiscard]] Eigen::Index n() const { return pre.size(); }
  bool operator==(const RepresentationState& other) const;
};

/// Realization of the n independent Bernoulli ensembles.
struct BernoulliSample {
  std::vector<std::uint8_t> bits;
};

/// One-hidden-layer network with sigmoid hidden units and linear outputs.
/// Evaluated on post-activations; its output is added to the pre-activations.
struct EvolutionNetwork {
  Matrix w_in;      // h x n
  Vector b_hidden;  // h
  Matrix w_out;     // n x h
  Vector b_out;     // n

  EvolutionNetwork() = default;
  /// All-zero network of the given shape.
  EvolutionNetwork(Eigen::Index n, Eigen::Index hidden);
  /// Weights uniform in [-1/sqrt(n), 1/sqrt(n)], zero biases.
  static EvolutionNetwork random(Eigen::Index n, Eigen::Index hidden, Rng& rng);

  [[nodiscard]] Eigen::Index n() const { return w_out.rows(); }
  [[nodiscard]] Eigen::Index hidden() const { return w_in.rows(); }

  /// f(gamma) = w_out * sig(w_in * gamma + b_hidden) + b_out.
  [[nodiscard]] Vector forward(const Vector& gamma) const;
  bool operator==(const EvolutionNetwork& other) const;
};

/// post[i] = sig(pre[i]). Throws InvalidStateError on non-finite pre.
RepresentationState activate(const RepresentationState& state);

/// pre' = pre + f(sig(pre)), re-activated. Throws ConfigError on n mismatch.
RepresentationState evolve(const RepresentationState& state, const EvolutionNetwork& net);

/// The increment evolve() adds to a pre-activation vector: f(sig(pre)).
Vector evolution_increment(const Vector& pre, const EvolutionNetwork& net);

BernoulliSample pcbs_sample(const RepresentationState& state, std::uint64_t seed);
BernoulliSample pcbs_sample(const RepresentationState& state, Rng& rng);

/// log P(X = sample) under independent Bernoullis with parameters post.
/// Returns -inf when a saturated ensemble is contradicted.
double pcbs_log_prob(const RepresentationState& state, const BernoulliSample& sample);

}  // namespace tbrain
