#include "tbrain/state.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tbrain/errors.hpp"
#include "tbrain/rng.hpp"

namespace tbrain {

double sigmoid(double x) {
  const double clamped = std::clamp(x, -kSigmoidClamp, kSigmoidClamp);
  return 1.0 / (1.0 + std::exp(-clamped));
}

Vector sigmoid(const Vector& x) { return x.unaryExpr([](double v) { return sigmoid(v); }); }

RepresentationState::RepresentationState(Eigen::Index n) : pre(Vector::Zero(n)), post(Vector::Constant(n, 0.5)) {}

RepresentationState RepresentationState::from_pre(Vector pre) {
  RepresentationState s;
  s.pre = std::move(pre);
  return activate(s);
}

bool RepresentationState::operator==(const RepresentationState& other) const {
  return pre.size() == other.pre.size() && post.size() == other.post.size() && pre == other.pre &&
         post == other.post;
}

EvolutionNetwork::EvolutionNetwork(Eigen::Index n, Eigen::Index hidden)
    : w_in(Matrix::Zero(hidden, n)),
      b_hidden(Vector::Zero(hidden)),
      w_out(Matrix::Zero(n, hidden)),
      b_out(Vector::Zero(n)) {}

EvolutionNetwork EvolutionNetwork::random(Eigen::Index n, Eigen::Index hidden, Rng& rng) {
  EvolutionNetwork net(n, hidden);
  const double bound = 1.0 / std::sqrt(static_cast<double>(n));
  auto draw = [&] { return bound * (2.0 * rng.uniform() - 1.0); };
  for (Eigen::Index j = 0; j < net.w_in.cols(); ++j) {
    for (Eigen::Index i = 0; i < net.w_in.rows(); ++i) {
      net.w_in(i, j) = draw();
    }
  }
  for (Eigen::Index j = 0; j < net.w_out.cols(); ++j) {
    for (Eigen::Index i = 0; i < net.w_out.rows(); ++i) {
      net.w_out(i, j) = draw();
    }
  }
  return net;
}

Vector EvolutionNetwork::forward(const Vector& gamma) const {
  const Vector hidden_act = sigmoid(Vector(w_in * gamma + b_hidden));
  return w_out * hidden_act + b_out;
}

bool EvolutionNetwork::operator==(const EvolutionNetwork& other) const {
  return w_in.rows() == other.w_in.rows() && w_in.cols() == other.w_in.cols() && w_in == other.w_in &&
         b_hidden == other.b_hidden && w_out == other.w_out && b_out == other.b_out;
}

RepresentationState activate(const RepresentationState& state) {
  if (!state.pre.allFinite()) {
    throw InvalidStateError("representation state has non-finite pre-activations");
  }
  RepresentationState out;
  out.pre = state.pre;
  out.post = sigmoid(state.pre);
  return out;
}

Vector evolution_increment(const Vector& pre, const EvolutionNetwork& net) {
  if (net.n() != pre.size() || net.w_in.cols() != pre.size()) {
    throw ConfigError("evolution network dimension " + std::to_string(net.n()) + " does not match state dimension " +
                      std::to_string(pre.size()));
  }
  return net.forward(sigmoid(pre));
}

RepresentationState evolve(const RepresentationState& state, const EvolutionNetwork& net) {
  Vector next = state.pre + evolution_increment(state.pre, net);
  return RepresentationState::from_pre(std::move(next));
}

BernoulliSample pcbs_sample(const RepresentationState& state, Rng& rng) {
  if (!state.post.allFinite()) {
    throw InvalidStateError("representation state has non-finite post-activations");
  }
  BernoulliSample sample;
  sample.bits.resize(static_cast<std::size_t>(state.post.size()));
  for (Eigen::Index i = 0; i < state.post.size(); ++i) {
    sample.bits[static_cast<std::size_t>(i)] = rng.uniform() < state.post[i] ? 1 : 0;
  }
  return sample;
}

BernoulliSample pcbs_sample(const RepresentationState& state, std::uint64_t seed) {
  Rng rng(seed, "pcbs");
  return pcbs_sample(state, rng);
}

double pcbs_log_prob(const RepresentationState& state, const BernoulliSample& sample) {
  if (static_cast<std::size_t>(state.post.size()) != sample.bits.size()) {
    throw ConfigError("sample length does not match state dimension");
  }
  double total = 0.0;
  for (std::size_t j = 0; j < sample.bits.size(); ++j) {
    const double g = state.post[static_cast<Eigen::Index>(j)];
    // Only the realized term contributes, so 0 * log(0) never appears.
    total += sample.bits[j] != 0 ? std::log(g) : std::log1p(-g);
  }
  return total;
}

}  // namespace tbrain
