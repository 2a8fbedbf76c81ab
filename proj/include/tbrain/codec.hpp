#pragma once

#include "tbrain/state.hpp"

namespace tbrain {

class Rng;

/// Linear sensory encoder g(v) = w v + b, mapping d features to n pre-activations.
struct Encoder {
  Matrix w;  // n x d
  Vector b;  // n

  Encoder() = default;
  Encoder(Eigen::Index n, Eigen::Index d);
  static Encoder identity(Eigen::Index n);
  static Encoder random(Eigen::Index n, Eigen::Index d, Rng& rng);

  [[nodiscard]] Eigen::Index n() const { return w.rows(); }
  [[nodiscard]] Eigen::Index d() const { return w.cols(); }
  [[nodiscard]] Vector encode(const Vector& features) const;
  bool operator==(const Encoder& other) const;
};

/// Linear reconstruction v_hat = w gamma + b back into feature space.
struct Decoder {
  Matrix w;  // d x n
  Vector b;  // d

  Decoder() = default;
  Decoder(Eigen::Index d, Eigen::Index n);

  [[nodiscard]] Eigen::Index n() const { return w.cols(); }
  [[nodiscard]] Eigen::Index d() const { return w.rows(); }
  [[nodiscard]] Vector decode(const Vector& gamma) const;
  bool operator==(const Decoder& other) const;
};

/// pre' = pre + g(features).
RepresentationState encode_input(const RepresentationState& state, const Encoder& enc, const Vector& features);

/// Mental reconstruction of the sensory input from the current post-activations.
Vector reconstruct(const RepresentationState& state, const Decoder& dec);

}  // namespace tbrain
