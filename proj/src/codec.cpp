#include "tbrain/codec.hpp"

#include <cmath>
#include <string>

#include "tbrain/errors.hpp"
#include "tbrain/rng.hpp"

namespace tbrain {

Encoder::Encoder(Eigen::Index n, Eigen::Index d) : w(Matrix::Zero(n, d)), b(Vector::Zero(n)) {}

Encoder Encoder::identity(Eigen::Index n) {
  Encoder enc(n, n);
  enc.w.setIdentity();
  return enc;
}

Encoder Encoder::random(Eigen::Index n, Eigen::Index d, Rng& rng) {
  Encoder enc(n, d);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      enc.w(i, j) = scale * rng.normal();
    }
  }
  return enc;
}

Vector Encoder::encode(const Vector& features) const {
  if (features.size() != d()) {
    throw ConfigError("encoder expects " + std::to_string(d()) + " features, got " + std::to_string(features.size()));
  }
  return w * features + b;
}

bool Encoder::operator==(const Encoder& other) const {
  return w.rows() == other.w.rows() && w.cols() == other.w.cols() && w == other.w && b == other.b;
}

Decoder::Decoder(Eigen::Index d, Eigen::Index n) : w(Matrix::Zero(d, n)), b(Vector::Zero(d)) {}

Vector Decoder::decode(const Vector& gamma) const {
  if (gamma.size() != n()) {
    throw ConfigError("decoder expects state dimension " + std::to_string(n()) + ", got " +
                      std::to_string(gamma.size()));
  }
  return w * gamma + b;
}

bool Decoder::operator==(const Decoder& other) const {
  return w.rows() == other.w.rows() && w.cols() == other.w.cols() && w == other.w && b == other.b;
}

RepresentationState encode_input(const RepresentationState& state, const Encoder& enc, const Vector& features) {
  if (enc.n() != state.n()) {
    throw ConfigError("encoder output dimension does not match state dimension");
  }
  return RepresentationState::from_pre(state.pre + enc.encode(features));
}

Vector reconstruct(const RepresentationState& state, const Decoder& dec) { return dec.decode(state.post); }

}  // namespace tbrain
