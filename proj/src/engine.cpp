#include "tbrain/engine.hpp"

#include "tbrain/errors.hpp"
#include "tbrain/rng.hpp"

namespace tbrain {

Engine Engine::create(const EngineConfig& config) {
  config.validate();
  Engine e;
  e.config = config;
  const Eigen::Index n = config.n;
  e.embeddings = EmbeddingStore(n);

  Rng init(config.seed, "init");
  Rng emb_rng = init.substream("embeddings");

  e.type_predicate = e.registry.add(IndexKind::Predicate, kTypePredicate);
  e.embeddings.append(Vector::Zero(n), 0.0);
  // a-bar starts at zero and is shaped by the semantic loss.
  e.prior = e.registry.add(IndexKind::Episodic, kPriorIndex);
  e.embeddings.append(Vector::Zero(n), 0.0);

  for (const auto& dom : config.domains) {
    e.registry.add_domain(dom.name);
    for (const auto& member : dom.members) {
      const IndexId id = e.registry.add(dom.kind, member);
      e.registry.assign(id, dom.name);
      Vector column(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        column[i] = config.embedding_scale * emb_rng.normal();
      }
      // Centering makes the neutral state (gamma = 1/2) decode uniformly.
      const double bias = config.center_biases ? -0.5 * column.sum() : 0.0;
      e.embeddings.append(column, bias);
    }
  }
  e.registry.add_domain(kEpisodesDomain);
  e.registry.add_domain(kRoiEpisodesDomain);

  Rng evo_rng = init.substream("evolution");
  e.evolution = EvolutionNetwork::random(n, config.h, evo_rng);
  if (config.world.grounded) {
    e.encoder = Encoder::identity(n);
  } else {
    Rng enc_rng = init.substream("encoder");
    e.encoder = Encoder::random(n, config.d, enc_rng);
  }
  e.decoder = Decoder(config.d, n);

  Rng world_rng(config.seed, "world");
  e.world.d = config.d;
  e.world.noise_sigma = config.world.noise_sigma;
  e.world.seed = config.seed;
  e.world.type_predicate = e.type_predicate;
  for (const auto& info : e.registry.indices()) {
    if (info.kind == IndexKind::Episodic || info.id == e.type_predicate) {
      continue;
    }
    Vector sig(config.d);
    if (config.world.grounded) {
      sig = config.world.signature_scale * e.embeddings.column(info.id);
    } else {
      for (Eigen::Index i = 0; i < config.d; ++i) {
        sig[i] = config.world.signature_scale * world_rng.normal();
      }
    }
    e.world.signatures.emplace(info.id, std::move(sig));
  }
  return e;
}

void Engine::refresh_symbolic(double smoothing) { symbolic = build_symbolic_matrix(kg, registry, smoothing); }

bool Engine::operator==(const Engine& other) const {
  return to_json(config) == to_json(other.config) && registry == other.registry && embeddings == other.embeddings &&
         evolution == other.evolution && encoder == other.encoder && decoder == other.decoder &&
         world == other.world && kg == other.kg && symbolic == other.symbolic && episodes == other.episodes &&
         prior == other.prior && type_predicate == other.type_predicate && clock == other.clock;
}

}  // namespace tbrain
