#pragma once

#include <cstdint>
#include <string>

#include "tbrain/codec.hpp"
#include "tbrain/config.hpp"
#include "tbrain/index_layer.hpp"
#include "tbrain/knowledge.hpp"
#include "tbrain/state.hpp"
#include "tbrain/world.hpp"

namespace tbrain {

/// Complete model state: symbols, embeddings, networks, memories and the
/// synthetic world they perceive. A plain value; copying yields an
/// independent engine.
///
/// Concurrent decoders may share a const Engine; learning needs exclusive access.
struct Engine {
  EngineConfig config;
  IndexRegistry registry;
  EmbeddingStore embeddings;
  EvolutionNetwork evolution;
  Encoder encoder;
  Decoder decoder;
  SyntheticWorld world;
  KnowledgeGraph kg;
  SymbolicMatrix symbolic;
  EpisodicStore episodes;
  IndexId prior;           // t-bar, constant prior embedding a-bar
  IndexId type_predicate;  // reserved `type` predicate
  std::uint64_t clock = 0;

  /// Builds registry, embeddings, networks and world from the config with
  /// seeded substreams "init" and "world".
  static Engine create(const EngineConfig& config);

  [[nodiscard]] Eigen::Index n() const { return embeddings.n(); }
  [[nodiscard]] auto abar() const { return embeddings.column(prior); }
  [[nodiscard]] const Domain& domain(std::string_view name) const { return registry.domain(name); }
  [[nodiscard]] IndexId id(std::string_view name) const { return registry.lookup(name); }
  [[nodiscard]] const std::string& name(IndexId id) const { return registry.name(id); }

  /// Recomputes the symbolic matrix from the knowledge graph counts.
  void refresh_symbolic(double smoothing = 1.0);

  bool operator==(const Engine& other) const;
};

}  // namespace tbrain
