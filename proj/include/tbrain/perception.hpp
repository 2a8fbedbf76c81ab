#pragma once

#include <cstdint>
#include <string>

#include "tbrain/engine.hpp"
#include "tbrain/trace.hpp"
#include "tbrain/world.hpp"

namespace tbrain {

class Rng;

/// Scene input (+ attention over past episodes) and scene-level draws; then
/// for every ROI: evolve, ROI input (+ attention over entities sampled so
/// far), ROI draws; then for every relation: evolve, predicate-ROI input,
/// predicate draws. Forms the episodic index of the event when configured.
///
/// Ground-truth fields of the scene are never read.
PerceptionTrace perceive_scene(const SceneInstance& scene, Engine& engine, const PerceptionConfig& config,
                               Rng& rng);
PerceptionTrace perceive_scene(const SceneInstance& scene, Engine& engine, const PerceptionConfig& config,
                               std::uint64_t seed);

/// New episodic index named `name` whose embedding is a copy of state.pre
/// (bias 0), appended to `domain`.
IndexId form_episodic_index(const RepresentationState& state, IndexRegistry& registry, EmbeddingStore& emb,
                            const std::string& name, const std::string& domain = kEpisodesDomain);

/// Engine-level variant: names the index t<clock>, stores its metadata and
/// advances the clock.
IndexId form_episodic_index(const RepresentationState& state, Engine& engine, EpisodeMeta meta);

}  // namespace tbrain
