#include "tbrain/perception.hpp"

#include <algorithm>
#include <string>

#include "pipeline.hpp"
#include "tbrain/errors.hpp"
#include "tbrain/rng.hpp"

namespace tbrain {

IndexId form_episodic_index(const RepresentationState& state, IndexRegistry& registry, EmbeddingStore& emb,
                            const std::string& name, const std::string& domain) {
  if (state.n() != emb.n()) {
    throw ConfigError("state dimension does not match embedding dimension");
  }
  const IndexId id = registry.add(IndexKind::Episodic, name);
  emb.append(state.pre, 0.0);
  if (!domain.empty()) {
    registry.assign(id, domain);
  }
  return id;
}

IndexId form_episodic_index(const RepresentationState& state, Engine& engine, EpisodeMeta meta) {
  const std::string name = "t" + std::to_string(engine.clock);
  const IndexId id = form_episodic_index(state, engine.registry, engine.embeddings, name, kEpisodesDomain);
  meta.step = engine.clock;
  engine.episodes.add(id, std::move(meta));
  ++engine.clock;
  return id;
}

PerceptionTrace perceive_scene(const SceneInstance& scene, Engine& engine, const PerceptionConfig& config,
                               Rng& rng) {
  PerceptionTrace trace;
  trace.source = TripleSource::Perception;
  const auto& update = config.update;

  RepresentationState q(engine.n());
  const Domain* scene_attention = nullptr;
  if (!config.scene_attention.empty()) {
    scene_attention = &engine.registry.domain(config.scene_attention);
  }
  q = input_and_attention(q, scene.scene_features, engine.encoder, engine.embeddings, scene_attention);
  trace.event_pre = q.pre;
  const RepresentationState event_state = q;

  for (int r = 0; r < config.scene_draws(); ++r) {
    detail::draw_label(engine, trace, q, Stage::Scene, -1, detail::scheduled_domain(config.scene_domains, r), update,
                       rng);
  }

  const std::string episode_name = "t" + std::to_string(engine.clock);
  Domain seen_entities{"attended-entities", {}};
  for (std::size_t i = 0; i < scene.rois.size(); ++i) {
    const int seg = static_cast<int>(i);
    q = evolve(q, engine.evolution);
    q = input_and_attention(q, scene.rois[i].features, engine.encoder, engine.embeddings,
                            config.roi_attention ? &seen_entities : nullptr);
    RoiRecord record{q.pre, std::nullopt};
    if (config.roi_episodes) {
      record.episode = form_episodic_index(q, engine.registry, engine.embeddings,
                                           episode_name + ".roi" + std::to_string(i), kRoiEpisodesDomain);
    }
    trace.rois.push_back(std::move(record));
    for (int r = 0; r < config.roi_draws(); ++r) {
      const std::string& domain = detail::scheduled_domain(config.roi_domains, r);
      const IndexId k = detail::draw_label(engine, trace, q, Stage::Roi, seg, domain, update, rng);
      if (domain == config.entity_domain && !seen_entities.position(k)) {
        seen_entities.members.push_back(k);
      }
    }
  }

  for (std::size_t j = 0; j < scene.relations.size(); ++j) {
    const auto& rel = scene.relations[j];
    q = evolve(q, engine.evolution);
    q = input_and_attention(q, rel.features, engine.encoder, engine.embeddings, nullptr);
    RelationRecord record{static_cast<int>(rel.subject_roi), static_cast<int>(rel.object_roi), std::nullopt};
    if (config.roi_episodes) {
      record.episode = form_episodic_index(q, engine.registry, engine.embeddings,
                                           episode_name + ".rel" + std::to_string(j), kRoiEpisodesDomain);
    }
    trace.relations.push_back(record);
    for (int r = 0; r < config.rounds_predicate; ++r) {
      detail::draw_label(engine, trace, q, Stage::Predicate, static_cast<int>(j), config.predicate_domain, update,
                         rng);
    }
  }

  if (config.form_episode) {
    EpisodeMeta meta;
    meta.tag = scene.name;
    meta.roi_count = scene.rois.size();
    for (const auto& rel : trace.relations) {
      meta.relations.emplace_back(static_cast<std::size_t>(rel.subject_roi), static_cast<std::size_t>(rel.object_roi));
    }
    for (const auto& rel : trace.relations) {
      if (rel.episode) {
        meta.relation_episodes.push_back(*rel.episode);
      }
    }
    for (const auto& roi : trace.rois) {
      if (roi.episode) {
        meta.roi_episodes.push_back(*roi.episode);
      }
    }
    trace.time = form_episodic_index(event_state, engine, std::move(meta));
  } else if (config.roi_episodes && (!scene.rois.empty() || !scene.relations.empty())) {
    ++engine.clock;  // the ROI sub-indices used this clock value
  }
  return trace;
}

PerceptionTrace perceive_scene(const SceneInstance& scene, Engine& engine, const PerceptionConfig& config,
                               std::uint64_t seed) {
  Rng rng(seed, "perception");
  return perceive_scene(scene, engine, config, rng);
}

}  // namespace tbrain
