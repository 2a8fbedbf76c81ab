#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "tbrain/index_layer.hpp"

namespace tbrain {

inline constexpr const char* kEpisodesDomain = "episodes";
inline constexpr const char* kRoiEpisodesDomain = "roi-episodes";
inline constexpr const char* kTypePredicate = "type";
inline constexpr const char* kPriorIndex = "prior";

struct DomainConfig {
  std::string name;
  IndexKind kind = IndexKind::Concept;
  std::vector<std::string> members;
};

/// Scheduling of the perception and recall pipelines. Draw r of a stage uses
/// domain list[r % list.size()].
struct PerceptionConfig {
  std::vector<std::string> scene_domains;
  std::vector<std::string> roi_domains{"entity", "class", "color", "mood"};
  std::string entity_domain = "entity";
  std::string predicate_domain = "predicate";
  /// Domain attended right after scene input; empty disables scene attention.
  std::string scene_attention = kEpisodesDomain;
  /// Attend over the entities already sampled earlier in the same scene.
  bool roi_attention = true;
  int rounds_scene = -1;  // -1: one draw per scene domain
  int rounds_roi = -1;    // -1: one draw per ROI domain
  int rounds_predicate = 1;
  bool form_episode = true;
  bool roi_episodes = false;  // sub-indices for every ROI and predicate ROI
  bool generalized = false;
  UpdateParams update;

  [[nodiscard]] int scene_draws() const;
  [[nodiscard]] int roi_draws() const;
};

struct LossWeights {
  double perception = 1.0;
  double episodic = 1.0;
  double semantic = 1.0;
  double reconstruction = 1.0;
};

struct TrainConfig {
  double learning_rate = 0.01;
  int steps = 100;
  int rounds_per_event = 1;  // gradient steps per perceived event
  double l1_embedding = 0.0;
  double temperature = 1.0;
  std::uint64_t seed = 1;
  bool grad_check = false;
  /// Self-supervised rounds adapt embeddings, biases, abar and the decoder.
  /// The encoder and the evolution network stay fixed unless enabled.
  bool train_encoder = false;
  bool train_evolution = false;
  LossWeights weights;
};

struct WorldConfig {
  double noise_sigma = 0.0;
  /// Grounded worlds use the initial embeddings as signatures and an identity
  /// encoder (requires d == n): a stand-in for a pretrained perceptual pathway.
  bool grounded = true;
  double signature_scale = 1.0;
};

struct EngineConfig {
  Eigen::Index n = 16;
  Eigen::Index d = 16;
  Eigen::Index h = 16;
  std::uint64_t seed = 1;
  double embedding_scale = 1.0;
  bool center_biases = true;
  std::vector<DomainConfig> domains;
  PerceptionConfig perception;
  TrainConfig learning;
  WorldConfig world;

  /// Throws ConfigError on violated invariants.
  void validate() const;
};

nlohmann::json to_json(const EngineConfig& config);
EngineConfig engine_config_from_json(const nlohmann::json& j);
EngineConfig load_engine_config(const std::string& path);

}  // namespace tbrain
