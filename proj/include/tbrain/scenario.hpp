#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tbrain/cognition.hpp"
#include "tbrain/config.hpp"
#include "tbrain/engine.hpp"
#include "tbrain/world.hpp"

namespace tbrain {

/// A scene written with index names; resolved against an engine's registry.
struct SceneDescription {
  std::string name;
  std::vector<std::string> scene_concepts;
  std::vector<std::vector<std::string>> rois;  // first name: the entity
  struct Relation {
    std::size_t subject_roi = 0;
    std::string predicate;
    std::size_t object_roi = 0;
  };
  std::vector<Relation> relations;
};

/// A subject with the labels it co-occurs with, in order.
struct FactDescription {
  std::string subject;
  std::vector<std::string> labels;
};

/// Scenario file: engine config, scenes, facts, optional chain domains and
/// task script.
///
///   {"config": {...}, "scenes": [{"name": "walk", "scene": ["Garden"],
///     "rois": [["Sparky", "Dog", "Black"]], "relations": [[0, "looksAt", 1]]}],
///    "facts": [{"subject": "Rex", "labels": ["Dog", "Mammal"]}],
///    "chain": ["class", "superclass"], "script": ["perceive walk", "store"]}
struct Scenario {
  EngineConfig config;
  std::vector<SceneDescription> scenes;
  std::vector<FactDescription> facts;
  std::vector<std::string> chain_domains;
  std::optional<TaskScript> script;
};

Scenario scenario_from_json(const nlohmann::json& j);
/// Throws IoError for a missing file, ConfigError for malformed content.
Scenario load_scenario(const std::string& path);

/// Throws ConfigError for unknown names or ROI positions out of range.
SceneSpec resolve_scene(const SceneDescription& scene, const Engine& engine);
std::vector<SceneSpec> resolve_scenes(const Scenario& scenario, const Engine& engine);

/// One semantic loss term per fact.
Objective facts_objective(const Scenario& scenario, const Engine& engine, const TrainConfig& config);

}  // namespace tbrain
