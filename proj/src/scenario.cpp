#include "tbrain/scenario.hpp"

#include <fstream>
#include <sstream>

#include "tbrain/errors.hpp"

namespace tbrain {

using nlohmann::json;

namespace {

SceneDescription read_scene(const json& j) {
  SceneDescription s;
  s.name = j.at("name").get<std::string>();
  if (j.contains("scene")) {
    s.scene_concepts = j.at("scene").get<std::vector<std::string>>();
  }
  if (j.contains("rois")) {
    s.rois = j.at("rois").get<std::vector<std::vector<std::string>>>();
  }
  if (j.contains("relations")) {
    for (const auto& r : j.at("relations")) {
      SceneDescription::Relation rel;
      if (r.is_array()) {
        rel = {r.at(0).get<std::size_t>(), r.at(1).get<std::string>(), r.at(2).get<std::size_t>()};
      } else {
        rel = {r.at("subject").get<std::size_t>(), r.at("predicate").get<std::string>(),
               r.at("object").get<std::size_t>()};
      }
      s.relations.push_back(std::move(rel));
    }
  }
  return s;
}

IndexId resolve_name(const Engine& engine, const std::string& name, IndexKind kind, const std::string& scene) {
  const auto id = engine.registry.find(kind, name);
  if (!id) {
    throw ConfigError("scene '" + scene + "' names unknown " + std::string(to_string(kind)) + " '" + name + "'");
  }
  return *id;
}

}  // namespace

Scenario scenario_from_json(const json& j) {
  Scenario s;
  try {
    if (!j.is_object()) {
      throw ConfigError("a scenario must be a JSON object");
    }
    s.config = engine_config_from_json(j.value("config", json::object()));
    if (j.contains("scenes")) {
      for (const auto& scene : j.at("scenes")) {
        s.scenes.push_back(read_scene(scene));
      }
    }
    if (j.contains("facts")) {
      for (const auto& f : j.at("facts")) {
        s.facts.push_back(
            FactDescription{f.at("subject").get<std::string>(), f.at("labels").get<std::vector<std::string>>()});
      }
    }
    if (j.contains("chain")) {
      s.chain_domains = j.at("chain").get<std::vector<std::string>>();
    }
    if (j.contains("script")) {
      s.script = parse_task_script(j.at("script"));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed scenario: ") + e.what());
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot read scenario '" + path + "'");
  }
  std::stringstream buf;
  buf << in.rdbuf();
  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::exception& e) {
    throw ConfigError("malformed scenario '" + path + "': " + e.what());
  }
  return scenario_from_json(j);
}

SceneSpec resolve_scene(const SceneDescription& scene, const Engine& engine) {
  SceneSpec spec;
  spec.name = scene.name;
  for (const auto& name : scene.scene_concepts) {
    spec.scene_concepts.push_back(resolve_name(engine, name, IndexKind::Concept, scene.name));
  }
  for (const auto& roi : scene.rois) {
    if (roi.empty()) {
      throw ConfigError("scene '" + scene.name + "' has an empty ROI");
    }
    RoiSpec r;
    for (const auto& name : roi) {
      r.concepts.push_back(resolve_name(engine, name, IndexKind::Concept, scene.name));
    }
    spec.rois.push_back(std::move(r));
  }
  for (const auto& rel : scene.relations) {
    if (rel.subject_roi >= scene.rois.size() || rel.object_roi >= scene.rois.size()) {
      throw ConfigError("scene '" + scene.name + "' has a relation to a missing ROI");
    }
    spec.relations.push_back(
        RelationSpec{rel.subject_roi, resolve_name(engine, rel.predicate, IndexKind::Predicate, scene.name),
                     rel.object_roi});
  }
  return spec;
}

std::vector<SceneSpec> resolve_scenes(const Scenario& scenario, const Engine& engine) {
  std::vector<SceneSpec> out;
  for (const auto& scene : scenario.scenes) {
    out.push_back(resolve_scene(scene, engine));
  }
  return out;
}

Objective facts_objective(const Scenario& scenario, const Engine& engine, const TrainConfig& config) {
  Objective obj;
  obj.temperature = config.temperature;
  obj.l1_embedding = config.l1_embedding;
  for (const auto& fact : scenario.facts) {
    const auto s = engine.registry.find(IndexKind::Concept, fact.subject);
    if (!s) {
      throw ConfigError("fact names unknown concept '" + fact.subject + "'");
    }
    std::vector<IndexId> labels;
    for (const auto& name : fact.labels) {
      const IndexId k = engine.registry.lookup(name);
      if (engine.registry.domain_of(k) == nullptr) {
        throw ConfigError("fact label '" + name + "' belongs to no domain");
      }
      labels.push_back(k);
    }
    if (labels.empty()) {
      throw ConfigError("fact for '" + fact.subject + "' has no labels");
    }
    obj.terms.push_back(LossTerm{SemanticContext{*s}, std::move(labels), std::nullopt, config.weights.semantic});
  }
  return obj;
}

}  // namespace tbrain
