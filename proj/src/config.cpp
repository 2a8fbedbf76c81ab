#include "tbrain/config.hpp"

#include <fstream>
#include <set>

#include "tbrain/errors.hpp"

namespace tbrain {

using nlohmann::json;

int PerceptionConfig::scene_draws() const {
  return rounds_scene >= 0 ? rounds_scene : static_cast<int>(scene_domains.size());
}

int PerceptionConfig::roi_draws() const {
  return rounds_roi >= 0 ? rounds_roi : static_cast<int>(roi_domains.size());
}

void EngineConfig::validate() const {
  if (n < 1 || d < 1 || h < 1) {
    throw ConfigError("dimensions n, d, h must all be at least 1");
  }
  if (world.grounded && d != n) {
    throw ConfigError("a grounded world requires d == n");
  }
  std::set<std::string> domain_names;
  std::set<std::pair<IndexKind, std::string>> member_names;
  for (const auto& dom : domains) {
    if (dom.name.empty()) {
      throw ConfigError("domain names must be non-empty");
    }
    if (dom.name == kEpisodesDomain || dom.name == kRoiEpisodesDomain) {
      throw ConfigError("domain name '" + dom.name + "' is reserved");
    }
    if (!domain_names.insert(dom.name).second) {
      throw ConfigError("duplicate domain '" + dom.name + "'");
    }
    if (dom.kind == IndexKind::Episodic) {
      throw ConfigError("domain '" + dom.name + "': episodic indices are created by perception, not configured");
    }
    for (const auto& m : dom.members) {
      if (!member_names.insert({dom.kind, m}).second) {
        throw ConfigError("domain member '" + m + "' is not unique");
      }
      if (m == kTypePredicate || m == kPriorIndex) {
        throw ConfigError("index name '" + m + "' is reserved");
      }
    }
  }
  const auto& p = perception;
  if (!(p.update.temperature > 0.0)) {
    throw ConfigError("temperature must be positive");
  }
  if (p.update.alpha < 0.0 || p.update.alpha > 1.0 || p.update.beta < 0.0 || p.update.beta > 1.0) {
    throw ConfigError("alpha and beta must lie in [0, 1]");
  }
  if (p.rounds_predicate < 0) {
    throw ConfigError("rounds_predicate must be non-negative");
  }
  if (p.scene_draws() > 0 && p.scene_domains.empty()) {
    throw ConfigError("rounds_scene > 0 needs at least one scene domain");
  }
  if (p.roi_draws() > 0 && p.roi_domains.empty()) {
    throw ConfigError("rounds_roi > 0 needs at least one ROI domain");
  }
  if (!(learning.learning_rate >= 0.0) || !(learning.temperature > 0.0) || learning.l1_embedding < 0.0 ||
      learning.steps < 0 || learning.rounds_per_event < 0) {
    throw ConfigError("learning parameters out of range");
  }
  if (world.noise_sigma < 0.0) {
    throw ConfigError("noise_sigma must be non-negative");
  }
}

namespace {

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) {
    out = j.at(key).get<T>();
  }
}

}  // namespace

json to_json(const EngineConfig& c) {
  json domains = json::array();
  for (const auto& d : c.domains) {
    domains.push_back({{"name", d.name}, {"kind", std::string(to_string(d.kind))}, {"members", d.members}});
  }
  const auto& p = c.perception;
  const auto& l = c.learning;
  return json{
      {"n", c.n},
      {"d", c.d},
      {"h", c.h},
      {"seed", c.seed},
      {"embedding_scale", c.embedding_scale},
      {"center_biases", c.center_biases},
      {"alpha", p.update.alpha},
      {"beta", p.update.beta},
      {"temperature", p.update.temperature},
      {"rounds_scene", p.rounds_scene},
      {"rounds_roi", p.rounds_roi},
      {"domains", domains},
      {"perception",
       {{"scene_domains", p.scene_domains},
        {"roi_domains", p.roi_domains},
        {"entity_domain", p.entity_domain},
        {"predicate_domain", p.predicate_domain},
        {"scene_attention", p.scene_attention},
        {"roi_attention", p.roi_attention},
        {"rounds_predicate", p.rounds_predicate},
        {"form_episode", p.form_episode},
        {"roi_episodes", p.roi_episodes},
        {"generalized", p.generalized}}},
      {"learning",
       {{"learning_rate", l.learning_rate},
        {"steps", l.steps},
        {"rounds_per_event", l.rounds_per_event},
        {"l1_embedding", l.l1_embedding},
        {"temperature", l.temperature},
        {"seed", l.seed},
        {"grad_check", l.grad_check},
        {"train_encoder", l.train_encoder},
        {"train_evolution", l.train_evolution},
        {"weights",
         {{"perception", l.weights.perception},
          {"episodic", l.weights.episodic},
          {"semantic", l.weights.semantic},
          {"reconstruction", l.weights.reconstruction}}}}},
      {"world",
       {{"noise_sigma", c.world.noise_sigma},
        {"grounded", c.world.grounded},
        {"signature_scale", c.world.signature_scale}}},
  };
}

EngineConfig engine_config_from_json(const json& j) {
  EngineConfig c;
  try {
    if (!j.is_object()) {
      throw ConfigError("engine config must be a JSON object");
    }
    read(j, "n", c.n);
    read(j, "d", c.d);
    read(j, "h", c.h);
    read(j, "seed", c.seed);
    read(j, "embedding_scale", c.embedding_scale);
    read(j, "center_biases", c.center_biases);
    auto& p = c.perception;
    read(j, "alpha", p.update.alpha);
    read(j, "beta", p.update.beta);
    read(j, "temperature", p.update.temperature);
    read(j, "rounds_scene", p.rounds_scene);
    read(j, "rounds_roi", p.rounds_roi);
    if (j.contains("domains")) {
      for (const auto& d : j.at("domains")) {
        DomainConfig dc;
        dc.name = d.at("name").get<std::string>();
        if (d.contains("kind")) {
          dc.kind = parse_index_kind(d.at("kind").get<std::string>());
        }
        dc.members = d.at("members").get<std::vector<std::string>>();
        c.domains.push_back(std::move(dc));
      }
    }
    if (j.contains("perception")) {
      const auto& pj = j.at("perception");
      read(pj, "scene_domains", p.scene_domains);
      read(pj, "roi_domains", p.roi_domains);
      read(pj, "entity_domain", p.entity_domain);
      read(pj, "predicate_domain", p.predicate_domain);
      read(pj, "scene_attention", p.scene_attention);
      read(pj, "roi_attention", p.roi_attention);
      read(pj, "rounds_predicate", p.rounds_predicate);
      read(pj, "form_episode", p.form_episode);
      read(pj, "roi_episodes", p.roi_episodes);
      read(pj, "generalized", p.generalized);
    }
    if (j.contains("learning")) {
      const auto& lj = j.at("learning");
      auto& l = c.learning;
      read(lj, "learning_rate", l.learning_rate);
      read(lj, "steps", l.steps);
      read(lj, "rounds_per_event", l.rounds_per_event);
      read(lj, "l1_embedding", l.l1_embedding);
      read(lj, "temperature", l.temperature);
      read(lj, "seed", l.seed);
      read(lj, "grad_check", l.grad_check);
      read(lj, "train_encoder", l.train_encoder);
      read(lj, "train_evolution", l.train_evolution);
      if (lj.contains("weights")) {
        const auto& wj = lj.at("weights");
        read(wj, "perception", l.weights.perception);
        read(wj, "episodic", l.weights.episodic);
        read(wj, "semantic", l.weights.semantic);
        read(wj, "reconstruction", l.weights.reconstruction);
      }
    }
    if (j.contains("world")) {
      const auto& wj = j.at("world");
      read(wj, "noise_sigma", c.world.noise_sigma);
      read(wj, "grounded", c.world.grounded);
      read(wj, "signature_scale", c.world.signature_scale);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed engine config: ") + e.what());
  }
  c.validate();
  return c;
}

EngineConfig load_engine_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open config file '" + path + "'");
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return engine_config_from_json(j);
}

}  // namespace tbrain
