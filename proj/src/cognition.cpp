#include "tbrain/cognition.hpp"

#include <algorithm>
#include <cmath>

#include "tbrain/errors.hpp"
#include "tbrain/memory.hpp"
#include "tbrain/perception.hpp"
#include "tbrain/rng.hpp"

namespace tbrain {

WorkingMemory::WorkingMemory(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) {
    throw ParameterError("working memory needs at least one slot");
  }
}

std::optional<IndexId> WorkingMemory::push(IndexId id) {
  std::optional<IndexId> evicted;
  if (slots_.size() == capacity_) {
    evicted = slots_.front();
    slots_.pop_front();
  }
  slots_.push_back(id);
  return evicted;
}

IndexId WorkingMemory::at(std::size_t slot) const {
  if (slot >= slots_.size()) {
    throw LookupError("working-memory slot " + std::to_string(slot) + " is empty");
  }
  return slots_[slot];
}

IndexId store_task(const RepresentationState& state, WorkingMemory& wm, IndexRegistry& registry,
                   EmbeddingStore& emb) {
  const IndexId id = create_index(registry, emb, IndexKind::Episodic, "task" + std::to_string(registry.size()),
                                  state.pre);
  wm.push(id);
  return id;
}

RepresentationState restore_task(const WorkingMemory& wm, std::size_t slot, const RepresentationState& state,
                                 const EmbeddingStore& emb) {
  return topdown_update(state, emb, wm.at(slot), UpdateParams{0.0, 1.0, 1.0});
}

std::vector<IndexId> chain_query(IndexId start, int hops, const Engine& engine, const ChainConfig& config, Rng& rng) {
  if (hops < 0) {
    throw ParameterError("hops must be non-negative");
  }
  std::vector<IndexId> chain{start};
  if (hops == 0) {
    return chain;
  }
  if (config.chain_domains.empty()) {
    throw ConfigError("chain_query needs at least one domain");
  }
  RepresentationState q = semantic_cue_state(engine, start, config.update);
  for (int hop = 0; hop < hops; ++hop) {
    if (hop > 0 && config.evolve_between_hops) {
      q = evolve(q, engine.evolution);
    }
    const auto& name = config.chain_domains[static_cast<std::size_t>(hop) % config.chain_domains.size()];
    const IndexId k =
        sample_index(q, engine.embeddings, engine.registry.domain(name), config.update.temperature, rng);
    q = topdown_update(q, engine.embeddings, k, config.update);
    chain.push_back(k);
  }
  return chain;
}

double direct_probability(const Engine& engine, IndexId subject, IndexId label, double temperature) {
  const Domain* dom = engine.registry.domain_of(label);
  if (dom == nullptr) {
    throw DomainError("'" + engine.name(label) + "' belongs to no domain");
  }
  const Vector p = decode_distribution(semantic_cue_state(engine, subject), engine.embeddings, *dom, temperature);
  return p[static_cast<Eigen::Index>(*dom->position(label))];
}

MaterializeReport materialize(Engine& engine, const std::vector<std::pair<IndexId, IndexId>>& pairs,
                              const MaterializeConfig& config) {
  MaterializeReport report;
  report.pairs = pairs;
  Objective objective;
  objective.temperature = config.temperature;
  for (const auto& [s, k] : pairs) {
    objective.terms.push_back(LossTerm{SemanticContext{s}, {k}, std::nullopt, 1.0});
    report.before.push_back(direct_probability(engine, s, k, config.temperature));
  }
  report.loss_before = total_loss(objective, engine);
  for (int step = 0; step < config.steps; ++step) {
    apply_gradients(engine, gradients(objective, engine), config.learning_rate);
  }
  report.loss_after = total_loss(objective, engine);
  for (const auto& [s, k] : pairs) {
    report.after.push_back(direct_probability(engine, s, k, config.temperature));
  }
  return report;
}

double cosine_similarity(const Vector& a, const Vector& b) {
  const double denom = a.norm() * b.norm();
  if (denom == 0.0) {
    throw ParameterError("cosine similarity of a zero vector");
  }
  return a.dot(b) / denom;
}

namespace {

std::vector<double> cross_probabilities(const Engine& engine, IndexId from, const std::vector<IndexId>& labels,
                                        double temperature) {
  std::vector<double> out;
  const auto state = RepresentationState::from_pre(engine.embeddings.column(from));
  for (IndexId k : labels) {
    const Domain* dom = engine.registry.domain_of(k);
    if (dom == nullptr) {
      throw DomainError("'" + engine.name(k) + "' belongs to no domain");
    }
    const Vector p = decode_distribution(state, engine.embeddings, *dom, temperature);
    out.push_back(p[static_cast<Eigen::Index>(*dom->position(k))]);
  }
  return out;
}

std::vector<double> cross_all(const Engine& engine, IndexId t1, IndexId t2, const SimilarityConfig& config) {
  auto out = cross_probabilities(engine, t2, config.first_labels, config.temperature);
  const auto back = cross_probabilities(engine, t1, config.second_labels, config.temperature);
  out.insert(out.end(), back.begin(), back.end());
  return out;
}

}  // namespace

SimilarityReport episodic_similarity_scenario(Engine& engine, IndexId t1, IndexId t2, const SimilarityConfig& config) {
  for (IndexId t : {t1, t2}) {
    if (engine.registry.info(t).kind != IndexKind::Episodic || t == engine.prior) {
      throw LookupError("'" + engine.name(t) + "' is not an episodic index");
    }
  }
  SimilarityReport report;
  report.cosine_before = cosine_similarity(engine.embeddings.column(t1), engine.embeddings.column(t2));
  report.cross_before = cross_all(engine, t1, t2, config);

  Objective objective;
  objective.temperature = config.temperature;
  for (IndexId k : config.first_labels) {
    objective.terms.push_back(LossTerm{EpisodicContext{t1, std::nullopt, false}, {k}, std::nullopt, 1.0});
  }
  for (IndexId k : config.second_labels) {
    objective.terms.push_back(LossTerm{EpisodicContext{t2, std::nullopt, false}, {k}, std::nullopt, 1.0});
  }
  const ParameterMask mask = ParameterMask::only_columns({t1, t2});
  for (int step = 0; step < config.steps; ++step) {
    apply_gradients(engine, gradients(objective, engine), config.learning_rate, mask);
  }

  report.cosine_after = cosine_similarity(engine.embeddings.column(t1), engine.embeddings.column(t2));
  report.cross_after = cross_all(engine, t1, t2, config);
  return report;
}

namespace {

TaskOp parse_op(const std::string& name) {
  if (name == "perceive") return TaskOp::Perceive;
  if (name == "recall") return TaskOp::Recall;
  if (name == "store") return TaskOp::Store;
  if (name == "restore") return TaskOp::Restore;
  if (name == "query") return TaskOp::Query;
  throw ConfigError("unknown task command '" + name + "'");
}

std::size_t arity(TaskOp op) {
  switch (op) {
    case TaskOp::Perceive: return 1;
    case TaskOp::Recall: return 2;
    case TaskOp::Store: return 0;
    case TaskOp::Restore: return 1;
    case TaskOp::Query: return 2;
  }
  return 0;
}

std::vector<std::string> label_names(const Engine& engine, const Trace& trace) {
  std::vector<std::string> names;
  for (const auto& e : trace.events) {
    if (!e.forced) {
      names.push_back(engine.name(e.label));
    }
  }
  return names;
}

RepresentationState final_state(const Trace& trace) {
  return RepresentationState::from_pre(trace.events.empty() ? trace.event_pre : trace.events.back().pre_after);
}

int parse_int(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(text, &used);
    if (used != text.size()) {
      throw std::invalid_argument(text);
    }
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError(what + " must be an integer, got '" + text + "'");
  }
}

}  // namespace

TaskScript parse_task_script(const nlohmann::json& j) {
  if (!j.is_array()) {
    throw ConfigError("a task script is a list of commands");
  }
  TaskScript script;
  for (const auto& item : j) {
    std::vector<std::string> words;
    if (item.is_string()) {
      std::string text = item.get<std::string>();
      std::size_t pos = 0;
      while (pos < text.size()) {
        const auto end = text.find(' ', pos);
        const auto word = text.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
        if (!word.empty()) {
          words.push_back(word);
        }
        if (end == std::string::npos) {
          break;
        }
        pos = end + 1;
      }
    } else if (item.is_array()) {
      for (const auto& w : item) {
        words.push_back(w.is_string() ? w.get<std::string>() : w.dump());
      }
    } else {
      throw ConfigError("task command must be a string or a list of words");
    }
    if (words.empty()) {
      throw ConfigError("empty task command");
    }
    TaskCommand command{parse_op(words.front()), {words.begin() + 1, words.end()}};
    if (command.args.size() != arity(command.op)) {
      throw ConfigError("task command '" + words.front() + "' takes " + std::to_string(arity(command.op)) +
                        " argument(s)");
    }
    script.steps.push_back(std::move(command));
  }
  return script;
}

TaskRunner::TaskRunner(Engine& engine, std::map<std::string, SceneSpec> scenes, ChainConfig chain,
                       std::uint64_t seed)
    : engine_(engine),
      scenes_(std::move(scenes)),
      chain_(std::move(chain)),
      seed_(seed),
      state_(engine.n()) {}

void TaskRunner::validate(const TaskScript& script) const {
  for (const auto& c : script.steps) {
    switch (c.op) {
      case TaskOp::Perceive:
        if (!scenes_.contains(c.args[0])) {
          throw ConfigError("unknown scene '" + c.args[0] + "'");
        }
        break;
      case TaskOp::Recall:
        if (c.args[0] == "semantic") {
          if (!engine_.registry.find(IndexKind::Concept, c.args[1])) {
            throw ConfigError("unknown concept '" + c.args[1] + "'");
          }
        } else if (c.args[0] != "episodic") {
          throw ConfigError("recall mode must be 'episodic' or 'semantic'");
        }
        break;
      case TaskOp::Query:
        if (!engine_.registry.find(IndexKind::Concept, c.args[0])) {
          throw ConfigError("unknown concept '" + c.args[0] + "'");
        }
        parse_int(c.args[1], "hops");
        break;
      case TaskOp::Restore:
        parse_int(c.args[0], "slot");
        break;
      case TaskOp::Store:
        break;
    }
  }
}

std::vector<nlohmann::json> TaskRunner::run(const TaskScript& script) {
  validate(script);
  std::vector<nlohmann::json> records;
  for (std::size_t i = 0; i < script.steps.size(); ++i) {
    records.push_back(execute(script.steps[i], i));
  }
  return records;
}

nlohmann::json TaskRunner::execute(const TaskCommand& command, std::uint64_t step) {
  Rng rng = Rng(seed_, "task").substream(step);
  nlohmann::json rec{{"step", step}};
  switch (command.op) {
    case TaskOp::Perceive: {
      const SceneInstance scene =
          generate_scene(engine_.world, scenes_.at(command.args[0]), Rng(seed_, "task-world").substream(step).key());
      const PerceptionTrace trace = perceive_scene(scene, engine_, engine_.config.perception, rng);
      triples_from_trace(trace, engine_.registry, engine_.type_predicate, triple_options(engine_.config.perception),
                         &engine_.kg);
      state_ = final_state(trace);
      rec["op"] = "perceive";
      rec["scene"] = command.args[0];
      rec["labels"] = label_names(engine_, trace);
      rec["episode"] = trace.time ? nlohmann::json(engine_.name(*trace.time)) : nlohmann::json(nullptr);
      break;
    }
    case TaskOp::Recall: {
      RecallTrace trace;
      if (command.args[0] == "semantic") {
        const IndexId s = engine_.registry.lookup(IndexKind::Concept, command.args[1]);
        trace = semantic_recall(engine_, s, semantic_recall_config(engine_), rng);
      } else {
        const auto t = engine_.registry.find(IndexKind::Episodic, command.args[1]);
        if (!t) {
          throw LookupError("unknown episode '" + command.args[1] + "'");
        }
        trace = episodic_recall(engine_, *t, episodic_recall_config(engine_, *t), rng);
      }
      state_ = final_state(trace);
      rec["op"] = "recall";
      rec["mode"] = command.args[0];
      rec["cue"] = command.args[1];
      rec["labels"] = label_names(engine_, trace);
      break;
    }
    case TaskOp::Store: {
      const IndexId id = store_task(state_, wm_, engine_.registry, engine_.embeddings);
      rec["op"] = "store";
      rec["index"] = engine_.name(id);
      break;
    }
    case TaskOp::Restore: {
      const auto slot = static_cast<std::size_t>(parse_int(command.args[0], "slot"));
      state_ = restore_task(wm_, slot, state_, engine_.embeddings);
      rec["op"] = "restore";
      rec["slot"] = slot;
      rec["index"] = engine_.name(wm_.at(slot));
      break;
    }
    case TaskOp::Query: {
      const IndexId start = engine_.registry.lookup(IndexKind::Concept, command.args[0]);
      const auto chain = chain_query(start, parse_int(command.args[1], "hops"), engine_, chain_, rng);
      std::vector<std::string> names;
      for (IndexId k : chain) {
        names.push_back(engine_.name(k));
      }
      rec["op"] = "query";
      rec["chain"] = names;
      break;
    }
  }
  return rec;
}

}  // namespace tbrain
