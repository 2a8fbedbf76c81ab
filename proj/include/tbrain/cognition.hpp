#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tbrain/engine.hpp"
#include "tbrain/learning.hpp"
#include "tbrain/world.hpp"

namespace tbrain {

class Rng;

/// Bounded list of parked indices. Pushing onto a full memory evicts the
/// oldest slot.
class WorkingMemory {
 public:
  explicit WorkingMemory(std::size_t capacity = 7);

  /// Returns the evicted index, if any.
  std::optional<IndexId> push(IndexId id);
  /// Throws LookupError for an empty slot.
  [[nodiscard]] IndexId at(std::size_t slot) const;

  [[nodiscard]] std::size_t size() const { return slots_.size(); }
  [[nodiscard]] std::size_t capacity() const { return capacity_; }
  [[nodiscard]] const std::deque<IndexId>& slots() const { return slots_; }

 private:
  std::size_t capacity_;
  std::deque<IndexId> slots_;
};

/// Parks the state as the embedding of a new episodic index (outside every
/// domain) and pushes it onto working memory.
IndexId store_task(const RepresentationState& state, WorkingMemory& wm, IndexRegistry& registry,
                   EmbeddingStore& emb);

/// Re-activates a parked state: pre <- a_t.
RepresentationState restore_task(const WorkingMemory& wm, std::size_t slot, const RepresentationState& state,
                                 const EmbeddingStore& emb);

struct ChainConfig {
  /// Hop i decodes from chain_domains[(i - 1) % size].
  std::vector<std::string> chain_domains;
  UpdateParams update;
  bool evolve_between_hops = false;
};

/// Starts from the semantic cue state of `start`, then per hop samples a
/// label and applies its top-down update. Returns [start, hop1, hop2, ...].
std::vector<IndexId> chain_query(IndexId start, int hops, const Engine& engine, const ChainConfig& config, Rng& rng);

/// Probability of `label` in its domain when decoding directly from the
/// semantic cue state of `subject`.
double direct_probability(const Engine& engine, IndexId subject, IndexId label, double temperature = 1.0);

struct MaterializeConfig {
  int steps = 50;
  double learning_rate = 0.01;
  double temperature = 1.0;
};

struct MaterializeReport {
  std::vector<std::pair<IndexId, IndexId>> pairs;
  std::vector<double> before;  // direct probability per pair
  std::vector<double> after;
  double loss_before = 0.0;
  double loss_after = 0.0;
};

/// Semantic-loss gradient steps on (subject, label) pairs, so that the label
/// becomes sampleable directly from the subject's cue.
MaterializeReport materialize(Engine& engine, const std::vector<std::pair<IndexId, IndexId>>& pairs,
                              const MaterializeConfig& config);

struct SimilarityConfig {
  std::vector<IndexId> first_labels;
  std::vector<IndexId> second_labels;
  int steps = 200;
  double learning_rate = 0.05;
  double temperature = 1.0;
};

struct SimilarityReport {
  double cosine_before = 0.0;
  double cosine_after = 0.0;
  /// Probability of each of the first episode's labels decoded from the second
  /// episode's embedding, and vice versa.
  std::vector<double> cross_before;
  std::vector<double> cross_after;
};

double cosine_similarity(const Vector& a, const Vector& b);

/// Trains only a_t1 and a_t2, each with the episodic loss of its own labels
/// (one term per label), and reports how similar the two engrams become.
SimilarityReport episodic_similarity_scenario(Engine& engine, IndexId t1, IndexId t2, const SimilarityConfig& config);

enum class TaskOp : std::uint8_t { Perceive, Recall, Store, Restore, Query };

struct TaskCommand {
  TaskOp op = TaskOp::Perceive;
  std::vector<std::string> args;
};

/// perceive <scene>; recall episodic <t> | recall semantic <concept>; store;
/// restore <slot>; query <concept> <hops>.
struct TaskScript {
  std::vector<TaskCommand> steps;
};

TaskScript parse_task_script(const nlohmann::json& j);

/// Deterministic interpreter standing in for cognitive control. Holds the
/// current brain state and a private working memory.
class TaskRunner {
 public:
  TaskRunner(Engine& engine, std::map<std::string, SceneSpec> scenes, ChainConfig chain, std::uint64_t seed);

  /// Throws ConfigError when a command names an unknown scene or concept.
  void validate(const TaskScript& script) const;
  /// One structured record per command.
  std::vector<nlohmann::json> run(const TaskScript& script);

  [[nodiscard]] const RepresentationState& state() const { return state_; }
  [[nodiscard]] const WorkingMemory& memory() const { return wm_; }

 private:
  nlohmann::json execute(const TaskCommand& command, std::uint64_t step);

  Engine& engine_;
  std::map<std::string, SceneSpec> scenes_;
  ChainConfig chain_;
  std::uint64_t seed_;
  WorkingMemory wm_;
  RepresentationState state_;
};

}  // namespace tbrain
