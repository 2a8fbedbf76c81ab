#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tbrain/engine.hpp"
#include "tbrain/knowledge.hpp"
#include "tbrain/trace.hpp"

namespace tbrain {

class Rng;

/// One segment of a recall: optionally evolve, optionally apply a cue index
/// without sampling, then `rounds` draws cycling through `domains`.
struct RecallSegment {
  Stage stage = Stage::Roi;
  int index = 0;
  bool evolve_first = false;
  std::optional<IndexId> cue;
  std::vector<std::string> domains;
  int rounds = 0;
  int subject_roi = -1;  // Predicate segments: ROIs the relation connects
  int object_roi = -1;
};

struct RecallConfig {
  UpdateParams update;
  std::vector<RecallSegment> plan;
};

/// A step applied before the plan runs, starting from the neutral state q = 0.
struct RecallCue {
  enum class Kind : std::uint8_t { Topdown, Evolve } kind = Kind::Topdown;
  IndexId index;
};

/// The recall pipeline shared by episodic and semantic memory: q <- 0, cues,
/// then the plan. No sensory input and no attention.
RecallTrace run_recall(const Engine& engine, const std::vector<RecallCue>& cues, const RecallConfig& config,
                       TripleSource source, Rng& rng);

/// Plan mirroring the perception of episode t: scene draws, then per ROI
/// (evolve, ROI sub-index cue if any, ROI draws), then per relation (evolve,
/// predicate sub-index cue if any, predicate draws).
RecallConfig episodic_recall_config(const Engine& engine, IndexId t);
/// Plan for semantic recall: attribute draws (ROI domains other than the
/// entity domain), then evolve and a (predicate, entity) relation segment.
RecallConfig semantic_recall_config(const Engine& engine);

/// q <- 0; top-down with k = t; then the plan. Throws LookupError unless t is
/// an episodic index.
RecallTrace episodic_recall(const Engine& engine, IndexId t, const RecallConfig& config, Rng& rng);
RecallTrace episodic_recall(const Engine& engine, IndexId t, const RecallConfig& config, std::uint64_t seed);

/// q <- 0; top-down with t-bar; evolve; top-down with s; then the plan.
/// Throws LookupError unless s is a concept index.
RecallTrace semantic_recall(const Engine& engine, IndexId s, const RecallConfig& config, Rng& rng);
RecallTrace semantic_recall(const Engine& engine, IndexId s, const RecallConfig& config, std::uint64_t seed);

/// Deterministic state semantic recall reaches before its first draw.
RepresentationState semantic_cue_state(const Engine& engine, IndexId s, const UpdateParams& update = {});

struct TripleOptions {
  std::string entity_domain = "entity";
  std::string predicate_domain = "predicate";
  bool generalized = false;
};

TripleOptions triple_options(const PerceptionConfig& config);

struct TripleExtraction {
  std::vector<Triple> triples;
  std::vector<std::string> warnings;
};

/// Turns the labels of a trace into triples. The first entity-domain label
/// of an ROI is its subject (the cue concept for semantic recall); the other
/// labels become (subject, type, label); predicate ROIs become (subject1,
/// predicate, subject2). Duplicates within the trace are dropped. When `kg`
/// is given the triples are appended to it.
TripleExtraction triples_from_trace(const Trace& trace, const IndexRegistry& registry, IndexId type_predicate,
                                    const TripleOptions& options, KnowledgeGraph* kg = nullptr);

/// Records (subject, domain, label) co-occurrence events for every
/// non-subject label of every ROI with a resolved subject.
void record_trace_statistics(KnowledgeGraph& kg, const Trace& trace, const IndexRegistry& registry,
                             const TripleOptions& options);

}  // namespace tbrain
