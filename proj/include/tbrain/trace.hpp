#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tbrain/index_layer.hpp"
#include "tbrain/triple.hpp"

namespace tbrain {

class IndexRegistry;

enum class Stage : std::uint8_t { Scene, Roi, Predicate, Relation };

std::string_view to_string(Stage stage);

/// One label generated by the decode/encode loop (or a cue set without sampling).
struct LabelEvent {
  std::size_t step = 0;
  Stage stage = Stage::Scene;
  int segment = -1;  // ROI index for Roi, relation index for Predicate/Relation, -1 for Scene
  std::string domain;
  IndexId label;
  bool forced = false;  // cue applied without sampling
  Vector distribution;  // over the domain members at draw time; empty when forced
  Vector pre_before;
  Vector pre_after;

  bool operator==(const LabelEvent& other) const;
};

struct RoiRecord {
  Vector pre_input;  // pre-activations right after input and attention
  std::optional<IndexId> episode;

  bool operator==(const RoiRecord& other) const;
};

struct RelationRecord {
  int subject_roi = -1;
  int object_roi = -1;
  std::optional<IndexId> episode;

  bool operator==(const RelationRecord& other) const = default;
};

/// Ordered record of one perception or recall episode.
struct Trace {
  TripleSource source = TripleSource::Perception;
  std::optional<IndexId> time;     // episodic index of the event
  std::optional<IndexId> subject;  // cue concept of a semantic recall
  Vector event_pre;                // pre-activations after scene input and attention
  std::vector<RoiRecord> rois;
  std::vector<RelationRecord> relations;
  std::vector<LabelEvent> events;

  /// Labels of one segment, in order.
  [[nodiscard]] std::vector<const LabelEvent*> segment(Stage stage, int index) const;
  bool operator==(const Trace& other) const;
};

using PerceptionTrace = Trace;
using RecallTrace = Trace;

/// One JSON object per label event: step, stage, segment, domain, index,
/// forced flag and pre-activation norms before/after the top-down step.
std::vector<nlohmann::json> trace_records(const Trace& trace, const IndexRegistry& registry);

}  // namespace tbrain
