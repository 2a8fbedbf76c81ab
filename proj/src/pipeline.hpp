#pragma once

// Decode/encode steps shared by the perception and recall pipelines.

#include <string>
#include <vector>

#include "tbrain/engine.hpp"
#include "tbrain/rng.hpp"
#include "tbrain/trace.hpp"

namespace tbrain::detail {

inline const std::string& scheduled_domain(const std::vector<std::string>& schedule, int draw) {
  return schedule[static_cast<std::size_t>(draw) % schedule.size()];
}

/// Samples a label from `domain` (bottom-up), applies the top-down update and
/// records the event.
inline IndexId draw_label(const Engine& engine, Trace& trace, RepresentationState& q, Stage stage, int segment,
                          const std::string& domain, const UpdateParams& update, Rng& rng) {
  const Domain& dom = engine.registry.domain(domain);
  LabelEvent ev;
  ev.step = trace.events.size();
  ev.stage = stage;
  ev.segment = segment;
  ev.domain = domain;
  ev.distribution = decode_distribution(q, engine.embeddings, dom, update.temperature);
  ev.label = dom.members[sample_position(ev.distribution, rng)];
  ev.pre_before = q.pre;
  q = topdown_update(q, engine.embeddings, ev.label, update);
  ev.pre_after = q.pre;
  trace.events.push_back(std::move(ev));
  return trace.events.back().label;
}

/// Applies the top-down update of a given index without sampling.
inline void apply_cue(const Engine& engine, Trace& trace, RepresentationState& q, Stage stage, int segment,
                      IndexId cue, const UpdateParams& update) {
  LabelEvent ev;
  ev.step = trace.events.size();
  ev.stage = stage;
  ev.segment = segment;
  ev.domain = engine.registry.info(cue).domain;
  ev.label = cue;
  ev.forced = true;
  ev.pre_before = q.pre;
  q = topdown_update(q, engine.embeddings, cue, update);
  ev.pre_after = q.pre;
  trace.events.push_back(std::move(ev));
}

}  // namespace tbrain::detail
