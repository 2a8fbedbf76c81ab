#include "tbrain/memory.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "pipeline.hpp"
#include "tbrain/errors.hpp"
#include "tbrain/rng.hpp"

namespace tbrain {

RecallTrace run_recall(const Engine& engine, const std::vector<RecallCue>& cues, const RecallConfig& config,
                       TripleSource source, Rng& rng) {
  RecallTrace trace;
  trace.source = source;
  RepresentationState q(engine.n());
  for (const auto& cue : cues) {
    if (cue.kind == RecallCue::Kind::Evolve) {
      q = evolve(q, engine.evolution);
    } else {
      detail::apply_cue(engine, trace, q, Stage::Scene, -1, cue.index, config.update);
    }
  }
  trace.event_pre = q.pre;

  for (const auto& seg : config.plan) {
    if (seg.evolve_first) {
      q = evolve(q, engine.evolution);
    }
    if (seg.cue) {
      detail::apply_cue(engine, trace, q, seg.stage, seg.index, *seg.cue, config.update);
    }
    if (seg.stage == Stage::Roi) {
      trace.rois.push_back(RoiRecord{q.pre, seg.cue});
    } else if (seg.stage == Stage::Predicate || seg.stage == Stage::Relation) {
      trace.relations.push_back(RelationRecord{seg.subject_roi, seg.object_roi, seg.cue});
    }
    if (seg.rounds > 0 && seg.domains.empty()) {
      throw ConfigError("recall segment has draws but no domains");
    }
    for (int r = 0; r < seg.rounds; ++r) {
      detail::draw_label(engine, trace, q, seg.stage, seg.index, detail::scheduled_domain(seg.domains, r),
                         config.update, rng);
    }
  }
  return trace;
}

RecallConfig episodic_recall_config(const Engine& engine, IndexId t) {
  const auto& p = engine.config.perception;
  RecallConfig config;
  config.update = p.update;
  if (p.scene_draws() > 0) {
    config.plan.push_back(RecallSegment{Stage::Scene, -1, false, std::nullopt, p.scene_domains, p.scene_draws()});
  }
  if (!engine.episodes.contains(t)) {
    return config;
  }
  const auto& meta = engine.episodes.at(t);
  for (std::size_t i = 0; i < meta.roi_count; ++i) {
    RecallSegment seg{Stage::Roi, static_cast<int>(i), true, std::nullopt, p.roi_domains, p.roi_draws()};
    if (i < meta.roi_episodes.size()) {
      seg.cue = meta.roi_episodes[i];
    }
    config.plan.push_back(std::move(seg));
  }
  for (std::size_t j = 0; j < meta.relations.size(); ++j) {
    RecallSegment seg{Stage::Predicate, static_cast<int>(j), true, std::nullopt, {p.predicate_domain},
                      p.rounds_predicate};
    seg.subject_roi = static_cast<int>(meta.relations[j].first);
    seg.object_roi = static_cast<int>(meta.relations[j].second);
    if (j < meta.relation_episodes.size()) {
      seg.cue = meta.relation_episodes[j];
    }
    config.plan.push_back(std::move(seg));
  }
  return config;
}

RecallConfig semantic_recall_config(const Engine& engine) {
  const auto& p = engine.config.perception;
  RecallConfig config;
  config.update = p.update;
  std::vector<std::string> attributes;
  for (const auto& d : p.roi_domains) {
    if (d != p.entity_domain && std::find(attributes.begin(), attributes.end(), d) == attributes.end()) {
      attributes.push_back(d);
    }
  }
  const int rounds = static_cast<int>(attributes.size());
  config.plan.push_back(RecallSegment{Stage::Roi, 0, false, std::nullopt, std::move(attributes), rounds});
  if (engine.registry.has_domain(p.predicate_domain) && engine.registry.has_domain(p.entity_domain) &&
      !engine.registry.domain(p.predicate_domain).empty()) {
    config.plan.push_back(
        RecallSegment{Stage::Relation, 0, true, std::nullopt, {p.predicate_domain, p.entity_domain}, 2});
  }
  return config;
}

RecallTrace episodic_recall(const Engine& engine, IndexId t, const RecallConfig& config, Rng& rng) {
  const auto& info = engine.registry.info(t);
  if (info.kind != IndexKind::Episodic || t == engine.prior) {
    throw LookupError("'" + info.name + "' is not an episodic index");
  }
  RecallTrace trace = run_recall(engine, {RecallCue{RecallCue::Kind::Topdown, t}}, config,
                                 TripleSource::EpisodicRecall, rng);
  trace.time = t;
  return trace;
}

RecallTrace episodic_recall(const Engine& engine, IndexId t, const RecallConfig& config, std::uint64_t seed) {
  Rng rng(seed, "recall");
  return episodic_recall(engine, t, config, rng);
}

RecallTrace semantic_recall(const Engine& engine, IndexId s, const RecallConfig& config, Rng& rng) {
  const auto& info = engine.registry.info(s);
  if (info.kind != IndexKind::Concept) {
    throw LookupError("'" + info.name + "' is not a concept index");
  }
  const std::vector<RecallCue> cues{{RecallCue::Kind::Topdown, engine.prior},
                                    {RecallCue::Kind::Evolve, IndexId{}},
                                    {RecallCue::Kind::Topdown, s}};
  RecallTrace trace = run_recall(engine, cues, config, TripleSource::SemanticRecall, rng);
  trace.subject = s;
  return trace;
}

RecallTrace semantic_recall(const Engine& engine, IndexId s, const RecallConfig& config, std::uint64_t seed) {
  Rng rng(seed, "recall");
  return semantic_recall(engine, s, config, rng);
}

RepresentationState semantic_cue_state(const Engine& engine, IndexId s, const UpdateParams& update) {
  RepresentationState q(engine.n());
  q = topdown_update(q, engine.embeddings, engine.prior, update);
  q = evolve(q, engine.evolution);
  return topdown_update(q, engine.embeddings, s, update);
}

TripleOptions triple_options(const PerceptionConfig& config) {
  return TripleOptions{config.entity_domain, config.predicate_domain, config.generalized};
}

namespace {

struct RoiLabels {
  std::optional<IndexId> subject;
  const LabelEvent* subject_event = nullptr;
  std::vector<const LabelEvent*> labels;  // sampled, in order
};

RoiLabels roi_labels(const Trace& trace, int roi, const TripleOptions& options) {
  RoiLabels out;
  for (const LabelEvent* e : trace.segment(Stage::Roi, roi)) {
    if (e->forced) {
      continue;
    }
    out.labels.push_back(e);
    if (!out.subject && e->domain == options.entity_domain) {
      out.subject = e->label;
      out.subject_event = e;
    }
  }
  if (!out.subject && trace.subject && roi == 0) {
    out.subject = trace.subject;
  }
  return out;
}

}  // namespace

TripleExtraction triples_from_trace(const Trace& trace, const IndexRegistry& registry, IndexId type_predicate,
                                    const TripleOptions& options, KnowledgeGraph* kg) {
  TripleExtraction out;
  std::set<std::tuple<IndexId, IndexId, IndexId>> seen;
  auto emit = [&](IndexId s, IndexId p, IndexId o) {
    if (seen.insert({s, p, o}).second) {
      out.triples.push_back(Triple{s, p, o, trace.source, trace.time});
    }
  };

  std::map<int, IndexId> subjects;
  for (std::size_t i = 0; i < trace.rois.size(); ++i) {
    const int roi = static_cast<int>(i);
    const RoiLabels labels = roi_labels(trace, roi, options);
    if (!labels.subject) {
      if (!labels.labels.empty()) {
        out.warnings.push_back("ROI " + std::to_string(roi) + " has no " + options.entity_domain +
                               " label; triples skipped");
      }
      continue;
    }
    subjects[roi] = *labels.subject;
    std::vector<IndexId> attributes;
    for (const LabelEvent* e : labels.labels) {
      if (e == labels.subject_event || e->label == *labels.subject) {
        continue;
      }
      emit(*labels.subject, type_predicate, e->label);
      attributes.push_back(e->label);
    }
    if (options.generalized) {
      for (std::size_t a = 0; a < attributes.size(); ++a) {
        for (std::size_t b = a + 1; b < attributes.size(); ++b) {
          if (attributes[a] != attributes[b]) {
            emit(attributes[a], type_predicate, attributes[b]);
          }
        }
      }
    }
  }

  for (std::size_t j = 0; j < trace.relations.size(); ++j) {
    const auto& rel = trace.relations[j];
    const int seg = static_cast<int>(j);
    if (rel.subject_roi >= 0) {
      const auto s = subjects.find(rel.subject_roi);
      const auto o = subjects.find(rel.object_roi);
      const auto events = trace.segment(Stage::Predicate, seg);
      if (s == subjects.end() || o == subjects.end()) {
        if (!events.empty()) {
          out.warnings.push_back("relation " + std::to_string(seg) + " connects an ROI without entity label; skipped");
        }
        continue;
      }
      for (const LabelEvent* e : events) {
        if (!e->forced && e->domain == options.predicate_domain) {
          emit(s->second, e->label, o->second);
        }
      }
    } else {
      std::optional<IndexId> subject = trace.subject;
      if (!subject && subjects.contains(0)) {
        subject = subjects.at(0);
      }
      std::optional<IndexId> predicate;
      for (const LabelEvent* e : trace.segment(Stage::Relation, seg)) {
        if (e->forced) {
          continue;
        }
        if (!predicate && e->domain == options.predicate_domain) {
          predicate = e->label;
        } else if (predicate && e->domain == options.entity_domain) {
          if (subject) {
            emit(*subject, *predicate, e->label);
          }
          break;
        }
      }
      if (!subject && predicate) {
        out.warnings.push_back("relation " + std::to_string(seg) + " has no subject; skipped");
      }
    }
  }

  if (kg != nullptr) {
    for (const auto& t : out.triples) {
      kg->add(t);
    }
  }
  (void)registry;
  return out;
}

void record_trace_statistics(KnowledgeGraph& kg, const Trace& trace, const IndexRegistry& registry,
                             const TripleOptions& options) {
  for (std::size_t i = 0; i < trace.rois.size(); ++i) {
    const RoiLabels labels = roi_labels(trace, static_cast<int>(i), options);
    if (!labels.subject) {
      continue;
    }
    for (const LabelEvent* e : labels.labels) {
      if (e == labels.subject_event) {
        continue;
      }
      record_label_event(kg, *labels.subject, registry.domain(e->domain), e->label);
    }
  }
}

}  // namespace tbrain
