#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"
#include "tbrain/errors.hpp"
#include "tbrain/knowledge.hpp"
#include "tbrain/learning.hpp"
#include "tbrain/memory.hpp"
#include "tbrain/perception.hpp"

using namespace tbrain;

namespace {

// A zero state still fires at 1/2, so the cue-free logits are a0 + sum(a) / 2.
Vector bias_softmax(const Engine& e, const Domain& dom) {
  std::vector<double> z;
  for (IndexId k : dom.members) z.push_back(oracle::dot_post(e, k, std::vector<double>(e.n(), 0.0)));
  const auto p = oracle::softmax(z);
  return Eigen::Map<const Vector>(p.data(), static_cast<long>(p.size()));
}

LabelEvent event(Stage stage, int seg, const std::string& domain, IndexId label) {
  LabelEvent e;
  e.stage = stage;
  e.segment = seg;
  e.domain = domain;
  e.label = label;
  return e;
}

}  // namespace

TEST(EpisodicRecall, FirstDistributionMatchesPerception) {
  EngineConfig c = fixture::small_config(1, 8);
  c.perception.scene_attention = "";
  Engine e = Engine::create(c);
  const auto scene = generate_scene(e.world, fixture::two_roi_scene(e), 3);
  const auto trace = perceive_scene(scene, e, c.perception, 4);
  const auto recall = episodic_recall(e, *trace.time, episodic_recall_config(e, *trace.time), 5);
  const LabelEvent* first = nullptr;
  for (const auto& ev : recall.events) {
    if (!ev.forced) {
      first = &ev;
      break;
    }
  }
  ASSERT_NE(first, nullptr);
  EXPECT_EQ(first->domain, trace.events.front().domain);
  EXPECT_LE((first->distribution - trace.events.front().distribution).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(EpisodicRecall, ZeroEmbeddingGivesBiasOnlyDistributions) {
  EngineConfig c = fixture::small_config(2);
  Engine e = Engine::create(c);
  e.evolution = EvolutionNetwork(c.n, c.h);
  const IndexId t = form_episodic_index(RepresentationState(c.n), e, EpisodeMeta{0, "empty", 1, {}, {}, {}});
  const auto recall = episodic_recall(e, t, episodic_recall_config(e, t), 1);
  std::size_t checked = 0;
  for (const auto& ev : recall.events) {
    if (ev.forced) continue;
    // Only the first draw of each segment starts from the zero state.
    if (ev.pre_before.isZero()) {
      EXPECT_LE((ev.distribution - bias_softmax(e, e.domain(ev.domain))).cwiseAbs().maxCoeff(), 1e-12);
      ++checked;
    }
  }
  EXPECT_GE(checked, 1U);
}

TEST(EpisodicRecall, DeterministicUnderSeed) {
  Engine e = Engine::create(fixture::small_config(3));
  const auto scene = generate_scene(e.world, fixture::two_roi_scene(e), 3);
  const IndexId t = *perceive_scene(scene, e, e.config.perception, 4).time;
  const auto cfg = episodic_recall_config(e, t);
  EXPECT_EQ(episodic_recall(e, t, cfg, 9), episodic_recall(e, t, cfg, 9));
}

TEST(EpisodicRecall, RejectsNonEpisodes) {
  Engine e = Engine::create(fixture::small_config(4));
  EXPECT_THROW(episodic_recall(e, e.id("Dog"), RecallConfig{}, 1), LookupError);
  EXPECT_THROW(episodic_recall(e, e.prior, RecallConfig{}, 1), LookupError);
}

TEST(SemanticRecall, TrainedClassIsArgmax) {
  EngineConfig c = fixture::small_config(5, 16);
  Engine e = Engine::create(c);
  e.evolution = EvolutionNetwork(c.n, c.h);
  Objective obj;
  obj.terms.push_back(LossTerm{SemanticContext{e.id("Sparky")}, {e.id("Dog")}, {}, 1.0});
  obj.terms.push_back(LossTerm{SemanticContext{e.id("Tom")}, {e.id("Cat")}, {}, 1.0});
  ParameterMask mask;
  mask.abar = false;
  mask.evolution = false;
  for (int i = 0; i < 100; ++i) apply_gradients(e, gradients(obj, e), 0.05, mask);
  ASSERT_TRUE(e.abar().isZero());

  for (auto [s, k] : {std::pair{"Sparky", "Dog"}, std::pair{"Tom", "Cat"}}) {
    const auto trace = semantic_recall(e, e.id(s), semantic_recall_config(e), 1);
    const LabelEvent* cls = nullptr;
    for (const auto& ev : trace.events) {
      if (!ev.forced && ev.domain == "class") {
        cls = &ev;
        break;
      }
    }
    ASSERT_NE(cls, nullptr);
    // Oracle: largest a0 + a . sig(a_s) over the class domain.
    const auto& dom = e.domain("class");
    std::size_t best = 0;
    double best_z = -INFINITY;
    for (std::size_t i = 0; i < dom.size(); ++i) {
      const double z = oracle::dot_post(e, dom.members[i], oracle::col(e, e.id(s)));
      if (z > best_z) {
        best_z = z;
        best = i;
      }
    }
    EXPECT_EQ(dom.members[best], e.id(k));
    EXPECT_EQ(argmax_position(cls->distribution), best);
  }
}

TEST(SemanticRecall, ZeroEmbeddingGivesBiasOnly) {
  EngineConfig c = fixture::small_config(6);
  Engine e = Engine::create(c);
  e.evolution = EvolutionNetwork(c.n, c.h);
  e.embeddings.column(e.id("Sparky")).setZero();
  const auto trace = semantic_recall(e, e.id("Sparky"), semantic_recall_config(e), 2);
  const auto* first = trace.segment(Stage::Roi, 0).front();
  EXPECT_LE((first->distribution - bias_softmax(e, e.domain(first->domain))).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SemanticRecall, SameSeedSameLabels) {
  Engine e = Engine::create(fixture::small_config(7));
  const auto cfg = semantic_recall_config(e);
  const auto a = semantic_recall(e, e.id("Tom"), cfg, 3);
  const auto b = semantic_recall(e, e.id("Tom"), cfg, 3);
  EXPECT_EQ(a, b);
  EXPECT_EQ(*a.subject, e.id("Tom"));
  EXPECT_THROW(semantic_recall(e, e.id("chases"), cfg, 3), LookupError);
}

TEST(Symbolic, ZeroMatrixIsUniform) {
  Engine e = Engine::create(fixture::small_config(8));
  const Vector p = symbolic_decode(e.id("Sparky"), e.domain("class"), SymbolicMatrix{});
  EXPECT_NEAR(p[0], 0.5, 1e-15);
  EXPECT_NEAR(p[1], 0.5, 1e-15);
}

TEST(Symbolic, SingleStrongWeight) {
  IndexRegistry r;
  r.add_domain("d");
  std::vector<IndexId> ids;
  for (const char* name : {"a", "b", "c"}) {
    ids.push_back(r.add(IndexKind::Concept, name));
    r.assign(ids.back(), "d");
  }
  const IndexId s = r.add(IndexKind::Concept, "s");
  SymbolicMatrix m;
  m.b[{s, ids[1]}] = 10.0;
  const Vector p = symbolic_decode(s, r.domain("d"), m);
  const long double e10 = std::exp(10.0L);
  EXPECT_NEAR(p[1], static_cast<double>(e10 / (e10 + 2.0L)), 1e-12);
}

TEST(Symbolic, IndependentOfEmbeddings) {
  Engine e = Engine::create(fixture::small_config(9));
  for (int i = 0; i < 7; ++i) record_label_event(e.kg, e.id("Sparky"), e.domain("class"), e.id("Dog"));
  record_label_event(e.kg, e.id("Sparky"), e.domain("class"), e.id("Cat"));
  e.refresh_symbolic();
  const Vector before = symbolic_decode(e.id("Sparky"), e.domain("class"), e.symbolic);
  e.embeddings.a.setRandom();
  e.embeddings.a0.setRandom();
  e.refresh_symbolic();
  EXPECT_EQ(symbolic_decode(e.id("Sparky"), e.domain("class"), e.symbolic), before);
  // Smoothed frequencies: (7 + 1) / 10 and (1 + 1) / 10.
  EXPECT_NEAR(before[0], 0.8, 1e-12);
}

TEST(Triples, RoiLabelsBecomeTypeStatements) {
  Engine e = Engine::create(fixture::small_config(10));
  e.registry.add_domain("color");
  const IndexId black = e.registry.add(IndexKind::Concept, "Black");
  e.registry.assign(black, "color");
  Trace t;
  t.rois.push_back({});
  t.events = {event(Stage::Roi, 0, "entity", e.id("Sparky")), event(Stage::Roi, 0, "class", e.id("Dog")),
              event(Stage::Roi, 0, "color", black)};
  const auto out = triples_from_trace(t, e.registry, e.type_predicate, TripleOptions{});
  ASSERT_EQ(out.triples.size(), 2U);
  EXPECT_EQ(out.triples[0].subject, e.id("Sparky"));
  EXPECT_EQ(out.triples[0].predicate, e.type_predicate);
  EXPECT_EQ(out.triples[0].object, e.id("Dog"));
  EXPECT_EQ(out.triples[1].object, black);
}

TEST(Triples, PredicateRoiLinksSubjects) {
  Engine e = Engine::create(fixture::small_config(11));
  Trace t;
  t.rois = {{}, {}};
  t.relations.push_back(RelationRecord{0, 1, std::nullopt});
  t.events = {event(Stage::Roi, 0, "entity", e.id("Sparky")), event(Stage::Roi, 1, "entity", e.id("Tom")),
              event(Stage::Predicate, 0, "predicate", e.id("chases"))};
  KnowledgeGraph kg;
  const auto out = triples_from_trace(t, e.registry, e.type_predicate, TripleOptions{}, &kg);
  ASSERT_EQ(out.triples.size(), 1U);
  const Triple expect{e.id("Sparky"), e.id("chases"), e.id("Tom"), TripleSource::Perception, std::nullopt};
  EXPECT_EQ(out.triples[0], expect);
  EXPECT_EQ(kg.count(expect), 1U);
}

TEST(Triples, EmptyTraceGivesNothing) {
  Engine e = Engine::create(fixture::small_config(12));
  const auto out = triples_from_trace(Trace{}, e.registry, e.type_predicate, TripleOptions{});
  EXPECT_TRUE(out.triples.empty());
  EXPECT_TRUE(out.warnings.empty());
}

TEST(Triples, MissingEntityWarns) {
  Engine e = Engine::create(fixture::small_config(13));
  Trace t;
  t.rois.push_back({});
  t.events = {event(Stage::Roi, 0, "class", e.id("Dog"))};
  const auto out = triples_from_trace(t, e.registry, e.type_predicate, TripleOptions{});
  EXPECT_TRUE(out.triples.empty());
  EXPECT_EQ(out.warnings.size(), 1U);
}

TEST(Conditional, SixOfTenIsSixTenths) {
  Engine e = Engine::create(fixture::small_config(14));
  e.registry.add_domain("mood");
  const IndexId happy = e.registry.add(IndexKind::Concept, "Happy");
  const IndexId sad = e.registry.add(IndexKind::Concept, "Sad");
  e.registry.assign(happy, "mood");
  e.registry.assign(sad, "mood");
  const auto& mood = e.domain("mood");
  EXPECT_THROW(conditional_probability(e.kg, e.id("Sparky"), mood, happy), UndefinedProbabilityError);
  record_label_event(e.kg, e.id("Sparky"), mood, sad);
  EXPECT_EQ(conditional_probability(e.kg, e.id("Sparky"), mood, sad), 1.0);
  for (int i = 0; i < 6; ++i) record_label_event(e.kg, e.id("Sparky"), mood, happy);
  for (int i = 0; i < 3; ++i) record_label_event(e.kg, e.id("Sparky"), mood, sad);
  EXPECT_DOUBLE_EQ(conditional_probability(e.kg, e.id("Sparky"), mood, happy), 0.6);
  EXPECT_THROW(record_label_event(e.kg, e.id("Sparky"), mood, e.id("Dog")), DomainError);
}

TEST(Conditional, StreamWithinBinomialInterval) {
  Engine e = Engine::create(fixture::small_config(15));
  const auto& cls = e.domain("class");
  Rng rng(15, "stream");
  const int events = 4000;
  const double p = 0.3;
  for (int i = 0; i < events; ++i) {
    record_label_event(e.kg, e.id("Tom"), cls, rng.uniform() < p ? e.id("Dog") : e.id("Cat"));
  }
  const double est = conditional_probability(e.kg, e.id("Tom"), cls, e.id("Dog"));
  EXPECT_NEAR(est, p, 4.0 * std::sqrt(p * (1 - p) / events));
}

TEST(Conditional, TraceStatisticsCountNonSubjectLabels) {
  Engine e = Engine::create(fixture::small_config(16));
  Trace t;
  t.rois.push_back({});
  t.events = {event(Stage::Roi, 0, "entity", e.id("Sparky")), event(Stage::Roi, 0, "class", e.id("Dog"))};
  record_trace_statistics(e.kg, t, e.registry, TripleOptions{});
  EXPECT_EQ(e.kg.count(e.id("Sparky"), "class", e.id("Dog")), 1U);
  EXPECT_EQ(e.kg.total(e.id("Sparky"), "entity"), 0U);
}
