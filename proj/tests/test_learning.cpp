#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"
#include "tbrain/errors.hpp"
#include "tbrain/learning.hpp"
#include "tbrain/memory.hpp"
#include "tbrain/perception.hpp"
#include "tbrain/scenario.hpp"

using namespace tbrain;

namespace {

Engine zero_engine(std::uint64_t seed) {
  EngineConfig c = fixture::small_config(seed);
  Engine e = Engine::create(c);
  e.embeddings.a.setZero();
  e.embeddings.a0.setZero();
  e.evolution = EvolutionNetwork(c.n, c.h);
  return e;
}

Engine trained_sparky(int steps, std::vector<double>* dots = nullptr, int every = 100) {
  Scenario sc = load_scenario(fixture::scenario_path("sparky.json"));
  Engine e = Engine::create(sc.config);
  const auto scenes = resolve_scenes(sc, e);
  TrainConfig cfg = e.config.learning;
  const IndexId sparky = e.id("Sparky");
  const IndexId dog = e.id("Dog");
  if (dots != nullptr) dots->push_back(e.embeddings.column(sparky).dot(e.embeddings.column(dog)));
  for (int done = 0; done < steps; done += every) {
    cfg.steps = std::min(every, steps - done);
    // train() derives scene seeds from the step, so chunks continue the schedule.
    cfg.seed = e.config.learning.seed + static_cast<std::uint64_t>(done);
    train(e, scenes, cfg);
    if (dots != nullptr) dots->push_back(e.embeddings.column(sparky).dot(e.embeddings.column(dog)));
  }
  return e;
}

}  // namespace

TEST(Loss, SingleMemberDomainCostsNothing) {
  Engine e = Engine::create(fixture::small_config(1));
  EXPECT_EQ(loss_semantic(e.id("Sparky"), {e.id("chases")}, e), 0.0);
}

TEST(Loss, UniformSoftmaxesAddLogSizes) {
  Engine e = zero_engine(2);
  const double expect = std::log(2.0) + std::log(2.0);
  EXPECT_NEAR(loss_semantic(e.id("Garden"), {e.id("Sparky"), e.id("Dog")}, e), expect, 1e-15);
  EXPECT_NEAR(loss_perception(Vector::Ones(6), Vector::Zero(6), {e.id("Tom"), e.id("Street")}, e), expect, 1e-15);
  const IndexId t = form_episodic_index(RepresentationState(6), e, EpisodeMeta{});
  EXPECT_NEAR(loss_episodic(t, {e.id("Cat"), e.id("Garden")}, e), expect, 1e-15);
}

TEST(Loss, MatchesNaiveOracle) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto inst = fixture::grad_instance(seed);
    const double lib = total_loss(inst.objective, inst.engine);
    const double ref = oracle::objective_loss(inst.objective, inst.engine);
    EXPECT_NEAR(lib, ref, 1e-12 * std::max(1.0, std::abs(ref)));
  }
}

TEST(Loss, ReconstructionOfZeroDecoder) {
  const Decoder dec(3, 4);
  Vector v(3);
  v << 1.0, 2.0, -2.0;
  EXPECT_EQ(loss_reconstruction(v, RepresentationState(4), dec), 4.5);
  EXPECT_THROW(loss_reconstruction(Vector::Zero(2), RepresentationState(4), dec), ConfigError);
}

TEST(Loss, Errors) {
  Engine e = Engine::create(fixture::small_config(3));
  EXPECT_THROW(loss_semantic(e.id("Sparky"), {}, e), ParameterError);
  EXPECT_THROW(loss_semantic(e.id("Sparky"), {e.type_predicate}, e), DomainError);
  EXPECT_THROW(loss_semantic(e.id("Sparky"), {e.id("Dog")}, e, 0.0), ParameterError);
  EXPECT_THROW(loss_episodic(e.prior, {e.id("Dog")}, e), ParameterError);
}

TEST(Loss, LabelOrderMatters) {
  Engine e = Engine::create(fixture::small_config(4));
  const double ab = loss_semantic(e.id("Garden"), {e.id("Sparky"), e.id("Dog")}, e);
  const double ba = loss_semantic(e.id("Garden"), {e.id("Dog"), e.id("Sparky")}, e);
  EXPECT_GT(std::abs(ab - ba), 1e-6);
}

TEST(Gradient, FiniteDifferencesAgree) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto inst = fixture::grad_instance(seed);
    const auto r = oracle::finite_difference(inst.objective, inst.engine);
    EXPECT_LT(r.max_rel, 1e-4) << "seed " << seed << " at " << r.worst;
    EXPECT_GT(r.count, 200U);
  }
}

TEST(Gradient, LibraryCheckerAgreesWithOracle) {
  const auto inst = fixture::grad_instance(8);
  const auto report = grad_check(inst.objective, inst.engine);
  EXPECT_LT(report.max_relative_error, 1e-4);
  EXPECT_EQ(report.checked, oracle::all_params(inst.engine).size());
}

TEST(Gradient, SymmetricStationaryBiases) {
  Engine e = zero_engine(5);
  Objective obj;
  obj.terms.push_back(LossTerm{SemanticContext{e.id("Garden")}, {e.id("Dog")}, {}, 1.0});
  obj.terms.push_back(LossTerm{SemanticContext{e.id("Street")}, {e.id("Cat")}, {}, 1.0});
  const auto g = gradients(obj, e);
  EXPECT_EQ(g.d_a0[e.id("Dog").value], 0.0);
  EXPECT_EQ(g.d_a0[e.id("Cat").value], 0.0);
}

TEST(Gradient, L1IsScaledSign) {
  Engine e = Engine::create(fixture::small_config(6));
  Objective obj;
  obj.l1_embedding = 0.25;
  const auto g = gradients(obj, e);
  for (Eigen::Index k = 0; k < e.embeddings.size(); ++k) {
    for (Eigen::Index i = 0; i < e.n(); ++i) {
      const double a = e.embeddings.a(i, k);
      if (k == static_cast<Eigen::Index>(e.prior.value) || a == 0.0) continue;
      EXPECT_EQ(g.d_embeddings(i, k), a > 0 ? 0.25 : -0.25);
    }
  }
  EXPECT_TRUE(g.d_abar.isZero());
}

TEST(Descent, ZeroLearningRateIsBitwiseNoop) {
  auto inst = fixture::grad_instance(9);
  const Engine before = inst.engine;
  apply_gradients(inst.engine, gradients(inst.objective, inst.engine), 0.0);
  EXPECT_TRUE(inst.engine == before);
  TrainConfig cfg;
  cfg.learning_rate = 0.0;
  descend(inst.engine, inst.objective, cfg);
  EXPECT_TRUE(inst.engine == before);
}

TEST(Descent, FixedObjectiveLossNonIncreasing) {
  auto inst = fixture::grad_instance(10);
  TrainConfig cfg;
  cfg.learning_rate = 1e-2;
  cfg.steps = 200;
  const auto reports = train_full_batch(inst.engine, inst.objective, cfg);
  int down = 0;
  for (std::size_t i = 1; i < reports.size(); ++i) down += reports[i].before.total() <= reports[i - 1].before.total();
  EXPECT_GE(down, static_cast<int>(0.9 * static_cast<double>(reports.size() - 1)));
}

TEST(Descent, SelfSupervisedRoundsDescendOnTheirObjective) {
  EngineConfig c = fixture::small_config(11, 8);
  Engine e = Engine::create(c);
  TrainConfig cfg;
  cfg.learning_rate = 1e-2;
  cfg.steps = 100;
  const auto reports = train(e, {fixture::two_roi_scene(e)}, cfg);
  int down = 0;
  for (const auto& r : reports) down += r.after.total() <= r.before.total();
  EXPECT_GE(down, 90);
}

TEST(Descent, EncoderFrozenByDefault) {
  Engine e = Engine::create(fixture::small_config(12));
  const Encoder enc = e.encoder;
  const EvolutionNetwork evo = e.evolution;
  TrainConfig cfg;
  cfg.steps = 5;
  train(e, {fixture::two_roi_scene(e)}, cfg);
  EXPECT_TRUE(e.encoder == enc);
  EXPECT_TRUE(e.evolution == evo);
  cfg.train_encoder = cfg.train_evolution = true;
  train(e, {fixture::two_roi_scene(e)}, cfg);
  EXPECT_FALSE(e.encoder == enc);
  EXPECT_FALSE(e.evolution == evo);
}

TEST(Descent, RecallChangesTheRecalledMemory) {
  Engine e = Engine::create(fixture::small_config(13));
  const auto scene = generate_scene(e.world, fixture::two_roi_scene(e), 1);
  const IndexId t = *perceive_scene(scene, e, e.config.perception, 1).time;
  const Vector before = e.embeddings.column(t);
  TrainConfig cfg;
  Rng rng(13);
  train_on_recall(e, t, cfg, rng);
  EXPECT_GT((Vector(e.embeddings.column(t)) - before).norm(), 0.0);
}

TEST(Fixture, SparkyRecallsDogAfterTraining) {
  std::vector<double> dots;
  const Engine e = trained_sparky(500, &dots);
  const auto& cls = e.domain("class");
  const Vector p = decode_distribution(semantic_cue_state(e, e.id("Sparky")), e.embeddings, cls);
  EXPECT_EQ(cls.members[argmax_position(p)], e.id("Dog"));
  const auto trace = semantic_recall(e, e.id("Sparky"), semantic_recall_config(e), 1);
  for (const auto& ev : trace.events) {
    if (!ev.forced && ev.domain == "class") {
      EXPECT_EQ(cls.members[argmax_position(ev.distribution)], e.id("Dog"));
      break;
    }
  }
  // Dogginess is integrated into Sparky's embedding, checkpoint by checkpoint.
  ASSERT_EQ(dots.size(), 6U);
  for (std::size_t i = 1; i < dots.size(); ++i) EXPECT_GT(dots[i], dots[i - 1]) << "checkpoint " << i;
}

TEST(CreateIndex, AppendsZeroColumn) {
  Engine e = Engine::create(fixture::small_config(14));
  const auto k = e.embeddings.size();
  const IndexId id = create_index(e.registry, e.embeddings, IndexKind::Concept, "Mammal", std::nullopt, "class");
  EXPECT_EQ(e.embeddings.size(), k + 1);
  EXPECT_TRUE(Vector(e.embeddings.column(id)).isZero());
  EXPECT_EQ(e.embeddings.bias(id), 0.0);
  EXPECT_EQ(e.domain("class").members.back(), id);
  EXPECT_THROW(create_index(e.registry, e.embeddings, IndexKind::Concept, "Mammal"), DuplicateNameError);
}

TEST(CreateIndex, EpisodicInitMatchesFormedEpisode) {
  Engine e = Engine::create(fixture::small_config(15));
  Vector q(6);
  q << 0.1, -0.2, 0.3, 1.5, -7.0, 0.0;
  const IndexId a = create_index(e.registry, e.embeddings, IndexKind::Episodic, "future", q);
  const IndexId b = form_episodic_index(RepresentationState::from_pre(q), e.registry, e.embeddings, "formed", "");
  EXPECT_EQ(Vector(e.embeddings.column(a)), Vector(e.embeddings.column(b)));
  EXPECT_EQ(e.embeddings.bias(a), e.embeddings.bias(b));
}
