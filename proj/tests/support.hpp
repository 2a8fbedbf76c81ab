#pragma once

// Independent reference computations for the unit and acceptance tests. They
// use plain loops over std::vector-style indexing and never call the library's
// numeric routines, so agreement with the library is a real cross-check.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "tbrain/cognition.hpp"
#include "tbrain/engine.hpp"
#include "tbrain/learning.hpp"
#include "tbrain/perception.hpp"
#include "tbrain/rng.hpp"
#include "tbrain/scenario.hpp"
#include "tbrain/world.hpp"

namespace oracle {

using tbrain::Engine;
using tbrain::IndexId;
using tbrain::Vector;

inline double sig(double x) {
  if (x > 500.0) x = 500.0;
  if (x < -500.0) x = -500.0;
  return 1.0 / (1.0 + std::exp(-x));
}

// log-sum-exp in long double, straight from the definition.
inline std::vector<double> softmax(const std::vector<double>& z, double temperature = 1.0) {
  long double mx = -INFINITY;
  for (double v : z) mx = std::max<long double>(mx, v / temperature);
  long double sum = 0.0L;
  for (double v : z) sum += std::exp(static_cast<long double>(v) / temperature - mx);
  std::vector<double> p;
  for (double v : z) p.push_back(static_cast<double>(std::exp(static_cast<long double>(v) / temperature - mx) / sum));
  return p;
}

inline double dot_post(const Engine& e, IndexId k, const std::vector<double>& pre) {
  double s = e.embeddings.a0[k.value];
  for (std::size_t i = 0; i < pre.size(); ++i) s += e.embeddings.a(static_cast<long>(i), k.value) * sig(pre[i]);
  return s;
}

inline std::vector<double> col(const Engine& e, IndexId k) {
  std::vector<double> v(static_cast<std::size_t>(e.n()));
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = e.embeddings.a(static_cast<long>(i), k.value);
  return v;
}

inline std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

// f(sig(x)) evaluated unit by unit.
inline std::vector<double> increment(const tbrain::EvolutionNetwork& net, const std::vector<double>& x) {
  const std::size_t n = x.size();
  const auto h = static_cast<std::size_t>(net.hidden());
  std::vector<double> hid(h);
  for (std::size_t j = 0; j < h; ++j) {
    double z = net.b_hidden[static_cast<long>(j)];
    for (std::size_t i = 0; i < n; ++i) z += net.w_in(static_cast<long>(j), static_cast<long>(i)) * sig(x[i]);
    hid[j] = sig(z);
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double z = net.b_out[static_cast<long>(i)];
    for (std::size_t j = 0; j < h; ++j) z += net.w_out(static_cast<long>(i), static_cast<long>(j)) * hid[j];
    out[i] = z;
  }
  return out;
}

inline std::vector<double> encode(const tbrain::Encoder& enc, const Vector& v) {
  std::vector<double> out(static_cast<std::size_t>(enc.n()));
  for (long i = 0; i < enc.n(); ++i) {
    double z = enc.b[i];
    for (long j = 0; j < enc.d(); ++j) z += enc.w(i, j) * v[j];
    out[static_cast<std::size_t>(i)] = z;
  }
  return out;
}

inline void add(std::vector<double>& a, const std::vector<double>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
}

inline std::vector<double> context(const tbrain::LossContext& ctx, const Engine& e) {
  if (const auto* p = std::get_if<tbrain::PerceptionContext>(&ctx)) {
    auto x = encode(e.encoder, p->scene_features);
    if (!p->roi_features) return x;
    auto h = encode(e.encoder, *p->roi_features);
    add(h, x);
    add(h, increment(e.evolution, x));
    return h;
  }
  if (const auto* ep = std::get_if<tbrain::EpisodicContext>(&ctx)) {
    auto h = col(e, ep->t);
    if (ep->evolve) add(h, increment(e.evolution, col(e, ep->t)));
    if (ep->t_roi) add(h, col(e, *ep->t_roi));
    return h;
  }
  const auto& s = std::get<tbrain::SemanticContext>(ctx);
  auto h = col(e, s.s);
  add(h, col(e, e.prior));
  add(h, increment(e.evolution, col(e, e.prior)));
  return h;
}

// Every label scored by its own softmax, one at a time.
inline double term_loss(const tbrain::LossTerm& term, const Engine& e, double temperature) {
  auto c = context(term.context, e);
  if (term.reconstruction_target) {
    for (IndexId l : term.labels) add(c, col(e, l));
    double sq = 0.0;
    for (long r = 0; r < e.decoder.d(); ++r) {
      double v = e.decoder.b[r];
      for (long i = 0; i < e.decoder.n(); ++i) v += e.decoder.w(r, i) * sig(c[static_cast<std::size_t>(i)]);
      const double diff = v - (*term.reconstruction_target)[r];
      sq += diff * diff;
    }
    return term.weight * 0.5 * sq;
  }
  double loss = 0.0;
  for (IndexId l : term.labels) {
    const auto* dom = e.registry.domain_of(l);
    std::vector<double> z;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < dom->members.size(); ++i) {
      if (dom->members[i] == l) pos = i;
      z.push_back(dot_post(e, dom->members[i], c));
    }
    loss -= std::log(softmax(z, temperature)[pos]);
    add(c, col(e, l));
  }
  return term.weight * loss;
}

inline double objective_loss(const tbrain::Objective& obj, const Engine& e) {
  double total = 0.0;
  for (const auto& t : obj.terms) total += term_loss(t, e, obj.temperature);
  for (long k = 0; k < e.embeddings.size(); ++k) {
    if (k == static_cast<long>(e.prior.value)) continue;
    for (long i = 0; i < e.n(); ++i) total += obj.l1_embedding * std::abs(e.embeddings.a(i, k));
  }
  return total;
}

// One scalar parameter: its name, an accessor on an engine, and where the
// analytic gradient of that scalar lives.
struct Param {
  std::string name;
  std::function<double&(Engine&)> ref;
  std::function<double(const tbrain::GradientSet&)> grad;
};

inline std::vector<Param> all_params(const Engine& e) {
  std::vector<Param> out;
  const long n = e.n();
  for (long k = 0; k < e.embeddings.size(); ++k) {
    const bool prior = k == static_cast<long>(e.prior.value);
    for (long i = 0; i < n; ++i) {
      out.push_back({"a[" + std::to_string(i) + "," + std::to_string(k) + "]",
                     [=](Engine& x) -> double& { return x.embeddings.a(i, k); },
                     [=](const tbrain::GradientSet& g) { return prior ? g.d_abar[i] : g.d_embeddings(i, k); }});
    }
    out.push_back({"a0[" + std::to_string(k) + "]", [=](Engine& x) -> double& { return x.embeddings.a0[k]; },
                   [=](const tbrain::GradientSet& g) { return g.d_a0[k]; }});
  }
  auto matrix = [&out](const std::string& name, auto get, auto dget, long rows, long cols) {
    for (long r = 0; r < rows; ++r) {
      for (long c = 0; c < cols; ++c) {
        out.push_back({name + "[" + std::to_string(r) + "," + std::to_string(c) + "]",
                       [=](Engine& x) -> double& { return get(x)(r, c); },
                       [=](const tbrain::GradientSet& g) { return dget(g)(r, c); }});
      }
    }
  };
  matrix("encoder.w", [](Engine& x) -> tbrain::Matrix& { return x.encoder.w; },
         [](const tbrain::GradientSet& g) -> const tbrain::Matrix& { return g.d_encoder.w; }, e.encoder.w.rows(),
         e.encoder.w.cols());
  matrix("encoder.b", [](Engine& x) -> Vector& { return x.encoder.b; },
         [](const tbrain::GradientSet& g) -> const Vector& { return g.d_encoder.b; }, e.encoder.b.size(), 1);
  matrix("decoder.w", [](Engine& x) -> tbrain::Matrix& { return x.decoder.w; },
         [](const tbrain::GradientSet& g) -> const tbrain::Matrix& { return g.d_decoder.w; }, e.decoder.w.rows(),
         e.decoder.w.cols());
  matrix("decoder.b", [](Engine& x) -> Vector& { return x.decoder.b; },
         [](const tbrain::GradientSet& g) -> const Vector& { return g.d_decoder.b; }, e.decoder.b.size(), 1);
  matrix("w_in", [](Engine& x) -> tbrain::Matrix& { return x.evolution.w_in; },
         [](const tbrain::GradientSet& g) -> const tbrain::Matrix& { return g.d_evolution.w_in; },
         e.evolution.w_in.rows(), e.evolution.w_in.cols());
  matrix("b_hidden", [](Engine& x) -> Vector& { return x.evolution.b_hidden; },
         [](const tbrain::GradientSet& g) -> const Vector& { return g.d_evolution.b_hidden; },
         e.evolution.b_hidden.size(), 1);
  matrix("w_out", [](Engine& x) -> tbrain::Matrix& { return x.evolution.w_out; },
         [](const tbrain::GradientSet& g) -> const tbrain::Matrix& { return g.d_evolution.w_out; },
         e.evolution.w_out.rows(), e.evolution.w_out.cols());
  matrix("b_out", [](Engine& x) -> Vector& { return x.evolution.b_out; },
         [](const tbrain::GradientSet& g) -> const Vector& { return g.d_evolution.b_out; },
         e.evolution.b_out.size(), 1);
  return out;
}

struct FdResult {
  double max_rel = 0.0;
  std::string worst;
  std::size_t count = 0;
};

// Central differences of the reference loss against the library gradients.
inline FdResult finite_difference(const tbrain::Objective& obj, const Engine& engine, double eps = 1e-5,
                                  double floor = 1e-6) {
  const auto g = tbrain::gradients(obj, engine);
  Engine work = engine;
  FdResult r;
  for (const auto& p : all_params(engine)) {
    double& x = p.ref(work);
    const double saved = x;
    x = saved + eps;
    const double up = objective_loss(obj, work);
    x = saved - eps;
    const double down = objective_loss(obj, work);
    x = saved;
    const double numeric = (up - down) / (2.0 * eps);
    const double analytic = p.grad(g);
    const double rel = std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
    if (rel > r.max_rel || r.count == 0) {
      r.max_rel = rel;
      r.worst = p.name;
    }
    ++r.count;
  }
  return r;
}

}  // namespace oracle

namespace fixture {

using namespace tbrain;

// Small engine with scene, entity and attribute domains plus one predicate.
inline EngineConfig small_config(std::uint64_t seed, Eigen::Index n = 6) {
  EngineConfig c;
  c.n = c.d = n;
  c.h = 5;
  c.seed = seed;
  c.domains = {{"place", IndexKind::Concept, {"Garden", "Street"}},
               {"entity", IndexKind::Concept, {"Sparky", "Tom"}},
               {"class", IndexKind::Concept, {"Dog", "Cat"}},
               {"predicate", IndexKind::Predicate, {"chases"}}};
  c.perception.scene_domains = {"place"};
  c.perception.roi_domains = {"entity", "class"};
  return c;
}

inline void jitter(Engine& e, Rng& rng, double scale) {
  auto j = [&rng](auto& m, double s) {
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] += s * rng.normal();
  };
  j(e.encoder.w, 0.3 * scale);
  j(e.encoder.b, 0.3 * scale);
  j(e.decoder.w, scale);
  j(e.decoder.b, scale);
  j(e.evolution.b_hidden, scale);
  j(e.evolution.b_out, scale);
  j(e.embeddings.a0, scale);
  for (Eigen::Index i = 0; i < e.n(); ++i) e.embeddings.a(i, e.prior.value) += scale * rng.normal();
}

inline SceneSpec two_roi_scene(const Engine& e) {
  return SceneSpec{"walk",
                   {e.id("Garden")},
                   {{{e.id("Sparky"), e.id("Dog")}}, {{e.id("Tom"), e.id("Cat")}}},
                   {{0, e.id("chases"), 1}}};
}

// Engine plus an objective with every loss mode, n = 6 and K = 11.
struct GradInstance {
  Engine engine;
  Objective objective;
};

inline GradInstance grad_instance(std::uint64_t seed) {
  EngineConfig c = small_config(seed);
  c.embedding_scale = 0.5;
  c.world.noise_sigma = 0.1;
  Engine e = Engine::create(c);
  Rng rng(seed, "test-grad");
  jitter(e, rng, 0.5);
  const SceneInstance scene = generate_scene(e.world, two_roi_scene(e), rng.next());
  const auto trace = perceive_scene(scene, e, e.config.perception, rng);
  const IndexId extra =
      create_index(e.registry, e.embeddings, IndexKind::Episodic, "t0.roi", Vector::Constant(e.n(), 0.2),
                   kRoiEpisodesDomain);
  TrainConfig train;
  train.l1_embedding = 1e-3;
  train.temperature = 0.7;
  Objective obj = objective_from_perception(e, scene, trace, train);
  obj.terms.push_back(LossTerm{EpisodicContext{*trace.time, extra, true}, {e.id("Dog"), e.id("Sparky")}, {}, 0.5});
  return {std::move(e), std::move(obj)};
}

inline std::string scenario_path(const std::string& name) { return std::string(TBRAIN_SCENARIO_DIR) + "/" + name; }

// Chaining fixture after its facts have been trained in.
struct Chaining {
  Engine engine;
  ChainConfig chain;
};

inline Chaining trained_chaining() {
  const Scenario sc = load_scenario(scenario_path("chaining.json"));
  Engine e = Engine::create(sc.config);
  train_full_batch(e, facts_objective(sc, e, e.config.learning), e.config.learning);
  ChainConfig chain;
  chain.chain_domains = sc.chain_domains;
  return {std::move(e), std::move(chain)};
}

// Same engine with Dog's embedding and bias removed.
inline Engine without(const Engine& e, const std::string& name) {
  Engine out = e;
  out.embeddings.column(e.id(name)).setZero();
  out.embeddings.a0[e.id(name).value] = 0.0;
  return out;
}

// Fraction of seeded 2-hop chains from `start` that end at `target`.
inline double chain_frequency(const Engine& e, const ChainConfig& chain, const std::string& start,
                              const std::string& target, int runs) {
  int hits = 0;
  for (int r = 0; r < runs; ++r) {
    Rng rng(static_cast<std::uint64_t>(r), "chain-run");
    hits += chain_query(e.id(start), 2, e, chain, rng).back() == e.id(target) ? 1 : 0;
  }
  return hits / static_cast<double>(runs);
}

// Two-scene fixture: both scenes perceived once, giving episodes t0 and t1.
struct TwoScenes {
  Engine engine;
  IndexId t1;
  IndexId t2;
};

inline TwoScenes munich_scenes() {
  const Scenario sc = load_scenario(scenario_path("munich.json"));
  Engine e = Engine::create(sc.config);
  const auto scenes = resolve_scenes(sc, e);
  const IndexId t1 = *perceive_scene(generate_scene(e.world, scenes[0], 1), e, e.config.perception, 1).time;
  const IndexId t2 = *perceive_scene(generate_scene(e.world, scenes[1], 2), e, e.config.perception, 2).time;
  return {std::move(e), t1, t2};
}

}  // namespace fixture
