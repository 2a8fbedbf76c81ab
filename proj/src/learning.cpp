#include "tbrain/learning.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "tbrain/errors.hpp"
#include "tbrain/memory.hpp"
#include "tbrain/perception.hpp"
#include "tbrain/rng.hpp"

namespace tbrain {

std::string_view to_string(LossMode mode) {
  switch (mode) {
    case LossMode::Perception: return "perception";
    case LossMode::Episodic: return "episodic";
    case LossMode::Semantic: return "semantic";
    case LossMode::Reconstruction: return "reconstruction";
  }
  return "unknown";
}

LossMode LossTerm::mode() const {
  if (reconstruction_target) {
    return LossMode::Reconstruction;
  }
  switch (context.index()) {
    case 0: return LossMode::Perception;
    case 1: return LossMode::Episodic;
    default: return LossMode::Semantic;
  }
}

namespace {

Vector sigmoid_slope(const Vector& gamma) { return (gamma.array() * (1.0 - gamma.array())).matrix(); }

/// Backpropagates dout through x -> f(sig(x)); accumulates network gradients
/// and returns d/dx.
Vector increment_backward(const Vector& x, const EvolutionNetwork& net, const Vector& dout, EvolutionNetwork& d) {
  const Vector u = sigmoid(x);
  const Vector hid = sigmoid(Vector(net.w_in * u + net.b_hidden));
  d.w_out.noalias() += dout * hid.transpose();
  d.b_out += dout;
  const Vector dz = ((net.w_out.transpose() * dout).array() * sigmoid_slope(hid).array()).matrix();
  d.w_in.noalias() += dz * u.transpose();
  d.b_hidden += dz;
  return ((net.w_in.transpose() * dz).array() * sigmoid_slope(u).array()).matrix();
}

void check_index(const Engine& engine, IndexId id) {
  if (!engine.registry.contains(id)) {
    throw LookupError("unknown index " + std::to_string(id.value));
  }
}

void context_backward(const LossContext& context, const Engine& engine, const Vector& dh, GradientSet& g) {
  if (const auto* p = std::get_if<PerceptionContext>(&context)) {
    const Vector x = engine.encoder.encode(p->scene_features);
    Vector dx = dh;
    if (p->roi_features) {
      g.d_encoder.w.noalias() += dh * p->roi_features->transpose();
      g.d_encoder.b += dh;
      dx += increment_backward(x, engine.evolution, dh, g.d_evolution);
    }
    g.d_encoder.w.noalias() += dx * p->scene_features.transpose();
    g.d_encoder.b += dx;
  } else if (const auto* e = std::get_if<EpisodicContext>(&context)) {
    Vector dt = dh;
    if (e->evolve) {
      dt += increment_backward(engine.embeddings.column(e->t), engine.evolution, dh, g.d_evolution);
    }
    g.d_embeddings.col(e->t.value) += dt;
    if (e->t_roi) {
      g.d_embeddings.col(e->t_roi->value) += dh;
    }
  } else {
    const auto& s = std::get<SemanticContext>(context);
    g.d_embeddings.col(s.s.value) += dh;
    g.d_abar += dh + increment_backward(engine.abar(), engine.evolution, dh, g.d_evolution);
  }
}

const Domain& label_domain(const Engine& engine, IndexId label) {
  check_index(engine, label);
  const Domain* dom = engine.registry.domain_of(label);
  if (dom == nullptr) {
    throw DomainError("label '" + engine.name(label) + "' belongs to no domain");
  }
  return *dom;
}

/// Value of one term; accumulates its gradient into g when given.
double term_value(const LossTerm& term, const Engine& engine, double temperature, GradientSet* g) {
  const Vector h = conditioning_vector(term.context, engine);
  const auto& A = engine.embeddings.a;
  const double w = term.weight;

  if (term.reconstruction_target) {
    Vector c = h;
    for (IndexId l : term.labels) {
      check_index(engine, l);
      c += A.col(l.value);
    }
    const Vector gamma = sigmoid(c);
    const Vector r = engine.decoder.decode(gamma) - *term.reconstruction_target;
    if (g != nullptr) {
      g->d_decoder.w.noalias() += w * r * gamma.transpose();
      g->d_decoder.b += w * r;
      const Vector dc = ((w * (engine.decoder.w.transpose() * r)).array() * sigmoid_slope(gamma).array()).matrix();
      for (IndexId l : term.labels) {
        g->d_embeddings.col(l.value) += dc;
      }
      context_backward(term.context, engine, dc, *g);
    }
    return w * 0.5 * r.squaredNorm();
  }

  if (term.labels.empty()) {
    throw ParameterError("loss term has no labels");
  }
  if (temperature <= 0.0) {
    throw ParameterError("temperature must be positive");
  }
  const std::size_t m = term.labels.size();
  std::vector<Vector> dcs;
  Vector c = h;
  double loss = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const IndexId label = term.labels[j];
    const Domain& dom = label_domain(engine, label);
    const std::size_t pos = *dom.position(label);
    const Vector gamma = sigmoid(c);
    Vector z(static_cast<Eigen::Index>(dom.size()));
    for (std::size_t i = 0; i < dom.size(); ++i) {
      const auto col = static_cast<Eigen::Index>(dom.members[i].value);
      z[static_cast<Eigen::Index>(i)] = engine.embeddings.a0[col] + A.col(col).dot(gamma);
    }
    const Vector scaled = z / temperature;
    const double mx = scaled.maxCoeff();
    const double lse = mx + std::log((scaled.array() - mx).exp().sum());
    loss -= scaled[static_cast<Eigen::Index>(pos)] - lse;
    if (g != nullptr) {
      Vector dz = (scaled.array() - lse).exp().matrix();
      dz[static_cast<Eigen::Index>(pos)] -= 1.0;
      dz *= w / temperature;
      Vector dgamma = Vector::Zero(h.size());
      for (std::size_t i = 0; i < dom.size(); ++i) {
        const auto col = static_cast<Eigen::Index>(dom.members[i].value);
        const double dzi = dz[static_cast<Eigen::Index>(i)];
        g->d_embeddings.col(col) += dzi * gamma;
        g->d_a0[col] += dzi;
        dgamma += dzi * A.col(col);
      }
      dcs.push_back((dgamma.array() * sigmoid_slope(gamma).array()).matrix());
    }
    c += A.col(label.value);
  }
  if (g != nullptr) {
    // c_j = h + sum_{i<j} a_{l_i}: label i receives the gradients of every later step.
    Vector later = Vector::Zero(h.size());
    Vector dh = Vector::Zero(h.size());
    for (std::size_t j = m; j-- > 0;) {
      g->d_embeddings.col(term.labels[j].value) += later;
      later += dcs[j];
      dh += dcs[j];
    }
    context_backward(term.context, engine, dh, *g);
  }
  return w * loss;
}

double l1_value(const Engine& engine, double l1) {
  if (l1 == 0.0) {
    return 0.0;
  }
  const auto& A = engine.embeddings.a;
  return l1 * (A.array().abs().sum() - A.col(engine.prior.value).array().abs().sum());
}

}  // namespace

Vector conditioning_vector(const LossContext& context, const Engine& engine) {
  if (const auto* p = std::get_if<PerceptionContext>(&context)) {
    const Vector x = engine.encoder.encode(p->scene_features);
    if (!p->roi_features) {
      return x;
    }
    return engine.encoder.encode(*p->roi_features) + x + evolution_increment(x, engine.evolution);
  }
  if (const auto* e = std::get_if<EpisodicContext>(&context)) {
    check_index(engine, e->t);
    if (e->t == engine.prior) {
      throw ParameterError("the prior index is not an episode");
    }
    Vector h = engine.embeddings.column(e->t);
    if (e->evolve) {
      h += evolution_increment(h, engine.evolution);
    }
    if (e->t_roi) {
      check_index(engine, *e->t_roi);
      h += engine.embeddings.column(*e->t_roi);
    }
    return h;
  }
  const auto& s = std::get<SemanticContext>(context);
  check_index(engine, s.s);
  if (s.s == engine.prior) {
    throw ParameterError("the prior index is not a concept");
  }
  const Vector abar = engine.abar();
  return engine.embeddings.column(s.s) + abar + evolution_increment(abar, engine.evolution);
}

LossBreakdown evaluate(const Objective& objective, const Engine& engine) {
  LossBreakdown out;
  for (const auto& term : objective.terms) {
    const double v = term_value(term, engine, objective.temperature, nullptr);
    switch (term.mode()) {
      case LossMode::Perception: out.perception += v; break;
      case LossMode::Episodic: out.episodic += v; break;
      case LossMode::Semantic: out.semantic += v; break;
      case LossMode::Reconstruction: out.reconstruction += v; break;
    }
  }
  out.l1 = l1_value(engine, objective.l1_embedding);
  return out;
}

double total_loss(const Objective& objective, const Engine& engine) { return evaluate(objective, engine).total(); }

double loss_perception(const Vector& roi_features, const Vector& scene_features, const std::vector<IndexId>& labels,
                       const Engine& engine, double temperature) {
  const LossTerm term{PerceptionContext{scene_features, roi_features}, labels, std::nullopt, 1.0};
  return term_value(term, engine, temperature, nullptr);
}

double loss_episodic(IndexId t, const std::vector<IndexId>& labels, const Engine& engine, double temperature,
                     std::optional<IndexId> t_roi) {
  const LossTerm term{EpisodicContext{t, t_roi, true}, labels, std::nullopt, 1.0};
  return term_value(term, engine, temperature, nullptr);
}

double loss_semantic(IndexId s, const std::vector<IndexId>& labels, const Engine& engine, double temperature) {
  const LossTerm term{SemanticContext{s}, labels, std::nullopt, 1.0};
  return term_value(term, engine, temperature, nullptr);
}

double loss_reconstruction(const Vector& features, const RepresentationState& state, const Decoder& decoder) {
  if (features.size() != decoder.d() || state.n() != decoder.n()) {
    throw ConfigError("reconstruction dimensions do not match the decoder");
  }
  return 0.5 * (features - reconstruct(state, decoder)).squaredNorm();
}

GradientSet GradientSet::zeros(const Engine& engine) {
  GradientSet g;
  g.d_embeddings = Matrix::Zero(engine.embeddings.a.rows(), engine.embeddings.a.cols());
  g.d_a0 = Vector::Zero(engine.embeddings.a0.size());
  g.d_encoder = Encoder(engine.encoder.n(), engine.encoder.d());
  g.d_decoder = Decoder(engine.decoder.d(), engine.decoder.n());
  g.d_evolution = EvolutionNetwork(engine.evolution.n(), engine.evolution.hidden());
  g.d_abar = Vector::Zero(engine.n());
  return g;
}

bool GradientSet::finite() const {
  return d_embeddings.allFinite() && d_a0.allFinite() && d_encoder.w.allFinite() && d_encoder.b.allFinite() &&
         d_decoder.w.allFinite() && d_decoder.b.allFinite() && d_evolution.w_in.allFinite() &&
         d_evolution.b_hidden.allFinite() && d_evolution.w_out.allFinite() && d_evolution.b_out.allFinite() &&
         d_abar.allFinite();
}

double GradientSet::norm_embeddings() const {
  return std::sqrt(d_embeddings.squaredNorm() + d_a0.squaredNorm() + d_abar.squaredNorm());
}

double GradientSet::norm_encoder() const { return std::sqrt(d_encoder.w.squaredNorm() + d_encoder.b.squaredNorm()); }

double GradientSet::norm_decoder() const { return std::sqrt(d_decoder.w.squaredNorm() + d_decoder.b.squaredNorm()); }

double GradientSet::norm_evolution() const {
  return std::sqrt(d_evolution.w_in.squaredNorm() + d_evolution.b_hidden.squaredNorm() +
                   d_evolution.w_out.squaredNorm() + d_evolution.b_out.squaredNorm());
}

GradientSet gradients(const Objective& objective, const Engine& engine) {
  GradientSet g = GradientSet::zeros(engine);
  for (const auto& term : objective.terms) {
    term_value(term, engine, objective.temperature, &g);
  }
  if (objective.l1_embedding != 0.0) {
    g.d_embeddings += objective.l1_embedding * engine.embeddings.a.array().sign().matrix();
    g.d_embeddings.col(engine.prior.value).setZero();
  }
  return g;
}

ParameterMask ParameterMask::only_columns(std::set<IndexId> ids) {
  ParameterMask mask;
  mask.columns = std::move(ids);
  mask.biases = false;
  mask.encoder = false;
  mask.decoder = false;
  mask.evolution = false;
  mask.abar = false;
  return mask;
}

void apply_gradients(Engine& engine, const GradientSet& grads, double learning_rate, const ParameterMask& mask) {
  if (learning_rate == 0.0) {
    return;
  }
  auto& emb = engine.embeddings;
  if (grads.d_embeddings.cols() != emb.size() || grads.d_embeddings.rows() != emb.n()) {
    throw ConfigError("gradient shape does not match the embeddings");
  }
  if (mask.columns) {
    for (IndexId id : *mask.columns) {
      if (id == engine.prior) {
        continue;
      }
      emb.column(id) -= learning_rate * grads.d_embeddings.col(id.value);
    }
  } else {
    emb.a -= learning_rate * grads.d_embeddings;
  }
  if (mask.biases) {
    emb.a0 -= learning_rate * grads.d_a0;
  }
  if (mask.abar) {
    emb.column(engine.prior) -= learning_rate * grads.d_abar;
  }
  if (mask.encoder) {
    engine.encoder.w -= learning_rate * grads.d_encoder.w;
    engine.encoder.b -= learning_rate * grads.d_encoder.b;
  }
  if (mask.decoder) {
    engine.decoder.w -= learning_rate * grads.d_decoder.w;
    engine.decoder.b -= learning_rate * grads.d_decoder.b;
  }
  if (mask.evolution) {
    auto& net = engine.evolution;
    net.w_in -= learning_rate * grads.d_evolution.w_in;
    net.b_hidden -= learning_rate * grads.d_evolution.b_hidden;
    net.w_out -= learning_rate * grads.d_evolution.w_out;
    net.b_out -= learning_rate * grads.d_evolution.b_out;
  }
}

double relative_error(double analytic, double numeric, double floor) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

GradCheckReport grad_check(const Objective& objective, const Engine& engine, double epsilon, double floor) {
  const GradientSet g = gradients(objective, engine);
  Engine probe = engine;
  GradCheckReport report;

  auto check = [&](const std::string& name, double& param, double analytic) {
    const double saved = param;
    param = saved + epsilon;
    const double up = total_loss(objective, probe);
    param = saved - epsilon;
    const double down = total_loss(objective, probe);
    param = saved;
    const double err = relative_error(analytic, (up - down) / (2.0 * epsilon), floor);
    ++report.checked;
    if (err > report.max_relative_error || report.worst_parameter.empty()) {
      report.max_relative_error = err;
      report.worst_parameter = name;
    }
  };
  auto check_matrix = [&](const std::string& name, auto& param, const auto& grad) {
    for (Eigen::Index c = 0; c < param.cols(); ++c) {
      for (Eigen::Index r = 0; r < param.rows(); ++r) {
        check(name + "[" + std::to_string(r) + "," + std::to_string(c) + "]", param(r, c), grad(r, c));
      }
    }
  };

  auto& emb = probe.embeddings;
  for (Eigen::Index k = 0; k < emb.size(); ++k) {
    const IndexId id{static_cast<std::uint32_t>(k)};
    const std::string name = "embedding:" + probe.name(id);
    for (Eigen::Index r = 0; r < emb.n(); ++r) {
      const double analytic = id == probe.prior ? g.d_abar[r] : g.d_embeddings(r, k);
      check(name + "[" + std::to_string(r) + "]", emb.a(r, k), analytic);
    }
    check("bias:" + probe.name(id), emb.a0[k], g.d_a0[k]);
  }
  check_matrix("encoder.w", probe.encoder.w, g.d_encoder.w);
  check_matrix("encoder.b", probe.encoder.b, g.d_encoder.b);
  check_matrix("decoder.w", probe.decoder.w, g.d_decoder.w);
  check_matrix("decoder.b", probe.decoder.b, g.d_decoder.b);
  check_matrix("evolution.w_in", probe.evolution.w_in, g.d_evolution.w_in);
  check_matrix("evolution.b_hidden", probe.evolution.b_hidden, g.d_evolution.b_hidden);
  check_matrix("evolution.w_out", probe.evolution.w_out, g.d_evolution.w_out);
  check_matrix("evolution.b_out", probe.evolution.b_out, g.d_evolution.b_out);
  return report;
}

namespace {

std::vector<IndexId> sampled(const std::vector<const LabelEvent*>& events) {
  std::vector<IndexId> out;
  for (const LabelEvent* e : events) {
    if (!e->forced) {
      out.push_back(e->label);
    }
  }
  return out;
}

void push_term(Objective& objective, LossContext context, std::vector<IndexId> labels, double weight) {
  if (weight != 0.0 && !labels.empty()) {
    objective.terms.push_back(LossTerm{std::move(context), std::move(labels), std::nullopt, weight});
  }
}

}  // namespace

Objective objective_from_perception(const Engine& engine, const SceneInstance& scene, const PerceptionTrace& trace,
                                    const TrainConfig& config) {
  const auto& w = config.weights;
  const std::string& entity = engine.config.perception.entity_domain;
  Objective obj;
  obj.temperature = config.temperature;
  obj.l1_embedding = config.l1_embedding;

  push_term(obj, PerceptionContext{scene.scene_features, std::nullopt}, sampled(trace.segment(Stage::Scene, -1)),
            w.perception);
  if (trace.time) {
    push_term(obj, EpisodicContext{*trace.time, std::nullopt, false}, sampled(trace.segment(Stage::Scene, -1)),
              w.episodic);
  }

  std::map<std::size_t, IndexId> subjects;
  for (std::size_t i = 0; i < trace.rois.size() && i < scene.rois.size(); ++i) {
    const auto labels = sampled(trace.segment(Stage::Roi, static_cast<int>(i)));
    const PerceptionContext context{scene.scene_features, scene.rois[i].features};
    push_term(obj, context, labels, w.perception);
    if (trace.time) {
      push_term(obj, EpisodicContext{*trace.time, trace.rois[i].episode, true}, labels, w.episodic);
    }
    if (w.reconstruction != 0.0) {
      obj.terms.push_back(LossTerm{context, labels, scene.rois[i].features, w.reconstruction});
    }
    std::optional<IndexId> subject;
    std::vector<IndexId> attributes;
    for (const LabelEvent* e : trace.segment(Stage::Roi, static_cast<int>(i))) {
      if (e->forced) {
        continue;
      }
      if (!subject && e->domain == entity) {
        subject = e->label;
      } else if (!subject || e->label != *subject) {
        attributes.push_back(e->label);
      }
    }
    if (subject) {
      subjects[i] = *subject;
      push_term(obj, SemanticContext{*subject}, attributes, w.semantic);
    }
  }

  for (std::size_t j = 0; j < trace.relations.size() && j < scene.relations.size(); ++j) {
    const auto labels = sampled(trace.segment(Stage::Predicate, static_cast<int>(j)));
    push_term(obj, PerceptionContext{scene.scene_features, scene.relations[j].features}, labels, w.perception);
    if (trace.time) {
      push_term(obj, EpisodicContext{*trace.time, trace.relations[j].episode, true}, labels, w.episodic);
    }
    const auto& rel = trace.relations[j];
    const auto s = subjects.find(static_cast<std::size_t>(rel.subject_roi));
    const auto o = subjects.find(static_cast<std::size_t>(rel.object_roi));
    if (s != subjects.end() && o != subjects.end() && !labels.empty()) {
      push_term(obj, SemanticContext{s->second}, {labels.front(), o->second}, w.semantic);
    }
  }
  return obj;
}

Objective objective_from_recall(const Engine& engine, const RecallTrace& trace, const TrainConfig& config) {
  (void)engine;
  Objective obj;
  obj.temperature = config.temperature;
  obj.l1_embedding = config.l1_embedding;
  if (!trace.time) {
    return obj;
  }
  const IndexId t = *trace.time;
  const double w = config.weights.episodic;
  push_term(obj, EpisodicContext{t, std::nullopt, false}, sampled(trace.segment(Stage::Scene, -1)), w);
  for (std::size_t i = 0; i < trace.rois.size(); ++i) {
    push_term(obj, EpisodicContext{t, trace.rois[i].episode, true},
              sampled(trace.segment(Stage::Roi, static_cast<int>(i))), w);
  }
  for (std::size_t j = 0; j < trace.relations.size(); ++j) {
    push_term(obj, EpisodicContext{t, trace.relations[j].episode, true},
              sampled(trace.segment(Stage::Predicate, static_cast<int>(j))), w);
  }
  return obj;
}

nlohmann::json to_json(const TrainReport& report) {
  auto losses = [](const LossBreakdown& b) {
    return nlohmann::json{{"perception", b.perception},         {"episodic", b.episodic},
                          {"semantic", b.semantic},             {"reconstruction", b.reconstruction},
                          {"l1", b.l1},                         {"total", b.total()}};
  };
  nlohmann::json j{{"step", report.step},
                   {"loss_before", losses(report.before)},
                   {"loss_after", losses(report.after)},
                   {"grad_norm",
                    {{"embeddings", report.grad_norm_embeddings},
                     {"encoder", report.grad_norm_encoder},
                     {"decoder", report.grad_norm_decoder},
                     {"evolution", report.grad_norm_evolution}}},
                   {"triples", report.triples}};
  j["episode"] = report.episode ? nlohmann::json(report.episode->value) : nlohmann::json(nullptr);
  return j;
}

TrainReport descend(Engine& engine, const Objective& objective, const TrainConfig& config,
                    const ParameterMask& mask) {
  TrainReport report;
  report.before = evaluate(objective, engine);
  for (int r = 0; r < config.rounds_per_event; ++r) {
    const GradientSet g = gradients(objective, engine);
    if (r == 0) {
      report.grad_norm_embeddings = g.norm_embeddings();
      report.grad_norm_encoder = g.norm_encoder();
      report.grad_norm_decoder = g.norm_decoder();
      report.grad_norm_evolution = g.norm_evolution();
    }
    apply_gradients(engine, g, config.learning_rate, mask);
  }
  report.after = evaluate(objective, engine);
  return report;
}

ParameterMask training_mask(const TrainConfig& config) {
  ParameterMask mask;
  mask.encoder = config.train_encoder;
  mask.evolution = config.train_evolution;
  return mask;
}

TrainReport descend(Engine& engine, const Objective& objective, const TrainConfig& config) {
  return descend(engine, objective, config, training_mask(config));
}

TrainReport self_supervised_round(Engine& engine, const SceneInstance& scene, const TrainConfig& config, Rng& rng) {
  const std::uint64_t step = engine.clock;
  const PerceptionTrace trace = perceive_scene(scene, engine, engine.config.perception, rng);
  const TripleOptions options = triple_options(engine.config.perception);
  const auto extraction = triples_from_trace(trace, engine.registry, engine.type_predicate, options, &engine.kg);
  record_trace_statistics(engine.kg, trace, engine.registry, options);
  const Objective objective = objective_from_perception(engine, scene, trace, config);
  TrainReport report = descend(engine, objective, config);
  report.step = step;
  report.episode = trace.time;
  report.triples = extraction.triples.size();
  return report;
}

TrainReport train_on_recall(Engine& engine, IndexId t, const TrainConfig& config, Rng& rng) {
  const RecallTrace trace = episodic_recall(engine, t, episodic_recall_config(engine, t), rng);
  TrainReport report = descend(engine, objective_from_recall(engine, trace, config), config);
  report.step = engine.clock;
  report.episode = t;
  return report;
}

std::vector<TrainReport> train(Engine& engine, const std::vector<SceneSpec>& scenes, const TrainConfig& config) {
  if (scenes.empty() && config.steps > 0) {
    throw ConfigError("training needs at least one scene");
  }
  std::vector<TrainReport> reports;
  const Rng world_seeds(config.seed, "train");
  const Rng perception(config.seed, "perception");
  for (int step = 0; step < config.steps; ++step) {
    const auto s = static_cast<std::uint64_t>(step);
    const SceneSpec& spec = scenes[s % scenes.size()];
    const SceneInstance scene = generate_scene(engine.world, spec, world_seeds.substream(s).key());
    Rng rng = perception.substream(s);
    TrainReport report = self_supervised_round(engine, scene, config, rng);
    report.step = s;
    reports.push_back(report);
  }
  return reports;
}

std::vector<TrainReport> train_full_batch(Engine& engine, const Objective& objective, const TrainConfig& config) {
  TrainConfig one = config;
  one.rounds_per_event = 1;
  std::vector<TrainReport> reports;
  for (int step = 0; step < config.steps; ++step) {
    TrainReport report = descend(engine, objective, one);
    report.step = static_cast<std::uint64_t>(step);
    reports.push_back(report);
  }
  return reports;
}

IndexId create_index(IndexRegistry& registry, EmbeddingStore& emb, IndexKind kind, const std::string& name,
                     const std::optional<Vector>& init, const std::string& domain) {
  if (init && init->size() != emb.n()) {
    throw ConfigError("initial embedding has the wrong dimension");
  }
  if (!domain.empty() && !registry.has_domain(domain)) {
    throw DomainError("unknown domain '" + domain + "'");
  }
  const IndexId id = registry.add(kind, name);
  emb.append(init ? *init : Vector::Zero(emb.n()), 0.0);
  if (!domain.empty()) {
    registry.assign(id, domain);
  }
  return id;
}

}  // namespace tbrain
