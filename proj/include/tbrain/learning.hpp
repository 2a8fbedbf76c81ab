#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "tbrain/engine.hpp"
#include "tbrain/trace.hpp"
#include "tbrain/world.hpp"

namespace tbrain {

class Rng;

/// Perception: h = g(v_roi) + x + f(sig(x)) with x = g(v_scene). Without an
/// ROI (scene-level labels) h = g(v_scene).
struct PerceptionContext {
  Vector scene_features;
  std::optional<Vector> roi_features;
};

/// Episodic: h = a_t + f(sig(a_t)) (+ a_roi when a per-ROI index exists).
/// With evolve = false, h = a_t: the scene-level labels drawn right after the cue.
struct EpisodicContext {
  IndexId t;
  std::optional<IndexId> t_roi;
  bool evolve = true;
};

/// Semantic: the first conditioning vector is a_s + abar + f(sig(abar)).
struct SemanticContext {
  IndexId s;
};

using LossContext = std::variant<PerceptionContext, EpisodicContext, SemanticContext>;

enum class LossMode : std::uint8_t { Perception, Episodic, Semantic, Reconstruction };

std::string_view to_string(LossMode mode);

/// One event of the objective. Label j is scored against the softmax of its
/// own domain, conditioned on h plus the embeddings of labels 1..j-1. With a
/// reconstruction target the term is instead 0.5 |v - D sig(c) - d|^2 where
/// c = h + sum of all label embeddings.
struct LossTerm {
  LossContext context;
  std::vector<IndexId> labels;
  std::optional<Vector> reconstruction_target;
  double weight = 1.0;

  [[nodiscard]] LossMode mode() const;
};

struct Objective {
  std::vector<LossTerm> terms;
  double l1_embedding = 0.0;  // applied to every embedding column except abar
  double temperature = 1.0;
};

struct LossBreakdown {
  double perception = 0.0;
  double episodic = 0.0;
  double semantic = 0.0;
  double reconstruction = 0.0;
  double l1 = 0.0;

  [[nodiscard]] double total() const { return perception + episodic + semantic + reconstruction + l1; }
};

/// h of a context, evaluated with the current parameters.
Vector conditioning_vector(const LossContext& context, const Engine& engine);

LossBreakdown evaluate(const Objective& objective, const Engine& engine);
double total_loss(const Objective& objective, const Engine& engine);

/// Negative log-likelihood of an ordered label list. Throws ParameterError on
/// an empty list and DomainError for a label without a domain.
double loss_perception(const Vector& roi_features, const Vector& scene_features, const std::vector<IndexId>& labels,
                       const Engine& engine, double temperature = 1.0);
double loss_episodic(IndexId t, const std::vector<IndexId>& labels, const Engine& engine, double temperature = 1.0,
                     std::optional<IndexId> t_roi = std::nullopt);
double loss_semantic(IndexId s, const std::vector<IndexId>& labels, const Engine& engine, double temperature = 1.0);
/// 0.5 |features - reconstruct(state)|^2.
double loss_reconstruction(const Vector& features, const RepresentationState& state, const Decoder& decoder);

/// Gradients of an objective, shaped like the parameters. The prior column
/// of d_embeddings stays zero; its gradient is d_abar.
struct GradientSet {
  Matrix d_embeddings;
  Vector d_a0;
  Encoder d_encoder;
  Decoder d_decoder;
  EvolutionNetwork d_evolution;
  Vector d_abar;

  static GradientSet zeros(const Engine& engine);

  [[nodiscard]] bool finite() const;
  [[nodiscard]] double norm_embeddings() const;
  [[nodiscard]] double norm_encoder() const;
  [[nodiscard]] double norm_decoder() const;
  [[nodiscard]] double norm_evolution() const;
};

GradientSet gradients(const Objective& objective, const Engine& engine);

/// Which parameters a gradient step may change.
struct ParameterMask {
  std::optional<std::set<IndexId>> columns;  // nullopt: every embedding column
  bool biases = true;
  bool encoder = true;
  bool decoder = true;
  bool evolution = true;
  bool abar = true;

  static ParameterMask only_columns(std::set<IndexId> ids);
};

/// theta <- theta - lr * grad on the unmasked parameters.
void apply_gradients(Engine& engine, const GradientSet& grads, double learning_rate, const ParameterMask& mask = {});

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::string worst_parameter;
  std::size_t checked = 0;
};

/// Relative error |a - b| / max(|a|, |b|, floor).
double relative_error(double analytic, double numeric, double floor = 1e-6);

/// Central finite differences over every scalar parameter.
GradCheckReport grad_check(const Objective& objective, const Engine& engine, double epsilon = 1e-5,
                           double floor = 1e-6);

/// Self-generated training targets of a perceived event: perception terms for
/// the scene, every ROI and every predicate ROI; episodic terms when an
/// episode was formed; semantic terms from each ROI subject to its other
/// labels and to (predicate, object); reconstruction of every ROI.
Objective objective_from_perception(const Engine& engine, const SceneInstance& scene, const PerceptionTrace& trace,
                                    const TrainConfig& config);

/// Episodic terms from the labels of an episodic recall of t.
Objective objective_from_recall(const Engine& engine, const RecallTrace& trace, const TrainConfig& config);

struct TrainReport {
  std::uint64_t step = 0;
  std::optional<IndexId> episode;
  LossBreakdown before;
  LossBreakdown after;
  double grad_norm_embeddings = 0.0;
  double grad_norm_encoder = 0.0;
  double grad_norm_decoder = 0.0;
  double grad_norm_evolution = 0.0;
  std::size_t triples = 0;
};

nlohmann::json to_json(const TrainReport& report);

/// Parameters a TrainConfig allows to change.
ParameterMask training_mask(const TrainConfig& config);

/// rounds_per_event gradient steps on an objective; fills losses and norms.
TrainReport descend(Engine& engine, const Objective& objective, const TrainConfig& config,
                    const ParameterMask& mask);
TrainReport descend(Engine& engine, const Objective& objective, const TrainConfig& config);

/// Perceive the scene, record its triples and statistics, then train on the
/// sampled labels as targets.
TrainReport self_supervised_round(Engine& engine, const SceneInstance& scene, const TrainConfig& config, Rng& rng);

/// Episodic recall of t followed by training on the recalled labels: recall
/// changes the memory it reads.
TrainReport train_on_recall(Engine& engine, IndexId t, const TrainConfig& config, Rng& rng);

/// config.steps rounds over the scenes in turn, each generated afresh from
/// the world with its own seed.
std::vector<TrainReport> train(Engine& engine, const std::vector<SceneSpec>& scenes, const TrainConfig& config);

/// config.steps full-batch gradient steps on a fixed objective.
std::vector<TrainReport> train_full_batch(Engine& engine, const Objective& objective, const TrainConfig& config);

/// Appends a new index with the given embedding (zero when absent) and bias 0,
/// assigning it to `domain` when non-empty. Throws DuplicateNameError.
IndexId create_index(IndexRegistry& registry, EmbeddingStore& emb, IndexKind kind, const std::string& name,
                     const std::optional<Vector>& init = std::nullopt, const std::string& domain = {});

}  // namespace tbrain
