#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tbrain/index_layer.hpp"
#include "tbrain/triple.hpp"

namespace tbrain {

class Rng;

/// Synthetic sensory modality: every concept and predicate owns a feature
/// signature of length d; percepts are sums of signatures plus Gaussian noise.
struct SyntheticWorld {
  std::map<IndexId, Vector> signatures;
  double noise_sigma = 0.0;
  Eigen::Index d = 0;
  std::uint64_t seed = 0;
  IndexId type_predicate;

  [[nodiscard]] const Vector& signature(IndexId id) const;
  bool operator==(const SyntheticWorld& other) const;
};

struct RoiSpec {
  /// The first concept is the entity the ROI shows; the rest are its attributes.
  std::vector<IndexId> concepts;
};

struct RelationSpec {
  std::size_t subject_roi = 0;
  IndexId predicate;
  std::size_t object_roi = 0;
};

struct SceneSpec {
  std::string name;
  std::vector<IndexId> scene_concepts;  // scene-level labels, e.g. location and weather
  std::vector<RoiSpec> rois;
  std::vector<RelationSpec> relations;
};

struct RoiInstance {
  Vector features;
  std::vector<IndexId> true_concepts;  // evaluation only
};

/// A predicate ROI enclosing two entity ROIs.
struct RelationInstance {
  std::size_t subject_roi = 0;
  std::size_t object_roi = 0;
  Vector features;
  std::optional<IndexId> true_predicate;  // evaluation only
};

struct SceneInstance {
  std::string name;
  Vector scene_features;
  std::vector<RoiInstance> rois;
  std::vector<RelationInstance> relations;
  std::vector<Triple> ground_truth;  // evaluation only
};

/// ROI features are the sum of the ROI's concept signatures plus noise; scene
/// features are the mean ROI feature plus scene-concept signatures plus noise;
/// relation features are the two member ROIs plus the predicate signature.
SceneInstance generate_scene(const SyntheticWorld& world, const SceneSpec& spec, std::uint64_t seed);

/// Copy of the scene with every evaluation-only field cleared.
SceneInstance scrub_ground_truth(SceneInstance scene);

}  // namespace tbrain
