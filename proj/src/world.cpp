#include "tbrain/world.hpp"

#include <string>

#include "tbrain/errors.hpp"
#include "tbrain/rng.hpp"

namespace tbrain {

std::string_view to_string(TripleSource source) {
  switch (source) {
    case TripleSource::Perception:
      return "perception";
    case TripleSource::EpisodicRecall:
      return "episodic-recall";
    case TripleSource::SemanticRecall:
      return "semantic-recall";
  }
  return "perception";
}

TripleSource parse_triple_source(std::string_view text) {
  if (text == "perception") return TripleSource::Perception;
  if (text == "episodic-recall") return TripleSource::EpisodicRecall;
  if (text == "semantic-recall") return TripleSource::SemanticRecall;
  throw ConfigError("unknown triple source '" + std::string(text) + "'");
}

const Vector& SyntheticWorld::signature(IndexId id) const {
  const auto it = signatures.find(id);
  if (it == signatures.end()) {
    throw LookupError("no world signature for index " + std::to_string(id.value));
  }
  return it->second;
}

bool SyntheticWorld::operator==(const SyntheticWorld& other) const {
  if (noise_sigma != other.noise_sigma || d != other.d || seed != other.seed ||
      type_predicate != other.type_predicate || signatures.size() != other.signatures.size()) {
    return false;
  }
  for (const auto& [id, sig] : signatures) {
    const auto it = other.signatures.find(id);
    if (it == other.signatures.end() || it->second.size() != sig.size() || it->second != sig) {
      return false;
    }
  }
  return true;
}

namespace {

Vector noise(Eigen::Index d, double sigma, Rng& rng) {
  Vector v(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    v[i] = sigma * rng.normal();
  }
  return v;
}

}  // namespace

SceneInstance generate_scene(const SyntheticWorld& world, const SceneSpec& spec, std::uint64_t seed) {
  Rng rng(seed, "world");
  SceneInstance scene;
  scene.name = spec.name;

  Vector roi_sum = Vector::Zero(world.d);
  for (const auto& roi_spec : spec.rois) {
    RoiInstance roi;
    roi.features = Vector::Zero(world.d);
    for (const IndexId c : roi_spec.concepts) {
      roi.features += world.signature(c);
    }
    roi.features += noise(world.d, world.noise_sigma, rng);
    roi.true_concepts = roi_spec.concepts;
    roi_sum += roi.features;
    if (!roi_spec.concepts.empty()) {
      for (std::size_t i = 1; i < roi_spec.concepts.size(); ++i) {
        scene.ground_truth.push_back(
            Triple{roi_spec.concepts.front(), world.type_predicate, roi_spec.concepts[i], TripleSource::Perception, {}});
      }
    }
    scene.rois.push_back(std::move(roi));
  }

  scene.scene_features = spec.rois.empty() ? Vector(Vector::Zero(world.d))
                                           : Vector(roi_sum / static_cast<double>(spec.rois.size()));
  for (const IndexId c : spec.scene_concepts) {
    scene.scene_features += world.signature(c);
  }
  scene.scene_features += noise(world.d, world.noise_sigma, rng);

  for (const auto& rel : spec.relations) {
    if (rel.subject_roi >= scene.rois.size() || rel.object_roi >= scene.rois.size()) {
      throw ConfigError("relation in scene '" + spec.name + "' references a missing ROI");
    }
    RelationInstance inst;
    inst.subject_roi = rel.subject_roi;
    inst.object_roi = rel.object_roi;
    inst.features = scene.rois[rel.subject_roi].features + scene.rois[rel.object_roi].features +
                    world.signature(rel.predicate) + noise(world.d, world.noise_sigma, rng);
    inst.true_predicate = rel.predicate;
    const auto& subj = spec.rois[rel.subject_roi].concepts;
    const auto& obj = spec.rois[rel.object_roi].concepts;
    if (!subj.empty() && !obj.empty()) {
      scene.ground_truth.push_back(Triple{subj.front(), rel.predicate, obj.front(), TripleSource::Perception, {}});
    }
    scene.relations.push_back(std::move(inst));
  }
  return scene;
}

SceneInstance scrub_ground_truth(SceneInstance scene) {
  scene.ground_truth.clear();
  for (auto& roi : scene.rois) {
    roi.true_concepts.clear();
  }
  for (auto& rel : scene.relations) {
    rel.true_predicate.reset();
  }
  return scene;
}

}  // namespace tbrain
