#include "tbrain/index_layer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tbrain/errors.hpp"
#include "tbrain/rng.hpp"

namespace tbrain {

std::string_view to_string(IndexKind kind) {
  switch (kind) {
    case IndexKind::Concept:
      return "concept";
    case IndexKind::Predicate:
      return "predicate";
    case IndexKind::Episodic:
      return "episodic";
  }
  return "concept";
}

IndexKind parse_index_kind(std::string_view text) {
  if (text == "concept") return IndexKind::Concept;
  if (text == "predicate") return IndexKind::Predicate;
  if (text == "episodic") return IndexKind::Episodic;
  throw ConfigError("unknown index kind '" + std::string(text) + "'");
}

std::optional<std::size_t> Domain::position(IndexId id) const {
  const auto it = std::find(members.begin(), members.end(), id);
  if (it == members.end()) {
    return std::nullopt;
  }
  return static_cast<std::size_t>(it - members.begin());
}

bool operator==(const IndexInfo& a, const IndexInfo& b) {
  return a.id == b.id && a.kind == b.kind && a.name == b.name && a.domain == b.domain;
}

bool operator==(const Domain& a, const Domain& b) { return a.name == b.name && a.members == b.members; }

IndexId IndexRegistry::add(IndexKind kind, std::string name) {
  if (name.empty()) {
    throw ConfigError("index names must be non-empty");
  }
  auto key = std::make_pair(kind, name);
  if (by_name_.contains(key)) {
    throw DuplicateNameError("duplicate " + std::string(to_string(kind)) + " index '" + name + "'");
  }
  const IndexId id{static_cast<std::uint32_t>(indices_.size())};
  indices_.push_back(IndexInfo{id, kind, std::move(name), {}});
  by_name_.emplace(std::move(key), id);
  return id;
}

void IndexRegistry::add_domain(std::string name) {
  if (has_domain(name)) {
    throw DuplicateNameError("duplicate domain '" + name + "'");
  }
  domains_.push_back(Domain{std::move(name), {}});
}

void IndexRegistry::assign(IndexId id, const std::string& domain_name) {
  if (!contains(id)) {
    throw LookupError("unknown index id " + std::to_string(id.value));
  }
  auto& entry = indices_[id.value];
  if (!entry.domain.empty()) {
    throw DomainError("index '" + entry.name + "' already belongs to domain '" + entry.domain + "'");
  }
  auto it = std::find_if(domains_.begin(), domains_.end(), [&](const Domain& d) { return d.name == domain_name; });
  if (it == domains_.end()) {
    throw LookupError("unknown domain '" + domain_name + "'");
  }
  it->members.push_back(id);
  entry.domain = domain_name;
}

const IndexInfo& IndexRegistry::info(IndexId id) const {
  if (!contains(id)) {
    throw LookupError("unknown index id " + std::to_string(id.value));
  }
  return indices_[id.value];
}

std::optional<IndexId> IndexRegistry::find(IndexKind kind, std::string_view name) const {
  const auto it = by_name_.find(std::make_pair(kind, std::string(name)));
  if (it == by_name_.end()) {
    return std::nullopt;
  }
  return it->second;
}

IndexId IndexRegistry::lookup(std::string_view name) const {
  for (const auto kind : {IndexKind::Concept, IndexKind::Predicate, IndexKind::Episodic}) {
    if (const auto id = find(kind, name)) {
      return *id;
    }
  }
  throw LookupError("unknown index '" + std::string(name) + "'");
}

IndexId IndexRegistry::lookup(IndexKind kind, std::string_view name) const {
  if (const auto id = find(kind, name)) {
    return *id;
  }
  throw LookupError("unknown " + std::string(to_string(kind)) + " index '" + std::string(name) + "'");
}

bool IndexRegistry::has_domain(std::string_view name) const {
  return std::any_of(domains_.begin(), domains_.end(), [&](const Domain& d) { return d.name == name; });
}

const Domain& IndexRegistry::domain(std::string_view name) const {
  for (const auto& d : domains_) {
    if (d.name == name) {
      return d;
    }
  }
  throw LookupError("unknown domain '" + std::string(name) + "'");
}

const Domain* IndexRegistry::domain_of(IndexId id) const {
  const auto& entry = info(id);
  if (entry.domain.empty()) {
    return nullptr;
  }
  return &domain(entry.domain);
}

bool IndexRegistry::operator==(const IndexRegistry& other) const {
  return indices_ == other.indices_ && domains_ == other.domains_;
}

void EmbeddingStore::append(const Vector& column, double bias) {
  if (column.size() != n()) {
    throw ConfigError("embedding column has dimension " + std::to_string(column.size()) + ", expected " +
                      std::to_string(n()));
  }
  const Eigen::Index k = size();
  a.conservativeResize(Eigen::NoChange, k + 1);
  a.col(k) = column;
  a0.conservativeResize(k + 1);
  a0[k] = bias;
}

bool EmbeddingStore::operator==(const EmbeddingStore& other) const {
  return a.rows() == other.a.rows() && a.cols() == other.a.cols() && a == other.a && a0 == other.a0;
}

Vector softmax(const Vector& logits, double temperature) {
  if (!(temperature > 0.0)) {
    throw ParameterError("softmax temperature must be positive");
  }
  if (logits.size() == 0) {
    throw DomainError("softmax over an empty domain");
  }
  const Vector scaled = logits / temperature;
  const double top = scaled.maxCoeff();
  Vector p = (scaled.array() - top).exp().matrix();
  return p / p.sum();
}

std::size_t argmax_position(const Vector& values) {
  std::size_t best = 0;
  for (Eigen::Index i = 1; i < values.size(); ++i) {
    if (values[i] > values[static_cast<Eigen::Index>(best)]) {
      best = static_cast<std::size_t>(i);
    }
  }
  return best;
}

std::size_t sample_position(const Vector& probabilities, Rng& rng) {
  if (probabilities.size() == 0) {
    throw DomainError("cannot sample from an empty distribution");
  }
  const double u = rng.uniform() * probabilities.sum();
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (Eigen::Index i = 0; i < probabilities.size(); ++i) {
    if (probabilities[i] > 0.0) {
      last_positive = static_cast<std::size_t>(i);
    }
    cumulative += probabilities[i];
    if (u < cumulative) {
      return static_cast<std::size_t>(i);
    }
  }
  return last_positive;
}

Vector logits(const RepresentationState& state, const EmbeddingStore& emb, const Domain& dom) {
  if (dom.empty()) {
    throw DomainError("domain '" + dom.name + "' has no members");
  }
  if (emb.n() != state.n()) {
    throw ConfigError("embedding dimension does not match state dimension");
  }
  Vector out(static_cast<Eigen::Index>(dom.size()));
  for (std::size_t i = 0; i < dom.size(); ++i) {
    const IndexId k = dom.members[i];
    if (static_cast<Eigen::Index>(k.value) >= emb.size()) {
      throw LookupError("index " + std::to_string(k.value) + " has no embedding");
    }
    out[static_cast<Eigen::Index>(i)] = emb.bias(k) + emb.column(k).dot(state.post);
  }
  return out;
}

Vector decode_distribution(const RepresentationState& state, const EmbeddingStore& emb, const Domain& dom,
                           double temperature) {
  if (!(temperature > 0.0)) {
    throw ParameterError("temperature must be positive");
  }
  return softmax(logits(state, emb, dom), temperature);
}

IndexId sample_index(const RepresentationState& state, const EmbeddingStore& emb, const Domain& dom,
                     double temperature, Rng& rng) {
  const Vector p = decode_distribution(state, emb, dom, temperature);
  return dom.members[sample_position(p, rng)];
}

IndexId sample_index(const RepresentationState& state, const EmbeddingStore& emb, const Domain& dom,
                     double temperature, std::uint64_t seed) {
  Rng rng(seed, "sampling");
  return sample_index(state, emb, dom, temperature, rng);
}

RepresentationState topdown_update(const RepresentationState& state, const EmbeddingStore& emb, IndexId k,
                                   const UpdateParams& params) {
  if (static_cast<Eigen::Index>(k.value) >= emb.size()) {
    throw LookupError("index " + std::to_string(k.value) + " has no embedding");
  }
  if (emb.n() != state.n()) {
    throw ConfigError("embedding dimension does not match state dimension");
  }
  // The degenerate weightings are taken literally so that they hold bitwise.
  if (params.beta == 0.0) {
    return RepresentationState::from_pre(params.alpha == 1.0 ? state.pre : Vector(params.alpha * state.pre));
  }
  const Vector added = params.beta == 1.0 ? Vector(emb.column(k)) : Vector(params.beta * emb.column(k));
  if (params.alpha == 0.0) {
    return RepresentationState::from_pre(added);
  }
  if (params.alpha == 1.0) {
    return RepresentationState::from_pre(state.pre + added);
  }
  return RepresentationState::from_pre(params.alpha * state.pre + added);
}

MultiSampleResult multi_sample_update(const RepresentationState& state, const EmbeddingStore& emb, const Domain& dom,
                                      int rounds, const UpdateParams& params, Rng& rng) {
  if (rounds < 1) {
    throw ParameterError("multi_sample_update needs at least one round");
  }
  MultiSampleResult result{state, {}};
  result.samples.reserve(static_cast<std::size_t>(rounds));
  for (int r = 0; r < rounds; ++r) {
    const IndexId k = sample_index(result.state, emb, dom, params.temperature, rng);
    result.state = topdown_update(result.state, emb, k, params);
    result.samples.push_back(k);
  }
  return result;
}

MultiSampleResult multi_sample_update(const RepresentationState& state, const EmbeddingStore& emb, const Domain& dom,
                                      int rounds, const UpdateParams& params, std::uint64_t seed) {
  Rng rng(seed, "sampling");
  return multi_sample_update(state, emb, dom, rounds, params, rng);
}

RepresentationState attention_update(const RepresentationState& state, const EmbeddingStore& emb,
                                     const Domain& dom) {
  const Vector p = decode_distribution(state, emb, dom, 1.0);
  Vector delta = Vector::Zero(state.n());
  for (std::size_t i = 0; i < dom.size(); ++i) {
    delta += p[static_cast<Eigen::Index>(i)] * emb.column(dom.members[i]);
  }
  return RepresentationState::from_pre(state.pre + delta);
}

RepresentationState input_and_attention(const RepresentationState& state, const Vector& features,
                                        const Encoder& enc, const EmbeddingStore& emb, const Domain* dom) {
  RepresentationState next = encode_input(state, enc, features);
  if (dom != nullptr && !dom->empty()) {
    next = attention_update(next, emb, *dom);
  }
  return next;
}

}  // namespace tbrain
