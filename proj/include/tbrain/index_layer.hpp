#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tbrain/codec.hpp"
#include "tbrain/state.hpp"

namespace tbrain {

class Rng;

enum class IndexKind : std::uint8_t { Concept, Predicate, Episodic };

std::string_view to_string(IndexKind kind);
IndexKind parse_index_kind(std::string_view text);

/// Opaque key of a symbolic index. Ids are dense: id.value is also the
/// column of the index in the EmbeddingStore.
struct IndexId {
  std::uint32_t value = 0;

  auto operator<=>(const IndexId&) const = default;
};

struct IndexInfo {
  IndexId id;
  IndexKind kind = IndexKind::Concept;
  std::string name;
  std::string domain;  // empty when the index belongs to no domain
};

/// A mutually exclusive label set normalized by one softmax. Member order is
/// the order of the logits/probability vectors over the domain.
struct Domain {
  std::string name;
  std::vector<IndexId> members;

  [[nodiscard]] std::size_t size() const { return members.size(); }
  [[nodiscard]] bool empty() const { return members.empty(); }
  /// Position of id in members, if present.
  [[nodiscard]] std::optional<std::size_t> position(IndexId id) const;
};

class IndexRegistry {
 public:
  /// Throws DuplicateNameError when (kind, name) already exists.
  IndexId add(IndexKind kind, std::string name);

  void add_domain(std::string name);
  /// Appends id to the domain. An index may belong to one domain only.
  void assign(IndexId id, const std::string& domain);

  [[nodiscard]] const IndexInfo& info(IndexId id) const;
  [[nodiscard]] bool contains(IndexId id) const { return id.value < indices_.size(); }
  [[nodiscard]] std::optional<IndexId> find(IndexKind kind, std::string_view name) const;
  /// Looks a name up across kinds (concept, predicate, then episodic).
  [[nodiscard]] IndexId lookup(std::string_view name) const;
  [[nodiscard]] IndexId lookup(IndexKind kind, std::string_view name) const;

  [[nodiscard]] bool has_domain(std::string_view name) const;
  [[nodiscard]] const Domain& domain(std::string_view name) const;
  /// Domain of id, or nullptr.
  [[nodiscard]] const Domain* domain_of(IndexId id) const;

  [[nodiscard]] std::size_t size() const { return indices_.size(); }
  [[nodiscard]] const std::vector<IndexInfo>& indices() const { return indices_; }
  [[nodiscard]] const std::vector<Domain>& domains() const { return domains_; }
  [[nodiscard]] const std::string& name(IndexId id) const { return info(id).name; }

  bool operator==(const IndexRegistry& other) const;

 private:
  std::vector<IndexInfo> indices_;
  std::vector<Domain> domains_;
  std::map<std::pair<IndexKind, std::string>, IndexId> by_name_;
};

bool operator==(const IndexInfo& a, const IndexInfo& b);
bool operator==(const Domain& a, const Domain& b);

/// Column k of `a` is the embedding a_k of index k; a0[k] its bias. The same
/// column is read bottom-up (logits) and written top-down (state update).
struct EmbeddingStore {
  Matrix a;   // n x K
  Vector a0;  // K

  EmbeddingStore() = default;
  explicit EmbeddingStore(Eigen::Index n) : a(n, 0), a0(0) {}

  [[nodiscard]] Eigen::Index n() const { return a.rows(); }
  [[nodiscard]] Eigen::Index size() const { return a.cols(); }
  [[nodiscard]] auto column(IndexId id) const { return a.col(static_cast<Eigen::Index>(id.value)); }
  [[nodiscard]] auto column(IndexId id) { return a.col(static_cast<Eigen::Index>(id.value)); }
  [[nodiscard]] double bias(IndexId id) const { return a0[static_cast<Eigen::Index>(id.value)]; }

  /// Appends a column; its position must equal the id just issued by the registry.
  void append(const Vector& column, double bias);

  bool operator==(const EmbeddingStore& other) const;
};

struct UpdateParams {
  double alpha = 1.0;
  double beta = 1.0;
  double temperature = 1.0;
};

/// Softmax of logits / temperature with max-subtraction. Throws
/// ParameterError for temperature <= 0 and DomainError for empty input.
Vector softmax(const Vector& logits, double temperature = 1.0);

/// Lowest position of the maximum (ties resolved toward the front).
std::size_t argmax_position(const Vector& values);

/// Inverse-CDF draw of a position from a probability vector.
std::size_t sample_position(const Vector& probabilities, Rng& rng);

/// a0[k] + a_k . gamma for every member of dom, in member order.
Vector logits(const RepresentationState& state, const EmbeddingStore& emb, const Domain& dom);

Vector decode_distribution(const RepresentationState& state, const EmbeddingStore& emb, const Domain& dom,
                           double temperature = 1.0);

IndexId sample_index(const RepresentationState& state, const EmbeddingStore& emb, const Domain& dom,
                     double temperature, Rng& rng);
IndexId sample_index(const RepresentationState& state, const EmbeddingStore& emb, const Domain& dom,
                     double temperature, std::uint64_t seed);

/// pre' = alpha * pre + beta * a_k. Throws LookupError for unknown k.
RepresentationState topdown_update(const RepresentationState& state, const EmbeddingStore& emb, IndexId k,
                                   const UpdateParams& params);

struct MultiSampleResult {
  RepresentationState state;
  std::vector<IndexId> samples;  // in sampling order
};

/// Repeated {sample_index; topdown_update}; every draw conditions on the
/// state left by the previous ones.
MultiSampleResult multi_sample_update(const RepresentationState& state, const EmbeddingStore& emb, const Domain& dom,
                                      int rounds, const UpdateParams& params, Rng& rng);
MultiSampleResult multi_sample_update(const RepresentationState& state, const EmbeddingStore& emb, const Domain& dom,
                                      int rounds, const UpdateParams& params, std::uint64_t seed);

/// pre' = pre + sum_k a_k p_k with p = softmax over dom, computed from the
/// input state's post-activations.
RepresentationState attention_update(const RepresentationState& state, const EmbeddingStore& emb,
                                     const Domain& dom);

/// Sensory input followed by attention. A null or empty domain skips attention.
RepresentationState input_and_attention(const RepresentationState& state, const Vector& features,
                                        const Encoder& enc, const EmbeddingStore& emb, const Domain* dom);

}  // namespace tbrain
