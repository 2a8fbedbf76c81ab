#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include "tbrain/index_layer.hpp"
#include "tbrain/triple.hpp"

namespace tbrain {

/// Triples with occurrence counts, plus label co-occurrence statistics keyed by
/// (context, domain, label). Recording is internally synchronized; increments
/// commute, so concurrent recorders give the same totals in any order.
class KnowledgeGraph {
 public:
  using EventKey = std::tuple<IndexId, std::string, IndexId>;

  KnowledgeGraph() = default;
  KnowledgeGraph(const KnowledgeGraph& other);
  KnowledgeGraph& operator=(const KnowledgeGraph& other);

  void add(const Triple& triple, std::uint64_t count = 1);
  void record(IndexId context, const std::string& domain, IndexId label, std::uint64_t count = 1);

  [[nodiscard]] std::uint64_t count(const Triple& triple) const;
  [[nodiscard]] std::uint64_t count(IndexId context, const std::string& domain, IndexId label) const;
  /// Sum of counts over all labels recorded for (context, domain).
  [[nodiscard]] std::uint64_t total(IndexId context, const std::string& domain) const;

  [[nodiscard]] std::map<Triple, std::uint64_t> triples() const;
  [[nodiscard]] std::map<EventKey, std::uint64_t> cooccurrence() const;

  bool operator==(const KnowledgeGraph& other) const;

 private:
  mutable std::mutex mu_;
  std::map<Triple, std::uint64_t> triples_;
  std::map<EventKey, std::uint64_t> counts_;
};

void record_label_event(KnowledgeGraph& kg, IndexId context, const Domain& dom, IndexId label);

/// count(context, dom, label) / sum over dom. Throws UndefinedProbabilityError
/// when nothing has been recorded for (context, dom).
double conditional_probability(const KnowledgeGraph& kg, IndexId context, const Domain& dom, IndexId label);

/// Index-to-index weights b[s, k] and offsets b0[k]; absent entries read as 0.
struct SymbolicMatrix {
  std::map<std::pair<IndexId, IndexId>, double> b;
  std::map<IndexId, double> b0;

  [[nodiscard]] double weight(IndexId s, IndexId k) const;
  [[nodiscard]] double offset(IndexId k) const;
  bool operator==(const SymbolicMatrix& other) const = default;
};

/// Count-based log-odds: b[s,k] = log(count + smoothing) - log(mean over the
/// domain of count + smoothing), so the symbolic softmax reproduces smoothed
/// conditional frequencies.
SymbolicMatrix build_symbolic_matrix(const KnowledgeGraph& kg, const IndexRegistry& registry,
                                     double smoothing = 1.0);

/// softmax over dom of (b0[k] + b[s,k]) / T. Embeddings play no part.
Vector symbolic_decode(IndexId s, const Domain& dom, const SymbolicMatrix& matrix, double temperature = 1.0);

struct EpisodeMeta {
  std::uint64_t step = 0;
  std::string tag;
  std::size_t roi_count = 0;
  std::vector<std::pair<std::size_t, std::size_t>> relations;  // (subject ROI, object ROI)
  std::vector<IndexId> roi_episodes;                          // per-ROI sub-indices, if formed
  std::vector<IndexId> relation_episodes;                     // per predicate ROI, if formed

  bool operator==(const EpisodeMeta& other) const = default;
};

/// Metadata of the episodic engrams; the embeddings themselves live in the
/// EmbeddingStore.
class EpisodicStore {
 public:
  void add(IndexId id, EpisodeMeta meta);
  [[nodiscard]] bool contains(IndexId id) const { return entries_.contains(id); }
  [[nodiscard]] const EpisodeMeta& at(IndexId id) const;
  [[nodiscard]] const std::map<IndexId, EpisodeMeta>& entries() const { return entries_; }
  [[nodiscard]] std::size_t size() const { return entries_.size(); }

  bool operator==(const EpisodicStore& other) const = default;

 private:
  std::map<IndexId, EpisodeMeta> entries_;
};

}  // namespace tbrain
