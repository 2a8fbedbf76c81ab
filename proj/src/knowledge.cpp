#include "tbrain/knowledge.hpp"

#include <cmath>

#include "tbrain/errors.hpp"

namespace tbrain {

KnowledgeGraph::KnowledgeGraph(const KnowledgeGraph& other) {
  std::lock_guard lock(other.mu_);
  triples_ = other.triples_;
  counts_ = other.counts_;
}

KnowledgeGraph& KnowledgeGraph::operator=(const KnowledgeGraph& other) {
  if (this != &other) {
    std::scoped_lock lock(mu_, other.mu_);
    triples_ = other.triples_;
    counts_ = other.counts_;
  }
  return *this;
}

void KnowledgeGraph::add(const Triple& triple, std::uint64_t count) {
  std::lock_guard lock(mu_);
  triples_[triple] += count;
}

void KnowledgeGraph::record(IndexId context, const std::string& domain, IndexId label, std::uint64_t count) {
  std::lock_guard lock(mu_);
  counts_[EventKey{context, domain, label}] += count;
}

std::uint64_t KnowledgeGraph::count(const Triple& triple) const {
  std::lock_guard lock(mu_);
  const auto it = triples_.find(triple);
  return it == triples_.end() ? 0 : it->second;
}

std::uint64_t KnowledgeGraph::count(IndexId context, const std::string& domain, IndexId label) const {
  std::lock_guard lock(mu_);
  const auto it = counts_.find(EventKey{context, domain, label});
  return it == counts_.end() ? 0 : it->second;
}

std::uint64_t KnowledgeGraph::total(IndexId context, const std::string& domain) const {
  std::lock_guard lock(mu_);
  std::uint64_t sum = 0;
  for (auto it = counts_.lower_bound(EventKey{context, domain, IndexId{0}}); it != counts_.end(); ++it) {
    if (std::get<0>(it->first) != context || std::get<1>(it->first) != domain) {
      break;
    }
    sum += it->second;
  }
  return sum;
}

std::map<Triple, std::uint64_t> KnowledgeGraph::triples() const {
  std::lock_guard lock(mu_);
  return triples_;
}

std::map<KnowledgeGraph::EventKey, std::uint64_t> KnowledgeGraph::cooccurrence() const {
  std::lock_guard lock(mu_);
  return counts_;
}

bool KnowledgeGraph::operator==(const KnowledgeGraph& other) const {
  if (this == &other) {
    return true;
  }
  std::scoped_lock lock(mu_, other.mu_);
  return triples_ == other.triples_ && counts_ == other.counts_;
}

void record_label_event(KnowledgeGraph& kg, IndexId context, const Domain& dom, IndexId label) {
  if (!dom.position(label)) {
    throw DomainError("label " + std::to_string(label.value) + " is not a member of domain '" + dom.name + "'");
  }
  kg.record(context, dom.name, label);
}

double conditional_probability(const KnowledgeGraph& kg, IndexId context, const Domain& dom, IndexId label) {
  std::uint64_t denominator = 0;
  for (const IndexId k : dom.members) {
    denominator += kg.count(context, dom.name, k);
  }
  if (denominator == 0) {
    throw UndefinedProbabilityError("no label events recorded for context " + std::to_string(context.value) +
                                    " in domain '" + dom.name + "'");
  }
  return static_cast<double>(kg.count(context, dom.name, label)) / static_cast<double>(denominator);
}

double SymbolicMatrix::weight(IndexId s, IndexId k) const {
  const auto it = b.find({s, k});
  return it == b.end() ? 0.0 : it->second;
}

double SymbolicMatrix::offset(IndexId k) const {
  const auto it = b0.find(k);
  return it == b0.end() ? 0.0 : it->second;
}

SymbolicMatrix build_symbolic_matrix(const KnowledgeGraph& kg, const IndexRegistry& registry, double smoothing) {
  if (!(smoothing > 0.0)) {
    throw ParameterError("symbolic smoothing must be positive");
  }
  SymbolicMatrix matrix;
  std::map<std::pair<IndexId, std::string>, bool> seen;
  for (const auto& [key, count] : kg.cooccurrence()) {
    seen[{std::get<0>(key), std::get<1>(key)}] = true;
  }
  for (const auto& [ctx_dom, unused] : seen) {
    const auto& [context, domain_name] = ctx_dom;
    if (!registry.has_domain(domain_name)) {
      continue;
    }
    const Domain& dom = registry.domain(domain_name);
    if (dom.empty()) {
      continue;
    }
    double mean = 0.0;
    for (const IndexId k : dom.members) {
      mean += static_cast<double>(kg.count(context, domain_name, k)) + smoothing;
    }
    mean /= static_cast<double>(dom.size());
    for (const IndexId k : dom.members) {
      const double c = static_cast<double>(kg.count(context, domain_name, k)) + smoothing;
      matrix.b[{context, k}] = std::log(c) - std::log(mean);
    }
  }
  return matrix;
}

Vector symbolic_decode(IndexId s, const Domain& dom, const SymbolicMatrix& matrix, double temperature) {
  if (dom.empty()) {
    throw DomainError("domain '" + dom.name + "' has no members");
  }
  Vector z(static_cast<Eigen::Index>(dom.size()));
  for (std::size_t i = 0; i < dom.size(); ++i) {
    z[static_cast<Eigen::Index>(i)] = matrix.offset(dom.members[i]) + matrix.weight(s, dom.members[i]);
  }
  return softmax(z, temperature);
}

void EpisodicStore::add(IndexId id, EpisodeMeta meta) {
  if (entries_.contains(id)) {
    throw DuplicateNameError("episode " + std::to_string(id.value) + " already stored");
  }
  entries_.emplace(id, std::move(meta));
}

const EpisodeMeta& EpisodicStore::at(IndexId id) const {
  const auto it = entries_.find(id);
  if (it == entries_.end()) {
    throw LookupError("index " + std::to_string(id.value) + " is not a stored episode");
  }
  return it->second;
}

}  // namespace tbrain
