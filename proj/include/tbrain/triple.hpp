#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string_view>

#include "tbrain/index_layer.hpp"

namespace tbrain {

enum class TripleSource : std::uint8_t { Perception, EpisodicRecall, SemanticRecall };

std::string_view to_string(TripleSource source);
TripleSource parse_triple_source(std::string_view text);

/// (subject, predicate, object); `time` is the episodic index the statement
/// was generated under, when there is one.
struct Triple {
  IndexId subject;
  IndexId predicate;
  IndexId object;
  TripleSource source = TripleSource::Perception;
  std::optional<IndexId> time;

  auto operator<=>(const Triple&) const = default;
};

}  // namespace tbrain
