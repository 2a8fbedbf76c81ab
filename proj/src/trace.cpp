#include "tbrain/trace.hpp"

namespace tbrain {

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::Scene:
      return "scene";
    case Stage::Roi:
      return "roi";
    case Stage::Predicate:
      return "predicate";
    case Stage::Relation:
      return "relation";
  }
  return "scene";
}

namespace {

bool same(const Vector& a, const Vector& b) { return a.size() == b.size() && a == b; }

}  // namespace

bool LabelEvent::operator==(const LabelEvent& other) const {
  return step == other.step && stage == other.stage && segment == other.segment && domain == other.domain &&
         label == other.label && forced == other.forced && same(distribution, other.distribution) &&
         same(pre_before, other.pre_before) && same(pre_after, other.pre_after);
}

bool RoiRecord::operator==(const RoiRecord& other) const {
  return same(pre_input, other.pre_input) && episode == other.episode;
}

std::vector<const LabelEvent*> Trace::segment(Stage stage, int index) const {
  std::vector<const LabelEvent*> out;
  for (const auto& e : events) {
    if (e.stage == stage && e.segment == index) {
      out.push_back(&e);
    }
  }
  return out;
}

bool Trace::operator==(const Trace& other) const {
  return source == other.source && time == other.time && subject == other.subject &&
         same(event_pre, other.event_pre) && rois == other.rois && relations == other.relations &&
         events == other.events;
}

std::vector<nlohmann::json> trace_records(const Trace& trace, const IndexRegistry& registry) {
  std::vector<nlohmann::json> out;
  out.reserve(trace.events.size());
  for (const auto& e : trace.events) {
    nlohmann::json rec{
        {"step", e.step},
        {"stage", std::string(to_string(e.stage))},
        {"segment", e.segment},
        {"domain", e.domain},
        {"index", registry.name(e.label)},
        {"forced", e.forced},
        {"pre_norm_before", e.pre_before.norm()},
        {"pre_norm_after", e.pre_after.norm()},
    };
    if (e.distribution.size() > 0) {
      const auto pos = registry.domain(e.domain).position(e.label);
      rec["probability"] = pos ? e.distribution[static_cast<Eigen::Index>(*pos)] : 0.0;
    }
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace tbrain
