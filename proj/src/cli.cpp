#include "tbrain/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include "tbrain/cognition.hpp"
#include "tbrain/errors.hpp"
#include "tbrain/learning.hpp"
#include "tbrain/memory.hpp"
#include "tbrain/perception.hpp"
#include "tbrain/rng.hpp"
#include "tbrain/scenario.hpp"
#include "tbrain/snapshot.hpp"

namespace tbrain {

using nlohmann::json;

namespace {

constexpr double kGradTolerance = 1e-4;

json triple_json(const Triple& t, const Engine& engine) {
  return json{{"subject", engine.name(t.subject)},
              {"predicate", engine.name(t.predicate)},
              {"object", engine.name(t.object)},
              {"source", std::string(to_string(t.source))},
              {"time", t.time ? json(engine.name(*t.time)) : json(nullptr)}};
}

std::vector<std::string> sampled_names(const Engine& engine, const Trace& trace) {
  std::vector<std::string> names;
  for (const auto& e : trace.events) {
    if (!e.forced) {
      names.push_back(engine.name(e.label));
    }
  }
  return names;
}

void write_line(std::ostream& os, json j) { os << j.dump() << '\n'; }

/// Label records and extracted triples of a trace.
void write_trace(std::ostream& os, const Engine& engine, const Trace& trace, const std::vector<Triple>& triples) {
  for (auto rec : trace_records(trace, engine.registry)) {
    rec["type"] = "label";
    write_line(os, std::move(rec));
  }
  for (const auto& t : triples) {
    auto rec = triple_json(t, engine);
    rec["type"] = "triple";
    write_line(os, std::move(rec));
  }
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) {
        throw IoError("cannot write '" + path + "'");
      }
      stream_ = file_.get();
    }
  }
  std::ostream& get() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

struct Common {
  std::string scenario;
  std::string snapshot;
  std::string out;
  std::uint64_t seed = 1;
  std::optional<int> steps;
  std::optional<std::uint64_t> config_seed;
};

/// Self-supervised rounds over the scenes, then full-batch steps on the facts.
void train_scenario(Engine& engine, const Scenario& scenario, const std::vector<SceneSpec>& scenes,
                    const TrainConfig& config, std::ostream& os) {
  auto emit = [&](const TrainReport& report, const char* phase) {
    auto rec = to_json(report);
    rec["type"] = "train";
    rec["phase"] = phase;
    if (report.episode) {
      rec["episode"] = engine.name(*report.episode);
    }
    write_line(os, std::move(rec));
  };
  if (!scenes.empty()) {
    for (const auto& report : train(engine, scenes, config)) {
      emit(report, "scenes");
    }
  }
  if (!scenario.facts.empty()) {
    for (const auto& report : train_full_batch(engine, facts_objective(scenario, engine, config), config)) {
      emit(report, "facts");
    }
  }
}

Scenario scenario_with_overrides(const Common& c) {
  Scenario s = load_scenario(c.scenario);
  if (c.config_seed) {
    s.config.seed = *c.config_seed;
    s.config.learning.seed = *c.config_seed;
  }
  if (c.steps) {
    s.config.learning.steps = *c.steps;
  }
  s.config.validate();
  return s;
}

int cmd_simulate(const Common& c, std::ostream& stdout_) {
  const Scenario scenario = scenario_with_overrides(c);
  Engine engine = Engine::create(scenario.config);
  const auto scenes = resolve_scenes(scenario, engine);
  Output out(c.out, stdout_);

  train_scenario(engine, scenario, scenes, engine.config.learning, out.get());

  const auto& p = engine.config.perception;
  const TripleOptions options = triple_options(p);
  if (engine.registry.has_domain(p.entity_domain)) {
    const Rng recall_seeds(engine.config.seed, "simulate-recall");
    std::uint64_t i = 0;
    for (IndexId s : engine.domain(p.entity_domain).members) {
      Rng rng = recall_seeds.substream(i++);
      const auto trace = semantic_recall(engine, s, semantic_recall_config(engine), rng);
      const auto extraction = triples_from_trace(trace, engine.registry, engine.type_predicate, options);
      json triples = json::array();
      for (const auto& t : extraction.triples) {
        triples.push_back(triple_json(t, engine));
      }
      write_line(out.get(), json{{"type", "semantic-recall"},
                                 {"cue", engine.name(s)},
                                 {"labels", sampled_names(engine, trace)},
                                 {"triples", triples}});
    }
  }

  if (scenario.script) {
    std::map<std::string, SceneSpec> by_name;
    for (const auto& spec : scenes) {
      by_name.emplace(spec.name, spec);
    }
    TaskRunner runner(engine, by_name, ChainConfig{scenario.chain_domains, p.update, false}, engine.config.seed);
    for (auto rec : runner.run(*scenario.script)) {
      rec["type"] = "task";
      write_line(out.get(), std::move(rec));
    }
  }

  std::uint64_t triple_count = 0;
  for (const auto& [t, count] : engine.kg.triples()) {
    triple_count += count;
  }
  write_line(out.get(), json{{"type", "summary"},
                             {"episodes", engine.episodes.size()},
                             {"indices", engine.registry.size()},
                             {"triples", triple_count}});
  if (!c.snapshot.empty()) {
    engine.refresh_symbolic();
    save_snapshot(engine, c.snapshot);
  }
  return kExitOk;
}

int cmd_train(const Common& c, const std::string& snapshot_in, std::ostream& stdout_) {
  const Scenario scenario = scenario_with_overrides(c);
  Engine engine = snapshot_in.empty() ? Engine::create(scenario.config) : load_snapshot(snapshot_in);
  TrainConfig config = snapshot_in.empty() ? engine.config.learning : scenario.config.learning;
  const auto scenes = resolve_scenes(scenario, engine);
  Output out(c.out, stdout_);
  train_scenario(engine, scenario, scenes, config, out.get());
  engine.refresh_symbolic();
  save_snapshot(engine, c.snapshot);
  return kExitOk;
}

int cmd_perceive(const Common& c, const std::string& scene_name, bool save, std::ostream& stdout_) {
  Engine engine = load_snapshot(c.snapshot);
  const Scenario scenario = load_scenario(c.scenario);
  std::optional<SceneSpec> spec;
  for (const auto& s : scenario.scenes) {
    if (s.name == scene_name) {
      spec = resolve_scene(s, engine);
    }
  }
  if (!spec) {
    throw LookupError("scenario has no scene '" + scene_name + "'");
  }
  const SceneInstance scene = generate_scene(engine.world, *spec, Rng(c.seed, "world").key());
  Rng rng(c.seed, "perception");
  const auto trace = perceive_scene(scene, engine, engine.config.perception, rng);
  const auto extraction = triples_from_trace(trace, engine.registry, engine.type_predicate,
                                             triple_options(engine.config.perception), &engine.kg);
  record_trace_statistics(engine.kg, trace, engine.registry, triple_options(engine.config.perception));
  Output out(c.out, stdout_);
  write_trace(out.get(), engine, trace, extraction.triples);
  if (save) {
    engine.refresh_symbolic();
    save_snapshot(engine, c.snapshot);
  }
  return kExitOk;
}

int cmd_recall(const Common& c, const std::string& episodic, const std::string& semantic, std::ostream& stdout_) {
  const Engine engine = load_snapshot(c.snapshot);
  Rng rng(c.seed, "recall");
  RecallTrace trace;
  if (!episodic.empty()) {
    const auto t = engine.registry.find(IndexKind::Episodic, episodic);
    if (!t) {
      throw LookupError("no episodic index '" + episodic + "'");
    }
    trace = episodic_recall(engine, *t, episodic_recall_config(engine, *t), rng);
  } else {
    const auto s = engine.registry.find(IndexKind::Concept, semantic);
    if (!s) {
      throw LookupError("no concept index '" + semantic + "'");
    }
    trace = semantic_recall(engine, *s, semantic_recall_config(engine), rng);
  }
  const auto extraction = triples_from_trace(trace, engine.registry, engine.type_predicate,
                                             triple_options(engine.config.perception));
  Output out(c.out, stdout_);
  write_trace(out.get(), engine, trace, extraction.triples);
  for (const auto& w : extraction.warnings) {
    write_line(out.get(), json{{"type", "warning"}, {"message", w}});
  }
  return kExitOk;
}

int cmd_query(const Common& c, const std::string& start, int hops, const std::vector<std::string>& domains,
              std::ostream& stdout_) {
  const Engine engine = load_snapshot(c.snapshot);
  const auto s = engine.registry.find(IndexKind::Concept, start);
  if (!s) {
    throw LookupError("no concept index '" + start + "'");
  }
  Rng rng(c.seed, "query");
  const auto chain = chain_query(*s, hops, engine, ChainConfig{domains, engine.config.perception.update, false}, rng);
  std::vector<std::string> names;
  for (IndexId k : chain) {
    names.push_back(engine.name(k));
  }
  Output out(c.out, stdout_);
  json rec{{"type", "chain"}, {"chain", names}};
  if (chain.size() > 1) {
    rec["direct_probability"] = direct_probability(engine, *s, chain.back(), engine.config.perception.update.temperature);
  }
  write_line(out.get(), std::move(rec));
  return kExitOk;
}

int cmd_export(const Common& c, std::ostream& stdout_) {
  const Engine engine = load_snapshot(c.snapshot);
  Output out(c.out, stdout_);
  for (const auto& [t, count] : engine.kg.triples()) {
    auto rec = triple_json(t, engine);
    rec["count"] = count;
    write_line(out.get(), std::move(rec));
  }
  return kExitOk;
}

/// Small random engine (n <= 8, K <= 12) with generic parameters and the
/// objective of one perceived scene, including reconstruction and L1 terms.
std::pair<Engine, Objective> gradient_instance(std::uint64_t seed) {
  EngineConfig config;
  config.n = config.d = 6;
  config.h = 5;
  config.seed = seed;
  config.domains = {{"place", IndexKind::Concept, {"Garden", "Street"}},
                    {"entity", IndexKind::Concept, {"Sparky", "Tom"}},
                    {"class", IndexKind::Concept, {"Dog", "Cat"}},
                    {"color", IndexKind::Concept, {"Black", "White"}},
                    {"predicate", IndexKind::Predicate, {"chases"}}};
  config.perception.scene_domains = {"place"};
  config.perception.roi_domains = {"entity", "class", "color"};
  config.embedding_scale = 0.5;
  config.world.noise_sigma = 0.1;
  Engine engine = Engine::create(config);

  Rng rng(seed, "grad-check");
  auto jitter = [&rng](auto& m, double scale) {
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      m.data()[i] += scale * rng.normal();
    }
  };
  jitter(engine.encoder.w, 0.3);
  jitter(engine.encoder.b, 0.3);
  jitter(engine.decoder.w, 0.5);
  jitter(engine.decoder.b, 0.5);
  jitter(engine.evolution.b_hidden, 0.5);
  jitter(engine.evolution.b_out, 0.5);
  jitter(engine.embeddings.a0, 0.5);
  engine.embeddings.column(engine.prior) = Vector::NullaryExpr(engine.n(), [&rng] { return 0.5 * rng.normal(); });

  SceneSpec spec{"grad", {engine.id("Garden")},
                 {{{engine.id("Sparky"), engine.id("Dog"), engine.id("Black")}},
                  {{engine.id("Tom"), engine.id("Cat"), engine.id("White")}}},
                 {{0, engine.id("chases"), 1}}};
  const SceneInstance scene = generate_scene(engine.world, spec, rng.next());
  const auto trace = perceive_scene(scene, engine, engine.config.perception, rng);
  TrainConfig train;
  train.l1_embedding = 1e-3;
  train.temperature = 0.7;
  Objective objective = objective_from_perception(engine, scene, trace, train);
  return {std::move(engine), std::move(objective)};
}

int cmd_grad_check(std::uint64_t seed, int instances, std::ostream& out) {
  double worst = 0.0;
  std::string where;
  for (int i = 0; i < instances; ++i) {
    const auto [engine, objective] = gradient_instance(seed + static_cast<std::uint64_t>(i));
    const auto report = grad_check(objective, engine);
    if (report.max_relative_error >= worst) {
      worst = report.max_relative_error;
      where = report.worst_parameter;
    }
  }
  const bool pass = worst < kGradTolerance;
  write_line(out, json{{"type", "grad-check"},
                       {"instances", instances},
                       {"max_relative_error", worst},
                       {"worst_parameter", where},
                       {"tolerance", kGradTolerance},
                       {"pass", pass}});
  return pass ? kExitOk : kExitFailure;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tensor Brain simulator"};
  app.require_subcommand(1);
  Common c;

  auto* simulate = app.add_subcommand("simulate", "train on a scenario end to end and write JSONL reports");
  simulate->add_option("-c,--scenario", c.scenario, "scenario file")->required();
  simulate->add_option("-o,--out", c.out, "report file (default: stdout)");
  simulate->add_option("-s,--snapshot", c.snapshot, "write the final engine snapshot here");
  simulate->add_option("--steps", c.steps, "override learning.steps");
  simulate->add_option("--seed", c.config_seed, "override the scenario seeds");

  std::string snapshot_in;
  auto* train_cmd = app.add_subcommand("train", "train on a scenario and save a snapshot");
  train_cmd->add_option("-c,--scenario", c.scenario, "scenario file")->required();
  train_cmd->add_option("-s,--snapshot", c.snapshot, "output snapshot")->required();
  train_cmd->add_option("--from", snapshot_in, "continue from this snapshot");
  train_cmd->add_option("-o,--out", c.out, "report file (default: stdout)");
  train_cmd->add_option("--steps", c.steps, "override learning.steps");
  train_cmd->add_option("--seed", c.config_seed, "override the scenario seeds");

  std::string scene_name;
  bool save = false;
  auto* perceive = app.add_subcommand("perceive", "perceive one scenario scene with a snapshot");
  perceive->add_option("-s,--snapshot", c.snapshot, "snapshot file")->required();
  perceive->add_option("-c,--scenario", c.scenario, "scenario holding the scene")->required();
  perceive->add_option("--scene", scene_name, "scene name")->required();
  perceive->add_option("--seed", c.seed, "sampling seed");
  perceive->add_flag("--save", save, "write the new episode back into the snapshot");
  perceive->add_option("-o,--out", c.out, "output file (default: stdout)");

  std::string episodic;
  std::string semantic;
  auto* recall = app.add_subcommand("recall", "episodic or semantic recall; prints the label trace");
  recall->add_option("-s,--snapshot", c.snapshot, "snapshot file")->required();
  auto* ep = recall->add_option("--episodic", episodic, "episodic index, e.g. t3");
  auto* se = recall->add_option("--semantic", semantic, "concept name");
  ep->excludes(se);
  recall->add_option("--seed", c.seed, "sampling seed");
  recall->add_option("-o,--out", c.out, "output file (default: stdout)");

  std::string start;
  int hops = 1;
  std::vector<std::string> domains;
  auto* query = app.add_subcommand("query", "sample a chain of labels from a concept");
  query->add_option("-s,--snapshot", c.snapshot, "snapshot file")->required();
  query->add_option("--start", start, "start concept")->required();
  query->add_option("--hops", hops, "number of hops")->check(CLI::NonNegativeNumber);
  query->add_option("--domains", domains, "domain per hop, cycled")->required()->delimiter(',');
  query->add_option("--seed", c.seed, "sampling seed");
  query->add_option("-o,--out", c.out, "output file (default: stdout)");

  auto* export_cmd = app.add_subcommand("export", "write the knowledge graph as JSONL triples");
  export_cmd->add_option("-s,--snapshot", c.snapshot, "snapshot file")->required();
  export_cmd->add_option("-o,--out", c.out, "output file (default: stdout)");

  int instances = 20;
  auto* grad = app.add_subcommand("grad-check", "compare analytic gradients with central differences");
  grad->add_option("--seed", c.seed, "first instance seed");
  grad->add_option("--instances", instances, "number of random instances")->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(c, out);
    if (train_cmd->parsed()) return cmd_train(c, snapshot_in, out);
    if (perceive->parsed()) return cmd_perceive(c, scene_name, save, out);
    if (recall->parsed()) {
      if (episodic.empty() == semantic.empty()) {
        err << "usage error: recall needs exactly one of --episodic or --semantic\n";
        return kExitUsage;
      }
      return cmd_recall(c, episodic, semantic, out);
    }
    if (query->parsed()) return cmd_query(c, start, hops, domains, out);
    if (export_cmd->parsed()) return cmd_export(c, out);
    if (grad->parsed()) return cmd_grad_check(c.seed, instances, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const SnapshotError& e) {
    err << "snapshot error: " << e.what() << '\n';
    return kExitSnapshot;
  } catch (const LookupError& e) {
    err << "lookup error: " << e.what() << '\n';
    return kExitLookup;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) {
    args.emplace_back(argv[i]);
  }
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace tbrain
