#include "tbrain/snapshot.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "tbrain/errors.hpp"

namespace tbrain {

using nlohmann::json;

std::string encode_doubles(const double* data, std::size_t count) {
  std::string out(count * 16, '0');
  for (std::size_t i = 0; i < count; ++i) {
    const auto bits = std::bit_cast<std::uint64_t>(data[i]);
    char buf[16];
    const auto res = std::to_chars(buf, buf + 16, bits, 16);
    const auto len = static_cast<std::size_t>(res.ptr - buf);
    std::copy(buf, res.ptr, out.begin() + static_cast<std::ptrdiff_t>(i * 16 + 16 - len));
  }
  return out;
}

std::vector<double> decode_doubles(const std::string& text) {
  if (text.size() % 16 != 0) {
    throw SnapshotError("corrupt payload: float array length is not a multiple of 16 digits");
  }
  std::vector<double> out(text.size() / 16);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint64_t bits = 0;
    const char* first = text.data() + i * 16;
    const auto res = std::from_chars(first, first + 16, bits, 16);
    if (res.ec != std::errc{} || res.ptr != first + 16) {
      throw SnapshotError("corrupt payload: invalid hex digits in float array");
    }
    out[i] = std::bit_cast<double>(bits);
  }
  return out;
}

namespace {

json matrix_json(const Matrix& m) {
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", encode_doubles(m.data(), static_cast<std::size_t>(m.size()))}};
}

json vector_json(const Vector& v) {
  return json{{"size", v.size()}, {"data", encode_doubles(v.data(), static_cast<std::size_t>(v.size()))}};
}

Matrix read_matrix(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto data = decode_doubles(j.at("data").get<std::string>());
  if (rows < 0 || cols < 0 || static_cast<std::size_t>(rows * cols) != data.size()) {
    throw SnapshotError("corrupt payload: matrix size does not match its data");
  }
  Matrix m(rows, cols);
  std::copy(data.begin(), data.end(), m.data());
  return m;
}

Vector read_vector(const json& j) {
  const auto size = j.at("size").get<Eigen::Index>();
  const auto data = decode_doubles(j.at("data").get<std::string>());
  if (size < 0 || static_cast<std::size_t>(size) != data.size()) {
    throw SnapshotError("corrupt payload: vector size does not match its data");
  }
  Vector v(size);
  std::copy(data.begin(), data.end(), v.data());
  return v;
}

IndexId read_id(const json& j) { return IndexId{j.get<std::uint32_t>()}; }

json ids_json(const std::vector<IndexId>& ids) {
  json out = json::array();
  for (IndexId id : ids) {
    out.push_back(id.value);
  }
  return out;
}

std::vector<IndexId> read_ids(const json& j) {
  std::vector<IndexId> out;
  for (const auto& v : j) {
    out.push_back(read_id(v));
  }
  return out;
}

json network_json(const EvolutionNetwork& net) {
  return json{{"w_in", matrix_json(net.w_in)},
              {"b_hidden", vector_json(net.b_hidden)},
              {"w_out", matrix_json(net.w_out)},
              {"b_out", vector_json(net.b_out)}};
}

json registry_json(const IndexRegistry& registry) {
  json indices = json::array();
  for (const auto& info : registry.indices()) {
    indices.push_back({{"name", info.name}, {"kind", std::string(to_string(info.kind))}});
  }
  json domains = json::array();
  for (const auto& dom : registry.domains()) {
    domains.push_back({{"name", dom.name}, {"members", ids_json(dom.members)}});
  }
  return json{{"indices", indices}, {"domains", domains}};
}

IndexRegistry read_registry(const json& j) {
  IndexRegistry registry;
  for (const auto& info : j.at("indices")) {
    registry.add(parse_index_kind(info.at("kind").get<std::string>()), info.at("name").get<std::string>());
  }
  for (const auto& dom : j.at("domains")) {
    const auto name = dom.at("name").get<std::string>();
    registry.add_domain(name);
    for (IndexId id : read_ids(dom.at("members"))) {
      if (!registry.contains(id)) {
        throw SnapshotError("corrupt payload: domain member out of range");
      }
      registry.assign(id, name);
    }
  }
  return registry;
}

json kg_json(const KnowledgeGraph& kg) {
  json triples = json::array();
  for (const auto& [t, count] : kg.triples()) {
    triples.push_back({{"s", t.subject.value},
                       {"p", t.predicate.value},
                       {"o", t.object.value},
                       {"source", std::string(to_string(t.source))},
                       {"time", t.time ? json(t.time->value) : json(nullptr)},
                       {"count", count}});
  }
  json counts = json::array();
  for (const auto& [key, count] : kg.cooccurrence()) {
    counts.push_back({{"context", std::get<0>(key).value},
                      {"domain", std::get<1>(key)},
                      {"label", std::get<2>(key).value},
                      {"count", count}});
  }
  return json{{"triples", triples}, {"counts", counts}};
}

KnowledgeGraph read_kg(const json& j) {
  KnowledgeGraph kg;
  for (const auto& t : j.at("triples")) {
    Triple triple{read_id(t.at("s")), read_id(t.at("p")), read_id(t.at("o")),
                  parse_triple_source(t.at("source").get<std::string>()), std::nullopt};
    if (!t.at("time").is_null()) {
      triple.time = read_id(t.at("time"));
    }
    kg.add(triple, t.at("count").get<std::uint64_t>());
  }
  for (const auto& c : j.at("counts")) {
    kg.record(read_id(c.at("context")), c.at("domain").get<std::string>(), read_id(c.at("label")),
              c.at("count").get<std::uint64_t>());
  }
  return kg;
}

json symbolic_json(const SymbolicMatrix& s) {
  json b_ids = json::array();
  std::vector<double> b_values;
  for (const auto& [key, v] : s.b) {
    b_ids.push_back({key.first.value, key.second.value});
    b_values.push_back(v);
  }
  json b0_ids = json::array();
  std::vector<double> b0_values;
  for (const auto& [k, v] : s.b0) {
    b0_ids.push_back(k.value);
    b0_values.push_back(v);
  }
  return json{{"b_keys", b_ids},
              {"b_values", encode_doubles(b_values.data(), b_values.size())},
              {"b0_keys", b0_ids},
              {"b0_values", encode_doubles(b0_values.data(), b0_values.size())}};
}

SymbolicMatrix read_symbolic(const json& j) {
  SymbolicMatrix s;
  const auto& b_keys = j.at("b_keys");
  const auto b_values = decode_doubles(j.at("b_values").get<std::string>());
  const auto& b0_keys = j.at("b0_keys");
  const auto b0_values = decode_doubles(j.at("b0_values").get<std::string>());
  if (b_keys.size() != b_values.size() || b0_keys.size() != b0_values.size()) {
    throw SnapshotError("corrupt payload: symbolic matrix keys and values differ in length");
  }
  for (std::size_t i = 0; i < b_values.size(); ++i) {
    s.b[{read_id(b_keys[i][0]), read_id(b_keys[i][1])}] = b_values[i];
  }
  for (std::size_t i = 0; i < b0_values.size(); ++i) {
    s.b0[read_id(b0_keys[i])] = b0_values[i];
  }
  return s;
}

json episodes_json(const EpisodicStore& store) {
  json out = json::array();
  for (const auto& [id, meta] : store.entries()) {
    json relations = json::array();
    for (const auto& [a, b] : meta.relations) {
      relations.push_back({a, b});
    }
    out.push_back({{"id", id.value},
                   {"step", meta.step},
                   {"tag", meta.tag},
                   {"roi_count", meta.roi_count},
                   {"relations", relations},
                   {"roi_episodes", ids_json(meta.roi_episodes)},
                   {"relation_episodes", ids_json(meta.relation_episodes)}});
  }
  return out;
}

EpisodicStore read_episodes(const json& j) {
  EpisodicStore store;
  for (const auto& e : j) {
    EpisodeMeta meta;
    meta.step = e.at("step").get<std::uint64_t>();
    meta.tag = e.at("tag").get<std::string>();
    meta.roi_count = e.at("roi_count").get<std::size_t>();
    for (const auto& r : e.at("relations")) {
      meta.relations.emplace_back(r.at(0).get<std::size_t>(), r.at(1).get<std::size_t>());
    }
    meta.roi_episodes = read_ids(e.at("roi_episodes"));
    meta.relation_episodes = read_ids(e.at("relation_episodes"));
    store.add(read_id(e.at("id")), std::move(meta));
  }
  return store;
}

json world_json(const SyntheticWorld& world) {
  json ids = json::array();
  std::string data;
  for (const auto& [id, sig] : world.signatures) {
    ids.push_back(id.value);
    data += encode_doubles(sig.data(), static_cast<std::size_t>(sig.size()));
  }
  const double sigma = world.noise_sigma;
  return json{{"d", world.d},
              {"noise_sigma", encode_doubles(&sigma, 1)},
              {"seed", world.seed},
              {"type_predicate", world.type_predicate.value},
              {"signature_ids", ids},
              {"signatures", data}};
}

SyntheticWorld read_world(const json& j) {
  SyntheticWorld world;
  world.d = j.at("d").get<Eigen::Index>();
  const auto sigma = decode_doubles(j.at("noise_sigma").get<std::string>());
  if (sigma.size() != 1) {
    throw SnapshotError("corrupt payload: noise_sigma");
  }
  world.noise_sigma = sigma[0];
  world.seed = j.at("seed").get<std::uint64_t>();
  world.type_predicate = read_id(j.at("type_predicate"));
  const auto& ids = j.at("signature_ids");
  const auto data = decode_doubles(j.at("signatures").get<std::string>());
  if (world.d < 0 || data.size() != ids.size() * static_cast<std::size_t>(world.d)) {
    throw SnapshotError("corrupt payload: signature data does not match the signature count");
  }
  for (std::size_t i = 0; i < ids.size(); ++i) {
    Vector sig(world.d);
    std::copy_n(data.begin() + static_cast<std::ptrdiff_t>(i * static_cast<std::size_t>(world.d)), world.d,
                sig.data());
    world.signatures.emplace(read_id(ids[i]), std::move(sig));
  }
  return world;
}

}  // namespace

json snapshot_to_json(const Engine& engine) {
  return json{{"format", "tbrain-snapshot"},
              {"version", kSnapshotVersion},
              {"config", to_json(engine.config)},
              {"registry", registry_json(engine.registry)},
              {"embeddings", {{"a", matrix_json(engine.embeddings.a)}, {"a0", vector_json(engine.embeddings.a0)}}},
              {"evolution", network_json(engine.evolution)},
              {"encoder", {{"w", matrix_json(engine.encoder.w)}, {"b", vector_json(engine.encoder.b)}}},
              {"decoder", {{"w", matrix_json(engine.decoder.w)}, {"b", vector_json(engine.decoder.b)}}},
              {"world", world_json(engine.world)},
              {"knowledge", kg_json(engine.kg)},
              {"symbolic", symbolic_json(engine.symbolic)},
              {"episodes", episodes_json(engine.episodes)},
              {"prior", engine.prior.value},
              {"type_predicate", engine.type_predicate.value},
              {"clock", engine.clock}};
}

Engine snapshot_from_json(const json& j) {
  try {
    if (!j.is_object() || j.value("format", "") != "tbrain-snapshot") {
      throw SnapshotError("corrupt payload: not a snapshot");
    }
    const int version = j.at("version").get<int>();
    if (version != kSnapshotVersion) {
      throw SnapshotError("snapshot version " + std::to_string(version) + " is not supported (expected " +
                          std::to_string(kSnapshotVersion) + ")");
    }
    Engine e;
    try {
      e.config = engine_config_from_json(j.at("config"));
    } catch (const ConfigError& err) {
      throw SnapshotError(std::string("corrupt payload: ") + err.what());
    }
    e.registry = read_registry(j.at("registry"));
    e.embeddings.a = read_matrix(j.at("embeddings").at("a"));
    e.embeddings.a0 = read_vector(j.at("embeddings").at("a0"));
    const auto& evo = j.at("evolution");
    e.evolution.w_in = read_matrix(evo.at("w_in"));
    e.evolution.b_hidden = read_vector(evo.at("b_hidden"));
    e.evolution.w_out = read_matrix(evo.at("w_out"));
    e.evolution.b_out = read_vector(evo.at("b_out"));
    e.encoder.w = read_matrix(j.at("encoder").at("w"));
    e.encoder.b = read_vector(j.at("encoder").at("b"));
    e.decoder.w = read_matrix(j.at("decoder").at("w"));
    e.decoder.b = read_vector(j.at("decoder").at("b"));
    e.world = read_world(j.at("world"));
    e.kg = read_kg(j.at("knowledge"));
    e.symbolic = read_symbolic(j.at("symbolic"));
    e.episodes = read_episodes(j.at("episodes"));
    e.prior = read_id(j.at("prior"));
    e.type_predicate = read_id(j.at("type_predicate"));
    e.clock = j.at("clock").get<std::uint64_t>();

    const auto K = static_cast<Eigen::Index>(e.registry.size());
    const Eigen::Index n = e.config.n;
    if (e.embeddings.a.rows() != n || e.embeddings.a.cols() != K || e.embeddings.a0.size() != K ||
        e.evolution.n() != n || e.evolution.w_in.cols() != n || e.evolution.w_out.cols() != e.evolution.hidden() ||
        e.encoder.n() != n || e.decoder.n() != n || !e.registry.contains(e.prior) ||
        !e.registry.contains(e.type_predicate)) {
      throw SnapshotError("corrupt payload: parameter shapes are inconsistent");
    }
    return e;
  } catch (const json::exception& err) {
    throw SnapshotError(std::string("corrupt payload: ") + err.what());
  } catch (const SnapshotError&) {
    throw;
  } catch (const Error& err) {
    throw SnapshotError(std::string("corrupt payload: ") + err.what());
  }
}

std::string snapshot_text(const Engine& engine) { return snapshot_to_json(engine).dump(1) + "\n"; }

void save_snapshot(const Engine& engine, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write snapshot '" + path + "'");
  }
  out << snapshot_text(engine);
  if (!out) {
    throw IoError("failed writing snapshot '" + path + "'");
  }
}

Engine load_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot read snapshot '" + path + "'");
  }
  std::stringstream buf;
  buf << in.rdbuf();
  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::exception& err) {
    throw SnapshotError(std::string("corrupt payload: ") + err.what());
  }
  return snapshot_from_json(j);
}

}  // namespace tbrain
