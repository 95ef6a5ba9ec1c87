#include "bethe/io.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "bethe/errors.hpp"

namespace bethe {

namespace {

template <class F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string(what) + ": " + e.what());
  }
}

const Json& require(const Json& doc, const char* key, const char* what) {
  if (!doc.is_object() || !doc.contains(key))
    throw InputError(std::string(what) + ": missing \"" + key + "\"");
  return doc.at(key);
}

std::vector<std::pair<int, int>> edges_from(const Json& doc, const char* what) {
  std::vector<std::pair<int, int>> edges;
  for (const Json& e : require(doc, "edges", what)) {
    if (!e.is_array() || e.size() != 2) throw InputError(std::string(what) + ": each edge must be a pair");
    edges.emplace_back(e[0].get<int>(), e[1].get<int>());
  }
  return edges;
}

std::vector<double> numbers(const Json& v) { return v.get<std::vector<double>>(); }

}  // namespace

FactorGraph model_from_json(const Json& doc) {
  return guarded("model file", [&] {
    std::map<long long, int> index;
    FactorGraph model;
    for (const Json& v : require(doc, "variables", "model file")) {
      const long long id = require(v, "id", "model file variable").get<long long>();
      const int card = require(v, "cardinality", "model file variable").get<int>();
      if (index.count(id)) throw InputError("model file: duplicate variable id " + std::to_string(id));
      index[id] = model.add_variable(card);
    }
    auto lookup = [&](long long id) {
      auto it = index.find(id);
      if (it == index.end()) throw InputError("model file: unknown variable id " + std::to_string(id));
      return it->second;
    };
    if (doc.contains("factors"))
      for (const Json& f : doc.at("factors")) {
        std::vector<int> scope;
        for (const Json& id : require(f, "scope", "model file factor")) scope.push_back(lookup(id.get<long long>()));
        model.add_factor(std::move(scope), numbers(require(f, "table", "model file factor")));
      }
    if (doc.contains("node_potentials")) {
      const Json& np = doc.at("node_potentials");
      if (!np.is_object()) throw InputError("model file: node_potentials must be an object keyed by id");
      for (const auto& [key, weights] : np.items()) {
        long long id = 0;
        const auto res = std::from_chars(key.data(), key.data() + key.size(), id);
        if (res.ec != std::errc{} || res.ptr != key.data() + key.size())
          throw InputError("model file: node potential key \"" + key + "\" is not an integer id");
        model.set_node_potential(lookup(id), numbers(weights));
      }
    }
    return model;
  });
}

Json model_to_json(const FactorGraph& model) {
  Json doc;
  doc["variables"] = Json::array();
  for (int i = 0; i < model.num_variables(); ++i)
    doc["variables"].push_back({{"id", i}, {"cardinality", model.cardinality(i)}});
  doc["factors"] = Json::array();
  for (const Factor& f : model.factors()) {
    const auto vals = f.table.values();
    doc["factors"].push_back({{"scope", f.scope}, {"table", std::vector<double>(vals.begin(), vals.end())}});
  }
  Json np = Json::object();
  for (int i = 0; i < model.num_variables(); ++i)
    if (model.has_node_potential(i)) {
      const auto w = model.node_potential(i);
      np[std::to_string(i)] = std::vector<double>(w.begin(), w.end());
    }
  if (!np.empty()) doc["node_potentials"] = np;
  return doc;
}

Graph graph_from_json(const Json& doc) {
  return guarded("graph file", [&] {
    return make_graph(require(doc, "n_vertices", "graph file").get<int>(), edges_from(doc, "graph file"));
  });
}

Json graph_to_json(const Graph& graph) {
  Json edges = Json::array();
  for (auto [u, v] : graph.edges) edges.push_back({u, v});
  return {{"n_vertices", graph.num_vertices}, {"edges", edges}};
}

PottsModel potts_from_json(const Json& doc) {
  return guarded("potts file", [&] {
    PottsModel m;
    m.graph = graph_from_json(doc);
    m.q = require(doc, "q", "potts file").get<int>();
    const Json& j = require(doc, "J", "potts file");
    if (j.is_number())
      m.coupling.assign(m.graph.edges.size(), j.get<double>());
    else
      m.coupling = numbers(j);
    if (doc.contains("h")) m.field = numbers(doc.at("h"));
    validate(m);
    return m;
  });
}

HomModel hom_from_json(const Json& doc) {
  return guarded("hom file", [&] {
    return make_hom_model(graph_from_json(doc), numbers(require(doc, "w", "hom file")),
                          numbers(require(doc, "a", "hom file")), numbers(require(doc, "b", "hom file")));
  });
}

CoverSpec cover_from_json(const Json& doc, const FactorGraph& base) {
  return guarded("cover file", [&] {
    CoverSpec spec;
    spec.base = base;
    spec.copies = require(doc, "copies", "cover file").get<int>();
    spec.permutations = require(doc, "permutations", "cover file").get<std::vector<std::vector<std::vector<int>>>>();
    check_cover_spec(spec);
    return spec;
  });
}

Json cover_to_json(const CoverSpec& spec) {
  return {{"copies", spec.copies}, {"permutations", spec.permutations}};
}

GFMatrix read_generator_matrix(std::istream& in) {
  int q = 0;
  int k = 0;
  int n = 0;
  if (!(in >> q >> k >> n)) throw InputError("generator matrix: expected header \"q k n\"");
  if (q < 2 || k < 0 || n < 0) throw InputError("generator matrix: invalid header");
  std::vector<int> entries;
  for (long long idx = 0; idx < static_cast<long long>(k) * n; ++idx) {
    int e = 0;
    if (!(in >> e))
      throw InputError("generator matrix: expected " + std::to_string(k * n) + " entries, got " + std::to_string(idx));
    entries.push_back(e);
  }
  std::string extra;
  if (in >> extra) throw InputError("generator matrix: unexpected trailing content \"" + extra + "\"");
  return GFMatrix(GaloisField(q), k, n, std::move(entries));
}

GFMatrix read_generator_matrix_file(const std::string& path) {
  std::istringstream in(read_text_file(path));
  return read_generator_matrix(in);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Json read_json_file(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(path + ": malformed JSON: " + e.what());
  }
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw NumericalRefusal("sha256 failed");
  std::ostringstream out;
  for (unsigned int k = 0; k < len; ++k) out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[k]);
  return out.str();
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Json to_json(const ResultRecord& r) {
  Json doc;
  doc["command"] = r.command;
  doc["digest"] = r.digest;
  doc["seed"] = r.seed;
  doc["runtime_seconds"] = r.runtime_seconds;
  Json results = Json::object();
  for (const auto& v : r.values) {
    if (std::isfinite(v.value))
      results[v.name] = {{"value", v.value}, {"tolerance", v.tolerance}};
    else
      results[v.name] = {{"value", format_double(v.value)}, {"tolerance", v.tolerance}};
  }
  doc["results"] = results;
  doc["settings"] = r.settings;
  if (!r.extra.empty()) doc["details"] = r.extra;
  return doc;
}

std::string to_csv(const ResultRecord& r) {
  std::string out;
  for (const auto& v : r.values) {
    out += r.command + "," + r.digest + "," + v.name + "," + format_double(v.value) + "," +
           format_double(v.tolerance) + "," + std::to_string(r.seed) + "\n";
  }
  return out;
}

}  // namespace bethe
