#pragma once

// File formats and result records for the command-line tool.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "bethe/covers.hpp"
#include "bethe/homs.hpp"
#include "bethe/matroid.hpp"
#include "bethe/model.hpp"
#include "bethe/potts.hpp"
#include "json.hpp"

namespace bethe {

using Json = nlohmann::ordered_json;

/// {"variables": [{"id", "cardinality"}], "factors": [{"scope", "table"}],
///  "node_potentials": {id: [weights]}}. Ids may be any distinct integers; they
/// are mapped to 0-based indices in order of appearance.
FactorGraph model_from_json(const Json& doc);
Json model_to_json(const FactorGraph& model);

/// {"n_vertices": n, "edges": [[i, j], ...]}
Graph graph_from_json(const Json& doc);
Json graph_to_json(const Graph& graph);

/// Graph plus "q", "J" (number or per-edge list) and optional "h".
PottsModel potts_from_json(const Json& doc);

/// {"n_vertices", "edges", "w", "a", "b"}
HomModel hom_from_json(const Json& doc);

/// {"copies": M, "permutations": [[[...], ...], ...]}; the base model is supplied separately.
CoverSpec cover_from_json(const Json& doc, const FactorGraph& base);
Json cover_to_json(const CoverSpec& spec);

/// First line "q k n", then k rows of n field elements.
GFMatrix read_generator_matrix(std::istream& in);
GFMatrix read_generator_matrix_file(const std::string& path);

Json read_json_file(const std::string& path);
std::string read_text_file(const std::string& path);

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);

struct ResultValue {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
};

struct ResultRecord {
  std::string command;
  std::string digest;
  std::uint64_t seed = 0;
  double runtime_seconds = 0.0;
  std::vector<ResultValue> values;
  Json settings = Json::object();  // tolerances, iteration caps, conventions in effect
  Json extra = Json::object();

  void add(std::string name, double value, double tolerance = 0.0) {
    values.push_back({std::move(name), value, tolerance});
  }
};

Json to_json(const ResultRecord& r);

inline constexpr const char* kCsvHeader = "command,digest,result,value,tolerance,seed";
/// One row per value, without the header.
std::string to_csv(const ResultRecord& r);

/// Shortest round-tripping decimal form.
std::string format_double(double v);

}  // namespace bethe
