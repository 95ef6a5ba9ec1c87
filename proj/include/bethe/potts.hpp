#pragma once

// Potts and random-cluster models on simple graphs, their cover inequalities,
// and the three-state triangle with non-uniform fields.

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bethe/covers.hpp"
#include "bethe/model.hpp"
#include "bethe/variational.hpp"

namespace bethe {

/// Simple undirected graph. Edge subsets are bitmasks over edge indices (at most 64 edges).
struct Graph {
  int num_vertices = 0;
  std::vector<std::pair<int, int>> edges;
};

/// Throws InputError on self-loops, duplicate edges or out-of-range endpoints.
Graph make_graph(int num_vertices, std::vector<std::pair<int, int>> edges);

using EdgeMask = std::uint64_t;

inline EdgeMask full_edge_mask(const Graph& g) {
  return g.edges.size() >= 64 ? ~EdgeMask{0} : (EdgeMask{1} << g.edges.size()) - 1;
}

/// Connected components of (V, A), isolated vertices included.
int count_components(const Graph& graph, EdgeMask subset);
std::vector<int> component_sizes(const Graph& graph, EdgeMask subset);

struct PottsModel {
  Graph graph;
  int q = 2;
  std::vector<double> coupling;  // J per edge
  std::vector<double> field;     // empty, or length q: every vertex in state w gets weight e^{h_w}
};

void validate(const PottsModel& model);
bool is_ferromagnetic(const PottsModel& model);

double potts_weight(const PottsModel& model, std::span<const int> spins);
double potts_partition(const PottsModel& model, std::uint64_t cap = kDefaultEnumerationCap);

/// q^{k(A)} prod_{A} p_e. q may be any real >= 1.
double rc_weight(const Graph& graph, double q, std::span<const double> p, EdgeMask subset);
/// prod over components C of [sum_w e^{h_w |V(C)|}] prod_{A} p_e.
double rc_field_weight(const Graph& graph, std::span<const double> field, std::span<const double> p,
                       EdgeMask subset);
/// Uses p_e = e^{J_e} - 1 and the model's field, if any. Throws on negative p.
double rc_weight(const PottsModel& model, EdgeMask subset);

double rc_partition(const Graph& graph, double q, std::span<const double> p,
                    std::uint64_t cap = kDefaultEnumerationCap);
double rc_partition(const PottsModel& model, std::uint64_t cap = kDefaultEnumerationCap);

/// p_e = e^{J_e} - 1, rejecting antiferromagnetic edges.
std::vector<double> edge_probabilities(const PottsModel& model);

/// Pairwise tables e^{J delta} and node potentials e^{h_w}.
FactorGraph to_factor_graph(const PottsModel& model);

/// Edge copy m of base edge e has index m * |E| + e.
Graph cover_graph(const Graph& base, const CoverSpec& spec);
PottsModel lift(const PottsModel& base, const CoverSpec& spec);

struct CoverComponentReport {
  int cover_components = 0;   // k_H(A^1..A^M)
  int sorted_components = 0;  // sum_m k_G(A^[m])
  bool components_hold = false;
  double cover_weight = 0.0;   // f_rc(+) on the cover
  double sorted_weight = 0.0;  // prod_m f_rc(+) on the base at the sorted layers
  bool weight_holds = false;
  double weight_slack = 0.0;  // (sorted - cover) / max(sorted, cover)
};

/// layers[m] marks which base edges have their layer-m copy in A.
CoverComponentReport check_cover_component_inequality(const PottsModel& base, const CoverSpec& spec,
                                                      std::span<const EdgeMask> layers);

enum class PairConvention { UnorderedEdges, OrderedPairs };
enum class FieldConvention { Exponentiated, Direct };

struct CounterexampleConvention {
  PairConvention pairs = PairConvention::UnorderedEdges;
  FieldConvention field = FieldConvention::Direct;
};

std::string describe(const CounterexampleConvention& c);

inline constexpr double kPublishedBetheGap = 973.046;

/// Three-state triangle whose vertex k strongly prefers state k.
FactorGraph build_counterexample(const CounterexampleConvention& convention);

struct CounterexampleResult {
  CounterexampleConvention convention;
  double partition = 0.0;
  double bethe = 0.0;
  double gap = 0.0;  // bethe - partition
  int converged_restarts = 0;
};

CounterexampleResult evaluate_counterexample(const CounterexampleConvention& convention,
                                             const MaximizeOptions& options = {});

struct CounterexampleSelection {
  std::vector<CounterexampleResult> candidates;
  std::size_t selected = 0;  // closest gap to the published value
  bool matches = false;      // within 1% relative
};

CounterexampleSelection select_counterexample_convention(const MaximizeOptions& options = {});

/// The instance under the selected convention.
FactorGraph build_counterexample();

}  // namespace bethe
