#pragma once

// Weighted graph homomorphisms with rank-two targets Gamma = aa' + bb' and the
// equivalent edge-coloring model over edge subsets.

#include <cstdint>
#include <span>
#include <vector>

#include "bethe/model.hpp"
#include "bethe/potts.hpp"

namespace bethe {

struct HomModel {
  Graph graph;
  std::vector<double> w;
  std::vector<double> a;
  std::vector<double> b;

  int target_size() const { return static_cast<int>(w.size()); }
  double gamma(int s, int t) const;
};

/// Throws InputError on negative or mismatched vectors.
HomModel make_hom_model(Graph graph, std::vector<double> w, std::vector<double> a, std::vector<double> b);

/// Arbitrary symmetric nonnegative target, for plain homomorphism counting only.
struct GeneralHomModel {
  Graph graph;
  std::vector<double> w;
  int n = 0;
  std::vector<double> gamma;  // n x n row-major
};

GeneralHomModel make_general_hom_model(Graph graph, std::vector<double> w, std::vector<double> gamma);

double hom_partition(const HomModel& model, std::uint64_t cap = kDefaultEnumerationCap);
double hom_partition(const GeneralHomModel& model, std::uint64_t cap = kDefaultEnumerationCap);

/// Number of edges of A incident to vertex i.
int s_count(const Graph& graph, int vertex, EdgeMask subset);

/// x^k with 0^0 = 1.
double power(double x, int k);

double edge_weight(const HomModel& model, EdgeMask subset);
double edge_partition(const HomModel& model, std::uint64_t cap = kDefaultEnumerationCap);

struct Rank2Report {
  bool lsm_holds = false;
  double worst_slack = 0.0;
  std::uint64_t pairs_checked = 0;
  std::uint64_t scalar_samples = 0;  // scalar inequality tuples actually evaluated
  std::uint64_t scalar_violations = 0;
  double worst_scalar_slack = 0.0;
  bool holds() const { return lsm_holds && scalar_violations == 0; }
};

/// Exhaustive pair check of edge_weight (|E| <= 16) plus the per-vertex scalar
/// inequality on `samples` random (A1, A2, sigma, gamma, i) tuples with c = a / b.
Rank2Report check_rank2_lsm(const HomModel& model, int samples = 1000, std::uint64_t seed = 0);

/// Node potentials w and pairwise tables Gamma.
FactorGraph to_factor_graph(const HomModel& model);

}  // namespace bethe
