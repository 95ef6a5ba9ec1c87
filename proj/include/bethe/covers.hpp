#pragma once

// M-covers of factor graphs via permutation assignments on incidences.
//
// Copy m of factor a is wired, at scope position p, to copy perms[a][p][m] of
// the variable in that position. Lifted variable (layer m, base i) has index
// m * |V| + i; lifted factor copy m of a has index m * |A| + a. The layer of a
// lifted variable is its copy index.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bethe/model.hpp"

namespace bethe {

struct CoverSpec {
  FactorGraph base;
  int copies = 1;
  /// permutations[a][p] is a permutation of {0, ..., copies-1}.
  std::vector<std::vector<std::vector<int>>> permutations;
};

/// Throws InputError unless there is one bijection per incidence.
void check_cover_spec(const CoverSpec& spec);

struct CopyMap {
  std::vector<int> variable;  // lifted variable -> base variable
  std::vector<int> factor;    // lifted factor -> base factor
};

struct LiftedModel {
  FactorGraph cover;
  CopyMap copy_map;
  std::vector<int> layer;  // lifted variable -> copy index
};

inline int lifted_variable(int base_variable, int layer, int num_base_variables) {
  return layer * num_base_variables + base_variable;
}

inline int lifted_factor(int base_factor, int layer, int num_base_factors) {
  return layer * num_base_factors + base_factor;
}

LiftedModel build_cover(const CoverSpec& spec);

struct CoverDiagnosis {
  bool valid = false;
  int copies = 0;
  std::string message;
};

/// Checks that `map` is a factor-graph homomorphism from candidate onto base that
/// is bijective on every local neighborhood, carries potentials along, and gives
/// every base node the same number of preimages.
CoverDiagnosis validate_cover(const FactorGraph& candidate, const FactorGraph& base,
                              const CopyMap& map);

/// All-identity permutations: M disjoint copies of the base.
CoverSpec identity_cover(const FactorGraph& base, int copies);

/// Independent uniform permutation per incidence. Deterministic in seed.
CoverSpec sample_cover(const FactorGraph& base, int copies, std::uint64_t seed);

/// Visits every cover whose first incidence of each factor is the identity
/// (every labeled M-cover up to relabeling the factor copies).
void for_each_cover(const FactorGraph& base, int copies,
                    const std::function<void(const CoverSpec&)>& visit);

std::uint64_t canonical_cover_count(const FactorGraph& base, int copies);

struct CoverEstimate {
  int copies = 1;
  int samples = 0;
  bool exhaustive = false;
  double mean_partition = 0.0;      // mean of Z(H)
  double variance_partition = 0.0;  // sample variance of Z(H)
  double estimate = 0.0;            // mean_partition^(1/M)
  std::string note;
};

/// M-th root of the average cover partition function over sampled covers. A
/// finite-M heuristic: covers are labeled, not quotiented by isomorphism.
CoverEstimate bethe_estimate_via_covers(const FactorGraph& base, int copies, int num_samples,
                                        std::uint64_t seed,
                                        std::uint64_t cap = kDefaultEnumerationCap);

/// Same statistic over every canonical cover.
CoverEstimate exhaustive_cover_estimate(const FactorGraph& base, int copies,
                                        std::uint64_t cap = kDefaultEnumerationCap);

}  // namespace bethe
