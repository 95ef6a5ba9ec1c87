#pragma once

// Linear matroids over GF(q): rank, the normalized matroid Potts model and its
// random-cluster form, the rank inequality on covers, and code weight enumerators.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bethe/covers.hpp"
#include "bethe/galois.hpp"
#include "bethe/model.hpp"
#include "bethe/variational.hpp"

namespace bethe {

class GFMatrix {
 public:
  /// Row-major entries, each in 0..q-1.
  GFMatrix(GaloisField field, int rows, int cols, std::vector<int> entries);

  const GaloisField& field() const { return field_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int at(int i, int a) const { return entries_[static_cast<std::size_t>(i * cols_ + a)]; }
  const std::vector<int>& entries() const { return entries_; }
  /// Rows with a nonzero entry in column a.
  std::vector<int> support(int a) const;

 private:
  GaloisField field_;
  int rows_;
  int cols_;
  std::vector<int> entries_;
};

/// Column subsets are bitmasks (at most 64 columns).
using ColumnMask = std::uint64_t;

int rank(const GFMatrix& s, ColumnMask columns);

/// (1/q^k) sum_sigma prod_a exp[J_a delta(sum_i S_ia sigma_i, 0)].
double matroid_potts_partition(const GFMatrix& s, std::span<const double> coupling,
                               std::uint64_t cap = kDefaultEnumerationCap);
/// sum_A q^{-r(A)} prod_{A} p_a.
double matroid_rc_partition(const GFMatrix& s, std::span<const double> p,
                            std::uint64_t cap = kDefaultEnumerationCap);
double matroid_rc_weight(const GFMatrix& s, std::span<const double> p, ColumnMask columns);

/// Rows become q-state variables and each nonzero column a factor over its
/// support. Z_Potts(S) = exp(log_scale) * Z(graph); log_scale carries the 1/q^k
/// normalization and the constant factors of all-zero columns.
struct MatroidFactorForm {
  FactorGraph graph;
  double log_scale = 0.0;
  std::vector<int> column_of_factor;
};

MatroidFactorForm matroid_factor_graph(const GFMatrix& s, std::span<const double> coupling);

/// Hypergraph with rows as vertices and columns as hyperedges, all tables one.
/// Covers of a matrix are taken over this structure; every column must be nonzero.
FactorGraph incidence_hypergraph(const GFMatrix& s);

/// Column copy m of column a has index m * n + a and inherits S's entries
/// against the row copies it is wired to.
GFMatrix cover_matrix(const GFMatrix& s, const CoverSpec& spec);

struct RankCoverReport {
  int cover_rank = 0;   // r_{S^H}(A^1..A^M)
  int sorted_rank = 0;  // sum_m r_S(A^[m])
  bool holds = false;
  int slack = 0;
};

RankCoverReport check_rank_cover_inequality(const GFMatrix& s, const CoverSpec& spec,
                                            std::span<const ColumnMask> layers);

struct WeightEnumerator {
  double exact = 0.0;     // sum over sigma of lambda^{w(sigma S)}
  double identity = 0.0;  // q^k lambda^n Z_Potts(S; log(1/lambda))
  bool bounds_valid = false;
  double bethe_bound = 0.0;
  double mean_field_bound = 0.0;
  std::string note;
};

struct WeightEnumeratorOptions {
  bool compute_bounds = true;
  MaximizeOptions bethe;
  MeanFieldOptions mean_field;
  std::uint64_t cap = kDefaultEnumerationCap;
};

WeightEnumerator weight_enumerator(const GFMatrix& s, double lambda, const WeightEnumeratorOptions& options = {});

struct Graph;
/// Vertex-edge incidence matrix over GF(2).
GFMatrix incidence_matrix(const Graph& graph);

}  // namespace bethe
