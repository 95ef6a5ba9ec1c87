#include "bethe/matroid.hpp"

#include <cmath>
#include <limits>

#include "bethe/errors.hpp"
#include "bethe/lattice.hpp"
#include "bethe/potts.hpp"

namespace bethe {

namespace {

std::uint64_t power_count(int base, int exponent) {
  std::uint64_t n = 1;
  for (int k = 0; k < exponent; ++k) {
    if (n > (~std::uint64_t{0}) / static_cast<std::uint64_t>(base)) return ~std::uint64_t{0};
    n *= static_cast<std::uint64_t>(base);
  }
  return n;
}

std::uint64_t subset_count(int n) { return n >= 64 ? ~std::uint64_t{0} : std::uint64_t{1} << n; }

ColumnMask all_columns(int n) { return n >= 64 ? ~ColumnMask{0} : (ColumnMask{1} << n) - 1; }

// Whether column a is orthogonal to sigma: sum_i S_ia sigma_i == 0.
bool annihilates(const GFMatrix& s, std::span<const int> sigma, int a) {
  const GaloisField& f = s.field();
  int acc = 0;
  for (int i = 0; i < s.rows(); ++i) acc = f.add(acc, f.mul(s.at(i, a), sigma[static_cast<std::size_t>(i)]));
  return acc == 0;
}

}  // namespace

GFMatrix::GFMatrix(GaloisField field, int rows, int cols, std::vector<int> entries)
    : field_(std::move(field)), rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (rows < 0 || cols < 0) throw InputError("matrix: negative dimension");
  if (cols > 64) throw InputError("matrix: at most 64 columns are supported");
  if (entries_.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
    throw InputError("matrix: expected " + std::to_string(rows * cols) + " entries, got " +
                     std::to_string(entries_.size()));
  for (int e : entries_)
    if (e < 0 || e >= field_.order())
      throw InputError("matrix: entry " + std::to_string(e) + " is not an element of GF(" +
                       std::to_string(field_.order()) + ")");
}

std::vector<int> GFMatrix::support(int a) const {
  std::vector<int> rows;
  for (int i = 0; i < rows_; ++i)
    if (at(i, a) != 0) rows.push_back(i);
  return rows;
}

int rank(const GFMatrix& s, ColumnMask columns) {
  const GaloisField& f = s.field();
  std::vector<std::vector<int>> cols;
  for (int a = 0; a < s.cols(); ++a) {
    if (!((columns >> a) & 1U)) continue;
    auto& c = cols.emplace_back();
    for (int i = 0; i < s.rows(); ++i) c.push_back(s.at(i, a));
  }
  if (s.cols() < 64 && (columns >> s.cols()) != 0) throw InputError("rank: column subset out of range");
  int r = 0;
  for (int i = 0; i < s.rows() && r < static_cast<int>(cols.size()); ++i) {
    std::size_t pivot = static_cast<std::size_t>(r);
    while (pivot < cols.size() && cols[pivot][static_cast<std::size_t>(i)] == 0) ++pivot;
    if (pivot == cols.size()) continue;
    std::swap(cols[pivot], cols[static_cast<std::size_t>(r)]);
    const auto& pc = cols[static_cast<std::size_t>(r)];
    const int inv = f.inv(pc[static_cast<std::size_t>(i)]);
    for (std::size_t c = static_cast<std::size_t>(r) + 1; c < cols.size(); ++c) {
      const int factor = f.mul(cols[c][static_cast<std::size_t>(i)], inv);
      if (factor == 0) continue;
      for (int k = 0; k < s.rows(); ++k)
        cols[c][static_cast<std::size_t>(k)] =
            f.sub(cols[c][static_cast<std::size_t>(k)], f.mul(factor, pc[static_cast<std::size_t>(k)]));
    }
    ++r;
  }
  return r;
}

double matroid_potts_partition(const GFMatrix& s, std::span<const double> coupling, std::uint64_t cap) {
  if (coupling.size() != static_cast<std::size_t>(s.cols())) throw InputError("matroid potts: need one J per column");
  const int q = s.field().order();
  require_enumerable(power_count(q, s.rows()), cap, "matroid_potts_partition");
  std::vector<int> cards(static_cast<std::size_t>(s.rows()), q);
  CompensatedSum z;
  for_each_state(cards, [&](std::span<const int> sigma) {
    double log_w = 0.0;
    for (int a = 0; a < s.cols(); ++a)
      if (annihilates(s, sigma, a)) log_w += coupling[static_cast<std::size_t>(a)];
    z += std::exp(log_w);
  });
  return z.value() * std::pow(static_cast<double>(q), -s.rows());
}

double matroid_rc_weight(const GFMatrix& s, std::span<const double> p, ColumnMask columns) {
  if (p.size() != static_cast<std::size_t>(s.cols())) throw InputError("matroid rc: need one p per column");
  double w = std::pow(static_cast<double>(s.field().order()), -rank(s, columns));
  for (int a = 0; a < s.cols(); ++a) {
    if (p[static_cast<std::size_t>(a)] < 0.0) throw InputError("matroid rc: negative edge weight");
    if ((columns >> a) & 1U) w *= p[static_cast<std::size_t>(a)];
  }
  return w;
}

double matroid_rc_partition(const GFMatrix& s, std::span<const double> p, std::uint64_t cap) {
  if (p.size() != static_cast<std::size_t>(s.cols())) throw InputError("matroid rc: need one p per column");
  for (double v : p)
    if (v < 0.0) throw InputError("matroid rc: negative edge weight");
  require_enumerable(subset_count(s.cols()), cap, "matroid_rc_partition");
  CompensatedSum z;
  for (ColumnMask a = 0;; ++a) {
    z += matroid_rc_weight(s, p, a);
    if (a == all_columns(s.cols())) break;
  }
  return z.value();
}

MatroidFactorForm matroid_factor_graph(const GFMatrix& s, std::span<const double> coupling) {
  if (coupling.size() != static_cast<std::size_t>(s.cols())) throw InputError("matroid potts: need one J per column");
  const int q = s.field().order();
  MatroidFactorForm form;
  form.graph = FactorGraph(std::vector<int>(static_cast<std::size_t>(s.rows()), q));
  form.log_scale = -s.rows() * std::log(static_cast<double>(q));
  for (int a = 0; a < s.cols(); ++a) {
    const std::vector<int> scope = s.support(a);
    const double j = coupling[static_cast<std::size_t>(a)];
    if (scope.empty()) {
      form.log_scale += j;
      continue;
    }
    PotentialTable shape = PotentialTable::filled(std::vector<int>(scope.size(), q), 1.0);
    std::vector<double> values(shape.size());
    std::vector<int> y(scope.size());
    std::vector<int> sigma(static_cast<std::size_t>(s.rows()), 0);
    for (std::size_t k = 0; k < values.size(); ++k) {
      shape.decode(k, y);
      for (std::size_t p = 0; p < scope.size(); ++p) sigma[static_cast<std::size_t>(scope[p])] = y[p];
      values[k] = annihilates(s, sigma, a) ? std::exp(j) : 1.0;
    }
    form.graph.add_factor(scope, std::move(values));
    form.column_of_factor.push_back(a);
  }
  return form;
}

FactorGraph incidence_hypergraph(const GFMatrix& s) {
  const int q = s.field().order();
  FactorGraph g(std::vector<int>(static_cast<std::size_t>(s.rows()), q));
  for (int a = 0; a < s.cols(); ++a) {
    const std::vector<int> scope = s.support(a);
    if (scope.empty()) throw InputError("matrix covers need every column to be nonzero; column " + std::to_string(a) + " is zero");
    g.add_factor(scope, PotentialTable::filled(std::vector<int>(scope.size(), q), 1.0));
  }
  return g;
}

GFMatrix cover_matrix(const GFMatrix& s, const CoverSpec& spec) {
  check_cover_spec(spec);
  const FactorGraph hyper = incidence_hypergraph(s);
  if (spec.base.num_variables() != hyper.num_variables() || spec.base.num_factors() != hyper.num_factors())
    throw InputError("cover spec does not match the incidence hypergraph of the matrix");
  for (int a = 0; a < hyper.num_factors(); ++a)
    if (spec.base.factor(a).scope != hyper.factor(a).scope)
      throw InputError("cover spec factor " + std::to_string(a) + " does not match column " + std::to_string(a));
  const int m_copies = spec.copies;
  const int rows = s.rows() * m_copies;
  const int cols = s.cols() * m_copies;
  if (cols > 64) throw InputError("cover matrix would exceed 64 columns");
  std::vector<int> entries(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0);
  for (int m = 0; m < m_copies; ++m)
    for (int a = 0; a < s.cols(); ++a) {
      const auto& scope = hyper.factor(a).scope;
      const int col = lifted_factor(a, m, s.cols());
      for (std::size_t p = 0; p < scope.size(); ++p) {
        const int row = lifted_variable(scope[p], spec.permutations[static_cast<std::size_t>(a)][p][static_cast<std::size_t>(m)],
                                        s.rows());
        entries[static_cast<std::size_t>(row) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(col)] =
            s.at(scope[p], a);
      }
    }
  return GFMatrix(s.field(), rows, cols, std::move(entries));
}

RankCoverReport check_rank_cover_inequality(const GFMatrix& s, const CoverSpec& spec,
                                            std::span<const ColumnMask> layers) {
  if (layers.size() != static_cast<std::size_t>(spec.copies))
    throw InputError("rank cover inequality: need one column subset per layer");
  for (ColumnMask l : layers)
    if (s.cols() < 64 && (l >> s.cols()) != 0) throw InputError("rank cover inequality: column subset out of range");
  const GFMatrix cover = cover_matrix(s, spec);
  ColumnMask lifted = 0;
  for (std::size_t m = 0; m < layers.size(); ++m) lifted |= layers[m] << (m * static_cast<std::size_t>(s.cols()));
  RankCoverReport r;
  r.cover_rank = rank(cover, lifted);
  for (ColumnMask sorted : sorted_stack_masks(layers, s.cols())) r.sorted_rank += rank(s, sorted);
  r.slack = r.cover_rank - r.sorted_rank;
  r.holds = r.slack >= 0;
  return r;
}

WeightEnumerator weight_enumerator(const GFMatrix& s, double lambda, const WeightEnumeratorOptions& options) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InputError("weight enumerator: lambda must be positive");
  const int q = s.field().order();
  const int k = s.rows();
  const int n = s.cols();
  require_enumerable(power_count(q, k), options.cap, "weight_enumerator");

  WeightEnumerator w;
  std::vector<int> cards(static_cast<std::size_t>(k), q);
  CompensatedSum exact;
  for_each_state(cards, [&](std::span<const int> sigma) {
    int weight = 0;
    for (int a = 0; a < n; ++a)
      if (!annihilates(s, sigma, a)) ++weight;
    exact += std::pow(lambda, weight);
  });
  w.exact = exact.value();

  const std::vector<double> coupling(static_cast<std::size_t>(n), std::log(1.0 / lambda));
  const double log_prefactor = k * std::log(static_cast<double>(q)) + n * std::log(lambda);
  w.identity = std::exp(log_prefactor) * matroid_potts_partition(s, coupling, options.cap);

  if (lambda > 1.0) {
    w.note = "lambda > 1: couplings are negative, so the lower-bound guarantee does not apply";
    return w;
  }
  if (!options.compute_bounds) return w;
  const MatroidFactorForm form = matroid_factor_graph(s, coupling);
  const BetheOptimum bethe = maximize_bethe(form.graph, options.bethe);
  const MeanFieldResult mf = mean_field(form.graph, options.mean_field);
  w.bethe_bound = std::exp(log_prefactor + form.log_scale + bethe.log_value);
  w.mean_field_bound = std::exp(log_prefactor + form.log_scale + mf.log_value);
  w.bounds_valid = true;
  return w;
}

GFMatrix incidence_matrix(const Graph& graph) {
  const int rows = graph.num_vertices;
  const int cols = static_cast<int>(graph.edges.size());
  std::vector<int> entries(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0);
  for (int e = 0; e < cols; ++e) {
    const auto [u, v] = graph.edges[static_cast<std::size_t>(e)];
    entries[static_cast<std::size_t>(u * cols + e)] = 1;
    entries[static_cast<std::size_t>(v * cols + e)] = 1;
  }
  return GFMatrix(GaloisField(2), rows, cols, std::move(entries));
}

}  // namespace bethe
