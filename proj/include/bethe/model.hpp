#pragma once

// Discrete factor graphs, potential tables and exact enumeration.
//
// Layout convention used everywhere in the library and in the JSON model
// format: tables are row-major with the LAST scope variable varying fastest.
// States are 0-based.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace bethe {

inline constexpr std::uint64_t kDefaultEnumerationCap = std::uint64_t{1} << 26;

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::fabs(sum_) >= std::fabs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  CompensatedSum& operator+=(double v) {
    add(v);
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

class PotentialTable {
 public:
  PotentialTable() : values_{1.0} {}
  PotentialTable(std::vector<int> cardinalities, std::vector<double> values);

  static PotentialTable filled(std::vector<int> cardinalities, double value);

  const std::vector<int>& cardinalities() const { return cards_; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t k) const { return values_[k]; }

  std::size_t index(std::span<const int> states) const;
  double at(std::span<const int> states) const { return values_[index(states)]; }

  /// Decode a flat index into per-position states.
  void decode(std::size_t k, std::span<int> states) const;

  /// Stride of scope position p in the flat layout.
  std::size_t stride(std::size_t p) const { return strides_[p]; }

  bool operator==(const PotentialTable&) const = default;

 private:
  std::vector<int> cards_;
  std::vector<std::size_t> strides_;
  std::vector<double> values_;
};

struct Factor {
  std::vector<int> scope;
  PotentialTable table;
  bool operator==(const Factor&) const = default;
};

/// One end of a variable-factor edge, seen from the variable.
struct Incidence {
  int factor;
  int position;
  bool operator==(const Incidence&) const = default;
};

class FactorGraph {
 public:
  FactorGraph() = default;
  explicit FactorGraph(std::vector<int> cardinalities);

  int add_variable(int cardinality);
  int add_factor(std::vector<int> scope, PotentialTable table);
  /// Convenience overload; the table cardinalities are taken from the scope.
  int add_factor(std::vector<int> scope, std::vector<double> values);
  void set_node_potential(int var, std::vector<double> weights);

  int num_variables() const { return static_cast<int>(cards_.size()); }
  int num_factors() const { return static_cast<int>(factors_.size()); }
  int cardinality(int var) const { return cards_.at(static_cast<std::size_t>(var)); }
  const std::vector<int>& cardinalities() const { return cards_; }

  const std::vector<Factor>& factors() const { return factors_; }
  const Factor& factor(int a) const { return factors_.at(static_cast<std::size_t>(a)); }
  const std::vector<Incidence>& incidences(int var) const {
    return adjacency_.at(static_cast<std::size_t>(var));
  }

  bool has_node_potential(int var) const {
    return !node_potentials_.at(static_cast<std::size_t>(var)).empty();
  }
  /// Empty span when the variable carries no node potential.
  std::span<const double> node_potential(int var) const {
    return node_potentials_.at(static_cast<std::size_t>(var));
  }
  double node_weight(int var, int state) const {
    const auto& p = node_potentials_[static_cast<std::size_t>(var)];
    return p.empty() ? 1.0 : p[static_cast<std::size_t>(state)];
  }

  /// Size of the joint state space, saturating at UINT64_MAX.
  std::uint64_t joint_state_count() const;

  bool is_pairwise() const;
  bool is_binary() const;

  bool operator==(const FactorGraph&) const = default;

 private:
  std::vector<int> cards_;
  std::vector<Factor> factors_;
  std::vector<std::vector<double>> node_potentials_;
  std::vector<std::vector<Incidence>> adjacency_;
};

/// The two models side by side; variables and factors of `b` are renumbered after `a`.
FactorGraph disjoint_union(const FactorGraph& a, const FactorGraph& b);

using Assignment = std::vector<int>;

/// Node and factor beliefs. Factor tables share the factor's layout.
struct PseudoMarginals {
  std::vector<std::vector<double>> node;
  std::vector<std::vector<double>> factor;
};

/// Sum over the factor table onto scope position `position`.
std::vector<double> marginalize(const PotentialTable& shape, std::span<const double> table,
                                int position);

/// Largest violation of the local marginal polytope constraints
/// (negativity, normalization, factor-node consistency). Throws on shape mismatch.
double polytope_violation(const FactorGraph& model, const PseudoMarginals& tau);

/// Calls f(states) for every joint state in row-major, last-fastest order.
template <class F>
void for_each_state(std::span<const int> cards, F&& f) {
  std::vector<int> x(cards.size(), 0);
  for (int c : cards)
    if (c <= 0) return;
  while (true) {
    f(std::span<const int>(x));
    int p = static_cast<int>(x.size()) - 1;
    while (p >= 0) {
      if (++x[static_cast<std::size_t>(p)] < cards[static_cast<std::size_t>(p)]) break;
      x[static_cast<std::size_t>(p)] = 0;
      --p;
    }
    if (p < 0) return;
  }
}

double evaluate(const FactorGraph& model, std::span<const int> x);

/// Throws NumericalRefusal naming the joint-space size when it exceeds `cap`.
void require_enumerable(std::uint64_t states, std::uint64_t cap, const char* what);

double exact_partition(const FactorGraph& model, std::uint64_t cap = kDefaultEnumerationCap);

PseudoMarginals exact_marginals(const FactorGraph& model,
                                std::uint64_t cap = kDefaultEnumerationCap);

}  // namespace bethe
