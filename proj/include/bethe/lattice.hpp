#pragma once

// Boolean-lattice tools: meet/join, sorted stacks, (log-)supermodularity checks,
// the multi-copy correlation inequality and the bipartite switching transform.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "bethe/model.hpp"

namespace bethe {

inline constexpr double kLsmRelativeTolerance = 1e-12;

/// A point of {0,1}^n.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t n) : bits_(n, 0) {}
  BitVector(std::initializer_list<int> bits);
  static BitVector from_mask(std::uint64_t mask, std::size_t n);

  std::size_t size() const { return bits_.size(); }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  void set(std::size_t i, bool v) { bits_[i] = v ? 1 : 0; }
  std::size_t count() const;
  /// Bit i of the mask is coordinate i. Requires size() <= 64.
  std::uint64_t mask() const;

  bool operator==(const BitVector&) const = default;

 private:
  std::vector<std::uint8_t> bits_;
};

std::pair<BitVector, BitVector> meet_join(const BitVector& x, const BitVector& y);

/// Sorts each coordinate across the family in decreasing order: output m has
/// coordinate i set iff at least m+1 inputs have it set.
std::vector<BitVector> sorted_stack(std::span<const BitVector> xs);

/// Mask form of sorted_stack for families of n-bit masks.
std::vector<std::uint64_t> sorted_stack_masks(std::span<const std::uint64_t> xs, int n);

/// A nonnegative function on {0,1}^n stored densely, indexed by mask (bit i = coordinate i).
struct BooleanFunction {
  int n = 0;
  std::vector<double> values;

  BooleanFunction() : values{1.0} {}
  BooleanFunction(int bits, std::vector<double> vals);
  static BooleanFunction tabulate(int bits, const std::function<double(std::uint64_t)>& f);

  double operator()(std::uint64_t mask) const { return values[mask]; }
  double sum() const;
};

/// Binary factor table (last-fastest layout) as a function of its scope bits.
BooleanFunction boolean_function(const PotentialTable& table);

/// The full product function of a binary model over {0,1}^n.
BooleanFunction boolean_function(const FactorGraph& model);

struct LsmReport {
  bool holds = true;
  /// min over pairs of (rhs - lhs) / max(lhs, rhs); 0 when every pair is tight or trivial.
  double worst_slack = 0.0;
  std::optional<std::pair<std::uint64_t, std::uint64_t>> witness;
  std::uint64_t pairs_checked = 0;
};

/// f(x)f(y) <= f(x^y)f(xvy) for every pair, relative tolerance 1e-12; a positive
/// left side against a zero right side is always a violation.
LsmReport is_log_supermodular(const BooleanFunction& f, int max_bits = 16);

/// Every factor of a binary model is log-supermodular.
bool is_log_supermodular_model(const FactorGraph& model);

struct ModularityReport {
  bool holds = true;
  double worst_slack = 0.0;
  std::optional<std::pair<std::uint64_t, std::uint64_t>> witness;
};

/// Additive check f(x) + f(y) <= f(x^y) + f(xvy) over all pairs of n-bit masks.
ModularityReport check_supermodular(int n, const std::function<double(std::uint64_t)>& f,
                                    double tolerance = 1e-12);
/// Reversed inequality.
ModularityReport check_submodular(int n, const std::function<double(std::uint64_t)>& f,
                                  double tolerance = 1e-12);

struct CorrelationReport {
  bool g_log_supermodular = false;  // (a)
  bool pointwise_bound = false;     // (b) g(x^1..x^M) <= prod f_m(x^[m])
  bool sum_bound = false;           // (c) sum g <= prod sum f_m
  double worst_pointwise_slack = 0.0;
  double sum_slack = 0.0;  // relative: (rhs - lhs) / rhs
  double g_sum = 0.0;
  double f_product = 0.0;
};

/// g is over {0,1}^{Mn}: layer m occupies mask bits [m*n, (m+1)*n).
CorrelationReport check_correlation_inequality(const BooleanFunction& g,
                                               std::span<const BooleanFunction> fs);

/// Flips every B-side variable of a pairwise binary model. Fails unless every
/// factor joins an A-side variable to a B-side variable.
FactorGraph switch_bipartite(const FactorGraph& model, std::span<const int> a_side,
                             std::span<const int> b_side);

}  // namespace bethe
