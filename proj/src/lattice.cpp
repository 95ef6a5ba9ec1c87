#include "bethe/lattice.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "bethe/errors.hpp"

namespace bethe {

BitVector::BitVector(std::initializer_list<int> bits) {
  for (int b : bits) {
    if (b != 0 && b != 1) throw InputError("bit vector entries must be 0 or 1");
    bits_.push_back(static_cast<std::uint8_t>(b));
  }
}

BitVector BitVector::from_mask(std::uint64_t mask, std::size_t n) {
  BitVector v(n);
  for (std::size_t i = 0; i < n; ++i) v.set(i, (mask >> i) & 1U);
  return v;
}

std::size_t BitVector::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::uint64_t BitVector::mask() const {
  if (bits_.size() > 64) throw InputError("bit vector too long for a mask");
  std::uint64_t m = 0;
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i]) m |= std::uint64_t{1} << i;
  return m;
}

std::pair<BitVector, BitVector> meet_join(const BitVector& x, const BitVector& y) {
  if (x.size() != y.size()) throw InputError("meet_join: dimension mismatch");
  BitVector lo(x.size()), hi(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    lo.set(i, x[i] && y[i]);
    hi.set(i, x[i] || y[i]);
  }
  return {lo, hi};
}

std::vector<BitVector> sorted_stack(std::span<const BitVector> xs) {
  if (xs.empty()) throw InputError("sorted_stack: empty family");
  const std::size_t n = xs.front().size();
  for (const auto& x : xs)
    if (x.size() != n) throw InputError("sorted_stack: dimension mismatch");
  std::vector<BitVector> out(xs.size(), BitVector(n));
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t ones = 0;
    for (const auto& x : xs) ones += x[i] ? 1 : 0;
    for (std::size_t m = 0; m < ones; ++m) out[m].set(i, true);
  }
  return out;
}

std::vector<std::uint64_t> sorted_stack_masks(std::span<const std::uint64_t> xs, int n) {
  if (xs.empty()) throw InputError("sorted_stack: empty family");
  std::vector<std::uint64_t> out(xs.size(), 0);
  for (int i = 0; i < n; ++i) {
    std::size_t ones = 0;
    for (auto x : xs) ones += (x >> i) & 1U;
    for (std::size_t m = 0; m < ones; ++m) out[m] |= std::uint64_t{1} << i;
  }
  return out;
}

BooleanFunction::BooleanFunction(int bits, std::vector<double> vals)
    : n(bits), values(std::move(vals)) {
  if (bits < 0 || bits > 40) throw InputError("boolean function dimension out of range");
  if (values.size() != (std::size_t{1} << bits))
    throw InputError("boolean function table has wrong size");
  for (double v : values)
    if (!(v >= 0.0) || !std::isfinite(v)) throw InputError("boolean function must be nonnegative");
}

BooleanFunction BooleanFunction::tabulate(int bits,
                                          const std::function<double(std::uint64_t)>& f) {
  std::vector<double> vals(std::size_t{1} << bits);
  for (std::uint64_t m = 0; m < vals.size(); ++m) vals[m] = f(m);
  return BooleanFunction(bits, std::move(vals));
}

double BooleanFunction::sum() const {
  CompensatedSum s;
  for (double v : values) s += v;
  return s.value();
}

BooleanFunction boolean_function(const PotentialTable& table) {
  const auto& cards = table.cardinalities();
  for (int c : cards)
    if (c != 2) throw InputError("boolean_function: table is not binary");
  const int n = static_cast<int>(cards.size());
  return BooleanFunction::tabulate(n, [&](std::uint64_t mask) {
    std::size_t k = 0;
    for (int p = 0; p < n; ++p)
      if ((mask >> p) & 1U) k += table.stride(static_cast<std::size_t>(p));
    return table[k];
  });
}

BooleanFunction boolean_function(const FactorGraph& model) {
  if (!model.is_binary()) throw InputError("boolean_function: model is not binary");
  const int n = model.num_variables();
  std::vector<int> x(static_cast<std::size_t>(n));
  return BooleanFunction::tabulate(n, [&](std::uint64_t mask) {
    for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = static_cast<int>((mask >> i) & 1U);
    return evaluate(model, x);
  });
}

LsmReport is_log_supermodular(const BooleanFunction& f, int max_bits) {
  if (f.n > max_bits) {
    std::ostringstream os;
    os << "is_log_supermodular: " << f.n << " bits exceeds the cap of " << max_bits;
    throw NumericalRefusal(os.str());
  }
  LsmReport report;
  const std::uint64_t size = std::uint64_t{1} << f.n;
  for (std::uint64_t x = 0; x < size; ++x) {
    for (std::uint64_t y = x; y < size; ++y) {
      ++report.pairs_checked;
      const double lhs = f(x) * f(y);
      const double rhs = f(x & y) * f(x | y);
      if (lhs == 0.0) continue;
      const double slack = (rhs - lhs) / std::max(lhs, rhs);
      if (slack < report.worst_slack) report.worst_slack = slack;
      const bool violated = rhs == 0.0 || lhs > rhs * (1.0 + kLsmRelativeTolerance);
      if (violated && report.holds) {
        report.holds = false;
        report.witness = std::make_pair(x, y);
      }
    }
  }
  return report;
}

bool is_log_supermodular_model(const FactorGraph& model) {
  for (const Factor& factor : model.factors())
    if (!is_log_supermodular(boolean_function(factor.table)).holds) return false;
  return true;
}

namespace {

ModularityReport check_modular(int n, const std::function<double(std::uint64_t)>& f,
                               double tolerance, double sign) {
  if (n < 0 || n > 20) throw NumericalRefusal("modularity check limited to 20 bits");
  ModularityReport report;
  const std::uint64_t size = std::uint64_t{1} << n;
  std::vector<double> vals(size);
  for (std::uint64_t m = 0; m < size; ++m) vals[m] = sign * f(m);
  for (std::uint64_t x = 0; x < size; ++x) {
    for (std::uint64_t y = x; y < size; ++y) {
      const double slack = vals[x & y] + vals[x | y] - vals[x] - vals[y];
      if (slack < report.worst_slack) report.worst_slack = slack;
      if (slack < -tolerance && report.holds) {
        report.holds = false;
        report.witness = std::make_pair(x, y);
      }
    }
  }
  return report;
}

}  // namespace

ModularityReport check_supermodular(int n, const std::function<double(std::uint64_t)>& f,
                                    double tolerance) {
  return check_modular(n, f, tolerance, 1.0);
}

ModularityReport check_submodular(int n, const std::function<double(std::uint64_t)>& f,
                                  double tolerance) {
  return check_modular(n, f, tolerance, -1.0);
}

CorrelationReport check_correlation_inequality(const BooleanFunction& g,
                                               std::span<const BooleanFunction> fs) {
  if (fs.empty()) throw InputError("check_correlation_inequality: no layer functions");
  const int n = fs.front().n;
  const int layers = static_cast<int>(fs.size());
  for (const auto& f : fs)
    if (f.n != n) throw InputError("check_correlation_inequality: layer dimension mismatch");
  if (g.n != n * layers) throw InputError("check_correlation_inequality: g has wrong dimension");
  if (g.n > 20) throw NumericalRefusal("check_correlation_inequality: more than 20 bits");

  CorrelationReport report;
  report.g_log_supermodular = is_log_supermodular(g, 20).holds;

  report.pointwise_bound = true;
  const std::uint64_t layer_mask = (std::uint64_t{1} << n) - 1;
  std::vector<std::uint64_t> xs(static_cast<std::size_t>(layers));
  for (std::uint64_t joint = 0; joint < (std::uint64_t{1} << g.n); ++joint) {
    for (int m = 0; m < layers; ++m)
      xs[static_cast<std::size_t>(m)] = (joint >> (m * n)) & layer_mask;
    const auto sorted = sorted_stack_masks(xs, n);
    double rhs = 1.0;
    for (int m = 0; m < layers; ++m)
      rhs *= fs[static_cast<std::size_t>(m)](sorted[static_cast<std::size_t>(m)]);
    const double lhs = g(joint);
    if (lhs == 0.0) continue;
    const double slack = (rhs - lhs) / std::max(lhs, rhs);
    report.worst_pointwise_slack = std::min(report.worst_pointwise_slack, slack);
    if (rhs == 0.0 || lhs > rhs * (1.0 + kLsmRelativeTolerance)) report.pointwise_bound = false;
  }

  report.g_sum = g.sum();
  report.f_product = 1.0;
  for (const auto& f : fs) report.f_product *= f.sum();
  report.sum_slack = report.f_product > 0.0 ? (report.f_product - report.g_sum) / report.f_product
                                            : (report.g_sum > 0.0 ? -1.0 : 0.0);
  report.sum_bound = report.g_sum <= report.f_product * (1.0 + kLsmRelativeTolerance);
  return report;
}

FactorGraph switch_bipartite(const FactorGraph& model, std::span<const int> a_side,
                             std::span<const int> b_side) {
  const int n = model.num_variables();
  std::vector<int> side(static_cast<std::size_t>(n), -1);
  auto assign = [&](std::span<const int> vs, int s) {
    for (int v : vs) {
      if (v < 0 || v >= n) throw InputError("switch_bipartite: unknown variable in partition");
      if (side[static_cast<std::size_t>(v)] != -1)
        throw InputError("switch_bipartite: variable listed twice in partition");
      side[static_cast<std::size_t>(v)] = s;
    }
  };
  assign(a_side, 0);
  assign(b_side, 1);
  for (int v = 0; v < n; ++v) {
    if (side[static_cast<std::size_t>(v)] == -1)
      throw InputError("switch_bipartite: partition does not cover every variable");
    if (model.cardinality(v) != 2) throw InputError("switch_bipartite: non-binary variable");
  }

  FactorGraph out(model.cardinalities());
  for (int v = 0; v < n; ++v) {
    if (!model.has_node_potential(v)) continue;
    auto w = model.node_potential(v);
    if (side[static_cast<std::size_t>(v)] == 1)
      out.set_node_potential(v, {w[1], w[0]});
    else
      out.set_node_potential(v, {w.begin(), w.end()});
  }
  for (const Factor& f : model.factors()) {
    if (f.scope.size() != 2) throw InputError("switch_bipartite: non-pairwise factor");
    const int s0 = side[static_cast<std::size_t>(f.scope[0])];
    const int s1 = side[static_cast<std::size_t>(f.scope[1])];
    if (s0 == s1) throw InputError("switch_bipartite: edge inside one side of the partition");
    // Flip the B-side coordinate: new(x0, x1) = old(x0', x1') with the B entry complemented.
    std::vector<double> vals(4);
    for (int x0 = 0; x0 < 2; ++x0)
      for (int x1 = 0; x1 < 2; ++x1) {
        const int y0 = s0 == 1 ? 1 - x0 : x0;
        const int y1 = s1 == 1 ? 1 - x1 : x1;
        vals[static_cast<std::size_t>(2 * x0 + x1)] = f.table[static_cast<std::size_t>(2 * y0 + y1)];
      }
    out.add_factor(f.scope, std::move(vals));
  }
  return out;
}

}  // namespace bethe
