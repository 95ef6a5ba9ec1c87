#include "bethe/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bethe/errors.hpp"

namespace bethe {

namespace {

std::uint64_t saturating_product(std::span<const int> cards) {
  std::uint64_t n = 1;
  for (int c : cards) {
    const auto uc = static_cast<std::uint64_t>(c);
    if (uc != 0 && n > std::numeric_limits<std::uint64_t>::max() / uc)
      return std::numeric_limits<std::uint64_t>::max();
    n *= uc;
  }
  return n;
}

void check_weights(std::span<const double> values, const char* what) {
  for (double v : values)
    if (!std::isfinite(v) || v < 0.0)
      throw InputError(std::string(what) + " entries must be finite and nonnegative");
}

}  // namespace

PotentialTable::PotentialTable(std::vector<int> cardinalities, std::vector<double> values)
    : cards_(std::move(cardinalities)), values_(std::move(values)) {
  for (int c : cards_)
    if (c < 1) throw InputError("potential table cardinalities must be positive");
  const std::uint64_t n = saturating_product(cards_);
  if (n != values_.size()) {
    std::ostringstream os;
    os << "potential table has " << values_.size() << " entries, expected " << n;
    throw InputError(os.str());
  }
  check_weights(values_, "potential table");
  strides_.assign(cards_.size(), 1);
  for (std::size_t p = cards_.size(); p-- > 1;)
    strides_[p - 1] = strides_[p] * static_cast<std::size_t>(cards_[p]);
}

PotentialTable PotentialTable::filled(std::vector<int> cardinalities, double value) {
  const std::uint64_t n = saturating_product(cardinalities);
  return PotentialTable(std::move(cardinalities), std::vector<double>(n, value));
}

std::size_t PotentialTable::index(std::span<const int> states) const {
  if (states.size() != cards_.size()) throw InputError("table index has wrong arity");
  std::size_t k = 0;
  for (std::size_t p = 0; p < states.size(); ++p) {
    if (states[p] < 0 || states[p] >= cards_[p]) throw InputError("table state out of range");
    k += strides_[p] * static_cast<std::size_t>(states[p]);
  }
  return k;
}

void PotentialTable::decode(std::size_t k, std::span<int> states) const {
  for (std::size_t p = 0; p < cards_.size(); ++p) {
    states[p] = static_cast<int>(k / strides_[p]);
    k %= strides_[p];
  }
}

FactorGraph::FactorGraph(std::vector<int> cardinalities) {
  for (int c : cardinalities) add_variable(c);
}

int FactorGraph::add_variable(int cardinality) {
  if (cardinality < 1) throw InputError("variable cardinality must be at least 1");
  cards_.push_back(cardinality);
  node_potentials_.emplace_back();
  adjacency_.emplace_back();
  return num_variables() - 1;
}

int FactorGraph::add_factor(std::vector<int> scope, PotentialTable table) {
  if (table.cardinalities().size() != scope.size())
    throw InputError("factor table arity differs from its scope");
  for (std::size_t p = 0; p < scope.size(); ++p) {
    const int v = scope[p];
    if (v < 0 || v >= num_variables()) throw InputError("factor scope references unknown variable");
    if (std::count(scope.begin(), scope.end(), v) != 1)
      throw InputError("factor scope contains a duplicate variable");
    if (table.cardinalities()[p] != cards_[static_cast<std::size_t>(v)])
      throw InputError("factor table cardinality differs from variable cardinality");
  }
  const int a = num_factors();
  for (std::size_t p = 0; p < scope.size(); ++p)
    adjacency_[static_cast<std::size_t>(scope[p])].push_back({a, static_cast<int>(p)});
  factors_.push_back({std::move(scope), std::move(table)});
  return a;
}

int FactorGraph::add_factor(std::vector<int> scope, std::vector<double> values) {
  std::vector<int> cards;
  for (int v : scope) {
    if (v < 0 || v >= num_variables()) throw InputError("factor scope references unknown variable");
    cards.push_back(cards_[static_cast<std::size_t>(v)]);
  }
  return add_factor(std::move(scope), PotentialTable(std::move(cards), std::move(values)));
}

void FactorGraph::set_node_potential(int var, std::vector<double> weights) {
  if (var < 0 || var >= num_variables()) throw InputError("node potential for unknown variable");
  if (static_cast<int>(weights.size()) != cards_[static_cast<std::size_t>(var)])
    throw InputError("node potential length differs from variable cardinality");
  check_weights(weights, "node potential");
  node_potentials_[static_cast<std::size_t>(var)] = std::move(weights);
}

std::uint64_t FactorGraph::joint_state_count() const { return saturating_product(cards_); }

bool FactorGraph::is_pairwise() const {
  return std::all_of(factors_.begin(), factors_.end(),
                     [](const Factor& f) { return f.scope.size() == 2; });
}

bool FactorGraph::is_binary() const {
  return std::all_of(cards_.begin(), cards_.end(), [](int c) { return c == 2; });
}

FactorGraph disjoint_union(const FactorGraph& a, const FactorGraph& b) {
  FactorGraph out = a;
  const int offset = a.num_variables();
  for (int v = 0; v < b.num_variables(); ++v) {
    out.add_variable(b.cardinality(v));
    if (b.has_node_potential(v)) {
      auto w = b.node_potential(v);
      out.set_node_potential(offset + v, {w.begin(), w.end()});
    }
  }
  for (const Factor& f : b.factors()) {
    std::vector<int> scope = f.scope;
    for (int& v : scope) v += offset;
    out.add_factor(std::move(scope), f.table);
  }
  return out;
}

std::vector<double> marginalize(const PotentialTable& shape, std::span<const double> table,
                                int position) {
  const auto& cards = shape.cardinalities();
  if (table.size() != shape.size()) throw InputError("belief table has wrong size");
  const auto p = static_cast<std::size_t>(position);
  const std::size_t stride = shape.stride(p);
  const auto card = static_cast<std::size_t>(cards[p]);
  std::vector<double> out(card, 0.0);
  for (std::size_t k = 0; k < table.size(); ++k) out[(k / stride) % card] += table[k];
  return out;
}

double polytope_violation(const FactorGraph& model, const PseudoMarginals& tau) {
  if (tau.node.size() != static_cast<std::size_t>(model.num_variables()) ||
      tau.factor.size() != static_cast<std::size_t>(model.num_factors()))
    throw InputError("pseudo-marginals do not match the model");
  double worst = 0.0;
  for (int i = 0; i < model.num_variables(); ++i) {
    const auto& t = tau.node[static_cast<std::size_t>(i)];
    if (t.size() != static_cast<std::size_t>(model.cardinality(i)))
      throw InputError("node belief has wrong length");
    double s = 0.0;
    for (double v : t) {
      worst = std::max(worst, -v);
      s += v;
    }
    worst = std::max(worst, std::fabs(s - 1.0));
  }
  for (int a = 0; a < model.num_factors(); ++a) {
    const Factor& f = model.factor(a);
    const auto& t = tau.factor[static_cast<std::size_t>(a)];
    for (double v : t) worst = std::max(worst, -v);
    if (f.scope.empty()) {
      double s = 0.0;
      for (double v : t) s += v;
      worst = std::max(worst, std::fabs(s - 1.0));
      continue;
    }
    for (std::size_t p = 0; p < f.scope.size(); ++p) {
      const auto m = marginalize(f.table, t, static_cast<int>(p));
      const auto& ti = tau.node[static_cast<std::size_t>(f.scope[p])];
      for (std::size_t x = 0; x < m.size(); ++x) worst = std::max(worst, std::fabs(m[x] - ti[x]));
    }
  }
  return worst;
}

double evaluate(const FactorGraph& model, std::span<const int> x) {
  if (x.size() != static_cast<std::size_t>(model.num_variables()))
    throw InputError("assignment length differs from the number of variables");
  for (int i = 0; i < model.num_variables(); ++i)
    if (x[static_cast<std::size_t>(i)] < 0 || x[static_cast<std::size_t>(i)] >= model.cardinality(i))
      throw InputError("assignment state out of range");
  double v = 1.0;
  for (int i = 0; i < model.num_variables(); ++i) v *= model.node_weight(i, x[static_cast<std::size_t>(i)]);
  for (const Factor& f : model.factors()) {
    std::size_t k = 0;
    for (std::size_t p = 0; p < f.scope.size(); ++p)
      k += f.table.stride(p) * static_cast<std::size_t>(x[static_cast<std::size_t>(f.scope[p])]);
    v *= f.table[k];
  }
  return v;
}

void require_enumerable(std::uint64_t states, std::uint64_t cap, const char* what) {
  if (states > cap) {
    std::ostringstream os;
    os << what << ": joint state space of size " << states << " exceeds the enumeration cap "
       << cap;
    throw NumericalRefusal(os.str());
  }
}

double exact_partition(const FactorGraph& model, std::uint64_t cap) {
  require_enumerable(model.joint_state_count(), cap, "exact_partition");
  CompensatedSum z;
  for_each_state(model.cardinalities(), [&](std::span<const int> x) { z += evaluate(model, x); });
  return z.value();
}

PseudoMarginals exact_marginals(const FactorGraph& model, std::uint64_t cap) {
  require_enumerable(model.joint_state_count(), cap, "exact_marginals");
  std::vector<std::vector<CompensatedSum>> node(static_cast<std::size_t>(model.num_variables()));
  std::vector<std::vector<CompensatedSum>> fac(static_cast<std::size_t>(model.num_factors()));
  for (int i = 0; i < model.num_variables(); ++i)
    node[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(model.cardinality(i)));
  for (int a = 0; a < model.num_factors(); ++a)
    fac[static_cast<std::size_t>(a)].resize(model.factor(a).table.size());

  CompensatedSum z;
  for_each_state(model.cardinalities(), [&](std::span<const int> x) {
    const double w = evaluate(model, x);
    if (w == 0.0) return;
    z += w;
    for (std::size_t i = 0; i < x.size(); ++i) node[i][static_cast<std::size_t>(x[i])] += w;
    for (std::size_t a = 0; a < fac.size(); ++a) {
      const Factor& f = model.factors()[a];
      std::size_t k = 0;
      for (std::size_t p = 0; p < f.scope.size(); ++p)
        k += f.table.stride(p) * static_cast<std::size_t>(x[static_cast<std::size_t>(f.scope[p])]);
      fac[a][k] += w;
    }
  });
  const double total = z.value();
  if (!(total > 0.0)) throw NumericalRefusal("exact_marginals: model is unnormalizable (Z = 0)");

  PseudoMarginals out;
  for (const auto& row : node) {
    auto& dst = out.node.emplace_back();
    for (const auto& s : row) dst.push_back(s.value() / total);
  }
  for (const auto& row : fac) {
    auto& dst = out.factor.emplace_back();
    for (const auto& s : row) dst.push_back(s.value() / total);
  }
  return out;
}

}  // namespace bethe
