#include "bethe/potts.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <cmath>
#include <numeric>
#include <set>

#include "bethe/errors.hpp"
#include "bethe/lattice.hpp"

namespace bethe {

namespace {

struct DisjointSets {
  explicit DisjointSets(int n) : parent(static_cast<std::size_t>(n)), size(static_cast<std::size_t>(n), 1) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int v) {
    while (parent[static_cast<std::size_t>(v)] != v) {
      parent[static_cast<std::size_t>(v)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
      v = parent[static_cast<std::size_t>(v)];
    }
    return v;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size[static_cast<std::size_t>(a)] < size[static_cast<std::size_t>(b)]) std::swap(a, b);
    parent[static_cast<std::size_t>(b)] = a;
    size[static_cast<std::size_t>(a)] += size[static_cast<std::size_t>(b)];
    return true;
  }
  std::vector<int> parent;
  std::vector<int> size;
};

DisjointSets components_of(const Graph& graph, EdgeMask subset) {
  DisjointSets ds(graph.num_vertices);
  for (std::size_t e = 0; e < graph.edges.size(); ++e)
    if ((subset >> e) & 1U) ds.unite(graph.edges[e].first, graph.edges[e].second);
  return ds;
}

void check_mask(const Graph& graph, EdgeMask subset) {
  if (graph.edges.size() < 64 && (subset >> graph.edges.size()) != 0)
    throw InputError("edge subset references edges beyond the graph");
}

}  // namespace

Graph make_graph(int num_vertices, std::vector<std::pair<int, int>> edges) {
  if (num_vertices < 0) throw InputError("graph: negative vertex count");
  if (edges.size() > 64) throw InputError("graph: at most 64 edges are supported");
  std::set<std::pair<int, int>> seen;
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || u >= num_vertices || v >= num_vertices)
      throw InputError("graph: edge endpoint out of range");
    if (u == v) throw InputError("graph: self-loops are not allowed");
    if (!seen.insert({std::min(u, v), std::max(u, v)}).second)
      throw InputError("graph: duplicate edge");
  }
  return Graph{num_vertices, std::move(edges)};
}

int count_components(const Graph& graph, EdgeMask subset) {
  check_mask(graph, subset);
  DisjointSets ds = components_of(graph, subset);
  int k = 0;
  for (int v = 0; v < graph.num_vertices; ++v)
    if (ds.find(v) == v) ++k;
  return k;
}

std::vector<int> component_sizes(const Graph& graph, EdgeMask subset) {
  check_mask(graph, subset);
  DisjointSets ds = components_of(graph, subset);
  std::vector<int> sizes;
  for (int v = 0; v < graph.num_vertices; ++v)
    if (ds.find(v) == v) sizes.push_back(ds.size[static_cast<std::size_t>(v)]);
  return sizes;
}

void validate(const PottsModel& model) {
  make_graph(model.graph.num_vertices, model.graph.edges);
  if (model.q < 1) throw InputError("potts: q must be a positive integer");
  if (model.coupling.size() != model.graph.edges.size())
    throw InputError("potts: need one coupling per edge");
  for (double j : model.coupling)
    if (!std::isfinite(j)) throw InputError("potts: couplings must be finite");
  if (!model.field.empty() && model.field.size() != static_cast<std::size_t>(model.q))
    throw InputError("potts: field vector must have length q");
  for (double h : model.field)
    if (!std::isfinite(h)) throw InputError("potts: field entries must be finite");
}

bool is_ferromagnetic(const PottsModel& model) {
  return std::all_of(model.coupling.begin(), model.coupling.end(), [](double j) { return j > 0.0; });
}

double potts_weight(const PottsModel& model, std::span<const int> spins) {
  if (spins.size() != static_cast<std::size_t>(model.graph.num_vertices))
    throw InputError("potts: spin vector has wrong length");
  double log_w = 0.0;
  for (int s : spins) {
    if (s < 0 || s >= model.q) throw InputError("potts: spin out of range");
    if (!model.field.empty()) log_w += model.field[static_cast<std::size_t>(s)];
  }
  for (std::size_t e = 0; e < model.graph.edges.size(); ++e) {
    const auto [u, v] = model.graph.edges[e];
    if (spins[static_cast<std::size_t>(u)] == spins[static_cast<std::size_t>(v)]) log_w += model.coupling[e];
  }
  return std::exp(log_w);
}

double potts_partition(const PottsModel& model, std::uint64_t cap) {
  validate(model);
  std::vector<int> cards(static_cast<std::size_t>(model.graph.num_vertices), model.q);
  const double states = std::pow(static_cast<double>(model.q), model.graph.num_vertices);
  require_enumerable(states > 1.8e19 ? ~std::uint64_t{0} : static_cast<std::uint64_t>(states), cap,
                     "potts_partition");
  CompensatedSum z;
  for_each_state(cards, [&](std::span<const int> s) { z += potts_weight(model, s); });
  return z.value();
}

std::vector<double> edge_probabilities(const PottsModel& model) {
  std::vector<double> p;
  for (double j : model.coupling) {
    const double pe = std::expm1(j);
    if (pe < 0.0) throw InputError("random cluster: antiferromagnetic edge gives negative p");
    p.push_back(pe);
  }
  return p;
}

double rc_weight(const Graph& graph, double q, std::span<const double> p, EdgeMask subset) {
  if (!(q >= 1.0)) throw InputError("random cluster: q must be at least 1");
  if (p.size() != graph.edges.size()) throw InputError("random cluster: need one p per edge");
  double w = std::pow(q, count_components(graph, subset));
  for (std::size_t e = 0; e < p.size(); ++e) {
    if (p[e] < 0.0) throw InputError("random cluster: negative edge weight");
    if ((subset >> e) & 1U) w *= p[e];
  }
  return w;
}

double rc_field_weight(const Graph& graph, std::span<const double> field, std::span<const double> p,
                       EdgeMask subset) {
  if (p.size() != graph.edges.size()) throw InputError("random cluster: need one p per edge");
  double w = 1.0;
  for (int size : component_sizes(graph, subset)) {
    double s = 0.0;
    for (double h : field) s += std::exp(h * size);
    w *= s;
  }
  for (std::size_t e = 0; e < p.size(); ++e) {
    if (p[e] < 0.0) throw InputError("random cluster: negative edge weight");
    if ((subset >> e) & 1U) w *= p[e];
  }
  return w;
}

double rc_weight(const PottsModel& model, EdgeMask subset) {
  const auto p = edge_probabilities(model);
  if (model.field.empty()) return rc_weight(model.graph, model.q, p, subset);
  return rc_field_weight(model.graph, model.field, p, subset);
}

double rc_partition(const Graph& graph, double q, std::span<const double> p, std::uint64_t cap) {
  require_enumerable(graph.edges.size() >= 63 ? ~std::uint64_t{0} : std::uint64_t{1} << graph.edges.size(),
                     cap, "rc_partition");
  CompensatedSum z;
  for (EdgeMask a = 0; a <= full_edge_mask(graph); ++a) {
    z += rc_weight(graph, q, p, a);
    if (a == full_edge_mask(graph)) break;
  }
  return z.value();
}

double rc_partition(const PottsModel& model, std::uint64_t cap) {
  validate(model);
  const auto& g = model.graph;
  require_enumerable(g.edges.size() >= 63 ? ~std::uint64_t{0} : std::uint64_t{1} << g.edges.size(), cap,
                     "rc_partition");
  const auto p = edge_probabilities(model);
  CompensatedSum z;
  for (EdgeMask a = 0;; ++a) {
    z += model.field.empty() ? rc_weight(g, model.q, p, a) : rc_field_weight(g, model.field, p, a);
    if (a == full_edge_mask(g)) break;
  }
  return z.value();
}

FactorGraph to_factor_graph(const PottsModel& model) {
  validate(model);
  FactorGraph fg(std::vector<int>(static_cast<std::size_t>(model.graph.num_vertices), model.q));
  if (!model.field.empty()) {
    std::vector<double> w;
    for (double h : model.field) w.push_back(std::exp(h));
    for (int v = 0; v < model.graph.num_vertices; ++v) fg.set_node_potential(v, w);
  }
  for (std::size_t e = 0; e < model.graph.edges.size(); ++e) {
    std::vector<double> table(static_cast<std::size_t>(model.q * model.q), 1.0);
    for (int s = 0; s < model.q; ++s) table[static_cast<std::size_t>(s * model.q + s)] = std::exp(model.coupling[e]);
    fg.add_factor({model.graph.edges[e].first, model.graph.edges[e].second}, std::move(table));
  }
  return fg;
}

Graph cover_graph(const Graph& base, const CoverSpec& spec) {
  check_cover_spec(spec);
  if (spec.base.num_factors() != static_cast<int>(base.edges.size()) ||
      spec.base.num_variables() != base.num_vertices)
    throw InputError("cover spec does not match the graph");
  const int n = base.num_vertices;
  std::vector<std::pair<int, int>> edges;
  for (int m = 0; m < spec.copies; ++m)
    for (std::size_t e = 0; e < base.edges.size(); ++e) {
      const auto& scope = spec.base.factor(static_cast<int>(e)).scope;
      if (scope.size() != 2 || scope[0] != base.edges[e].first || scope[1] != base.edges[e].second)
        throw InputError("cover spec factor " + std::to_string(e) + " does not match the graph edge");
      const auto& perms = spec.permutations[e];
      edges.emplace_back(lifted_variable(base.edges[e].first, perms[0][static_cast<std::size_t>(m)], n),
                         lifted_variable(base.edges[e].second, perms[1][static_cast<std::size_t>(m)], n));
    }
  return make_graph(n * spec.copies, std::move(edges));
}

PottsModel lift(const PottsModel& base, const CoverSpec& spec) {
  PottsModel out;
  out.graph = cover_graph(base.graph, spec);
  out.q = base.q;
  out.field = base.field;
  for (int m = 0; m < spec.copies; ++m) out.coupling.insert(out.coupling.end(), base.coupling.begin(), base.coupling.end());
  return out;
}

CoverComponentReport check_cover_component_inequality(const PottsModel& base, const CoverSpec& spec,
                                                      std::span<const EdgeMask> layers) {
  validate(base);
  if (layers.size() != static_cast<std::size_t>(spec.copies))
    throw InputError("cover inequality: need one edge subset per layer");
  for (EdgeMask m : layers) check_mask(base.graph, m);
  const PottsModel cover = lift(base, spec);
  const std::size_t ne = base.graph.edges.size();

  EdgeMask cover_subset = 0;
  for (std::size_t m = 0; m < layers.size(); ++m) cover_subset |= layers[m] << (m * ne);
  if (ne * layers.size() > 64) throw InputError("cover inequality: cover has more than 64 edges");

  const auto sorted = sorted_stack_masks(layers, static_cast<int>(ne));
  CoverComponentReport r;
  r.cover_components = count_components(cover.graph, cover_subset);
  for (EdgeMask s : sorted) r.sorted_components += count_components(base.graph, s);
  r.components_hold = r.cover_components <= r.sorted_components;

  r.cover_weight = rc_weight(cover, cover_subset);
  r.sorted_weight = 1.0;
  for (EdgeMask s : sorted) r.sorted_weight *= rc_weight(base, s);
  const double top = std::max(r.cover_weight, r.sorted_weight);
  r.weight_slack = top > 0.0 ? (r.sorted_weight - r.cover_weight) / top : 0.0;
  r.weight_holds = r.cover_weight <= r.sorted_weight * (1.0 + 1e-12);
  return r;
}

std::string describe(const CounterexampleConvention& c) {
  std::string s = c.pairs == PairConvention::UnorderedEdges ? "unordered-edges" : "ordered-pairs";
  s += c.field == FieldConvention::Exponentiated ? "+exponentiated-field" : "+direct-field";
  return s;
}

FactorGraph build_counterexample(const CounterexampleConvention& convention) {
  FactorGraph fg({3, 3, 3});
  const double strong = std::exp(2.0);
  const double weak = std::exp(-1.0);
  for (int k = 0; k < 3; ++k) {
    std::vector<double> h(3, weak);
    h[static_cast<std::size_t>(k)] = strong;
    if (convention.field == FieldConvention::Exponentiated)
      for (double& v : h) v = std::exp(v);
    fg.set_node_potential(k, h);
  }
  const double coupling = convention.pairs == PairConvention::UnorderedEdges ? 2.0 : 4.0;
  for (auto [i, j] : {std::pair{0, 1}, std::pair{1, 2}, std::pair{0, 2}}) {
    std::vector<double> t(9, 1.0);
    for (int s = 0; s < 3; ++s) t[static_cast<std::size_t>(3 * s + s)] = std::exp(coupling);
    fg.add_factor({i, j}, std::move(t));
  }
  return fg;
}

CounterexampleResult evaluate_counterexample(const CounterexampleConvention& convention,
                                             const MaximizeOptions& options) {
  const FactorGraph fg = build_counterexample(convention);
  CounterexampleResult r;
  r.convention = convention;
  r.partition = exact_partition(fg);
  const BetheOptimum opt = maximize_bethe(fg, options);
  r.bethe = opt.value;
  r.gap = r.bethe - r.partition;
  r.converged_restarts = opt.converged_restarts;
  return r;
}

CounterexampleSelection select_counterexample_convention(const MaximizeOptions& options) {
  CounterexampleSelection sel;
  for (auto pairs : {PairConvention::UnorderedEdges, PairConvention::OrderedPairs})
    for (auto field : {FieldConvention::Exponentiated, FieldConvention::Direct})
      sel.candidates.push_back(evaluate_counterexample({pairs, field}, options));
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < sel.candidates.size(); ++k) {
    const double miss = std::fabs(sel.candidates[k].gap - kPublishedBetheGap);
    if (miss < best) {
      best = miss;
      sel.selected = k;
    }
  }
  sel.matches = best <= 0.01 * kPublishedBetheGap;
  return sel;
}

FactorGraph build_counterexample() {
  const CounterexampleSelection sel = select_counterexample_convention();
  return build_counterexample(sel.candidates[sel.selected].convention);
}

}  // namespace bethe
