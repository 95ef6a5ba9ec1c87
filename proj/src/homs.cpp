#include "bethe/homs.hpp"

#include <algorithm>
#include <cmath>

#include "bethe/errors.hpp"
#include "bethe/lattice.hpp"
#include "bethe/random.hpp"

namespace bethe {

namespace {

void require_nonnegative(const std::vector<double>& v, const char* name) {
  for (double x : v)
    if (!(x >= 0.0) || !std::isfinite(x))
      throw InputError(std::string("hom model: ") + name + " must be finite and nonnegative");
}

std::uint64_t assignments(int n, int vertices) {
  std::uint64_t c = 1;
  for (int k = 0; k < vertices; ++k) {
    if (n != 0 && c > (~std::uint64_t{0}) / static_cast<std::uint64_t>(n)) return ~std::uint64_t{0};
    c *= static_cast<std::uint64_t>(n);
  }
  return c;
}

std::vector<int> degrees(const Graph& g) {
  std::vector<int> d(static_cast<std::size_t>(g.num_vertices), 0);
  for (auto [u, v] : g.edges) {
    ++d[static_cast<std::size_t>(u)];
    ++d[static_cast<std::size_t>(v)];
  }
  return d;
}

template <class Gamma>
double sum_homs(const Graph& g, const std::vector<double>& w, int n, Gamma gamma, std::uint64_t cap) {
  require_enumerable(assignments(n, g.num_vertices), cap, "hom_partition");
  std::vector<int> cards(static_cast<std::size_t>(g.num_vertices), n);
  CompensatedSum z;
  if (n == 0) return g.num_vertices == 0 ? 1.0 : 0.0;
  for_each_state(cards, [&](std::span<const int> s) {
    double f = 1.0;
    for (int v : s) f *= w[static_cast<std::size_t>(v)];
    for (auto [u, v] : g.edges) f *= gamma(s[static_cast<std::size_t>(u)], s[static_cast<std::size_t>(v)]);
    z += f;
  });
  return z.value();
}

}  // namespace

double HomModel::gamma(int s, int t) const {
  return a[static_cast<std::size_t>(s)] * a[static_cast<std::size_t>(t)] +
         b[static_cast<std::size_t>(s)] * b[static_cast<std::size_t>(t)];
}

HomModel make_hom_model(Graph graph, std::vector<double> w, std::vector<double> a, std::vector<double> b) {
  graph = make_graph(graph.num_vertices, std::move(graph.edges));
  if (w.empty()) throw InputError("hom model: target size must be at least 1");
  if (a.size() != w.size() || b.size() != w.size()) throw InputError("hom model: w, a and b must have equal length");
  require_nonnegative(w, "w");
  require_nonnegative(a, "a");
  require_nonnegative(b, "b");
  return HomModel{std::move(graph), std::move(w), std::move(a), std::move(b)};
}

GeneralHomModel make_general_hom_model(Graph graph, std::vector<double> w, std::vector<double> gamma) {
  graph = make_graph(graph.num_vertices, std::move(graph.edges));
  const int n = static_cast<int>(w.size());
  if (gamma.size() != w.size() * w.size()) throw InputError("hom model: gamma must be n x n");
  require_nonnegative(w, "w");
  require_nonnegative(gamma, "gamma");
  for (int s = 0; s < n; ++s)
    for (int t = 0; t < s; ++t)
      if (gamma[static_cast<std::size_t>(s * n + t)] != gamma[static_cast<std::size_t>(t * n + s)])
        throw InputError("hom model: gamma must be symmetric");
  return GeneralHomModel{std::move(graph), std::move(w), n, std::move(gamma)};
}

double hom_partition(const HomModel& model, std::uint64_t cap) {
  return sum_homs(model.graph, model.w, model.target_size(), [&](int s, int t) { return model.gamma(s, t); }, cap);
}

double hom_partition(const GeneralHomModel& model, std::uint64_t cap) {
  return sum_homs(model.graph, model.w, model.n,
                  [&](int s, int t) { return model.gamma[static_cast<std::size_t>(s * model.n + t)]; }, cap);
}

int s_count(const Graph& graph, int vertex, EdgeMask subset) {
  if (vertex < 0 || vertex >= graph.num_vertices) throw InputError("s_count: unknown vertex " + std::to_string(vertex));
  int s = 0;
  for (std::size_t e = 0; e < graph.edges.size(); ++e)
    if (((subset >> e) & 1U) && (graph.edges[e].first == vertex || graph.edges[e].second == vertex)) ++s;
  return s;
}

double power(double x, int k) {
  if (k == 0) return 1.0;
  if (x == 0.0) return 0.0;
  return std::pow(x, k);
}

double edge_weight(const HomModel& model, EdgeMask subset) {
  const auto deg = degrees(model.graph);
  double f = 1.0;
  for (int i = 0; i < model.graph.num_vertices; ++i) {
    const int s = s_count(model.graph, i, subset);
    const int rest = deg[static_cast<std::size_t>(i)] - s;
    double site = 0.0;
    for (int sigma = 0; sigma < model.target_size(); ++sigma) {
      const auto k = static_cast<std::size_t>(sigma);
      site += model.w[k] * power(model.a[k], s) * power(model.b[k], rest);
    }
    f *= site;
  }
  return f;
}

double edge_partition(const HomModel& model, std::uint64_t cap) {
  const std::size_t m = model.graph.edges.size();
  require_enumerable(m >= 63 ? ~std::uint64_t{0} : std::uint64_t{1} << m, cap, "edge_partition");
  CompensatedSum z;
  for (EdgeMask a = 0;; ++a) {
    z += edge_weight(model, a);
    if (a == full_edge_mask(model.graph)) break;
  }
  return z.value();
}

Rank2Report check_rank2_lsm(const HomModel& model, int samples, std::uint64_t seed) {
  const int m = static_cast<int>(model.graph.edges.size());
  if (m > 16) throw InputError("check_rank2_lsm: at most 16 edges");
  const BooleanFunction f = BooleanFunction::tabulate(m, [&](std::uint64_t a) { return edge_weight(model, a); });
  const LsmReport lsm = is_log_supermodular(f, 16);
  Rank2Report r;
  r.lsm_holds = lsm.holds;
  r.worst_slack = lsm.worst_slack;
  r.pairs_checked = lsm.pairs_checked;

  if (model.graph.num_vertices == 0) return r;
  Rng rng(seed);
  const std::uint64_t subsets = std::uint64_t{1} << m;
  r.worst_scalar_slack = std::numeric_limits<double>::infinity();
  for (int k = 0; k < samples; ++k) {
    const EdgeMask a1 = uniform_below(rng, subsets);
    const EdgeMask a2 = uniform_below(rng, subsets);
    const int i = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(model.graph.num_vertices)));
    const auto sigma = static_cast<std::size_t>(uniform_below(rng, static_cast<std::uint64_t>(model.target_size())));
    const auto gam = static_cast<std::size_t>(uniform_below(rng, static_cast<std::uint64_t>(model.target_size())));
    if (model.b[sigma] == 0.0 || model.b[gam] == 0.0) continue;
    const double cs = model.a[sigma] / model.b[sigma];
    const double cg = model.a[gam] / model.b[gam];
    const int s1 = s_count(model.graph, i, a1);
    const int s2 = s_count(model.graph, i, a2);
    const int sj = s_count(model.graph, i, a1 | a2);
    const int sm = s_count(model.graph, i, a1 & a2);
    const double lhs = power(cs, s1) * power(cg, s2) + power(cs, s2) * power(cg, s1);
    const double rhs = power(cs, sj) * power(cg, sm) + power(cs, sm) * power(cg, sj);
    const double scale = std::max({lhs, rhs, 1e-300});
    const double slack = (rhs - lhs) / scale;
    ++r.scalar_samples;
    r.worst_scalar_slack = std::min(r.worst_scalar_slack, slack);
    if (slack < -kLsmRelativeTolerance) ++r.scalar_violations;
  }
  if (r.scalar_samples == 0) r.worst_scalar_slack = 0.0;
  return r;
}

FactorGraph to_factor_graph(const HomModel& model) {
  const int n = model.target_size();
  FactorGraph fg(std::vector<int>(static_cast<std::size_t>(model.graph.num_vertices), n));
  for (int v = 0; v < model.graph.num_vertices; ++v) fg.set_node_potential(v, model.w);
  std::vector<double> table(static_cast<std::size_t>(n * n));
  for (int s = 0; s < n; ++s)
    for (int t = 0; t < n; ++t) table[static_cast<std::size_t>(s * n + t)] = model.gamma(s, t);
  for (auto [u, v] : model.graph.edges) fg.add_factor({u, v}, table);
  return fg;
}

}  // namespace bethe
