#include "bethe/verify.hpp"

#include <cmath>
#include <map>

#include "bethe/errors.hpp"
#include "bethe/lattice.hpp"

namespace bethe {

namespace {

constexpr double kIdentityTolerance = 1e-9;
constexpr double kOrderingTolerance = 1e-6;
constexpr double kCoverTolerance = 1e-9;
constexpr double kTreeTolerance = 1e-6;
constexpr double kGradientTolerance = 1e-5;
constexpr double kCounterexampleTolerance = 0.01;
constexpr std::size_t kMaxFailures = 10;

int default_trials(const VerifyOptions& o, int fallback) { return o.trials > 0 ? o.trials : fallback; }

double relative_difference(double a, double b) {
  const double scale = std::max(std::fabs(a), std::fabs(b));
  return scale > 0.0 ? std::fabs(a - b) / scale : 0.0;
}

TrialOutcome identity_outcome(double lhs, double rhs, const std::string& what) {
  TrialOutcome t;
  const double rel = relative_difference(lhs, rhs);
  t.slack = kIdentityTolerance - rel;
  t.pass = rel <= kIdentityTolerance;
  if (!t.pass) t.message = what + ": " + format_double(lhs) + " vs " + format_double(rhs);
  return t;
}

// Z_MF <= Z_B <= Z up to eps * Z.
TrialOutcome ordering_outcome(double z, double zb, double zmf, const std::string& what) {
  TrialOutcome t;
  const double lower = (zb - zmf) / z;
  const double upper = (z - zb) / z;
  t.slack = std::min(lower, upper);
  t.pass = std::isfinite(t.slack) && t.slack >= -kOrderingTolerance;
  if (!t.pass)
    t.message = what + ": Z=" + format_double(z) + " Z_B=" + format_double(zb) + " Z_MF=" + format_double(zmf);
  return t;
}

SuiteReport collect(std::string tag, double tolerance, const std::vector<TrialOutcome>& outcomes) {
  SuiteReport r;
  r.tag = std::move(tag);
  r.tolerance = tolerance;
  for (std::size_t k = 0; k < outcomes.size(); ++k) r.record(outcomes[k], static_cast<int>(k));
  return r;
}

MaximizeOptions maximize_options(std::uint64_t seed) {
  MaximizeOptions o;
  o.seed = seed;
  return o;
}

MeanFieldOptions mean_field_options(std::uint64_t seed) {
  MeanFieldOptions o;
  o.seed = seed;
  return o;
}

Graph random_nonempty_graph(Rng& rng, int max_vertices, int max_edges) {
  for (;;) {
    Graph g = random_graph(rng, max_vertices, max_edges);
    if (!g.edges.empty()) return g;
  }
}

std::vector<double> random_vector(Rng& rng, std::size_t n, double lo, double hi) {
  std::vector<double> v(n);
  for (double& x : v) x = uniform_real(rng, lo, hi);
  return v;
}

GFMatrix hamming74() {
  return GFMatrix(GaloisField(2), 4, 7,
                  {1, 0, 0, 0, 1, 1, 0,  //
                   0, 1, 0, 0, 1, 0, 1,  //
                   0, 0, 1, 0, 0, 1, 1,  //
                   0, 0, 0, 1, 1, 1, 1});
}

}  // namespace

void SuiteReport::record(const TrialOutcome& t, int index) {
  ++trials;
  if (t.pass)
    ++passed;
  else if (failures.size() < kMaxFailures)
    failures.push_back("trial " + std::to_string(index) + ": " + t.message);
  worst_slack = std::min(worst_slack, t.slack);
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (trial + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Graph random_graph(Rng& rng, int max_vertices, int max_edges) {
  const int n = 2 + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(std::max(1, max_vertices - 1))));
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  const auto order = random_permutation(rng, static_cast<int>(pairs.size()));
  const int limit = std::min(max_edges, static_cast<int>(pairs.size()));
  const int m = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(limit + 1)));
  std::vector<std::pair<int, int>> edges;
  for (int k = 0; k < m; ++k) edges.push_back(pairs[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])]);
  return make_graph(n, std::move(edges));
}

FactorGraph random_lsm_binary_model(Rng& rng, int max_variables) {
  const Graph g = random_nonempty_graph(rng, max_variables, max_variables * (max_variables - 1) / 2);
  FactorGraph fg(std::vector<int>(static_cast<std::size_t>(g.num_vertices), 2));
  for (int v = 0; v < g.num_vertices; ++v) {
    auto w = random_vector(rng, 2, -1.0, 1.0);
    for (double& x : w) x = std::exp(x);
    fg.set_node_potential(v, w);
  }
  for (auto [u, v] : g.edges) {
    const double a = std::exp(uniform_real(rng, -1.0, 1.0));
    const double b = std::exp(uniform_real(rng, -1.0, 1.0));
    const double c = std::exp(uniform_real(rng, -1.0, 1.0));
    const double d = b * c / a * std::exp(uniform_real(rng, 0.0, 1.5));
    fg.add_factor({u, v}, {a, b, c, d});
  }
  return fg;
}

FactorGraph random_tree_model(Rng& rng, int max_variables, int max_cardinality) {
  const int n = 1 + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(max_variables)));
  std::vector<int> cards;
  for (int i = 0; i < n; ++i)
    cards.push_back(2 + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(max_cardinality - 1))));
  FactorGraph fg(cards);
  for (int v = 0; v < n; ++v) {
    auto w = random_vector(rng, static_cast<std::size_t>(cards[static_cast<std::size_t>(v)]), -1.0, 1.0);
    for (double& x : w) x = std::exp(x);
    fg.set_node_potential(v, w);
  }
  for (int v = 1; v < n; ++v) {
    const int parent = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(v)));
    auto t = random_vector(rng, static_cast<std::size_t>(cards[static_cast<std::size_t>(parent)] * cards[static_cast<std::size_t>(v)]),
                           -1.5, 1.5);
    for (double& x : t) x = std::exp(x);
    fg.add_factor({parent, v}, t);
  }
  return fg;
}

HomModel random_hom_model(Rng& rng, int max_vertices, int max_edges, int max_target) {
  Graph g = random_graph(rng, max_vertices, max_edges);
  const auto n = 1 + static_cast<std::size_t>(uniform_below(rng, static_cast<std::uint64_t>(max_target)));
  auto w = random_vector(rng, n, 0.05, 2.0);
  auto a = random_vector(rng, n, 0.05, 2.0);
  auto b = random_vector(rng, n, 0.05, 2.0);
  return make_hom_model(std::move(g), std::move(w), std::move(a), std::move(b));
}

GFMatrix random_matrix(Rng& rng, int q, int rows, int cols, bool nonzero_columns) {
  for (;;) {
    std::vector<int> entries;
    for (int k = 0; k < rows * cols; ++k) entries.push_back(static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(q))));
    GFMatrix s(GaloisField(q), rows, cols, std::move(entries));
    bool ok = true;
    if (nonzero_columns)
      for (int a = 0; a < cols; ++a) ok = ok && !s.support(a).empty();
    if (ok) return s;
  }
}

SuiteReport verify_counterexample(const VerifyOptions& options) {
  MaximizeOptions mo;
  mo.seed = options.seed;
  const CounterexampleSelection sel = select_counterexample_convention(mo);
  const CounterexampleResult& best = sel.candidates[sel.selected];
  const double rel = std::fabs(best.gap - kPublishedBetheGap) / kPublishedBetheGap;
  TrialOutcome t;
  t.pass = rel <= kCounterexampleTolerance;
  t.slack = kCounterexampleTolerance - rel;
  t.message = "Z_B - Z = " + format_double(best.gap) + " under " + describe(best.convention) + ", expected " +
              format_double(kPublishedBetheGap);
  SuiteReport r = collect("counterexample", kCounterexampleTolerance, {t});
  Json cands = Json::array();
  for (const auto& c : sel.candidates)
    cands.push_back({{"convention", describe(c.convention)},
                     {"Z", c.partition},
                     {"Z_B", c.bethe},
                     {"Z_B_minus_Z", c.gap},
                     {"converged_restarts", c.converged_restarts}});
  r.details["candidates"] = cands;
  r.details["selected"] = describe(best.convention);
  r.details["Z"] = best.partition;
  r.details["Z_B"] = best.bethe;
  r.details["Z_B_minus_Z"] = best.gap;
  r.details["target"] = kPublishedBetheGap;
  return r;
}

SuiteReport verify_potts_rc_identity(const VerifyOptions& options) {
  const auto outcomes = run_trials(default_trials(options, 50), options.jobs, [&](int t) {
    Rng rng(trial_seed(options.seed, static_cast<std::uint64_t>(t)));
    PottsModel m;
    m.graph = random_graph(rng, 5, 8);
    m.q = 1 + static_cast<int>(uniform_below(rng, 4));
    for (std::size_t e = 0; e < m.graph.edges.size(); ++e) m.coupling.push_back(3.0 * (1.0 - uniform01(rng)));
    return identity_outcome(rc_partition(m), potts_partition(m), "Z_rc vs Z_Potts");
  });
  return collect("potts-rc-identity", kIdentityTolerance, outcomes);
}

SuiteReport verify_hom_edge_identity(const VerifyOptions& options) {
  const auto outcomes = run_trials(default_trials(options, 50), options.jobs, [&](int t) {
    Rng rng(trial_seed(options.seed, static_cast<std::uint64_t>(t)));
    const HomModel m = random_hom_model(rng, 5, 8, 4);
    return identity_outcome(edge_partition(m), hom_partition(m), "Z_edge vs Z_hom");
  });
  return collect("hom-edge-identity", kIdentityTolerance, outcomes);
}

SuiteReport verify_cover_bound(const VerifyOptions& options) {
  const auto outcomes = run_trials(default_trials(options, 100), options.jobs, [&](int t) {
    Rng rng(trial_seed(options.seed, static_cast<std::uint64_t>(t)));
    const FactorGraph base = random_lsm_binary_model(rng, 5);
    const int copies = 2 + t % 2;
    TrialOutcome o;
    if (!is_log_supermodular_model(base)) {
      o.message = "generated model is not log-supermodular";
      o.slack = -1.0;
      return o;
    }
    const CoverSpec spec = sample_cover(base, copies, rng());
    const double zh = exact_partition(build_cover(spec).cover);
    const double bound = std::pow(exact_partition(base), copies);
    o.slack = (bound - zh) / bound;
    o.pass = o.slack >= -kCoverTolerance;
    if (!o.pass) o.message = "Z(H)=" + format_double(zh) + " exceeds Z(G)^M=" + format_double(bound);
    return o;
  });
  return collect("cover-bound", kCoverTolerance, outcomes);
}

SuiteReport verify_rc_cover_components(const VerifyOptions& options) {
  SuiteReport r;
  r.tag = "rc-cover-components";
  r.tolerance = 1e-12;

  // Exhaustive: every canonical 2-cover of the triangle, every pair of layer subsets.
  PottsModel tri;
  tri.graph = make_graph(3, {{0, 1}, {1, 2}, {0, 2}});
  tri.q = 2;
  tri.coupling = {1.0, 1.0, 1.0};
  std::vector<CoverSpec> covers;
  for_each_cover(to_factor_graph(tri), 2, [&](const CoverSpec& s) { covers.push_back(s); });
  int index = 0;
  int exhaustive = 0;
  for (const CoverSpec& spec : covers)
    for (EdgeMask l0 = 0; l0 < 8; ++l0)
      for (EdgeMask l1 = 0; l1 < 8; ++l1) {
        const std::vector<EdgeMask> layers{l0, l1};
        const auto rep = check_cover_component_inequality(tri, spec, layers);
        TrialOutcome o;
        o.pass = rep.components_hold && rep.weight_holds;
        o.slack = static_cast<double>(rep.sorted_components - rep.cover_components) / rep.sorted_components;
        if (!o.pass)
          o.message = "k_H=" + std::to_string(rep.cover_components) + " > sum k_G=" + std::to_string(rep.sorted_components);
        r.record(o, index++);
        ++exhaustive;
      }

  // Sampled: random graphs, covers, layer subsets and uniform fields.
  const auto outcomes = run_trials(default_trials(options, 1000), options.jobs, [&](int t) {
    Rng rng(trial_seed(options.seed, static_cast<std::uint64_t>(t)));
    PottsModel m;
    m.graph = random_nonempty_graph(rng, 4, 5);
    m.q = 1 + static_cast<int>(uniform_below(rng, 4));
    for (std::size_t e = 0; e < m.graph.edges.size(); ++e) m.coupling.push_back(uniform_real(rng, 0.1, 2.0));
    m.field = random_vector(rng, static_cast<std::size_t>(m.q), -1.0, 1.0);
    const int copies = 2 + static_cast<int>(uniform_below(rng, 2));
    const CoverSpec spec = sample_cover(to_factor_graph(m), copies, rng());
    std::vector<EdgeMask> layers;
    for (int k = 0; k < copies; ++k) layers.push_back(rng() & full_edge_mask(m.graph));
    const auto rep = check_cover_component_inequality(m, spec, layers);
    TrialOutcome o;
    o.pass = rep.components_hold && rep.weight_holds;
    o.slack = rep.weight_slack;
    if (!o.pass)
      o.message = "f_rc+ on cover " + format_double(rep.cover_weight) + " > " + format_double(rep.sorted_weight);
    return o;
  });
  for (const auto& o : outcomes) r.record(o, index++);
  r.details["exhaustive_checks"] = exhaustive;
  r.details["triangle_two_covers"] = covers.size();
  r.details["sampled_checks"] = outcomes.size();
  return r;
}

SuiteReport verify_rank_cover(const VerifyOptions& options) {
  SuiteReport r;
  r.tag = "rank-cover";
  r.tolerance = 0.0;
  Rng rng(options.seed);
  int index = 0;
  Json matrices = Json::array();
  for (int q : {2, 3}) {
    GFMatrix s = random_matrix(rng, q, 2, 3, true);
    while (canonical_cover_count(incidence_hypergraph(s), 2) == 1) s = random_matrix(rng, q, 2, 3, true);
    matrices.push_back({{"q", q}, {"entries", s.entries()}, {"covers", canonical_cover_count(incidence_hypergraph(s), 2)}});
    for_each_cover(incidence_hypergraph(s), 2, [&](const CoverSpec& spec) {
      for (ColumnMask l0 = 0; l0 < 8; ++l0)
        for (ColumnMask l1 = 0; l1 < 8; ++l1) {
          const std::vector<ColumnMask> layers{l0, l1};
          const auto rep = check_rank_cover_inequality(s, spec, layers);
          TrialOutcome o;
          o.pass = rep.holds;
          o.slack = rep.slack;
          if (!o.pass)
            o.message = "r_SH=" + std::to_string(rep.cover_rank) + " < " + std::to_string(rep.sorted_rank);
          r.record(o, index++);
        }
    });
  }
  r.details["matrices"] = matrices;
  return r;
}

SuiteReport verify_potts_ordering(const VerifyOptions& options) {
  const auto outcomes = run_trials(default_trials(options, 30), options.jobs, [&](int t) {
    const std::uint64_t seed = trial_seed(options.seed, static_cast<std::uint64_t>(t));
    Rng rng(seed);
    PottsModel m;
    m.graph = random_nonempty_graph(rng, 5, 8);
    m.q = 2 + t % 3;
    for (std::size_t e = 0; e < m.graph.edges.size(); ++e) m.coupling.push_back(uniform_real(rng, 0.1, 2.0));
    const FactorGraph fg = to_factor_graph(m);
    return ordering_outcome(potts_partition(m), maximize_bethe(fg, maximize_options(seed)).value,
                            mean_field(fg, mean_field_options(seed)).value, "ferromagnetic Potts");
  });
  return collect("potts-ordering", kOrderingTolerance, outcomes);
}

SuiteReport verify_potts_field_ordering(const VerifyOptions& options) {
  const auto outcomes = run_trials(default_trials(options, 30), options.jobs, [&](int t) {
    const std::uint64_t seed = trial_seed(options.seed, static_cast<std::uint64_t>(t));
    Rng rng(seed);
    PottsModel m;
    m.graph = random_nonempty_graph(rng, 5, 8);
    m.q = 2 + t % 3;
    for (std::size_t e = 0; e < m.graph.edges.size(); ++e) m.coupling.push_back(uniform_real(rng, 0.1, 2.0));
    m.field = random_vector(rng, static_cast<std::size_t>(m.q), -1.0, 1.0);
    const FactorGraph fg = to_factor_graph(m);
    return ordering_outcome(potts_partition(m), maximize_bethe(fg, maximize_options(seed)).value,
                            mean_field(fg, mean_field_options(seed)).value, "Potts with uniform field");
  });
  return collect("potts-field-ordering", kOrderingTolerance, outcomes);
}

SuiteReport verify_matroid_ordering(const VerifyOptions& options) {
  const auto outcomes = run_trials(default_trials(options, 30), options.jobs, [&](int t) {
    const std::uint64_t seed = trial_seed(options.seed, static_cast<std::uint64_t>(t));
    Rng rng(seed);
    const int q = t % 2 == 0 ? 2 : 3;
    const int rows = 2 + static_cast<int>(uniform_below(rng, 3));
    const int cols = 3 + static_cast<int>(uniform_below(rng, 4));
    const GFMatrix s = random_matrix(rng, q, rows, cols, false);
    const auto coupling = random_vector(rng, static_cast<std::size_t>(cols), 0.0, 2.0);
    const MatroidFactorForm form = matroid_factor_graph(s, coupling);
    const double zb = std::exp(form.log_scale + maximize_bethe(form.graph, maximize_options(seed)).log_value);
    const double zmf = std::exp(form.log_scale + mean_field(form.graph, mean_field_options(seed)).log_value);
    return ordering_outcome(matroid_potts_partition(s, coupling), zb, zmf, "matroid Potts");
  });
  return collect("matroid-ordering", kOrderingTolerance, outcomes);
}

SuiteReport verify_hom_ordering(const VerifyOptions& options) {
  const auto outcomes = run_trials(default_trials(options, 30), options.jobs, [&](int t) {
    const std::uint64_t seed = trial_seed(options.seed, static_cast<std::uint64_t>(t));
    Rng rng(seed);
    const HomModel m = random_hom_model(rng, 5, 8, 4);
    const FactorGraph fg = to_factor_graph(m);
    return ordering_outcome(hom_partition(m), maximize_bethe(fg, maximize_options(seed)).value,
                            mean_field(fg, mean_field_options(seed)).value, "rank-2 homomorphisms");
  });
  return collect("hom-ordering", kOrderingTolerance, outcomes);
}

SuiteReport verify_weight_enumerator(const VerifyOptions& options) {
  struct Case {
    std::string name;
    GFMatrix code;
    double lambda;
  };
  std::vector<Case> cases;
  for (double lambda : {0.25, 0.5, 1.0}) {
    cases.push_back({"repetition[3,1]", GFMatrix(GaloisField(2), 1, 3, {1, 1, 1}), lambda});
    cases.push_back({"hamming[7,4]", hamming74(), lambda});
  }
  const auto outcomes = run_trials(static_cast<int>(cases.size()), options.jobs, [&](int t) {
    const Case& c = cases[static_cast<std::size_t>(t)];
    WeightEnumeratorOptions wo;
    wo.bethe = maximize_options(trial_seed(options.seed, static_cast<std::uint64_t>(t)));
    const WeightEnumerator w = weight_enumerator(c.code, c.lambda, wo);
    TrialOutcome o = identity_outcome(w.exact, w.identity, c.name + " lambda=" + format_double(c.lambda));
    const double bound_slack = (w.exact - w.bethe_bound) / w.exact;
    if (!w.bounds_valid || bound_slack < -kIdentityTolerance) {
      o.pass = false;
      o.message = c.name + ": Bethe bound " + format_double(w.bethe_bound) + " above exact " + format_double(w.exact);
    }
    o.slack = std::min(o.slack, bound_slack);
    return o;
  });
  return collect("weight-enumerator", kIdentityTolerance, outcomes);
}

SuiteReport verify_tree_exactness(const VerifyOptions& options) {
  const int trials = default_trials(options, 30);
  const auto outcomes = run_trials(trials, options.jobs, [&](int t) {
    const std::uint64_t seed = trial_seed(options.seed, static_cast<std::uint64_t>(t));
    Rng rng(seed);
    const FactorGraph model = random_tree_model(rng, 6, 3);
    const double z = exact_partition(model);
    const double zb = maximize_bethe(model, maximize_options(seed)).value;
    TrialOutcome o;
    const double rel = relative_difference(z, zb);
    o.slack = kTreeTolerance - rel;
    o.pass = rel <= kTreeTolerance;
    if (!o.pass) o.message = "Z=" + format_double(z) + " Z_B=" + format_double(zb);
    if (t >= 20) return o;

    // Gradient check at the exact marginals of an unrelated model on the same tree.
    FactorGraph other(model.cardinalities());
    for (const Factor& f : model.factors()) {
      auto table = random_vector(rng, f.table.size(), -1.0, 1.0);
      for (double& x : table) x = std::exp(x);
      other.add_factor(f.scope, table);
    }
    PseudoMarginals tau = exact_marginals(other);
    const PseudoMarginals grad = bethe_gradient(model, tau);
    double worst = 0.0;
    auto probe = [&](double& coord, double g) {
      const double keep = coord;
      const double h = 1e-6 * std::max(keep, 1e-3);
      coord = keep + h;
      const double up = bethe_terms(model, tau).total();
      coord = keep - h;
      const double down = bethe_terms(model, tau).total();
      coord = keep;
      const double fd = (up - down) / (2.0 * h);
      worst = std::max(worst, std::fabs(fd - g) / std::max(1.0, std::fabs(g)));
    };
    for (std::size_t i = 0; i < tau.node.size(); ++i)
      for (std::size_t x = 0; x < tau.node[i].size(); ++x) probe(tau.node[i][x], grad.node[i][x]);
    for (std::size_t a = 0; a < tau.factor.size(); ++a)
      for (std::size_t x = 0; x < tau.factor[a].size(); ++x) probe(tau.factor[a][x], grad.factor[a][x]);
    if (worst > kGradientTolerance) {
      o.pass = false;
      o.message += " gradient mismatch " + format_double(worst);
    }
    o.slack = std::min(o.slack, kGradientTolerance - worst);
    return o;
  });
  SuiteReport r = collect("tree-exactness", kTreeTolerance, outcomes);
  r.details["gradient_points"] = std::min(trials, 20);
  r.details["gradient_tolerance"] = kGradientTolerance;
  return r;
}

SuiteReport verify_modularity(const VerifyOptions& options) {
  SuiteReport r;
  r.tag = "modularity";
  r.tolerance = 1e-12;
  int index = 0;
  auto add = [&](bool holds, double slack, std::string what) {
    TrialOutcome o;
    o.pass = holds;
    o.slack = slack;
    if (!holds) o.message = std::move(what);
    r.record(o, index++);
  };

  int graphs = 0;
  for (int n = 1; n <= 4; ++n) {
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    for (std::uint64_t pick = 0; pick < (std::uint64_t{1} << pairs.size()); ++pick) {
      std::vector<std::pair<int, int>> edges;
      for (std::size_t k = 0; k < pairs.size(); ++k)
        if ((pick >> k) & 1U) edges.push_back(pairs[k]);
      const Graph g = make_graph(n, edges);
      const auto rep = check_supermodular(static_cast<int>(g.edges.size()),
                                          [&](std::uint64_t a) { return static_cast<double>(count_components(g, a)); });
      add(rep.holds, rep.worst_slack, "k_G not supermodular on graph " + graph_to_json(g).dump());
      ++graphs;
    }
  }

  Rng rng(options.seed);
  int matrices = 0;
  for (int q : {2, 3, 4})
    for (int k = 0; k < 4; ++k) {
      const int rows = 2 + static_cast<int>(uniform_below(rng, 3));
      const int cols = 3 + static_cast<int>(uniform_below(rng, 4));
      const GFMatrix s = random_matrix(rng, q, rows, cols, false);
      const auto rep = check_submodular(cols, [&](std::uint64_t a) { return static_cast<double>(rank(s, a)); });
      add(rep.holds, rep.worst_slack, "rank not submodular over GF(" + std::to_string(q) + ")");
      ++matrices;
    }

  int homs = 0;
  for (int k = 0; k < 10; ++k) {
    const HomModel m = random_hom_model(rng, 5, 6, 4);
    const auto rep = check_rank2_lsm(m, 500, rng());
    add(rep.holds(), rep.worst_slack, "edge weight not log-supermodular");
    ++homs;
  }
  r.details["graphs"] = graphs;
  r.details["matrices"] = matrices;
  r.details["hom_models"] = homs;
  return r;
}

const std::vector<std::string>& verify_tags() {
  static const std::vector<std::string> tags = {
      "counterexample",   "potts-rc-identity",  "hom-edge-identity",    "cover-bound",
      "rc-cover-components", "rank-cover",      "potts-ordering",       "potts-field-ordering",
      "matroid-ordering", "hom-ordering",       "weight-enumerator",    "tree-exactness",
      "modularity",
  };
  return tags;
}

SuiteReport run_verify(const std::string& tag, const VerifyOptions& options) {
  static const std::map<std::string, SuiteReport (*)(const VerifyOptions&)> suites = {
      {"counterexample", verify_counterexample},
      {"potts-rc-identity", verify_potts_rc_identity},
      {"hom-edge-identity", verify_hom_edge_identity},
      {"cover-bound", verify_cover_bound},
      {"rc-cover-components", verify_rc_cover_components},
      {"rank-cover", verify_rank_cover},
      {"potts-ordering", verify_potts_ordering},
      {"potts-field-ordering", verify_potts_field_ordering},
      {"matroid-ordering", verify_matroid_ordering},
      {"hom-ordering", verify_hom_ordering},
      {"weight-enumerator", verify_weight_enumerator},
      {"tree-exactness", verify_tree_exactness},
      {"modularity", verify_modularity},
  };
  const auto it = suites.find(tag);
  if (it == suites.end()) {
    std::string known;
    for (const auto& t : verify_tags()) known += (known.empty() ? "" : ", ") + t;
    throw InputError("unknown verify tag \"" + tag + "\"; expected one of: " + known);
  }
  return it->second(options);
}

}  // namespace bethe
