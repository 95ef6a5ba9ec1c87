#include <cmath>
#include <vector>

#include "bethe/errors.hpp"
#include "bethe/lattice.hpp"
#include "bethe/potts.hpp"
#include "bethe/verify.hpp"
#include "doctest.h"

using namespace bethe;

namespace {

Graph triangle() { return make_graph(3, {{0, 1}, {1, 2}, {0, 2}}); }

PottsModel potts(Graph g, int q, double j, std::vector<double> h = {}) {
  PottsModel m;
  m.coupling.assign(g.edges.size(), j);
  m.graph = std::move(g);
  m.q = q;
  m.field = std::move(h);
  return m;
}

}  // namespace

TEST_CASE("connected components of edge subsets") {
  const Graph g4 = make_graph(4, {{0, 1}, {1, 2}, {2, 3}});
  CHECK(count_components(g4, 0) == 4);
  CHECK(count_components(triangle(), full_edge_mask(triangle())) == 1);
  CHECK(count_components(g4, 0b001) == 3);
  CHECK(count_components(g4, 0b101) == 2);
  const auto sizes = component_sizes(g4, 0b101);
  CHECK(sizes.size() == 2);
  CHECK(count_components(make_graph(0, {}), 0) == 0);
}

TEST_CASE("graph validation") {
  CHECK_THROWS_AS(make_graph(2, {{0, 0}}), InputError);
  CHECK_THROWS_AS(make_graph(2, {{0, 1}, {1, 0}}), InputError);
  CHECK_THROWS_AS(make_graph(2, {{0, 2}}), InputError);
}

TEST_CASE("component count is supermodular") {
  const Graph k4 = make_graph(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}, {0, 2}, {1, 3}});
  CHECK(check_supermodular(6, [&](std::uint64_t a) { return static_cast<double>(count_components(k4, a)); }).holds);
}

TEST_CASE("Potts partition function") {
  const PottsModel edge = potts(make_graph(2, {{0, 1}}), 2, std::log(2.0));
  CHECK(potts_partition(edge) == doctest::Approx(6.0).epsilon(1e-14));
  for (int q = 1; q <= 4; ++q)
    CHECK(potts_partition(potts(triangle(), q, 0.0)) == doctest::Approx(std::pow(q, 3)).epsilon(1e-14));

  const PottsModel tri = potts(triangle(), 3, 0.8, {0.3, -0.2, 1.0});
  double z = 0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c)
        z += std::exp(0.8 * ((a == b) + (b == c) + (a == c)) + tri.field[a] + tri.field[b] + tri.field[c]);
  CHECK(potts_partition(tri) == doctest::Approx(z).epsilon(1e-13));
  CHECK(exact_partition(to_factor_graph(tri)) == doctest::Approx(z).epsilon(1e-13));
}

TEST_CASE("random-cluster weights") {
  const Graph tri = triangle();
  const std::vector<double> ones(3, 1.0);
  CHECK(rc_weight(tri, 2.0, ones, 0) == 8.0);
  CHECK(rc_weight(tri, 2.0, ones, 0b001) == 4.0);

  Rng rng(4);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> p{uniform_real(rng, 0, 2), uniform_real(rng, 0, 2), uniform_real(rng, 0, 2)};
    const std::vector<double> h0(3, 0.0);
    const EdgeMask a = uniform_below(rng, 8);
    CHECK(rc_field_weight(tri, h0, p, a) == doctest::Approx(rc_weight(tri, 3.0, p, a)).epsilon(1e-14));
  }

  const PottsModel anti = potts(make_graph(2, {{0, 1}}), 2, -0.5);
  CHECK_THROWS_AS(rc_weight(anti, 0), InputError);
  CHECK_THROWS_AS(edge_probabilities(anti), InputError);
}

TEST_CASE("random-cluster partition function") {
  const Graph edge = make_graph(2, {{0, 1}});
  const std::vector<double> one{1.0};
  CHECK(rc_partition(edge, 2.0, one) == doctest::Approx(6.0));
  CHECK(rc_partition(make_graph(4, {}), 3.0, std::vector<double>{}) == 81.0);

  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const Graph g = random_graph(rng, 5, 8);
    PottsModel m;
    m.graph = g;
    m.q = 1 + static_cast<int>(uniform_below(rng, 4));
    for (std::size_t e = 0; e < g.edges.size(); ++e) m.coupling.push_back(uniform_real(rng, 1e-3, 3.0));
    const double zp = potts_partition(m);
    CHECK(std::abs(rc_partition(m) - zp) / zp <= 1e-9);
    m.field = std::vector<double>(static_cast<std::size_t>(m.q));
    for (double& h : m.field) h = uniform_real(rng, -1, 1);
    const double zf = potts_partition(m);
    CHECK(std::abs(rc_partition(m) - zf) / zf <= 1e-9);
  }
}

TEST_CASE("random-cluster tables are log-supermodular with and without field") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    PottsModel m;
    m.graph = random_graph(rng, 4, 6);
    m.q = 1 + static_cast<int>(uniform_below(rng, 4));
    for (std::size_t e = 0; e < m.graph.edges.size(); ++e) m.coupling.push_back(uniform_real(rng, 0.05, 2.0));
    const int ne = static_cast<int>(m.graph.edges.size());
    CHECK(is_log_supermodular(BooleanFunction::tabulate(ne, [&](std::uint64_t a) { return rc_weight(m, a); })).holds);
    m.field.resize(static_cast<std::size_t>(m.q));
    for (double& h : m.field) h = uniform_real(rng, -1, 1);
    CHECK(is_log_supermodular(BooleanFunction::tabulate(ne, [&](std::uint64_t a) { return rc_weight(m, a); })).holds);
  }
}

TEST_CASE("random-cluster weight is monotone in q and p") {
  const Graph g = make_graph(4, {{0, 1}, {1, 2}, {2, 3}, {0, 2}});
  const std::vector<double> lo(4, 0.5), hi(4, 0.9);
  for (EdgeMask a = 0; a < 16; ++a) {
    CHECK(rc_weight(g, 2.0, lo, a) <= rc_weight(g, 3.0, lo, a));
    CHECK(rc_weight(g, 2.0, lo, a) <= rc_weight(g, 2.0, hi, a));
  }
}

TEST_CASE("component inequality on covers") {
  const PottsModel base = potts(triangle(), 2, 0.5);
  const FactorGraph fg = to_factor_graph(base);
  const std::vector<EdgeMask> empty(2, 0);
  for_each_cover(fg, 2, [&](const CoverSpec& spec) {
    const auto r = check_cover_component_inequality(base, spec, empty);
    CHECK(r.cover_components == 6);
    CHECK(r.sorted_components == 6);
  });

  const CoverSpec id = identity_cover(fg, 2);
  for (EdgeMask a = 0; a < 8; ++a) {
    const std::vector<EdgeMask> same{a, a};
    const auto r = check_cover_component_inequality(base, id, same);
    CHECK(r.cover_components == r.sorted_components);
    CHECK(r.cover_weight == doctest::Approx(r.sorted_weight).epsilon(1e-14));
  }

  int violations = 0, checked = 0;
  for_each_cover(fg, 2, [&](const CoverSpec& spec) {
    for (EdgeMask a = 0; a < 8; ++a)
      for (EdgeMask b = 0; b < 8; ++b) {
        const std::vector<EdgeMask> layers{a, b};
        const auto r = check_cover_component_inequality(base, spec, layers);
        ++checked;
        if (!r.components_hold || !r.weight_holds) ++violations;
      }
  });
  CHECK(checked == 512);
  CHECK(violations == 0);
}

TEST_CASE("lifted Potts models") {
  const PottsModel base = potts(triangle(), 3, 0.4, {0.1, 0.0, -0.3});
  const CoverSpec spec = sample_cover(to_factor_graph(base), 3, 8);
  const PottsModel up = lift(base, spec);
  CHECK(up.graph.num_vertices == 9);
  CHECK(up.graph.edges.size() == 9);
  CHECK(up.field == base.field);
  CHECK(exact_partition(to_factor_graph(up)) == doctest::Approx(potts_partition(up)).epsilon(1e-12));
}

TEST_CASE("counterexample model") {
  for (auto pairs : {PairConvention::UnorderedEdges, PairConvention::OrderedPairs})
    for (auto field : {FieldConvention::Exponentiated, FieldConvention::Direct}) {
      const FactorGraph g = build_counterexample({pairs, field});
      CHECK(g.num_variables() == 3);
      CHECK(g.num_factors() == 3);
      for (int i = 0; i < 3; ++i) CHECK(g.cardinality(i) == 3);
      for (const Factor& f : g.factors()) CHECK(f.scope.size() == 2);
    }
  CHECK(describe({}) == "unordered-edges+direct-field");
}
