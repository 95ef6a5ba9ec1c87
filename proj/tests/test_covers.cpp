#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "bethe/covers.hpp"
#include "bethe/errors.hpp"
#include "bethe/lattice.hpp"
#include "bethe/potts.hpp"
#include "bethe/variational.hpp"
#include "bethe/verify.hpp"
#include "doctest.h"

using namespace bethe;

namespace {

FactorGraph pairwise(int n, const std::vector<std::pair<int, int>>& edges) {
  FactorGraph g(std::vector<int>(static_cast<std::size_t>(n), 2));
  double s = 1.0;
  for (auto [u, v] : edges) {
    g.add_factor({u, v}, {1.0 + s, 1.0, 0.5, 2.0 + s});
    s += 0.5;
  }
  for (int i = 0; i < n; ++i) g.set_node_potential(i, {1.0, 0.5 + 0.25 * i});
  return g;
}

int lifted_components(const FactorGraph& cover) {
  std::vector<std::pair<int, int>> edges;
  for (const Factor& f : cover.factors()) edges.emplace_back(f.scope[0], f.scope[1]);
  const Graph g = make_graph(cover.num_variables(), edges);
  return count_components(g, full_edge_mask(g));
}

}  // namespace

TEST_CASE("one copy reproduces the base") {
  const FactorGraph base = pairwise(3, {{0, 1}, {1, 2}, {0, 2}});
  const LiftedModel lm = build_cover(identity_cover(base, 1));
  CHECK(lm.cover == base);
  CHECK(exact_partition(lm.cover) == doctest::Approx(exact_partition(base)).epsilon(1e-14));
  CHECK(validate_cover(lm.cover, base, lm.copy_map).valid);
  const CoverSpec s = sample_cover(base, 1, 99);
  for (const auto& perms : s.permutations)
    for (const auto& p : perms) CHECK(p == std::vector<int>{0});
}

TEST_CASE("identity two-cover is two disjoint copies") {
  const FactorGraph base = pairwise(3, {{0, 1}, {1, 2}});
  const LiftedModel lm = build_cover(identity_cover(base, 2));
  CHECK(lm.cover.num_variables() == 6);
  CHECK(lm.cover.num_factors() == 4);
  CHECK(lifted_components(lm.cover) == 2);
  const double z = exact_partition(base);
  CHECK(exact_partition(lm.cover) == doctest::Approx(z * z).epsilon(1e-13));
  const CoverDiagnosis d = validate_cover(lm.cover, base, lm.copy_map);
  CHECK(d.valid);
  CHECK(d.copies == 2);
  CHECK(lm.cover == disjoint_union(base, base));
  for (int m = 0; m < 2; ++m)
    for (int i = 0; i < 3; ++i) {
      CHECK(lm.copy_map.variable[static_cast<std::size_t>(lifted_variable(i, m, 3))] == i);
      CHECK(lm.layer[static_cast<std::size_t>(lifted_variable(i, m, 3))] == m);
    }
}

TEST_CASE("crossing one of two parallel factors gives a four-cycle") {
  const FactorGraph base = pairwise(2, {{0, 1}, {0, 1}});
  CoverSpec spec = identity_cover(base, 2);
  spec.permutations[1][1] = {1, 0};
  const LiftedModel lm = build_cover(spec);
  CHECK(lm.cover.num_factors() == 4);
  CHECK(lifted_components(lm.cover) == 1);
  for (int v = 0; v < 4; ++v) CHECK(lm.cover.incidences(v).size() == 2);
  CHECK(validate_cover(lm.cover, base, lm.copy_map).valid);

  FactorGraph single = pairwise(2, {{0, 1}});
  CoverSpec s1 = identity_cover(single, 2);
  s1.permutations[0][1] = {1, 0};
  CHECK(lifted_components(build_cover(s1).cover) == 2);
}

TEST_CASE("validate_cover names the node a rewiring breaks") {
  const FactorGraph base = pairwise(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  const LiftedModel lm = build_cover(sample_cover(base, 2, 17));
  REQUIRE(validate_cover(lm.cover, base, lm.copy_map).valid);

  FactorGraph broken(lm.cover.cardinalities());
  for (int v = 0; v < lm.cover.num_variables(); ++v) {
    const auto w = lm.cover.node_potential(v);
    broken.set_node_potential(v, {w.begin(), w.end()});
  }
  for (int a = 0; a < lm.cover.num_factors(); ++a) {
    std::vector<int> scope = lm.cover.factor(a).scope;
    if (a == 0) scope[1] = scope[1] < 4 ? scope[1] + 4 : scope[1] - 4;
    broken.add_factor(scope, lm.cover.factor(a).table);
  }
  const CoverDiagnosis d = validate_cover(broken, base, lm.copy_map);
  CHECK_FALSE(d.valid);
  const int base_var = base.factor(0).scope[1];
  CHECK(d.message.find("copy of base variable " + std::to_string(base_var)) != std::string::npos);
  CHECK(d.message.find("bijectively") != std::string::npos);

  CopyMap wrong = lm.copy_map;
  wrong.variable.pop_back();
  CHECK_FALSE(validate_cover(lm.cover, base, wrong).valid);
}

TEST_CASE("sampling is deterministic for a fixed seed") {
  const FactorGraph base = pairwise(4, {{0, 1}, {1, 2}, {2, 3}, {0, 2}});
  const CoverSpec a = sample_cover(base, 3, 1234);
  const CoverSpec b = sample_cover(base, 3, 1234);
  CHECK(a.permutations == b.permutations);
  bool differs = false;
  for (std::uint64_t s = 1; s < 20 && !differs; ++s)
    differs = sample_cover(base, 3, s).permutations != a.permutations;
  CHECK(differs);
  CHECK_THROWS_AS(sample_cover(base, 0, 1), InputError);
}

TEST_CASE("two-covers of the triangle") {
  const FactorGraph tri = pairwise(3, {{0, 1}, {1, 2}, {0, 2}});
  CHECK(canonical_cover_count(tri, 2) == 8);
  int hexagons = 0, doubles = 0, total = 0;
  for_each_cover(tri, 2, [&](const CoverSpec& spec) {
    ++total;
    const int k = lifted_components(build_cover(spec).cover);
    if (k == 1) ++hexagons;
    if (k == 2) ++doubles;
  });
  CHECK(total == 8);
  CHECK(hexagons == 4);
  CHECK(doubles == 4);

  int sampled_hex = 0;
  const int n = 4000;
  for (int s = 0; s < n; ++s)
    if (lifted_components(build_cover(sample_cover(tri, 2, static_cast<std::uint64_t>(s))).cover) == 1) ++sampled_hex;
  CHECK(static_cast<double>(sampled_hex) / n == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("cover estimates") {
  const FactorGraph tri = pairwise(3, {{0, 1}, {1, 2}, {0, 2}});
  const CoverEstimate one = bethe_estimate_via_covers(tri, 1, 5, 3);
  CHECK(one.estimate == doctest::Approx(exact_partition(tri)).epsilon(1e-13));
  CHECK(one.variance_partition == doctest::Approx(0.0));

  const FactorGraph tree = pairwise(4, {{0, 1}, {1, 2}, {1, 3}});
  const CoverEstimate ex = exhaustive_cover_estimate(tree, 2);
  CHECK(ex.exhaustive);
  const double zb = maximize_bethe(tree).value;
  CHECK(std::abs(ex.estimate - zb) / zb <= 0.05);
}

TEST_CASE("cover estimates stay below Z on log-supermodular models") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const FactorGraph g = random_lsm_binary_model(rng, 4);
    REQUIRE(is_log_supermodular_model(g));
    const double z = exact_partition(g);
    const CoverEstimate e = bethe_estimate_via_covers(g, 2, 4, seed);
    CHECK(e.estimate <= z * (1 + 1e-9));
  }
}

TEST_CASE("cover spec validation") {
  const FactorGraph base = pairwise(2, {{0, 1}});
  CoverSpec bad = identity_cover(base, 2);
  bad.permutations[0][0] = {0, 0};
  CHECK_THROWS_AS(build_cover(bad), InputError);
  bad = identity_cover(base, 2);
  bad.permutations.pop_back();
  CHECK_THROWS_AS(build_cover(bad), InputError);
}
