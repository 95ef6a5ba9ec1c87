#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "bethe/errors.hpp"
#include "bethe/homs.hpp"
#include "bethe/verify.hpp"
#include "doctest.h"

using namespace bethe;

namespace {

Graph triangle() { return make_graph(3, {{0, 1}, {1, 2}, {0, 2}}); }

}  // namespace

TEST_CASE("homomorphism partition function") {
  for (int n = 1; n <= 4; ++n) {
    const std::vector<double> ones(static_cast<std::size_t>(n), 1.0);
    const HomModel m = make_hom_model(make_graph(2, {{0, 1}}), ones, ones, ones);
    CHECK(hom_partition(m) == doctest::Approx(2.0 * n * n));
    CHECK(edge_partition(m) == doctest::Approx(2.0 * n * n));
  }

  const std::vector<double> w{0.5, 2.0, 1.5};
  const HomModel iso = make_hom_model(make_graph(4, {}), w, {1, 1, 1}, {0, 1, 2});
  CHECK(hom_partition(iso) == doctest::Approx(std::pow(4.0, 4)));
  CHECK(edge_partition(iso) == doctest::Approx(std::pow(4.0, 4)));

  const HomModel id = make_hom_model(triangle(), {1, 1}, {1, 0}, {0, 1});
  CHECK(id.gamma(0, 0) == 1.0);
  CHECK(id.gamma(0, 1) == 0.0);
  CHECK(hom_partition(id) == doctest::Approx(2.0));
  CHECK(edge_partition(id) == doctest::Approx(2.0));
}

TEST_CASE("general target graphs count homomorphisms") {
  const GeneralHomModel k3 = make_general_hom_model(triangle(), {1, 1, 1}, {0, 1, 1, 1, 0, 1, 1, 1, 0});
  CHECK(hom_partition(k3) == doctest::Approx(6.0));
  const GeneralHomModel path_to_k2 =
      make_general_hom_model(make_graph(4, {{0, 1}, {1, 2}, {2, 3}}), {1, 1}, {0, 1, 1, 0});
  CHECK(hom_partition(path_to_k2) == doctest::Approx(2.0));
  CHECK_THROWS_AS(make_general_hom_model(triangle(), {1, 1}, {0, 1, 2, 0}), InputError);
}

TEST_CASE("edge counts at a vertex") {
  const Graph tri = triangle();
  for (int i = 0; i < 3; ++i) {
    CHECK(s_count(tri, i, 0) == 0);
    CHECK(s_count(tri, i, full_edge_mask(tri)) == 2);
  }
  CHECK(s_count(tri, 0, 0b001) == 1);
  CHECK(s_count(tri, 2, 0b001) == 0);
  CHECK_THROWS_AS(s_count(tri, 3, 0), InputError);
  CHECK(power(0.0, 0) == 1.0);
  CHECK(power(0.0, 2) == 0.0);
  CHECK(power(1.5, 2) == 2.25);
}

TEST_CASE("edge weight") {
  const Graph g = make_graph(4, {{0, 1}, {1, 2}, {2, 3}, {0, 2}});
  const std::vector<double> ones(3, 1.0);
  const HomModel flat = make_hom_model(g, ones, ones, ones);
  for (EdgeMask a = 0; a < 16; ++a) CHECK(edge_weight(flat, a) == doctest::Approx(81.0));

  Rng rng(6);
  for (int t = 0; t < 20; ++t) {
    const HomModel m = random_hom_model(rng, 5, 8, 4);
    std::vector<int> deg(static_cast<std::size_t>(m.graph.num_vertices), 0);
    for (auto [u, v] : m.graph.edges) ++deg[u], ++deg[v];
    double none = 1, all = 1;
    for (int i = 0; i < m.graph.num_vertices; ++i) {
      double sn = 0, sa = 0;
      for (int s = 0; s < m.target_size(); ++s) {
        sn += m.w[s] * std::pow(m.b[s], deg[i]);
        sa += m.w[s] * std::pow(m.a[s], deg[i]);
      }
      none *= sn;
      all *= sa;
    }
    CHECK(edge_weight(m, 0) == doctest::Approx(none).epsilon(1e-12));
    CHECK(edge_weight(m, full_edge_mask(m.graph)) == doctest::Approx(all).epsilon(1e-12));

    const HomModel swapped = make_hom_model(m.graph, m.w, m.b, m.a);
    for (EdgeMask a = 0; a <= full_edge_mask(m.graph); a += 3)
      CHECK(edge_weight(swapped, a) == doctest::Approx(edge_weight(m, full_edge_mask(m.graph) & ~a)).epsilon(1e-12));
  }
}

TEST_CASE("edge form equals the homomorphism sum") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const HomModel m = random_hom_model(rng, 5, 8, 4);
    const double z = hom_partition(m);
    CHECK(std::abs(edge_partition(m) - z) / z <= 1e-9);
    CHECK(exact_partition(to_factor_graph(m)) == doctest::Approx(z).epsilon(1e-12));
  }
}

TEST_CASE("relabeling target states preserves the partition function") {
  Rng rng(40);
  for (int t = 0; t < 10; ++t) {
    const HomModel m = random_hom_model(rng, 4, 6, 4);
    const auto perm = random_permutation(rng, m.target_size());
    std::vector<double> w, a, b;
    for (int k : perm) {
      w.push_back(m.w[k]);
      a.push_back(m.a[k]);
      b.push_back(m.b[k]);
    }
    CHECK(hom_partition(make_hom_model(m.graph, w, a, b)) == doctest::Approx(hom_partition(m)).epsilon(1e-12));
  }
}

TEST_CASE("rank-two edge weights are log-supermodular") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const HomModel m = random_hom_model(rng, 4, 6, 4);
    const Rank2Report r = check_rank2_lsm(m, 200, seed);
    CHECK(r.lsm_holds);
    CHECK(r.scalar_violations == 0);
    CHECK(r.holds());
  }
  CHECK_THROWS_AS(make_hom_model(triangle(), {1, 1}, {1, -0.5}, {1, 1}), InputError);
  CHECK_THROWS_AS(make_hom_model(triangle(), {1, 1}, {1, 1}, {1}), InputError);
}

TEST_CASE("scalar inequality is tight for equal bases") {
  const Graph g = make_graph(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}});
  for (double c : {0.0, 0.3, 1.0, 2.5})
    for (EdgeMask x = 0; x < 16; ++x)
      for (EdgeMask y = 0; y < 16; ++y) {
        const int s1 = s_count(g, 0, x), s2 = s_count(g, 0, y);
        const int lo = s_count(g, 0, x & y), hi = s_count(g, 0, x | y);
        CHECK(lo + hi == s1 + s2);
        const double lhs = power(c, s1) * power(c, s2) * 2;
        const double rhs = power(c, hi) * power(c, lo) * 2;
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-15));
      }
}
