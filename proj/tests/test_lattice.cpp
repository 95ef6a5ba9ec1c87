#include <algorithm>
#include <cmath>
#include <vector>

#include "bethe/covers.hpp"
#include "bethe/errors.hpp"
#include "bethe/lattice.hpp"
#include "bethe/potts.hpp"
#include "bethe/random.hpp"
#include "doctest.h"

using namespace bethe;

TEST_CASE("meet and join") {
  auto [m1, j1] = meet_join(BitVector{1, 0}, BitVector{0, 1});
  CHECK(m1 == BitVector{0, 0});
  CHECK(j1 == BitVector{1, 1});

  const BitVector x{1, 0, 1, 1};
  auto [m2, j2] = meet_join(x, x);
  CHECK(m2 == x);
  CHECK(j2 == x);

  auto [m3, j3] = meet_join(BitVector{1, 1, 0}, BitVector{1, 0, 1});
  CHECK(m3 == BitVector{1, 0, 0});
  CHECK(j3 == BitVector{1, 1, 1});

  CHECK_THROWS_AS(meet_join(BitVector{1}, BitVector{1, 0}), InputError);
}

TEST_CASE("sorted stack") {
  const std::vector<BitVector> xs{BitVector{1, 0}, BitVector{0, 1}};
  const auto s = sorted_stack(xs);
  REQUIRE(s.size() == 2);
  CHECK(s[0] == BitVector{1, 1});
  CHECK(s[1] == BitVector{0, 0});

  const std::vector<BitVector> single{BitVector{0, 1, 1}};
  CHECK(sorted_stack(single) == single);

  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<BitVector> fam;
    for (int m = 0; m < 3; ++m) fam.push_back(BitVector::from_mask(uniform_below(rng, 16), 4));
    const auto out = sorted_stack(fam);
    for (std::size_t i = 0; i < 4; ++i) {
      std::vector<int> col;
      for (const auto& v : fam) col.push_back(v[i]);
      std::sort(col.rbegin(), col.rend());
      for (std::size_t m = 0; m < 3; ++m) CHECK(out[m][i] == (col[m] == 1));
    }
    std::vector<std::uint64_t> masks;
    for (const auto& v : fam) masks.push_back(v.mask());
    const auto om = sorted_stack_masks(masks, 4);
    for (std::size_t m = 0; m < 3; ++m) CHECK(om[m] == out[m].mask());
  }
}

TEST_CASE("log-supermodularity of two-variable tables") {
  const auto ferro = BooleanFunction::tabulate(2, [](std::uint64_t m) {
    return std::exp(static_cast<double>((m & 1) * ((m >> 1) & 1)));
  });
  CHECK(is_log_supermodular(ferro).holds);

  const auto anti = BooleanFunction::tabulate(2, [](std::uint64_t m) {
    return std::exp(-static_cast<double>((m & 1) * ((m >> 1) & 1)));
  });
  const LsmReport r = is_log_supermodular(anti);
  CHECK_FALSE(r.holds);
  REQUIRE(r.witness.has_value());
  const auto [a, b] = *r.witness;
  CHECK(std::min(a, b) == 1);
  CHECK(std::max(a, b) == 2);

  const auto zero_rhs = BooleanFunction(2, {0.0, 1.0, 1.0, 1.0});
  CHECK_FALSE(is_log_supermodular(zero_rhs).holds);
}

TEST_CASE("random-cluster tables are log-supermodular") {
  Rng rng(9);
  const Graph tri = make_graph(3, {{0, 1}, {1, 2}, {0, 2}});
  const Graph k4 = make_graph(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}, {0, 2}, {1, 3}});
  for (const Graph& g : {tri, k4})
    for (double q : {1.0, 1.5, 2.0, 3.0, 4.0}) {
      std::vector<double> p(g.edges.size());
      for (double& v : p) v = uniform_real(rng, 0.1, 3.0);
      const auto f = BooleanFunction::tabulate(static_cast<int>(g.edges.size()),
                                               [&](std::uint64_t a) { return rc_weight(g, q, p, a); });
      CHECK(is_log_supermodular(f).holds);
    }
}

TEST_CASE("correlation inequality") {
  const auto f = BooleanFunction::tabulate(2, [](std::uint64_t m) {
    return 1.0 + 2.0 * static_cast<double>((m & 1) & (m >> 1)) + 0.5 * static_cast<double>(m & 1);
  });
  REQUIRE(is_log_supermodular(f).holds);

  const auto g = BooleanFunction::tabulate(6, [&](std::uint64_t m) {
    return f(m & 3) * f((m >> 2) & 3) * f((m >> 4) & 3);
  });
  const std::vector<BooleanFunction> fs{f, f, f};
  const CorrelationReport r = check_correlation_inequality(g, fs);
  CHECK(r.g_log_supermodular);
  CHECK(r.pointwise_bound);
  CHECK(r.sum_bound);

  const std::vector<BooleanFunction> one{f};
  const CorrelationReport r1 = check_correlation_inequality(f, one);
  CHECK(r1.pointwise_bound);
  CHECK(r1.sum_bound);
  CHECK(r1.g_sum == doctest::Approx(r1.f_product).epsilon(1e-15));
  CHECK(std::abs(r1.sum_slack) < 1e-15);
}

TEST_CASE("correlation inequality on a lifted model") {
  FactorGraph base({2, 2});
  base.add_factor({0, 1}, {2.0, 1.0, 0.5, 3.0});
  base.add_factor({0, 1}, {1.0, 0.2, 1.0, 1.5});
  base.set_node_potential(0, {1.0, 0.7});
  REQUIRE(is_log_supermodular_model(base));
  const auto f = boolean_function(base);
  for_each_cover(base, 2, [&](const CoverSpec& spec) {
    const auto lifted = build_cover(spec);
    const auto g = boolean_function(lifted.cover);
    const std::vector<BooleanFunction> fs{f, f};
    const CorrelationReport r = check_correlation_inequality(g, fs);
    CHECK(r.g_log_supermodular);
    CHECK(r.sum_bound);
    CHECK(r.g_sum == doctest::Approx(exact_partition(lifted.cover)).epsilon(1e-12));
  });
}

TEST_CASE("switching a bipartite model") {
  FactorGraph edge({2, 2});
  edge.add_factor({0, 1}, {1.0, 1.0, 1.0, std::exp(-1.0)});
  edge.set_node_potential(1, {1.0, 2.0});
  const std::vector<int> a{0}, b{1};
  const FactorGraph sw = switch_bipartite(edge, a, b);
  const auto vals = sw.factor(0).table.values();
  CHECK(vals[0] == doctest::Approx(1.0));
  CHECK(vals[1] == doctest::Approx(1.0));
  CHECK(vals[2] == doctest::Approx(std::exp(-1.0)));
  CHECK(vals[3] == doctest::Approx(1.0));
  CHECK(sw.node_potential(1)[0] == 2.0);
  CHECK(is_log_supermodular_model(sw));
  CHECK(exact_partition(sw) == doctest::Approx(exact_partition(edge)).epsilon(1e-14));
  CHECK(switch_bipartite(sw, a, b) == edge);

  FactorGraph flat({2, 2});
  flat.add_factor({0, 1}, {1, 1, 1, 1});
  CHECK(exact_partition(switch_bipartite(flat, a, b)) == 4.0);

  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    FactorGraph k22({2, 2, 2, 2});
    for (int u : {0, 1})
      for (int v : {2, 3}) {
        const double x = uniform_real(rng, 0.1, 2.0), y = uniform_real(rng, 0.1, 2.0);
        const double w = uniform_real(rng, 0.1, 2.0);
        const double z = x * y / w * uniform_real(rng, 0.1, 1.0);
        k22.add_factor({u, v}, {w, x, y, z});
      }
    for (int v = 0; v < 4; ++v) k22.set_node_potential(v, {uniform_real(rng, 0.2, 2.0), uniform_real(rng, 0.2, 2.0)});
    const std::vector<int> as{0, 1}, bs{2, 3};
    const FactorGraph s = switch_bipartite(k22, as, bs);
    CHECK(is_log_supermodular_model(s));
    CHECK(exact_partition(s) == doctest::Approx(exact_partition(k22)).epsilon(1e-12));
  }

  const std::vector<int> both{0, 1}, none{};
  CHECK_THROWS_AS(switch_bipartite(edge, both, none), InputError);
  const std::vector<int> dup{0, 0};
  CHECK_THROWS_AS(switch_bipartite(edge, dup, b), InputError);
}

TEST_CASE("modularity checks") {
  CHECK(check_supermodular(3, [](std::uint64_t m) { return static_cast<double>(__builtin_popcountll(m) * __builtin_popcountll(m)); }).holds);
  const auto r = check_submodular(3, [](std::uint64_t m) { return static_cast<double>(__builtin_popcountll(m) * __builtin_popcountll(m)); });
  CHECK_FALSE(r.holds);
  CHECK(r.witness.has_value());
  CHECK(check_submodular(4, [](std::uint64_t m) { return std::min(2.0, static_cast<double>(__builtin_popcountll(m))); }).holds);
}
