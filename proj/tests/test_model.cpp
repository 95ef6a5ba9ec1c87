#include <cmath>
#include <string>
#include <vector>

#include "bethe/errors.hpp"
#include "bethe/model.hpp"
#include "bethe/potts.hpp"
#include "bethe/random.hpp"
#include "doctest.h"

using namespace bethe;

namespace {

FactorGraph single_variable(double a, double b) {
  FactorGraph g({2});
  g.set_node_potential(0, {a, b});
  return g;
}

}  // namespace

TEST_CASE("table layout is row major with the last variable fastest") {
  PotentialTable t({2, 3}, {0, 1, 2, 3, 4, 5});
  const int s[] = {1, 2};
  CHECK(t.index(s) == 5);
  CHECK(t.at(s) == 5.0);
  int back[2];
  t.decode(4, back);
  CHECK(back[0] == 1);
  CHECK(back[1] == 1);
  CHECK(t.stride(0) == 3);
  CHECK(t.stride(1) == 1);
}

TEST_CASE("evaluate") {
  FactorGraph empty;
  CHECK(evaluate(empty, std::vector<int>{}) == 1.0);

  const FactorGraph one = single_variable(1, 2);
  CHECK(evaluate(one, std::vector<int>{1}) == 2.0);
  CHECK(evaluate(one, std::vector<int>{0}) == 1.0);

  const FactorGraph tri = build_counterexample({PairConvention::UnorderedEdges, FieldConvention::Direct});
  const double e = std::exp(1.0);
  const double by_hand = (e * e) * (1 / e) * (1 / e) * std::exp(2.0) * std::exp(2.0) * std::exp(2.0);
  CHECK(evaluate(tri, std::vector<int>{0, 0, 0}) == doctest::Approx(by_hand).epsilon(1e-14));
  CHECK_THROWS_AS(evaluate(tri, std::vector<int>{0, 0}), InputError);
  CHECK_THROWS_AS(evaluate(tri, std::vector<int>{0, 3, 0}), InputError);
}

TEST_CASE("exact partition") {
  CHECK(exact_partition(single_variable(1, 2)) == 3.0);

  FactorGraph two({2, 2});
  two.set_node_potential(0, {1, 1});
  two.set_node_potential(1, {1, 1});
  CHECK(exact_partition(two) == 4.0);

  FactorGraph empty;
  CHECK(exact_partition(empty) == 1.0);

  for (auto conv : {CounterexampleConvention{PairConvention::UnorderedEdges, FieldConvention::Direct},
                    CounterexampleConvention{PairConvention::OrderedPairs, FieldConvention::Exponentiated}}) {
    const FactorGraph tri = build_counterexample(conv);
    const double e = std::exp(1.0);
    const double c = conv.pairs == PairConvention::UnorderedEdges ? 2.0 : 4.0;
    double z = 0.0;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        for (int d = 0; d < 3; ++d) {
          const int s[3] = {a, b, d};
          double w = 1.0;
          for (int k = 0; k < 3; ++k) {
            double h = s[k] == k ? e * e : 1 / e;
            if (conv.field == FieldConvention::Exponentiated) h = std::exp(h);
            w *= h;
          }
          w *= std::exp(c * ((a == b) + (b == d) + (a == d)));
          z += w;
        }
    CHECK(exact_partition(tri) == doctest::Approx(z).epsilon(1e-12));
  }
}

TEST_CASE("disjoint union multiplies and scaling a factor scales Z") {
  Rng rng(11);
  FactorGraph a({2, 3});
  a.add_factor({0, 1}, {1.0, 0.5, 2.0, 0.3, 1.7, 0.9});
  FactorGraph b({3});
  b.set_node_potential(0, {0.2, 1.0, 4.0});
  const FactorGraph u = disjoint_union(a, b);
  CHECK(u.num_variables() == 3);
  CHECK(exact_partition(u) == doctest::Approx(exact_partition(a) * exact_partition(b)).epsilon(1e-14));

  FactorGraph scaled({2, 3});
  scaled.add_factor({0, 1}, {2.5, 1.25, 5.0, 0.75, 4.25, 2.25});
  CHECK(exact_partition(scaled) == doctest::Approx(2.5 * exact_partition(a)).epsilon(1e-14));
}

TEST_CASE("enumeration cap refusal names the joint space size") {
  FactorGraph big(std::vector<int>(27, 2));
  try {
    exact_partition(big);
    FAIL("expected refusal");
  } catch (const NumericalRefusal& e) {
    CHECK(std::string(e.what()).find("134217728") != std::string::npos);
  }
  CHECK(exact_partition(FactorGraph(std::vector<int>(4, 2)), 16) == 16.0);
  CHECK_THROWS_AS(exact_partition(FactorGraph(std::vector<int>(5, 2)), 16), NumericalRefusal);
}

TEST_CASE("exact marginals") {
  const PseudoMarginals m = exact_marginals(single_variable(1, 3));
  CHECK(m.node[0][0] == doctest::Approx(0.25));
  CHECK(m.node[0][1] == doctest::Approx(0.75));

  FactorGraph uniform({3, 2});
  uniform.add_factor({0, 1}, std::vector<double>(6, 2.0));
  const PseudoMarginals u = exact_marginals(uniform);
  for (double v : u.node[0]) CHECK(v == doctest::Approx(1.0 / 3));
  for (double v : u.factor[0]) CHECK(v == doctest::Approx(1.0 / 6));

  FactorGraph zero({2});
  zero.set_node_potential(0, {0, 0});
  try {
    exact_marginals(zero);
    FAIL("expected error");
  } catch (const NumericalRefusal& e) {
    CHECK(std::string(e.what()).find("unnormalizable") != std::string::npos);
  }
}

TEST_CASE("exact marginals match an independent enumeration on random three-variable models") {
  Rng rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const int c0 = 2 + static_cast<int>(uniform_below(rng, 2));
    const int c1 = 2 + static_cast<int>(uniform_below(rng, 2));
    const int c2 = 2;
    FactorGraph g({c0, c1, c2});
    std::vector<double> t01(static_cast<std::size_t>(c0 * c1)), t12(static_cast<std::size_t>(c1 * c2)),
        t012(static_cast<std::size_t>(c0 * c1 * c2)), phi(static_cast<std::size_t>(c0));
    for (auto* t : {&t01, &t12, &t012, &phi})
      for (double& v : *t) v = uniform_real(rng, 0.1, 3.0);
    g.add_factor({0, 1}, t01);
    g.add_factor({1, 2}, t12);
    g.add_factor({0, 1, 2}, t012);
    g.set_node_potential(0, phi);

    std::vector<double> n0(static_cast<std::size_t>(c0)), n2(static_cast<std::size_t>(c2));
    std::vector<double> f12(static_cast<std::size_t>(c1 * c2));
    double z = 0;
    for (int a = 0; a < c0; ++a)
      for (int b = 0; b < c1; ++b)
        for (int d = 0; d < c2; ++d) {
          const double w = phi[a] * t01[a * c1 + b] * t12[b * c2 + d] * t012[(a * c1 + b) * c2 + d];
          z += w;
          n0[a] += w;
          n2[d] += w;
          f12[b * c2 + d] += w;
        }
    const PseudoMarginals m = exact_marginals(g);
    for (int a = 0; a < c0; ++a) CHECK(m.node[0][a] == doctest::Approx(n0[a] / z).epsilon(1e-12));
    for (int d = 0; d < c2; ++d) CHECK(m.node[2][d] == doctest::Approx(n2[d] / z).epsilon(1e-12));
    for (std::size_t k = 0; k < f12.size(); ++k) CHECK(m.factor[1][k] == doctest::Approx(f12[k] / z).epsilon(1e-12));
    CHECK(polytope_violation(g, m) < 1e-12);
  }
}

TEST_CASE("model validation") {
  FactorGraph g({2, 2});
  CHECK_THROWS_AS(FactorGraph({0}), InputError);
  CHECK_THROWS_AS(g.add_factor({0, 1}, {1, 1, 1}), InputError);
  CHECK_THROWS_AS(g.add_factor({0, 1}, {1, 1, -1, 1}), InputError);
  CHECK_THROWS_AS(g.add_factor({0, 0}, {1, 1, 1, 1}), InputError);
  CHECK_THROWS_AS(g.add_factor({0, 2}, {1, 1, 1, 1}), InputError);
  CHECK_THROWS_AS(g.add_factor({0, 1}, {1, 1, std::nan(""), 1}), InputError);
  CHECK_THROWS_AS(g.set_node_potential(0, {1, 2, 3}), InputError);
}

TEST_CASE("compensated sum") {
  CompensatedSum s;
  s += 1.0;
  for (int k = 0; k < 1000; ++k) s += 1e-16;
  s += -1.0;
  CHECK(s.value() == doctest::Approx(1e-13).epsilon(1e-6));
}
