#include <cmath>
#include <vector>

#include "bethe/errors.hpp"
#include "bethe/lattice.hpp"
#include "bethe/variational.hpp"
#include "bethe/verify.hpp"
#include "doctest.h"

using namespace bethe;

TEST_CASE("objective on small examples") {
  FactorGraph one({2});
  one.set_node_potential(0, {1, 2});
  PseudoMarginals tau{{{1.0 / 3, 2.0 / 3}}, {}};
  CHECK(bethe_objective(one, tau) == doctest::Approx(std::log(3.0)).epsilon(1e-14));

  FactorGraph pair({2, 2});
  pair.add_factor({0, 1}, {1, 1, 1, 1});
  const PseudoMarginals u = product_beliefs(pair, {{0.5, 0.5}, {0.5, 0.5}});
  const BetheTerms t = bethe_terms(pair, u);
  CHECK(t.factor_correlation == doctest::Approx(0.0));
  CHECK(t.node_entropy == doctest::Approx(2 * std::log(2.0)));
  CHECK(bethe_objective(pair, u) == doctest::Approx(std::log(4.0)).epsilon(1e-14));

  PseudoMarginals off = u;
  off.node[0] = {0.6, 0.4};
  CHECK_THROWS_AS(bethe_objective(pair, off), InputError);

  FactorGraph zero({2});
  zero.set_node_potential(0, {0, 1});
  PseudoMarginals bad{{{0.5, 0.5}}, {}};
  CHECK(std::isinf(bethe_objective(zero, bad)));
  PseudoMarginals good{{{0.0, 1.0}}, {}};
  CHECK(bethe_objective(zero, good) == doctest::Approx(0.0));
}

TEST_CASE("objective is exact at the true marginals of a tree") {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    Rng rng(seed);
    const FactorGraph g = random_tree_model(rng, 6, 3);
    const PseudoMarginals m = exact_marginals(g);
    CHECK(bethe_objective(g, m) == doctest::Approx(std::log(exact_partition(g))).epsilon(1e-9));
  }
}

TEST_CASE("belief propagation") {
  FactorGraph one({3});
  one.set_node_potential(0, {1, 2, 5});
  const BPResult r = run_bp(one, initial_bp_state(one));
  CHECK(r.converged);
  CHECK(r.state.iterations <= 1);
  CHECK(r.beliefs.node[0][2] == doctest::Approx(0.625));

  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    Rng rng(seed);
    const FactorGraph g = random_tree_model(rng, 6, 3);
    const BPResult b = run_bp(g, seed);
    REQUIRE(b.converged);
    CHECK(b.log_bethe == doctest::Approx(std::log(exact_partition(g))).epsilon(1e-9));
    const PseudoMarginals m = exact_marginals(g);
    for (std::size_t i = 0; i < m.node.size(); ++i)
      for (std::size_t x = 0; x < m.node[i].size(); ++x)
        CHECK(b.beliefs.node[i][x] == doctest::Approx(m.node[i][x]).epsilon(1e-8));
    CHECK(b.polytope_violation < 1e-9);
  }

  FactorGraph dead({2, 2});
  dead.add_factor({0, 1}, {0, 0, 0, 0});
  CHECK_THROWS_AS(run_bp(dead, initial_bp_state(dead)), InputError);
}

TEST_CASE("maximize_bethe") {
  FactorGraph pair({2, 2});
  pair.add_factor({0, 1}, {1, 1, 1, 1});
  CHECK(maximize_bethe(pair).value == doctest::Approx(4.0).epsilon(1e-9));

  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Rng rng(seed);
    const FactorGraph g = random_tree_model(rng, 6, 3);
    MaximizeOptions opt;
    opt.restarts = 8;
    opt.seed = seed;
    const BetheOptimum o = maximize_bethe(g, opt);
    CHECK(o.value == doctest::Approx(exact_partition(g)).epsilon(1e-6));
    CHECK(polytope_violation(g, o.tau) < 1e-9);
  }
}

TEST_CASE("mean field") {
  FactorGraph indep({2, 3});
  indep.set_node_potential(0, {1, 2});
  indep.set_node_potential(1, {0.5, 1, 4});
  CHECK(mean_field(indep).value == doctest::Approx(exact_partition(indep)).epsilon(1e-12));

  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const FactorGraph g = random_lsm_binary_model(rng, 4);
    MeanFieldOptions mo;
    mo.seed = seed;
    const double mf = mean_field(g, mo).value;
    MaximizeOptions bo;
    bo.restarts = 8;
    bo.seed = seed;
    const double zb = maximize_bethe(g, bo).value;
    const double z = exact_partition(g);
    CHECK(mf <= zb * (1 + 1e-9));
    CHECK(mf <= z * (1 + 1e-9));
    CHECK(zb <= z * (1 + 1e-9));
  }
}

TEST_CASE("BP fixed points never beat the optimizer") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed + 100);
    const FactorGraph g = random_lsm_binary_model(rng, 5);
    MaximizeOptions opt;
    opt.restarts = 16;
    opt.seed = seed;
    const double best = maximize_bethe(g, opt).log_value;
    for (std::uint64_t s = 0; s < 5; ++s) {
      const BPResult r = run_bp(g, s);
      if (r.converged) CHECK(r.log_bethe <= best + 1e-9);
    }
  }
}

TEST_CASE("gradient matches finite differences") {
  Rng rng(77);
  const FactorGraph g = random_tree_model(rng, 4, 3);
  const PseudoMarginals tau = exact_marginals(g);
  const PseudoMarginals grad = bethe_gradient(g, tau);
  const double h = 1e-6;
  for (std::size_t i = 0; i < tau.node.size(); ++i)
    for (std::size_t x = 0; x < tau.node[i].size(); ++x) {
      PseudoMarginals p = tau, m = tau;
      p.node[i][x] += h;
      m.node[i][x] -= h;
      const double fd = (bethe_terms(g, p).total() - bethe_terms(g, m).total()) / (2 * h);
      CHECK(grad.node[i][x] == doctest::Approx(fd).epsilon(1e-5));
    }
  for (std::size_t a = 0; a < tau.factor.size(); ++a)
    for (std::size_t k = 0; k < tau.factor[a].size(); ++k) {
      PseudoMarginals p = tau, m = tau;
      p.factor[a][k] += h;
      m.factor[a][k] -= h;
      const double fd = (bethe_terms(g, p).total() - bethe_terms(g, m).total()) / (2 * h);
      CHECK(grad.factor[a][k] == doctest::Approx(fd).epsilon(1e-5));
    }
}

TEST_CASE("optimizer budget refusal") {
  OptimizerBudget budget;
  CHECK_NOTHROW(check_budget(FactorGraph(std::vector<int>(20, 2)), budget));
  CHECK_THROWS_AS(check_budget(FactorGraph(std::vector<int>(21, 2)), budget), NumericalRefusal);
  MaximizeOptions opt;
  opt.budget.max_variables = 2;
  CHECK_THROWS_AS(maximize_bethe(FactorGraph(std::vector<int>(3, 2)), opt), NumericalRefusal);
}
