#include <cmath>
#include <limits>

#include "bethe/errors.hpp"
#include "bethe/variational.hpp"

namespace bethe {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// t * log(w) with 0 * log(anything) = 0 and t > 0, w = 0 giving -inf.
double weighted_log(double t, double w) {
  if (t == 0.0) return 0.0;
  if (w == 0.0) return kNegInf;
  return t * std::log(w);
}

void check_shape(const FactorGraph& model, const PseudoMarginals& tau) {
  if (tau.node.size() != static_cast<std::size_t>(model.num_variables()) ||
      tau.factor.size() != static_cast<std::size_t>(model.num_factors()))
    throw InputError("pseudo-marginals do not match the model");
  for (int i = 0; i < model.num_variables(); ++i)
    if (tau.node[static_cast<std::size_t>(i)].size() != static_cast<std::size_t>(model.cardinality(i)))
      throw InputError("node belief has wrong length");
  for (int a = 0; a < model.num_factors(); ++a)
    if (tau.factor[static_cast<std::size_t>(a)].size() != model.factor(a).table.size())
      throw InputError("factor belief has wrong size");
}

}  // namespace

void check_budget(const FactorGraph& model, const OptimizerBudget& budget) {
  if (model.num_variables() > budget.max_variables || model.num_factors() > budget.max_factors)
    throw NumericalRefusal("model exceeds the optimizer budget (" +
                           std::to_string(budget.max_variables) + " variables, " +
                           std::to_string(budget.max_factors) + " factors)");
}

BetheTerms bethe_terms(const FactorGraph& model, const PseudoMarginals& tau) {
  check_shape(model, tau);
  BetheTerms t;
  CompensatedSum node_energy, factor_energy, node_entropy, correlation;
  for (int i = 0; i < model.num_variables(); ++i) {
    const auto& ti = tau.node[static_cast<std::size_t>(i)];
    for (std::size_t x = 0; x < ti.size(); ++x) {
      node_energy += weighted_log(ti[x], model.node_weight(i, static_cast<int>(x)));
      node_entropy += -weighted_log(ti[x], ti[x]);
    }
  }
  std::vector<int> y;
  for (int a = 0; a < model.num_factors(); ++a) {
    const Factor& f = model.factor(a);
    const auto& ta = tau.factor[static_cast<std::size_t>(a)];
    y.resize(f.scope.size());
    for (std::size_t k = 0; k < ta.size(); ++k) {
      if (ta[k] == 0.0) continue;
      factor_energy += weighted_log(ta[k], f.table[k]);
      f.table.decode(k, y);
      double prod = 1.0;
      for (std::size_t p = 0; p < f.scope.size(); ++p)
        prod *= tau.node[static_cast<std::size_t>(f.scope[p])][static_cast<std::size_t>(y[p])];
      if (prod == 0.0) {
        correlation += std::numeric_limits<double>::infinity();
        continue;
      }
      correlation += ta[k] * std::log(ta[k] / prod);
    }
  }
  t.node_energy = node_energy.value();
  t.factor_energy = factor_energy.value();
  t.node_entropy = node_entropy.value();
  t.factor_correlation = correlation.value();
  // inf - inf inside a compensated sum can yield NaN; treat any NaN as a support violation.
  if (std::isnan(t.node_energy)) t.node_energy = kNegInf;
  if (std::isnan(t.factor_energy)) t.factor_energy = kNegInf;
  if (std::isnan(t.factor_correlation)) t.factor_correlation = std::numeric_limits<double>::infinity();
  return t;
}

double bethe_objective(const FactorGraph& model, const PseudoMarginals& tau, double tolerance) {
  const double violation = polytope_violation(model, tau);
  if (violation > tolerance)
    throw InputError("pseudo-marginals lie outside the local marginal polytope (violation " +
                     std::to_string(violation) + ")");
  const double v = bethe_terms(model, tau).total();
  return std::isnan(v) ? kNegInf : v;
}

PseudoMarginals bethe_gradient(const FactorGraph& model, const PseudoMarginals& tau) {
  check_shape(model, tau);
  PseudoMarginals g;
  g.node.resize(tau.node.size());
  g.factor.resize(tau.factor.size());
  for (int i = 0; i < model.num_variables(); ++i) {
    const auto& ti = tau.node[static_cast<std::size_t>(i)];
    auto& gi = g.node[static_cast<std::size_t>(i)];
    gi.resize(ti.size());
    for (std::size_t x = 0; x < ti.size(); ++x)
      gi[x] = std::log(model.node_weight(i, static_cast<int>(x))) - std::log(ti[x]) - 1.0;
  }
  std::vector<int> y;
  for (int a = 0; a < model.num_factors(); ++a) {
    const Factor& f = model.factor(a);
    const auto& ta = tau.factor[static_cast<std::size_t>(a)];
    auto& ga = g.factor[static_cast<std::size_t>(a)];
    ga.resize(ta.size());
    y.resize(f.scope.size());
    for (std::size_t k = 0; k < ta.size(); ++k) {
      f.table.decode(k, y);
      double s = std::log(f.table[k]) - std::log(ta[k]) - 1.0;
      for (std::size_t p = 0; p < f.scope.size(); ++p)
        s += std::log(tau.node[static_cast<std::size_t>(f.scope[p])][static_cast<std::size_t>(y[p])]);
      ga[k] = s;
    }
    for (std::size_t p = 0; p < f.scope.size(); ++p) {
      const auto mu = marginalize(f.table, ta, static_cast<int>(p));
      const auto i = static_cast<std::size_t>(f.scope[p]);
      for (std::size_t x = 0; x < mu.size(); ++x) g.node[i][x] += mu[x] / tau.node[i][x];
    }
  }
  return g;
}

PseudoMarginals product_beliefs(const FactorGraph& model,
                                const std::vector<std::vector<double>>& node) {
  PseudoMarginals tau;
  tau.node = node;
  std::vector<int> y;
  for (const Factor& f : model.factors()) {
    auto& ta = tau.factor.emplace_back(f.table.size(), 1.0);
    y.resize(f.scope.size());
    for (std::size_t k = 0; k < ta.size(); ++k) {
      f.table.decode(k, y);
      for (std::size_t p = 0; p < f.scope.size(); ++p)
        ta[k] *= node[static_cast<std::size_t>(f.scope[p])][static_cast<std::size_t>(y[p])];
    }
  }
  return tau;
}

}  // namespace bethe
