#include <algorithm>
#include <cmath>
#include <limits>

#include "bethe/errors.hpp"
#include "bethe/random.hpp"
#include "bethe/variational.hpp"

namespace bethe {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Expected log-potential of each state of `var` under the product of the other
// node beliefs, plus its own log node weight.
std::vector<double> site_field(const FactorGraph& model, const std::vector<std::vector<double>>& q,
                               int var) {
  std::vector<double> field(static_cast<std::size_t>(model.cardinality(var)));
  for (std::size_t x = 0; x < field.size(); ++x) {
    const double w = model.node_weight(var, static_cast<int>(x));
    field[x] = w > 0.0 ? std::log(w) : kNegInf;
  }
  std::vector<int> y;
  for (const Incidence& inc : model.incidences(var)) {
    const Factor& f = model.factor(inc.factor);
    y.resize(f.scope.size());
    std::vector<double> expect(field.size(), 0.0);
    for (std::size_t k = 0; k < f.table.size(); ++k) {
      f.table.decode(k, y);
      double weight = 1.0;
      for (std::size_t p = 0; p < f.scope.size(); ++p)
        if (static_cast<int>(p) != inc.position)
          weight *= q[static_cast<std::size_t>(f.scope[p])][static_cast<std::size_t>(y[p])];
      if (weight == 0.0) continue;
      auto& e = expect[static_cast<std::size_t>(y[static_cast<std::size_t>(inc.position)])];
      e += f.table[k] > 0.0 ? weight * std::log(f.table[k]) : kNegInf;
    }
    for (std::size_t x = 0; x < field.size(); ++x) field[x] += expect[x];
  }
  return field;
}

// Returns false when every state has zero weight.
bool softmax_into(const std::vector<double>& field, std::vector<double>& out) {
  const double top = *std::max_element(field.begin(), field.end());
  if (!std::isfinite(top)) return false;
  double s = 0.0;
  for (std::size_t x = 0; x < field.size(); ++x) {
    out[x] = std::isfinite(field[x]) ? std::exp(field[x] - top) : 0.0;
    s += out[x];
  }
  for (double& v : out) v /= s;
  return true;
}

double product_value(const FactorGraph& model, const std::vector<std::vector<double>>& q) {
  const double v = bethe_terms(model, product_beliefs(model, q)).total();
  return std::isnan(v) ? kNegInf : v;
}

}  // namespace

MeanFieldResult mean_field(const FactorGraph& model, const MeanFieldOptions& options) {
  check_budget(model, options.budget);
  MeanFieldResult best;
  best.log_value = kNegInf;
  Rng seeder(options.seed);
  for (int r = 0; r < std::max(1, options.restarts); ++r) {
    Rng rng(seeder());
    std::vector<std::vector<double>> q;
    for (int i = 0; i < model.num_variables(); ++i) {
      auto& qi = q.emplace_back(static_cast<std::size_t>(model.cardinality(i)), 1.0);
      if (r > 0)
        for (double& v : qi) v = std::exp(uniform_real(rng, -2.0, 2.0));
      double s = 0.0;
      for (double v : qi) s += v;
      for (double& v : qi) v /= s;
    }

    double value = product_value(model, q);
    std::vector<double> updated;
    for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
      double change = 0.0;
      for (int i = 0; i < model.num_variables(); ++i) {
        auto& qi = q[static_cast<std::size_t>(i)];
        updated.assign(qi.size(), 0.0);
        if (!softmax_into(site_field(model, q, i), updated)) continue;
        for (std::size_t x = 0; x < qi.size(); ++x) change = std::max(change, std::fabs(updated[x] - qi[x]));
        qi = updated;
      }
      const double next = product_value(model, q);
      const bool stalled = std::isfinite(next) && std::isfinite(value) && next - value < options.tolerance;
      value = next;
      if (change < 1e-14 || (stalled && change < 1e-9)) break;
    }
    if (value > best.log_value || best.marginals.empty()) {
      best.log_value = value;
      best.marginals = q;
    }
  }
  best.tau = product_beliefs(model, best.marginals);
  best.value = std::exp(best.log_value);
  return best;
}

}  // namespace bethe
