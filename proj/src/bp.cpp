#include <algorithm>
#include <cmath>

#include "bethe/errors.hpp"
#include "bethe/random.hpp"
#include "bethe/variational.hpp"

namespace bethe {

namespace {

using Messages = std::vector<std::vector<std::vector<double>>>;

bool normalize(std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  if (!(s > 0.0) || !std::isfinite(s)) return false;
  for (double& x : v) x /= s;
  return true;
}

Messages shaped_messages(const FactorGraph& model, double value) {
  Messages m(static_cast<std::size_t>(model.num_factors()));
  for (int a = 0; a < model.num_factors(); ++a)
    for (int v : model.factor(a).scope)
      m[static_cast<std::size_t>(a)].emplace_back(static_cast<std::size_t>(model.cardinality(v)), value);
  return m;
}

// Variable-to-factor messages from the current factor-to-variable ones.
Messages variable_messages(const FactorGraph& model, const Messages& to_var) {
  Messages out = shaped_messages(model, 1.0);
  for (int i = 0; i < model.num_variables(); ++i) {
    const auto& incs = model.incidences(i);
    for (const Incidence& target : incs) {
      auto& msg = out[static_cast<std::size_t>(target.factor)][static_cast<std::size_t>(target.position)];
      for (std::size_t x = 0; x < msg.size(); ++x) msg[x] = model.node_weight(i, static_cast<int>(x));
      for (const Incidence& other : incs) {
        if (other.factor == target.factor && other.position == target.position) continue;
        const auto& in = to_var[static_cast<std::size_t>(other.factor)][static_cast<std::size_t>(other.position)];
        for (std::size_t x = 0; x < msg.size(); ++x) msg[x] *= in[x];
      }
      if (!normalize(msg))
        throw NumericalRefusal("belief propagation: variable " + std::to_string(i) +
                               " has no state compatible with its incoming messages");
    }
  }
  return out;
}

Messages factor_messages(const FactorGraph& model, const Messages& to_factor) {
  Messages out = shaped_messages(model, 0.0);
  std::vector<int> y;
  for (int a = 0; a < model.num_factors(); ++a) {
    const Factor& f = model.factor(a);
    const auto& in = to_factor[static_cast<std::size_t>(a)];
    auto& msgs = out[static_cast<std::size_t>(a)];
    y.resize(f.scope.size());
    for (std::size_t k = 0; k < f.table.size(); ++k) {
      if (f.table[k] == 0.0) continue;
      f.table.decode(k, y);
      for (std::size_t p = 0; p < f.scope.size(); ++p) {
        double w = f.table[k];
        for (std::size_t q = 0; q < f.scope.size(); ++q)
          if (q != p) w *= in[q][static_cast<std::size_t>(y[q])];
        msgs[p][static_cast<std::size_t>(y[p])] += w;
      }
    }
    for (auto& m : msgs)
      if (!normalize(m))
        throw NumericalRefusal("belief propagation: factor " + std::to_string(a) +
                               " sends an all-zero message");
  }
  return out;
}

PseudoMarginals beliefs_from(const FactorGraph& model, const Messages& to_var,
                             const Messages& to_factor) {
  PseudoMarginals tau;
  for (int i = 0; i < model.num_variables(); ++i) {
    auto& b = tau.node.emplace_back(static_cast<std::size_t>(model.cardinality(i)));
    for (std::size_t x = 0; x < b.size(); ++x) b[x] = model.node_weight(i, static_cast<int>(x));
    for (const Incidence& inc : model.incidences(i)) {
      const auto& in = to_var[static_cast<std::size_t>(inc.factor)][static_cast<std::size_t>(inc.position)];
      for (std::size_t x = 0; x < b.size(); ++x) b[x] *= in[x];
    }
    if (!normalize(b)) throw NumericalRefusal("belief propagation: zero node belief");
  }
  std::vector<int> y;
  for (int a = 0; a < model.num_factors(); ++a) {
    const Factor& f = model.factor(a);
    auto& b = tau.factor.emplace_back(f.table.size());
    y.resize(f.scope.size());
    for (std::size_t k = 0; k < b.size(); ++k) {
      f.table.decode(k, y);
      double w = f.table[k];
      for (std::size_t p = 0; p < f.scope.size(); ++p)
        w *= to_factor[static_cast<std::size_t>(a)][p][static_cast<std::size_t>(y[p])];
      b[k] = w;
    }
    if (!normalize(b)) throw NumericalRefusal("belief propagation: zero factor belief");
  }
  return tau;
}

}  // namespace

BPState initial_bp_state(const FactorGraph& model, std::optional<std::uint64_t> seed) {
  BPState s;
  s.factor_to_variable = shaped_messages(model, 1.0);
  if (seed) {
    Rng rng(*seed);
    for (auto& per_factor : s.factor_to_variable)
      for (auto& m : per_factor)
        for (double& x : m) x = std::exp(uniform_real(rng, -3.0, 3.0));
  }
  for (auto& per_factor : s.factor_to_variable)
    for (auto& m : per_factor) normalize(m);
  s.variable_to_factor = shaped_messages(model, 1.0);
  for (auto& per_factor : s.variable_to_factor)
    for (auto& m : per_factor) normalize(m);
  return s;
}

BPResult run_bp(const FactorGraph& model, BPState state, const BPOptions& options) {
  if (!(options.damping >= 0.0 && options.damping < 1.0))
    throw InputError("belief propagation: damping must lie in [0, 1)");
  for (int a = 0; a < model.num_factors(); ++a) {
    const auto vals = model.factor(a).table.values();
    if (std::all_of(vals.begin(), vals.end(), [](double v) { return v == 0.0; }))
      throw InputError("belief propagation: factor " + std::to_string(a) + " is identically zero");
  }
  state.damping = options.damping;
  state.iterations = 0;
  state.residual = 0.0;

  BPResult result;
  const double lambda = options.damping;
  for (int it = 0; it < std::max(1, options.max_iterations); ++it) {
    Messages to_factor = variable_messages(model, state.factor_to_variable);
    Messages to_var = factor_messages(model, to_factor);
    double residual = 0.0;
    for (std::size_t a = 0; a < to_var.size(); ++a) {
      for (std::size_t p = 0; p < to_var[a].size(); ++p) {
        auto& old = state.factor_to_variable[a][p];
        auto& fresh = to_var[a][p];
        for (std::size_t x = 0; x < fresh.size(); ++x) fresh[x] = (1.0 - lambda) * fresh[x] + lambda * old[x];
        normalize(fresh);
        for (std::size_t x = 0; x < fresh.size(); ++x) residual = std::max(residual, std::fabs(fresh[x] - old[x]));
        const auto& old_vf = state.variable_to_factor[a][p];
        for (std::size_t x = 0; x < fresh.size(); ++x)
          residual = std::max(residual, std::fabs(to_factor[a][p][x] - old_vf[x]));
      }
    }
    state.factor_to_variable = std::move(to_var);
    state.variable_to_factor = std::move(to_factor);
    state.iterations = it + 1;
    state.residual = residual;
    if (residual < options.tolerance) {
      result.converged = true;
      break;
    }
  }
  // Beliefs use variable messages consistent with the final factor messages.
  state.variable_to_factor = variable_messages(model, state.factor_to_variable);
  result.beliefs = beliefs_from(model, state.factor_to_variable, state.variable_to_factor);
  result.polytope_violation = polytope_violation(model, result.beliefs);
  const double v = bethe_terms(model, result.beliefs).total();
  result.log_bethe = std::isnan(v) ? -std::numeric_limits<double>::infinity() : v;
  result.state = std::move(state);
  return result;
}

BPResult run_bp(const FactorGraph& model, std::uint64_t seed, const BPOptions& options) {
  return run_bp(model, initial_bp_state(model, seed), options);
}

}  // namespace bethe
