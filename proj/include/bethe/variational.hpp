#pragma once

// Bethe free energy, sum-product belief propagation, naive mean field and a
// constrained ascent that refines Bethe stationary points inside the local
// marginal polytope.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bethe/model.hpp"

namespace bethe {

inline constexpr double kPolytopeTolerance = 1e-9;

/// The four pieces of the Bethe log-partition approximation. Energies are
/// -inf when a belief is positive where its potential is zero.
struct BetheTerms {
  double node_energy = 0.0;         // sum_i sum_x tau_i log phi_i
  double factor_energy = 0.0;       // sum_a sum_x tau_a log psi_a
  double node_entropy = 0.0;        // -sum_i sum_x tau_i log tau_i
  double factor_correlation = 0.0;  // sum_a sum_x tau_a log(tau_a / prod tau_i)
  double total() const { return node_energy + factor_energy + node_entropy - factor_correlation; }
};

/// Evaluates the terms without checking polytope membership.
BetheTerms bethe_terms(const FactorGraph& model, const PseudoMarginals& tau);

/// log Z_B(G, tau). Throws InputError when tau is outside the local polytope
/// by more than `tolerance`; returns -inf on a support violation.
double bethe_objective(const FactorGraph& model, const PseudoMarginals& tau,
                       double tolerance = kPolytopeTolerance);

/// Partial derivatives of bethe_terms().total() treating every node and factor
/// belief entry as an independent coordinate. Requires tau > 0 on the support.
PseudoMarginals bethe_gradient(const FactorGraph& model, const PseudoMarginals& tau);

/// Factor beliefs set to products of node beliefs.
PseudoMarginals product_beliefs(const FactorGraph& model,
                                const std::vector<std::vector<double>>& node);

struct BPOptions {
  double damping = 0.5;
  int max_iterations = 10000;
  double tolerance = 1e-10;
};

/// Messages are stored per incidence: index [factor][position].
struct BPState {
  std::vector<std::vector<std::vector<double>>> variable_to_factor;
  std::vector<std::vector<std::vector<double>>> factor_to_variable;
  double damping = 0.5;
  int iterations = 0;
  double residual = 0.0;
};

/// Uniform messages, or random positive ones when a seed is given.
BPState initial_bp_state(const FactorGraph& model, std::optional<std::uint64_t> seed = std::nullopt);

struct BPResult {
  BPState state;
  PseudoMarginals beliefs;
  double log_bethe = 0.0;  // bethe_terms(beliefs).total()
  bool converged = false;
  double polytope_violation = 0.0;
};

/// Damped synchronous sum-product. Throws InputError on an all-zero factor table.
BPResult run_bp(const FactorGraph& model, BPState init, const BPOptions& options = {});
BPResult run_bp(const FactorGraph& model, std::uint64_t seed, const BPOptions& options = {});

struct OptimizerBudget {
  int max_variables = 20;
  int max_factors = 40;
};

struct AscentResult {
  PseudoMarginals tau;
  double log_value = 0.0;
  int iterations = 0;
  double reduced_gradient_norm = 0.0;
  bool applied = false;  // false when the start had no strictly positive interior to move in
};

/// Projected Newton ascent on the Bethe objective within the local polytope,
/// restricted to the support of the potentials.
AscentResult refine_bethe(const FactorGraph& model, const PseudoMarginals& start,
                          int max_iterations = 200);

struct MaximizeOptions {
  int restarts = 64;
  std::uint64_t seed = 0;
  BPOptions bp;
  bool refine = true;
  int mean_field_restarts = 8;
  OptimizerBudget budget;
};

struct BetheOptimum {
  PseudoMarginals tau;
  double log_value = 0.0;
  double value = 0.0;  // exp(log_value): best found, a lower bound on the true maximum
  int converged_restarts = 0;
  double best_bp_log_value = 0.0;  // -inf when no restart converged
  double mean_field_log_value = 0.0;
  bool refined = false;
};

BetheOptimum maximize_bethe(const FactorGraph& model, const MaximizeOptions& options = {});

struct MeanFieldOptions {
  int restarts = 16;
  std::uint64_t seed = 0;
  int max_sweeps = 10000;
  double tolerance = 1e-13;
  OptimizerBudget budget;
};

struct MeanFieldResult {
  std::vector<std::vector<double>> marginals;
  PseudoMarginals tau;
  double log_value = 0.0;
  double value = 0.0;
};

MeanFieldResult mean_field(const FactorGraph& model, const MeanFieldOptions& options = {});

/// Throws NumericalRefusal when the model exceeds the optimizer budget.
void check_budget(const FactorGraph& model, const OptimizerBudget& budget);

}  // namespace bethe
