#pragma once

// Seeded property suites shared by the `verify` command and the acceptance runner.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "bethe/io.hpp"
#include "bethe/random.hpp"

namespace bethe {

struct VerifyOptions {
  int trials = 0;  // 0 selects the suite's default
  std::uint64_t seed = 0;
  int jobs = 1;
};

struct TrialOutcome {
  bool pass = false;
  double slack = 0.0;  // relative margin of the checked inequality; negative on violation
  std::string message;
};

struct SuiteReport {
  std::string tag;
  int trials = 0;
  int passed = 0;
  double worst_slack = std::numeric_limits<double>::infinity();
  double tolerance = 0.0;
  std::vector<std::string> failures;  // first few, in trial order
  Json details = Json::object();

  bool ok() const { return trials > 0 && passed == trials; }
  void record(const TrialOutcome& t, int index);
};

/// Seed for trial t, independent of scheduling.
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial);

/// Runs f(0..n-1) on up to `jobs` threads; results come back in index order.
template <class F>
auto run_trials(int n, int jobs, F f) -> std::vector<decltype(f(0))> {
  std::vector<decltype(f(0))> out(static_cast<std::size_t>(std::max(n, 0)));
  const int workers = std::clamp(jobs, 1, std::max(n, 1));
  if (workers == 1) {
    for (int t = 0; t < n; ++t) out[static_cast<std::size_t>(t)] = f(t);
    return out;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (int t = next++; t < n; t = next++) out[static_cast<std::size_t>(t)] = f(t);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
        next = n;
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

SuiteReport verify_counterexample(const VerifyOptions& options);
SuiteReport verify_potts_rc_identity(const VerifyOptions& options);
SuiteReport verify_hom_edge_identity(const VerifyOptions& options);
SuiteReport verify_cover_bound(const VerifyOptions& options);
SuiteReport verify_rc_cover_components(const VerifyOptions& options);
SuiteReport verify_rank_cover(const VerifyOptions& options);
SuiteReport verify_potts_ordering(const VerifyOptions& options);
SuiteReport verify_potts_field_ordering(const VerifyOptions& options);
SuiteReport verify_matroid_ordering(const VerifyOptions& options);
SuiteReport verify_hom_ordering(const VerifyOptions& options);
SuiteReport verify_weight_enumerator(const VerifyOptions& options);
SuiteReport verify_tree_exactness(const VerifyOptions& options);
SuiteReport verify_modularity(const VerifyOptions& options);

const std::vector<std::string>& verify_tags();
/// Throws InputError for an unknown tag.
SuiteReport run_verify(const std::string& tag, const VerifyOptions& options);

/// Random instance generators used by the suites and tests.
Graph random_graph(Rng& rng, int max_vertices, int max_edges);
FactorGraph random_lsm_binary_model(Rng& rng, int max_variables);
FactorGraph random_tree_model(Rng& rng, int max_variables, int max_cardinality);
HomModel random_hom_model(Rng& rng, int max_vertices, int max_edges, int max_target);
GFMatrix random_matrix(Rng& rng, int q, int rows, int cols, bool nonzero_columns);

}  // namespace bethe
