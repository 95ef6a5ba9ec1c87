#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <limits>

#include "bethe/errors.hpp"
#include "bethe/random.hpp"
#include "bethe/variational.hpp"

namespace bethe {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Free coordinates of the pruned local polytope. Entries whose potential is
// zero (or that are forced to zero by such entries) are fixed at 0.
struct Coordinates {
  std::vector<std::vector<int>> node;    // -1 when pruned
  std::vector<std::vector<int>> factor;  // -1 when pruned
  int size = 0;
};

Coordinates free_coordinates(const FactorGraph& model) {
  const auto nv = static_cast<std::size_t>(model.num_variables());
  std::vector<std::vector<char>> node_alive(nv);
  for (std::size_t i = 0; i < nv; ++i) {
    node_alive[i].resize(static_cast<std::size_t>(model.cardinality(static_cast<int>(i))));
    for (std::size_t x = 0; x < node_alive[i].size(); ++x)
      node_alive[i][x] = model.node_weight(static_cast<int>(i), static_cast<int>(x)) > 0.0;
  }
  std::vector<std::vector<char>> factor_alive(static_cast<std::size_t>(model.num_factors()));
  std::vector<int> y;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int a = 0; a < model.num_factors(); ++a) {
      const Factor& f = model.factor(a);
      auto& alive = factor_alive[static_cast<std::size_t>(a)];
      alive.assign(f.table.size(), 0);
      y.resize(f.scope.size());
      for (std::size_t k = 0; k < f.table.size(); ++k) {
        if (f.table[k] <= 0.0) continue;
        f.table.decode(k, y);
        bool ok = true;
        for (std::size_t p = 0; p < f.scope.size(); ++p)
          ok = ok && node_alive[static_cast<std::size_t>(f.scope[p])][static_cast<std::size_t>(y[p])];
        alive[k] = ok;
      }
      for (std::size_t p = 0; p < f.scope.size(); ++p) {
        std::vector<char> supported(node_alive[static_cast<std::size_t>(f.scope[p])].size(), 0);
        for (std::size_t k = 0; k < f.table.size(); ++k)
          if (alive[k]) supported[(k / f.table.stride(p)) % supported.size()] = 1;
        auto& na = node_alive[static_cast<std::size_t>(f.scope[p])];
        for (std::size_t x = 0; x < na.size(); ++x)
          if (na[x] && !supported[x]) {
            na[x] = 0;
            changed = true;
          }
      }
    }
  }
  Coordinates c;
  for (auto& row : node_alive) {
    auto& dst = c.node.emplace_back();
    for (char alive : row) dst.push_back(alive ? c.size++ : -1);
  }
  for (auto& row : factor_alive) {
    auto& dst = c.factor.emplace_back();
    for (char alive : row) dst.push_back(alive ? c.size++ : -1);
  }
  return c;
}

Eigen::VectorXd pack(const Coordinates& c, const PseudoMarginals& tau) {
  Eigen::VectorXd z(c.size);
  for (std::size_t i = 0; i < c.node.size(); ++i)
    for (std::size_t x = 0; x < c.node[i].size(); ++x)
      if (c.node[i][x] >= 0) z[c.node[i][x]] = tau.node[i][x];
  for (std::size_t a = 0; a < c.factor.size(); ++a)
    for (std::size_t k = 0; k < c.factor[a].size(); ++k)
      if (c.factor[a][k] >= 0) z[c.factor[a][k]] = tau.factor[a][k];
  return z;
}

PseudoMarginals unpack(const FactorGraph& model, const Coordinates& c, const Eigen::VectorXd& z) {
  PseudoMarginals tau;
  for (int i = 0; i < model.num_variables(); ++i) {
    const auto& idx = c.node[static_cast<std::size_t>(i)];
    auto& t = tau.node.emplace_back(idx.size(), 0.0);
    for (std::size_t x = 0; x < idx.size(); ++x)
      if (idx[x] >= 0) t[x] = z[idx[x]];
  }
  for (int a = 0; a < model.num_factors(); ++a) {
    const auto& idx = c.factor[static_cast<std::size_t>(a)];
    auto& t = tau.factor.emplace_back(idx.size(), 0.0);
    for (std::size_t k = 0; k < idx.size(); ++k)
      if (idx[k] >= 0) t[k] = z[idx[k]];
  }
  return tau;
}

// Linear constraints A z = b describing the pruned local polytope.
void constraints(const FactorGraph& model, const Coordinates& c, Eigen::MatrixXd& A,
                 Eigen::VectorXd& b) {
  std::vector<std::vector<std::pair<int, double>>> rows;
  std::vector<double> rhs;
  for (const auto& idx : c.node) {
    auto& row = rows.emplace_back();
    for (int j : idx)
      if (j >= 0) row.emplace_back(j, 1.0);
    rhs.push_back(1.0);
  }
  for (int a = 0; a < model.num_factors(); ++a) {
    const Factor& f = model.factor(a);
    const auto& fidx = c.factor[static_cast<std::size_t>(a)];
    if (f.scope.empty()) {
      auto& row = rows.emplace_back();
      for (int j : fidx)
        if (j >= 0) row.emplace_back(j, 1.0);
      rhs.push_back(1.0);
      continue;
    }
    for (std::size_t p = 0; p < f.scope.size(); ++p) {
      const auto& nidx = c.node[static_cast<std::size_t>(f.scope[p])];
      for (std::size_t x = 0; x < nidx.size(); ++x) {
        if (nidx[x] < 0) continue;
        auto& row = rows.emplace_back();
        for (std::size_t k = 0; k < fidx.size(); ++k)
          if (fidx[k] >= 0 && (k / f.table.stride(p)) % nidx.size() == x) row.emplace_back(fidx[k], 1.0);
        row.emplace_back(nidx[x], -1.0);
        rhs.push_back(0.0);
      }
    }
  }
  A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), c.size);
  b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (auto [j, v] : rows[r]) A(static_cast<Eigen::Index>(r), j) = v;
    b[static_cast<Eigen::Index>(r)] = rhs[r];
  }
}

Eigen::SparseMatrix<double> hessian(const FactorGraph& model, const Coordinates& c,
                                    const PseudoMarginals& tau) {
  std::vector<Eigen::Triplet<double>> trip;
  std::vector<std::vector<double>> node_diag(tau.node.size());
  for (std::size_t i = 0; i < tau.node.size(); ++i) {
    node_diag[i].resize(tau.node[i].size());
    for (std::size_t x = 0; x < tau.node[i].size(); ++x)
      if (c.node[i][x] >= 0) node_diag[i][x] = -1.0 / tau.node[i][x];
  }
  for (int a = 0; a < model.num_factors(); ++a) {
    const Factor& f = model.factor(a);
    const auto& ta = tau.factor[static_cast<std::size_t>(a)];
    const auto& fidx = c.factor[static_cast<std::size_t>(a)];
    for (std::size_t k = 0; k < ta.size(); ++k) {
      if (fidx[k] < 0) continue;
      trip.emplace_back(fidx[k], fidx[k], -1.0 / ta[k]);
      for (std::size_t p = 0; p < f.scope.size(); ++p) {
        const auto i = static_cast<std::size_t>(f.scope[p]);
        const auto x = (k / f.table.stride(p)) % tau.node[i].size();
        const int ni = c.node[i][x];
        trip.emplace_back(fidx[k], ni, 1.0 / tau.node[i][x]);
        trip.emplace_back(ni, fidx[k], 1.0 / tau.node[i][x]);
      }
    }
    for (std::size_t p = 0; p < f.scope.size(); ++p) {
      const auto mu = marginalize(f.table, ta, static_cast<int>(p));
      const auto i = static_cast<std::size_t>(f.scope[p]);
      for (std::size_t x = 0; x < mu.size(); ++x)
        if (c.node[i][x] >= 0) node_diag[i][x] -= mu[x] / (tau.node[i][x] * tau.node[i][x]);
    }
  }
  for (std::size_t i = 0; i < node_diag.size(); ++i)
    for (std::size_t x = 0; x < node_diag[i].size(); ++x)
      if (c.node[i][x] >= 0) trip.emplace_back(c.node[i][x], c.node[i][x], node_diag[i][x]);
  Eigen::SparseMatrix<double> H(c.size, c.size);
  H.setFromTriplets(trip.begin(), trip.end());
  return H;
}

Eigen::VectorXd gradient(const FactorGraph& model, const Coordinates& c,
                         const PseudoMarginals& tau) {
  return pack(c, bethe_gradient(model, tau));
}

bool model_has_zero_potential(const FactorGraph& model) {
  for (int i = 0; i < model.num_variables(); ++i)
    for (double w : model.node_potential(i))
      if (w == 0.0) return true;
  for (const Factor& f : model.factors())
    for (double w : f.table.values())
      if (w == 0.0) return true;
  return false;
}

double objective(const FactorGraph& model, const PseudoMarginals& tau) {
  const double v = bethe_terms(model, tau).total();
  return std::isnan(v) ? kNegInf : v;
}

}  // namespace

AscentResult refine_bethe(const FactorGraph& model, const PseudoMarginals& start,
                          int max_iterations) {
  AscentResult result;
  result.tau = start;
  result.log_value = objective(model, start);

  const Coordinates c = free_coordinates(model);
  if (c.size == 0) return result;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  constraints(model, c, A, b);

  Eigen::VectorXd z = pack(c, start);
  if (!model_has_zero_potential(model)) {
    const PseudoMarginals uniform = [&] {
      std::vector<std::vector<double>> node;
      for (int i = 0; i < model.num_variables(); ++i)
        node.emplace_back(static_cast<std::size_t>(model.cardinality(i)), 1.0 / model.cardinality(i));
      return product_beliefs(model, node);
    }();
    z = (1.0 - 1e-9) * z + 1e-9 * pack(c, uniform);
  }
  // Project onto the affine hull of the polytope.
  const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A);
  z -= cod.solve(A * z - b);
  if ((z.array() <= 0.0).any()) return result;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  lu.setThreshold(1e-10);
  if (lu.dimensionOfKernel() == 0) {
    result.tau = unpack(model, c, z);
    result.log_value = objective(model, result.tau);
    result.applied = true;
    return result;
  }
  const Eigen::MatrixXd kernel = lu.kernel();
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(kernel);
  const Eigen::MatrixXd N =
      qr.householderQ() * Eigen::MatrixXd::Identity(kernel.rows(), kernel.cols());

  PseudoMarginals tau = unpack(model, c, z);
  double value = objective(model, tau);
  int it = 0;
  double rnorm = 0.0;
  for (; it < max_iterations; ++it) {
    const Eigen::VectorXd g = gradient(model, c, tau);
    const Eigen::VectorXd r = N.transpose() * g;
    rnorm = r.cwiseAbs().maxCoeff();
    if (rnorm < 1e-11) break;

    const Eigen::MatrixXd HN = hessian(model, c, tau) * N;
    const Eigen::MatrixXd R = N.transpose() * HN;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(R);
    const Eigen::VectorXd lambda = eig.eigenvalues();
    const double scale = std::max(1e-12, lambda.cwiseAbs().maxCoeff());
    Eigen::VectorXd inv(lambda.size());
    for (Eigen::Index k = 0; k < lambda.size(); ++k)
      inv[k] = 1.0 / std::max(std::fabs(lambda[k]), 1e-10 * scale);
    const Eigen::MatrixXd& V = eig.eigenvectors();
    const Eigen::VectorXd reduced = V * (inv.asDiagonal() * (V.transpose() * r));
    const Eigen::VectorXd d = N * reduced;
    const double slope = r.dot(reduced);
    if (!(slope > 0.0)) break;

    double t = 1.0;
    for (Eigen::Index k = 0; k < d.size(); ++k)
      if (d[k] < 0.0) t = std::min(t, -0.99 * z[k] / d[k]);
    bool accepted = false;
    while (t > 1e-16) {
      const Eigen::VectorXd trial = z + t * d;
      PseudoMarginals trial_tau = unpack(model, c, trial);
      const double trial_value = objective(model, trial_tau);
      if (trial_value >= value + 1e-4 * t * slope) {
        z = trial;
        tau = std::move(trial_tau);
        value = trial_value;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
  }
  result.tau = std::move(tau);
  result.log_value = value;
  result.iterations = it;
  result.reduced_gradient_norm = rnorm;
  result.applied = true;
  return result;
}

BetheOptimum maximize_bethe(const FactorGraph& model, const MaximizeOptions& options) {
  check_budget(model, options.budget);
  BetheOptimum best;
  best.log_value = kNegInf;
  best.best_bp_log_value = kNegInf;

  std::optional<PseudoMarginals> best_bp;
  Rng seeder(options.seed);
  for (int r = 0; r < std::max(1, options.restarts); ++r) {
    const std::uint64_t s = seeder();
    BPResult bp;
    try {
      bp = r == 0 ? run_bp(model, initial_bp_state(model), options.bp) : run_bp(model, s, options.bp);
    } catch (const NumericalRefusal&) {
      continue;
    }
    if (!bp.converged || bp.polytope_violation > kPolytopeTolerance) continue;
    ++best.converged_restarts;
    if (bp.log_bethe > best.best_bp_log_value) {
      best.best_bp_log_value = bp.log_bethe;
      best_bp = bp.beliefs;
    }
  }

  MeanFieldOptions mf_options;
  mf_options.restarts = std::max(1, options.mean_field_restarts);
  mf_options.seed = options.seed ^ 0x9e3779b97f4a7c15ULL;
  mf_options.budget = options.budget;
  const MeanFieldResult mf = mean_field(model, mf_options);
  best.mean_field_log_value = mf.log_value;

  auto consider = [&](const PseudoMarginals& tau, double value, bool refined) {
    if (value > best.log_value) {
      best.log_value = value;
      best.tau = tau;
      best.refined = refined;
    }
  };
  if (best_bp) consider(*best_bp, best.best_bp_log_value, false);
  consider(mf.tau, mf.log_value, false);

  if (options.refine) {
    std::vector<PseudoMarginals> starts;
    if (best_bp) starts.push_back(*best_bp);
    starts.push_back(mf.tau);
    for (const auto& start : starts) {
      const AscentResult asc = refine_bethe(model, start);
      if (asc.applied && polytope_violation(model, asc.tau) <= kPolytopeTolerance)
        consider(asc.tau, asc.log_value, true);
    }
  }
  best.value = std::exp(best.log_value);
  return best;
}

}  // namespace bethe
