#include "bethe/covers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "bethe/errors.hpp"
#include "bethe/random.hpp"

namespace bethe {

void check_cover_spec(const CoverSpec& spec) {
  if (spec.copies < 1) throw InputError("cover: number of copies must be at least 1");
  if (spec.permutations.size() != static_cast<std::size_t>(spec.base.num_factors()))
    throw InputError("cover: need one permutation list per factor");
  for (int a = 0; a < spec.base.num_factors(); ++a) {
    const auto& perms = spec.permutations[static_cast<std::size_t>(a)];
    if (perms.size() != spec.base.factor(a).scope.size())
      throw InputError("cover: need one permutation per incidence of factor " + std::to_string(a));
    for (const auto& pi : perms) {
      if (pi.size() != static_cast<std::size_t>(spec.copies))
        throw InputError("cover: permutation has wrong length");
      std::vector<char> seen(static_cast<std::size_t>(spec.copies), 0);
      for (int v : pi) {
        if (v < 0 || v >= spec.copies || seen[static_cast<std::size_t>(v)])
          throw InputError("cover: malformed permutation at factor " + std::to_string(a));
        seen[static_cast<std::size_t>(v)] = 1;
      }
    }
  }
}

LiftedModel build_cover(const CoverSpec& spec) {
  check_cover_spec(spec);
  const FactorGraph& base = spec.base;
  const int n = base.num_variables();
  const int nf = base.num_factors();
  LiftedModel out;
  for (int m = 0; m < spec.copies; ++m) {
    for (int i = 0; i < n; ++i) {
      const int v = out.cover.add_variable(base.cardinality(i));
      if (base.has_node_potential(i)) {
        auto w = base.node_potential(i);
        out.cover.set_node_potential(v, {w.begin(), w.end()});
      }
      out.copy_map.variable.push_back(i);
      out.layer.push_back(m);
    }
  }
  for (int m = 0; m < spec.copies; ++m) {
    for (int a = 0; a < nf; ++a) {
      const Factor& f = base.factor(a);
      std::vector<int> scope;
      for (std::size_t p = 0; p < f.scope.size(); ++p) {
        const int copy = spec.permutations[static_cast<std::size_t>(a)][p][static_cast<std::size_t>(m)];
        scope.push_back(lifted_variable(f.scope[p], copy, n));
      }
      out.cover.add_factor(std::move(scope), f.table);
      out.copy_map.factor.push_back(a);
    }
  }
  return out;
}

CoverDiagnosis validate_cover(const FactorGraph& candidate, const FactorGraph& base,
                              const CopyMap& map) {
  CoverDiagnosis d;
  auto fail = [&](std::string msg) {
    d.valid = false;
    d.message = std::move(msg);
    return d;
  };
  if (map.variable.size() != static_cast<std::size_t>(candidate.num_variables()) ||
      map.factor.size() != static_cast<std::size_t>(candidate.num_factors()))
    return fail("copy map is not total on the candidate");

  std::vector<int> var_preimages(static_cast<std::size_t>(base.num_variables()), 0);
  std::vector<int> fac_preimages(static_cast<std::size_t>(base.num_factors()), 0);

  for (int c = 0; c < candidate.num_factors(); ++c) {
    const int b = map.factor[static_cast<std::size_t>(c)];
    if (b < 0 || b >= base.num_factors())
      return fail("candidate factor " + std::to_string(c) + " maps outside the base");
    ++fac_preimages[static_cast<std::size_t>(b)];
    const Factor& fc = candidate.factor(c);
    const Factor& fb = base.factor(b);
    if (fc.scope.size() != fb.scope.size())
      return fail("candidate factor " + std::to_string(c) + " has the wrong arity");
    for (std::size_t p = 0; p < fc.scope.size(); ++p)
      if (map.variable[static_cast<std::size_t>(fc.scope[p])] != fb.scope[p])
        return fail("candidate factor " + std::to_string(c) + " is not mapped onto the scope of base factor " +
                    std::to_string(b));
    if (!(fc.table == fb.table))
      return fail("candidate factor " + std::to_string(c) + " does not carry the potential of base factor " +
                  std::to_string(b));
  }

  for (int j = 0; j < candidate.num_variables(); ++j) {
    const int i = map.variable[static_cast<std::size_t>(j)];
    if (i < 0 || i >= base.num_variables())
      return fail("candidate variable " + std::to_string(j) + " maps outside the base");
    ++var_preimages[static_cast<std::size_t>(i)];
    const std::string who = "candidate variable " + std::to_string(j) + " (copy of base variable " +
                            std::to_string(i) + ")";
    if (candidate.cardinality(j) != base.cardinality(i)) return fail(who + ": cardinality differs");
    auto wc = candidate.node_potential(j);
    auto wb = base.node_potential(i);
    if (!std::equal(wc.begin(), wc.end(), wb.begin(), wb.end()))
      return fail(who + ": node potential differs");

    std::vector<std::pair<int, int>> image, expected;
    for (const Incidence& inc : candidate.incidences(j))
      image.emplace_back(map.factor[static_cast<std::size_t>(inc.factor)], inc.position);
    for (const Incidence& inc : base.incidences(i)) expected.emplace_back(inc.factor, inc.position);
    std::sort(image.begin(), image.end());
    std::sort(expected.begin(), expected.end());
    if (image != expected) return fail(who + ": neighborhood is not mapped bijectively");
  }

  const int copies = var_preimages.empty() ? (fac_preimages.empty() ? 0 : fac_preimages[0])
                                           : var_preimages[0];
  for (std::size_t i = 0; i < var_preimages.size(); ++i)
    if (var_preimages[i] != copies)
      return fail("base variable " + std::to_string(i) + " has " + std::to_string(var_preimages[i]) +
                  " copies, expected " + std::to_string(copies));
  for (std::size_t a = 0; a < fac_preimages.size(); ++a)
    if (fac_preimages[a] != copies)
      return fail("base factor " + std::to_string(a) + " has " + std::to_string(fac_preimages[a]) +
                  " copies, expected " + std::to_string(copies));
  if (copies < 1 && (base.num_variables() > 0 || base.num_factors() > 0))
    return fail("base nodes have no copies");
  d.valid = true;
  d.copies = copies;
  return d;
}

CoverSpec identity_cover(const FactorGraph& base, int copies) {
  if (copies < 1) throw InputError("cover: number of copies must be at least 1");
  CoverSpec spec{base, copies, {}};
  std::vector<int> id(static_cast<std::size_t>(copies));
  std::iota(id.begin(), id.end(), 0);
  for (const Factor& f : base.factors())
    spec.permutations.emplace_back(f.scope.size(), id);
  return spec;
}

CoverSpec sample_cover(const FactorGraph& base, int copies, std::uint64_t seed) {
  CoverSpec spec = identity_cover(base, copies);
  Rng rng(seed);
  for (auto& perms : spec.permutations)
    for (auto& pi : perms) pi = random_permutation(rng, copies);
  return spec;
}

std::uint64_t canonical_cover_count(const FactorGraph& base, int copies) {
  std::uint64_t fact = 1;
  for (int k = 2; k <= copies; ++k) fact *= static_cast<std::uint64_t>(k);
  std::uint64_t total = 1;
  for (const Factor& f : base.factors())
    for (std::size_t p = 1; p < f.scope.size(); ++p) {
      if (total > std::numeric_limits<std::uint64_t>::max() / fact)
        return std::numeric_limits<std::uint64_t>::max();
      total *= fact;
    }
  return total;
}

void for_each_cover(const FactorGraph& base, int copies,
                    const std::function<void(const CoverSpec&)>& visit) {
  CoverSpec spec = identity_cover(base, copies);
  // Free incidences: every position except the first of each factor.
  std::vector<std::pair<int, int>> free;
  for (int a = 0; a < base.num_factors(); ++a)
    for (std::size_t p = 1; p < base.factor(a).scope.size(); ++p) free.emplace_back(a, static_cast<int>(p));

  auto recurse = [&](auto&& self, std::size_t k) -> void {
    if (k == free.size()) {
      visit(spec);
      return;
    }
    auto& pi = spec.permutations[static_cast<std::size_t>(free[k].first)]
                                [static_cast<std::size_t>(free[k].second)];
    std::iota(pi.begin(), pi.end(), 0);
    do {
      self(self, k + 1);
    } while (std::next_permutation(pi.begin(), pi.end()));
    std::iota(pi.begin(), pi.end(), 0);
  };
  recurse(recurse, 0);
}

namespace {

CoverEstimate summarize(std::vector<double> zs, int copies, bool exhaustive) {
  CoverEstimate est;
  est.copies = copies;
  est.samples = static_cast<int>(zs.size());
  est.exhaustive = exhaustive;
  CompensatedSum s;
  for (double z : zs) s += z;
  est.mean_partition = zs.empty() ? 0.0 : s.value() / static_cast<double>(zs.size());
  if (zs.size() > 1) {
    CompensatedSum v;
    for (double z : zs) v += (z - est.mean_partition) * (z - est.mean_partition);
    est.variance_partition = v.value() / static_cast<double>(zs.size() - 1);
  }
  est.estimate = std::pow(est.mean_partition, 1.0 / copies);
  est.note = "finite-M heuristic over labeled covers (not quotiented by isomorphism)";
  return est;
}

}  // namespace

CoverEstimate bethe_estimate_via_covers(const FactorGraph& base, int copies, int num_samples,
                                        std::uint64_t seed, std::uint64_t cap) {
  if (num_samples < 1) throw InputError("cover estimate needs at least one sample");
  std::vector<double> zs;
  Rng seeder(seed);
  for (int s = 0; s < num_samples; ++s) {
    const CoverSpec spec = sample_cover(base, copies, seeder());
    zs.push_back(exact_partition(build_cover(spec).cover, cap));
  }
  return summarize(std::move(zs), copies, false);
}

CoverEstimate exhaustive_cover_estimate(const FactorGraph& base, int copies, std::uint64_t cap) {
  std::vector<double> zs;
  for_each_cover(base, copies,
                 [&](const CoverSpec& spec) { zs.push_back(exact_partition(build_cover(spec).cover, cap)); });
  return summarize(std::move(zs), copies, true);
}

}  // namespace bethe
