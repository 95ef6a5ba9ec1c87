// bethe: exact, Bethe and mean-field partition functions plus the property suites.

#include <chrono>
#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "bethe/errors.hpp"
#include "bethe/homs.hpp"
#include "bethe/io.hpp"
#include "bethe/lattice.hpp"
#include "bethe/matroid.hpp"
#include "bethe/potts.hpp"
#include "bethe/variational.hpp"
#include "bethe/verify.hpp"

using namespace bethe;

namespace {

struct Common {
  std::string format = "json";
  std::uint64_t cap = kDefaultEnumerationCap;
  std::uint64_t seed = 0;
  int restarts = 64;
  int mf_restarts = 16;
  int jobs = 1;
};

struct Inputs {
  std::string digest_source;
  void add_file(const std::string& path) { digest_source += read_text_file(path); }
  void add_text(const std::string& s) { digest_source += s; }
};

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void emit(ResultRecord& r, const Inputs& in, const Timer& timer, const Common& c) {
  r.digest = sha256_hex(in.digest_source);
  r.runtime_seconds = timer.seconds();
  if (c.format == "json" || c.format == "both") std::cout << to_json(r).dump(2) << "\n";
  if (c.format == "csv" || c.format == "both") std::cout << kCsvHeader << "\n" << to_csv(r);
}

MaximizeOptions maximize_options(const Common& c) {
  MaximizeOptions o;
  o.restarts = c.restarts;
  o.seed = c.seed;
  return o;
}

MeanFieldOptions mean_field_options(const Common& c) {
  MeanFieldOptions o;
  o.restarts = c.mf_restarts;
  o.seed = c.seed;
  return o;
}

Json optimizer_settings(const Common& c, const BPOptions& bp = {}) {
  return {{"restarts", c.restarts},
          {"mean_field_restarts", c.mf_restarts},
          {"bp_damping", bp.damping},
          {"bp_tolerance", bp.tolerance},
          {"bp_max_iterations", bp.max_iterations},
          {"polytope_tolerance", kPolytopeTolerance},
          {"enumeration_cap", c.cap}};
}

void add_bounds(ResultRecord& r, const FactorGraph& fg, const Common& c, double log_scale = 0.0) {
  const BetheOptimum b = maximize_bethe(fg, maximize_options(c));
  const MeanFieldResult mf = mean_field(fg, mean_field_options(c));
  r.add("Z_B", std::exp(log_scale + b.log_value));
  r.add("log_Z_B", log_scale + b.log_value);
  r.add("Z_MF", std::exp(log_scale + mf.log_value));
  r.add("log_Z_MF", log_scale + mf.log_value);
  r.extra["converged_restarts"] = b.converged_restarts;
  r.extra["refined"] = b.refined;
}

int run(int argc, char** argv) {
  CLI::App app{"Exact, Bethe and mean-field partition functions of graphical models"};
  app.require_subcommand(1);
  app.fallthrough();
  Common c;
  app.add_option("--format", c.format, "Output format")->check(CLI::IsMember({"json", "csv", "both"}));
  app.add_option("--cap", c.cap, "Enumeration cap on joint states or subsets");

  auto seeded = [&](CLI::App* sub) { sub->add_option("--seed", c.seed, "Random seed"); };
  auto optimizer = [&](CLI::App* sub) {
    seeded(sub);
    sub->add_option("--restarts", c.restarts, "Belief propagation restarts");
    sub->add_option("--mf-restarts", c.mf_restarts, "Mean-field restarts");
  };

  Inputs in;
  Timer timer;
  ResultRecord rec;
  std::function<int()> action;

  // z
  std::string model_path;
  auto* z = app.add_subcommand("z", "Exact partition function by enumeration");
  z->add_option("--model", model_path, "Model JSON")->required();
  z->callback([&] {
    action = [&] {
      in.add_file(model_path);
      const FactorGraph fg = model_from_json(read_json_file(model_path));
      rec.command = "z";
      rec.add("Z", exact_partition(fg, c.cap));
      rec.settings = {{"enumeration_cap", c.cap}};
      return 0;
    };
  });

  // bp
  BPOptions bp;
  bool uniform_start = false;
  auto* bpc = app.add_subcommand("bp", "Damped sum-product belief propagation");
  bpc->add_option("--model", model_path, "Model JSON")->required();
  seeded(bpc);
  bpc->add_flag("--uniform", uniform_start, "Start from uniform messages instead of seeded ones");
  bpc->add_option("--damping", bp.damping, "Damping in [0, 1)");
  bpc->add_option("--max-iterations", bp.max_iterations, "Iteration cap");
  bpc->add_option("--tolerance", bp.tolerance, "Message residual tolerance");
  bpc->callback([&] {
    action = [&] {
      in.add_file(model_path);
      const FactorGraph fg = model_from_json(read_json_file(model_path));
      const BPResult r = uniform_start ? run_bp(fg, initial_bp_state(fg), bp) : run_bp(fg, c.seed, bp);
      rec.command = "bp";
      rec.seed = c.seed;
      rec.add("log_bethe", r.log_bethe, bp.tolerance);
      rec.add("bethe", std::exp(r.log_bethe), bp.tolerance);
      rec.add("iterations", r.state.iterations);
      rec.add("residual", r.state.residual);
      rec.add("polytope_violation", r.polytope_violation, kPolytopeTolerance);
      rec.settings = optimizer_settings(c, bp);
      rec.extra["converged"] = r.converged;
      rec.extra["node_beliefs"] = r.beliefs.node;
      return r.converged ? 0 : 1;
    };
  });

  // z-bethe
  auto* zb = app.add_subcommand("z-bethe", "Bethe partition function by restarted BP and refinement");
  zb->add_option("--model", model_path, "Model JSON")->required();
  optimizer(zb);
  zb->callback([&] {
    action = [&] {
      in.add_file(model_path);
      const FactorGraph fg = model_from_json(read_json_file(model_path));
      const BetheOptimum b = maximize_bethe(fg, maximize_options(c));
      rec.command = "z-bethe";
      rec.seed = c.seed;
      rec.add("Z_B", b.value);
      rec.add("log_Z_B", b.log_value);
      rec.add("best_bp_log_value", b.best_bp_log_value);
      rec.add("mean_field_log_value", b.mean_field_log_value);
      rec.settings = optimizer_settings(c);
      rec.extra["converged_restarts"] = b.converged_restarts;
      rec.extra["refined"] = b.refined;
      return 0;
    };
  });

  // z-meanfield
  auto* zm = app.add_subcommand("z-meanfield", "Naive mean-field lower bound");
  zm->add_option("--model", model_path, "Model JSON")->required();
  optimizer(zm);
  zm->callback([&] {
    action = [&] {
      in.add_file(model_path);
      const FactorGraph fg = model_from_json(read_json_file(model_path));
      const MeanFieldResult r = mean_field(fg, mean_field_options(c));
      rec.command = "z-meanfield";
      rec.seed = c.seed;
      rec.add("Z_MF", r.value);
      rec.add("log_Z_MF", r.log_value);
      rec.settings = optimizer_settings(c);
      rec.extra["marginals"] = r.marginals;
      return 0;
    };
  });

  // cover
  auto* cover = app.add_subcommand("cover", "Build, sample and validate M-covers");
  cover->require_subcommand(1);
  cover->fallthrough();
  int copies = 2;
  int samples = 100;
  std::string cover_path, candidate_path, map_path;

  auto* cs = cover->add_subcommand("sample", "Sample a cover specification");
  cs->add_option("--model", model_path, "Base model JSON")->required();
  cs->add_option("--M,--copies", copies, "Number of copies")->required();
  seeded(cs);
  cs->callback([&] {
    action = [&] {
      const FactorGraph fg = model_from_json(read_json_file(model_path));
      std::cout << cover_to_json(sample_cover(fg, copies, c.seed)).dump(2) << "\n";
      return 0;
    };
  });

  auto* cb = cover->add_subcommand("build", "Emit the lifted model of a cover specification");
  cb->add_option("--model", model_path, "Base model JSON")->required();
  cb->add_option("--cover", cover_path, "Cover specification JSON")->required();
  cb->callback([&] {
    action = [&] {
      const FactorGraph fg = model_from_json(read_json_file(model_path));
      const LiftedModel lm = build_cover(cover_from_json(read_json_file(cover_path), fg));
      Json out = model_to_json(lm.cover);
      out["copy_map"] = {{"variable", lm.copy_map.variable}, {"factor", lm.copy_map.factor}};
      std::cout << out.dump(2) << "\n";
      return 0;
    };
  });

  auto* cv = cover->add_subcommand("validate", "Check that a candidate model covers the base");
  cv->add_option("--model", model_path, "Base model JSON")->required();
  cv->add_option("--candidate", candidate_path, "Candidate model JSON")->required();
  cv->add_option("--map", map_path, "Copy map JSON {variable: [...], factor: [...]}; defaults to the candidate's copy_map");
  cv->callback([&] {
    action = [&] {
      in.add_file(model_path);
      in.add_file(candidate_path);
      const FactorGraph base = model_from_json(read_json_file(model_path));
      const Json cand = read_json_file(candidate_path);
      const Json map_doc = map_path.empty() ? cand.value("copy_map", Json()) : read_json_file(map_path);
      if (map_doc.is_null()) throw InputError("cover validate: no copy map given");
      CopyMap map;
      try {
        map.variable = map_doc.at("variable").get<std::vector<int>>();
        map.factor = map_doc.at("factor").get<std::vector<int>>();
      } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("copy map: ") + e.what());
      }
      const CoverDiagnosis d = validate_cover(model_from_json(cand), base, map);
      rec.command = "cover-validate";
      rec.add("valid", d.valid ? 1.0 : 0.0);
      rec.add("copies", d.copies);
      rec.extra["message"] = d.message;
      return d.valid ? 0 : 1;
    };
  });

  auto* ce = cover->add_subcommand("estimate", "M-th root of the average cover partition function");
  ce->add_option("--model", model_path, "Base model JSON")->required();
  ce->add_option("--M,--copies", copies, "Number of copies")->required();
  ce->add_option("--samples", samples, "Sampled covers (0 enumerates every canonical cover)");
  seeded(ce);
  ce->callback([&] {
    action = [&] {
      in.add_file(model_path);
      const FactorGraph fg = model_from_json(read_json_file(model_path));
      const CoverEstimate e = samples > 0 ? bethe_estimate_via_covers(fg, copies, samples, c.seed, c.cap)
                                          : exhaustive_cover_estimate(fg, copies, c.cap);
      rec.command = "cover-estimate";
      rec.seed = c.seed;
      rec.add("estimate", e.estimate);
      rec.add("mean_partition", e.mean_partition);
      rec.add("variance_partition", e.variance_partition);
      rec.add("Z", exact_partition(fg, c.cap));
      rec.settings = {{"copies", copies}, {"samples", e.samples}, {"exhaustive", e.exhaustive}};
      rec.extra["note"] = e.note;
      return 0;
    };
  });

  // check-lsm
  auto* lsm = app.add_subcommand("check-lsm", "Log-supermodularity of a binary model");
  lsm->add_option("--model", model_path, "Model JSON")->required();
  lsm->callback([&] {
    action = [&] {
      in.add_file(model_path);
      const FactorGraph fg = model_from_json(read_json_file(model_path));
      if (!fg.is_binary()) throw InputError("check-lsm: every variable must be binary");
      rec.command = "check-lsm";
      Json per_factor = Json::array();
      bool all = true;
      for (const Factor& f : fg.factors()) {
        const LsmReport r = is_log_supermodular(boolean_function(f.table));
        all = all && r.holds;
        Json entry = {{"scope", f.scope}, {"holds", r.holds}, {"worst_slack", r.worst_slack}};
        if (r.witness) entry["witness"] = {r.witness->first, r.witness->second};
        per_factor.push_back(entry);
      }
      rec.add("factors_log_supermodular", all ? 1.0 : 0.0);
      if (fg.num_variables() <= 16) {
        const LsmReport r = is_log_supermodular(boolean_function(fg));
        rec.add("model_log_supermodular", r.holds ? 1.0 : 0.0);
        rec.add("worst_slack", r.worst_slack, kLsmRelativeTolerance);
        if (r.witness) rec.extra["witness"] = {r.witness->first, r.witness->second};
      }
      rec.extra["factors"] = per_factor;
      rec.settings = {{"relative_tolerance", kLsmRelativeTolerance}};
      return 0;
    };
  });

  // potts
  std::string graph_path;
  bool with_bounds = true;
  auto* potts = app.add_subcommand("potts", "Potts partition function, its random-cluster form and bounds");
  potts->add_option("--graph", graph_path, "Potts JSON {n_vertices, edges, q, J, h?}")->required();
  potts->add_flag("!--no-bounds", with_bounds, "Skip the Bethe and mean-field values");
  optimizer(potts);
  potts->callback([&] {
    action = [&] {
      in.add_file(graph_path);
      const PottsModel m = potts_from_json(read_json_file(graph_path));
      rec.command = "potts";
      rec.seed = c.seed;
      rec.add("Z_Potts", potts_partition(m, c.cap));
      if (std::all_of(m.coupling.begin(), m.coupling.end(), [](double j) { return j >= 0; }))
        rec.add("Z_rc", rc_partition(m, c.cap), 1e-9);
      if (with_bounds) add_bounds(rec, to_factor_graph(m), c);
      rec.settings = optimizer_settings(c);
      rec.extra["ferromagnetic"] = is_ferromagnetic(m);
      return 0;
    };
  });

  // rc
  std::optional<double> real_q;
  auto* rc = app.add_subcommand("rc", "Random-cluster partition function");
  rc->add_option("--graph", graph_path, "Potts JSON; p = e^J - 1")->required();
  rc->add_option("--q", real_q, "Real q >= 1 overriding the file's q (no field)");
  rc->callback([&] {
    action = [&] {
      in.add_file(graph_path);
      const PottsModel m = potts_from_json(read_json_file(graph_path));
      rec.command = "rc";
      if (real_q) {
        in.add_text("q=" + format_double(*real_q));
        rec.add("Z_rc", rc_partition(m.graph, *real_q, edge_probabilities(m), c.cap));
      } else {
        rec.add("Z_rc", rc_partition(m, c.cap));
      }
      rec.settings = {{"enumeration_cap", c.cap}};
      return 0;
    };
  });

  // counterexample
  std::string pairs_flag = "select", field_flag = "select";
  auto* cx = app.add_subcommand("counterexample", "Three-state ferromagnetic triangle with an external field");
  cx->add_option("--pairs", pairs_flag, "Pair convention")->check(CLI::IsMember({"select", "unordered", "ordered"}));
  cx->add_option("--field", field_flag, "Field convention")->check(CLI::IsMember({"select", "exponentiated", "direct"}));
  optimizer(cx);
  cx->callback([&] {
    action = [&] {
      in.add_text("counterexample " + pairs_flag + " " + field_flag);
      rec.command = "counterexample";
      rec.seed = c.seed;
      const MaximizeOptions mo = maximize_options(c);
      CounterexampleResult r;
      if (pairs_flag == "select" || field_flag == "select") {
        const CounterexampleSelection sel = select_counterexample_convention(mo);
        r = sel.candidates[sel.selected];
        Json cands = Json::array();
        for (const auto& k : sel.candidates)
          cands.push_back({{"convention", describe(k.convention)}, {"Z", k.partition}, {"Z_B", k.bethe}, {"Z_B_minus_Z", k.gap}});
        rec.extra["candidates"] = cands;
        rec.extra["matches_target"] = sel.matches;
      } else {
        CounterexampleConvention conv;
        conv.pairs = pairs_flag == "ordered" ? PairConvention::OrderedPairs : PairConvention::UnorderedEdges;
        conv.field = field_flag == "exponentiated" ? FieldConvention::Exponentiated : FieldConvention::Direct;
        r = evaluate_counterexample(conv, mo);
      }
      rec.add("Z", r.partition);
      rec.add("Z_B", r.bethe);
      rec.add("Z_B_minus_Z", r.gap);
      rec.add("target", kPublishedBetheGap, 0.01 * kPublishedBetheGap);
      rec.settings = optimizer_settings(c);
      rec.settings["convention"] = describe(r.convention);
      return 0;
    };
  });

  // wef
  std::string code_path;
  double lambda = 0.5;
  auto* wef = app.add_subcommand("wef", "Weight enumerator of a linear code with Bethe and mean-field bounds");
  wef->add_option("--code", code_path, "Generator matrix text file")->required();
  wef->add_option("--lambda", lambda, "Weight parameter in (0, 1] for the bounds")->required();
  optimizer(wef);
  wef->callback([&] {
    action = [&] {
      in.add_file(code_path);
      in.add_text("lambda=" + format_double(lambda));
      const GFMatrix s = read_generator_matrix_file(code_path);
      WeightEnumeratorOptions wo;
      wo.bethe = maximize_options(c);
      wo.mean_field = mean_field_options(c);
      wo.cap = c.cap;
      const WeightEnumerator w = weight_enumerator(s, lambda, wo);
      rec.command = "wef";
      rec.seed = c.seed;
      rec.add("exact", w.exact);
      rec.add("identity", w.identity, 1e-9);
      if (w.bounds_valid) {
        rec.add("bethe_bound", w.bethe_bound);
        rec.add("mean_field_bound", w.mean_field_bound);
      }
      rec.settings = optimizer_settings(c);
      rec.settings["lambda"] = lambda;
      if (!w.note.empty()) rec.extra["note"] = w.note;
      return 0;
    };
  });

  // matroid
  std::string matrix_path;
  std::vector<double> couplings;
  auto* mat = app.add_subcommand("matroid", "Matroid Potts and random-cluster partition functions");
  mat->add_option("--matrix", matrix_path, "Matrix text file (q k n header)")->required();
  mat->add_option("--J", couplings, "One coupling for every column, or one per column")->required();
  mat->add_flag("!--no-bounds", with_bounds, "Skip the Bethe and mean-field values");
  optimizer(mat);
  mat->callback([&] {
    action = [&] {
      in.add_file(matrix_path);
      for (double j : couplings) in.add_text(format_double(j) + ";");
      const GFMatrix s = read_generator_matrix_file(matrix_path);
      if (couplings.size() == 1) couplings.assign(static_cast<std::size_t>(s.cols()), couplings[0]);
      if (couplings.size() != static_cast<std::size_t>(s.cols()))
        throw InputError("matroid: --J needs one value or one per column");
      rec.command = "matroid";
      rec.seed = c.seed;
      rec.add("Z_Potts", matroid_potts_partition(s, couplings, c.cap));
      rec.add("rank", rank(s, s.cols() >= 64 ? ~ColumnMask{0} : (ColumnMask{1} << s.cols()) - 1));
      if (std::all_of(couplings.begin(), couplings.end(), [](double j) { return j >= 0; })) {
        std::vector<double> p;
        for (double j : couplings) p.push_back(std::expm1(j));
        rec.add("Z_rc", matroid_rc_partition(s, p, c.cap), 1e-9);
      }
      if (with_bounds) {
        const MatroidFactorForm form = matroid_factor_graph(s, couplings);
        add_bounds(rec, form.graph, c, form.log_scale);
      }
      rec.settings = optimizer_settings(c);
      return 0;
    };
  });

  // hom
  auto* hom = app.add_subcommand("hom", "Rank-two homomorphism partition function and its edge form");
  hom->add_option("--model", model_path, "Hom JSON {n_vertices, edges, w, a, b}")->required();
  hom->add_flag("!--no-bounds", with_bounds, "Skip the Bethe and mean-field values");
  optimizer(hom);
  hom->callback([&] {
    action = [&] {
      in.add_file(model_path);
      const HomModel m = hom_from_json(read_json_file(model_path));
      rec.command = "hom";
      rec.seed = c.seed;
      rec.add("Z_hom", hom_partition(m, c.cap));
      rec.add("Z_edge", edge_partition(m, c.cap), 1e-9);
      if (m.graph.edges.size() <= 16) {
        const Rank2Report r = check_rank2_lsm(m, 1000, c.seed);
        rec.add("edge_weight_log_supermodular", r.holds() ? 1.0 : 0.0);
      }
      if (with_bounds) add_bounds(rec, to_factor_graph(m), c);
      rec.settings = optimizer_settings(c);
      return 0;
    };
  });

  // verify
  std::string tag;
  int trials = 0;
  auto* ver = app.add_subcommand("verify", "Run a seeded property suite");
  ver->add_option("tag", tag, "Suite name")->required()->check(CLI::IsMember(verify_tags()));
  ver->add_option("--trials", trials, "Number of randomized trials (suite default when omitted)");
  ver->add_option("--jobs", c.jobs, "Worker threads for the trial loop");
  seeded(ver);
  ver->callback([&] {
    action = [&] {
      in.add_text("verify " + tag + " " + std::to_string(trials));
      const SuiteReport r = run_verify(tag, {trials, c.seed, c.jobs});
      rec.command = "verify-" + tag;
      rec.seed = c.seed;
      rec.add("trials", r.trials);
      rec.add("passed", r.passed);
      rec.add("worst_slack", r.worst_slack, r.tolerance);
      rec.settings = {{"tolerance", r.tolerance}, {"jobs", c.jobs}};
      rec.extra = r.details;
      rec.extra["failures"] = r.failures;
      rec.extra["ok"] = r.ok();
      return r.ok() ? 0 : 1;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (!action) return 0;  // subcommands that print their own output
  const int status = action();
  if (!rec.command.empty()) emit(rec, in, timer, c);
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalRefusal& e) {
    std::cerr << "numerical refusal: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
