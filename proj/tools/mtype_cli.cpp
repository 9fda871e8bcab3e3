#include "CLI11.hpp"
#include "mtype/carleson_toolkit.hpp"
#include "mtype/gamlen_gaudet.hpp"
#include "mtype/io.hpp"
#include "mtype/parallel.hpp"
#include "mtype/protohaar.hpp"
#include "mtype/type_analyzer.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

using namespace mtype;
using nlohmann::json;

namespace {

// Exit code for results that are negative answers rather than errors.
constexpr int kInfeasible = 2;

struct Opts {
  std::string family = "dyadic", tree, out, fn, collection = "E", atom, system, report;  // empty: per-command default
  std::string space = "real", q = "1", eps = "1/8", delta = "1/2", p = "2", depths = "2..8", params = "desk";
  std::string eps_h, eps_tilde;
  int depth = 3, max_children = 3, n = 2, k = 4, gg_k = 0, dim = 1, budget = 500, random = 0;
  std::uint64_t seed = 1;
  bool naive = false, omega = false;
  std::vector<std::string> x;
};

void emit(const json& j, const std::string& out) {
  if (out.empty())
    std::cout << j.dump(2) << "\n";
  else
    save_json(j, out);
}

double parse_p(const std::string& s) { return to_double(parse_rational(s)); }

NormedSpace parse_space(const Opts& o) {
  if (o.space == "lq") {
    std::string q = o.q == "inf" ? "inf" : o.q;
    return NormedSpace::parse("lq:" + q + ":" + std::to_string(o.dim));
  }
  return NormedSpace::parse(o.space);
}

std::vector<int> parse_depths(const std::string& s) {
  std::vector<int> out;
  auto dots = s.find("..");
  if (dots != std::string::npos) {
    int a = std::stoi(s.substr(0, dots)), b = std::stoi(s.substr(dots + 2));
    if (a > b) throw std::invalid_argument("empty depth range " + s);
    for (int d = a; d <= b; ++d) out.push_back(d);
  } else {
    std::stringstream ss(s);
    for (std::string tok; std::getline(ss, tok, ',');) out.push_back(std::stoi(tok));
  }
  return out;
}

std::function<FiltrationTree(int)> family_generator(const Opts& o) {
  Q delta = parse_rational(o.delta);
  if (o.family == "dyadic") return [](int d) { return build_dyadic(d); };
  if (o.family == "chain") return [delta](int d) { return build_chain(d, delta); };
  if (o.family == "random") {
    int mc = o.max_children;
    std::uint64_t seed = o.seed;
    return [mc, seed](int d) { return build_random(d, mc, seed); };
  }
  throw std::invalid_argument("unknown family '" + o.family + "' (dyadic, chain, random)");
}

AtomCollection pick_collection(const FiltrationTree& t, const std::string& name, bool omega) {
  DerivedCollections dc = derive_collections(t, omega);
  if (name == "E") return dc.E;
  if (name == "B") return dc.B;
  if (name == "C") return dc.C;
  throw std::invalid_argument("unknown collection '" + name + "' (E, B, C)");
}

json paths_of(const AtomCollection& r, const std::vector<int>& idx) {
  json a = json::array();
  for (int i : idx) {
    const FiltrationTree& t = r.tree();
    std::string p = t.path(r[i].atom);
    a.push_back(r.kind() == Kind::B ? "~" + p : p);
  }
  return a;
}

int cmd_gen(const Opts& o) {
  FiltrationTree t = family_generator(o)(o.depth);
  if (o.out.empty())
    std::cout << tree_to_json(t).dump() << "\n";
  else
    save_tree(t, o.out);
  return 0;
}

int cmd_carleson(const Opts& o) {
  FiltrationTree t = load_tree(o.tree);
  AtomCollection r = pick_collection(t, o.collection, o.omega);
  if (r.empty()) {
    std::cout << "collection is empty\n";
    return kInfeasible;
  }
  std::cout << to_string(o.naive ? carleson_constant_naive(r) : carleson_constant(r)) << "\n";
  return 0;
}

int cmd_mdiff(const Opts& o) {
  FiltrationTree t = load_tree(o.tree);
  SimpleFunction f = load_function(t, o.fn);
  double p = parse_p(o.p);
  NormedSpace x = parse_space(o);
  if (x.dim != f.dim()) throw std::invalid_argument("space dimension does not match the function");
  MartingaleDecomposition md = martingale_diffs(f);
  std::vector<double> norms;
  for (const auto& d : md.diffs) norms.push_back(lp_norm(d, p, x));
  if (o.report == "csv") {
    std::cout << "level,norm\n";
    std::cout.precision(15);
    for (size_t n = 0; n < norms.size(); ++n) std::cout << n + 1 << "," << norms[n] << "\n";
    return 0;
  }
  json mean = json::array();
  for (const Q& v : md.mean) mean.push_back(to_string(v));
  emit({{"config", {{"command", "mdiff"}, {"tree", o.tree}, {"fn", o.fn}, {"p", o.p}, {"space", x.name()}}},
        {"mean", mean},
        {"diff_norms", norms},
        {"variation", variation_norm(f, x)}},
       o.out);
  return 0;
}

int cmd_protohaar(const Opts& o) {
  FiltrationTree t = load_tree(o.tree);
  AtomCollection e = error_collection(t, false);
  int atom = t.find_path(o.atom);
  ProtoHaarParams prm{parse_rational(o.eps), o.k};
  validate_protohaar_params(prm);
  LarconResult lc = check_larcon(t, e, atom, prm);
  if (!lc.holds) {
    std::cout << "covering hypothesis fails at atom '" << o.atom << "': witness " << to_string(lc.witness) << "\n";
    return kInfeasible;
  }
  ProtoHaarCertificate c = construct_protohaar(t, e, atom, prm);
  MonotoneReport mr = verify_monotone_projections(c, e);
  json j = certificate_to_json(c, e);
  j["monotone_projections"] = {{"ok", mr.ok}, {"strata", mr.strata_checked}, {"violation", mr.violation}};
  j["config"] = {{"command", "protohaar"}, {"tree", o.tree}, {"atom", o.atom}, {"eps", o.eps}, {"k", o.k}};
  emit(j, o.out);
  return c.all_ok() && mr.ok ? 0 : kInfeasible;
}

int cmd_condense(const Opts& o) {
  FiltrationTree t = load_tree(o.tree);
  AtomCollection r = pick_collection(t, o.collection, o.omega);
  CondensationResult c = condense(r, parse_rational(o.eps), o.n, o.k);
  if (!c.found) {
    std::cout << "condensation NotFound: " << c.reason << "\n";
    return kInfeasible;
  }
  json fams = json::array();
  for (const auto& f : c.families) fams.push_back(paths_of(r, f));
  json cov = json::array();
  for (const Q& v : c.min_coverage) cov.push_back(to_string(v));
  emit({{"config", {{"command", "condense"}, {"tree", o.tree}, {"eps", o.eps}, {"n", o.n}, {"k", o.k}, {"collection", o.collection}}},
        {"seed", t.path(r[c.seed].atom)},
        {"families", fams},
        {"min_coverage", cov},
        {"carleson", to_string(c.carleson)},
        {"density_target", to_string(c.density_target)},
        {"density_reached", c.density_reached},
        {"verified", c.verified()}},
       o.out);
  return c.verified() ? 0 : kInfeasible;
}

int cmd_disjointify(const Opts& o) {
  FiltrationTree t = load_tree(o.tree);
  AtomCollection r = pick_collection(t, o.collection, o.omega);
  if (r.empty()) {
    std::cout << "collection is empty\n";
    return kInfeasible;
  }
  Disjointification d = disjointify(r);
  json fams = json::array();
  for (const auto& f : d.families()) fams.push_back(paths_of(r, f));
  json j = {{"config", {{"command", "disjointify"}, {"tree", o.tree}, {"collection", o.collection}}},
            {"families", fams},
            {"m", d.m},
            {"carleson", to_string(d.carleson)},
            {"bound", d.bound},
            {"fallback_search", d.fallback},
            {"cover", d.cover_ok},
            {"halving", d.halving_ok},
            {"geometric", d.geomet_ok},
            {"within_bound", d.within_bound},
            {"notes", d.notes}};
  if (o.report == "csv") {
    std::cout << "family,size\n";
    auto f = d.families();
    for (size_t i = 0; i < f.size(); ++i) std::cout << i << "," << f[i].size() << "\n";
  } else {
    emit(j, o.out);
  }
  return d.ok() ? 0 : kInfeasible;
}

GGParams chosen_params(const Opts& o, int n, const Q& delta) {
  GGParams prm = o.params == "conservative" ? conservative_gg_params(n, delta) : desk_gg_params(n, delta);
  if (o.params != "conservative" && o.params != "desk") throw std::invalid_argument("params must be desk or conservative");
  if (!o.eps_h.empty()) prm.eps_h = parse_rational(o.eps_h), prm.rule = "custom";
  if (!o.eps_tilde.empty()) prm.eps_tilde = parse_rational(o.eps_tilde), prm.rule = "custom";
  if (o.gg_k > 0) prm.k = o.gg_k, prm.rule = "custom";
  return prm;
}

json verification_json(const GGSystem& sys, const GGVerification& v) {
  json conds = json::object();
  for (int i = 1; i <= 10; ++i) conds["A" + std::to_string(i)] = v.cond[i];
  json var = json::array();
  for (const Q& q : v.variation) var.push_back(to_string(q));
  return {{"conditions", conds}, {"all", v.all()},        {"A2_strict", v.a2_strict}, {"induction_bound", v.induction_ok},
          {"finest_level_bound", v.tail_ok}, {"variation", var}, {"K", sys.big_k}, {"S", sys.s}, {"notes", v.notes}};
}

int cmd_gg_build(const Opts& o) {
  FiltrationTree t = load_tree(o.tree);
  Q delta = parse_rational(o.delta);
  GGBuild b = build_gg_system(t, o.n, delta, chosen_params(o, o.n, delta));
  if (!b.feasible) {
    std::cout << b.reason << "\n";
    return kInfeasible;
  }
  GGVerification v = verify_gg_system(b.system);
  json j = gg_system_to_json(b.system);
  j["verification"] = verification_json(b.system, v);
  j["config"] = {{"command", "gg-build"}, {"tree", o.tree}, {"n", o.n}, {"delta", o.delta}, {"params", o.params}};
  emit(j, o.out);
  std::cerr << "conditions A1-A10 " << (v.all() ? "verified" : "FAILED") << "\n";
  return v.all() ? 0 : kInfeasible;
}

int cmd_gg_verify(const Opts& o) {
  json j = load_json(o.system);
  FiltrationTree t = tree_from_json(j.at("tree"));
  GGSystem sys = gg_system_from_json(t, j);
  GGVerification v = verify_gg_system(sys);
  double p = parse_p(o.p);
  json holder = json::array();
  bool holder_ok = true;
  for (const auto& row : verify_A9_holder(sys, p)) {
    holder.push_back({{"interval", row.interval.name()}, {"lhs", row.lhs}, {"rhs", row.rhs}});
    holder_ok = holder_ok && row.lhs <= row.rhs + 1e-9;
  }
  NormedSpace x = parse_space(o);
  std::vector<Dyadic> js = dyadics_up_to(sys.n - 1);
  std::vector<Vec> coef;
  for (size_t i = 0; i < js.size(); ++i) {
    Vec c(x.dim);
    for (int d = 0; d < x.dim; ++d) c[d] = i < o.x.size() ? parse_rational(o.x[i]) : Q(static_cast<long>(i % 3) - 1 + (d + 1));
    coef.push_back(c);
  }
  TransferReport tr = transfer_check(sys, coef, p, x);
  json out = {{"config", {{"command", "gg-verify"}, {"system", o.system}, {"p", o.p}, {"space", x.name()}}},
              {"verification", verification_json(sys, v)},
              {"holder", holder},
              {"holder_ok", holder_ok},
              {"transfer",
               {{"pieces_constant", tr.pieces_constant},
                {"distribution_match", tr.distribution_match},
                {"labelled_match", tr.labelled_match},
                {"haar_norm_p", tr.haar_norm_p},
                {"transferred_norm_p", tr.wu_integral},
                {"f_norm_p", tr.f_norm_p},
                {"diff_sum", tr.diff_sum},
                {"bound", tr.bound},
                {"chain_ok", tr.chain_ok}}}};
  emit(out, o.out);
  return v.all() && holder_ok && tr.distribution_match && tr.chain_ok ? 0 : kInfeasible;
}

int cmd_type_est(const Opts& o) {
  FiltrationTree t = load_tree(o.tree);
  NormedSpace x = parse_space(o);
  double p = parse_p(o.p);
  TypeEstimate est = empirical_type_constant(t, x, p, o.budget, o.seed);
  AtomCollection e = error_collection(t, false);
  double carl = e.empty() ? 0.0 : to_double(carleson_constant(e));
  double tp = tp_bound(p, carl);
  if (o.report == "csv") {
    std::cout.precision(15);
    std::cout << "probe_id,kind,ratio,running_max\n";
    for (size_t i = 0; i < est.inventory.size(); ++i)
      std::cout << est.inventory[i].id << "," << est.inventory[i].kind << "," << est.inventory[i].ratio << ","
                << est.running_max[i] << "\n";
    return 0;
  }
  emit({{"config", {{"command", "type-est"}, {"tree", o.tree}, {"space", x.name()}, {"p", o.p}, {"budget", o.budget}, {"seed", o.seed}}},
        {"empirical_constant", est.constant},
        {"max_probe_id", est.max_probe},
        {"max_probe_kind", est.max_kind},
        {"probes", est.probes},
        {"carleson", carl},
        {"mt_surrogate", mt_surrogate(p)},
        {"mt_note", "upper-bound surrogate"},
        {"tp_bound", tp},
        {"slack", tp / est.constant}},
       o.out);
  return 0;
}

int cmd_rzeszut(const Opts& o) {
  RzeszutResult r = rzeszut_example(o.n, o.random, o.seed);
  json lv = json::array();
  for (const Q& q : r.per_level) lv.push_back(to_string(q));
  emit({{"config", {{"command", "rzeszut"}, {"n", o.n}, {"random", o.random}, {"seed", o.seed}}},
        {"variation", to_string(r.variation)},
        {"variation_value", to_double(r.variation)},
        {"per_level", lv},
        {"lower", r.lower},
        {"lower_ok", r.lower_ok},
        {"random_checks", r.random_checks},
        {"worst_random", r.worst_random},
        {"upper", r.upper},
        {"upper_ok", r.upper_ok}},
       o.out);
  return r.lower_ok && r.upper_ok ? 0 : kInfeasible;
}

int cmd_dichotomy(const Opts& o) {
  DichotomyReport r = dichotomy_report(family_generator(o), parse_depths(o.depths), parse_space(o), parse_p(o.p), o.budget, o.seed);
  if (o.report == "json") {
    json rows = json::array();
    for (const auto& row : r.rows)
      rows.push_back({{"depth", row.depth}, {"carleson", to_string(row.carleson)}, {"empirical_constant", row.empirical},
                      {"tp_bound", row.tp}, {"max_probe_id", row.max_probe}});
    emit({{"config", {{"command", "dichotomy"}, {"family", o.family}, {"depths", o.depths}, {"p", o.p}, {"space", o.space}}},
          {"rows", rows},
          {"branch", r.branch}},
         o.out);
  } else {
    std::string csv = dichotomy_csv(r);
    if (o.out.empty()) {
      std::cout << csv;
      std::cerr << r.branch << "\n";
    } else {
      std::ofstream(o.out) << csv;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Martingale type tools on finite atomic filtrations"};
  app.require_subcommand(1);
  Opts o;
  int jobs = 1;
  app.add_option("--jobs", jobs, "worker threads for verification loops (0 = all cores)");

  auto space_opts = [&](CLI::App* c) {
    c->add_option("--space", o.space, "real, lq, or lq:q:d");
    c->add_option("--q", o.q, "q of l_q (number or inf)");
    c->add_option("--dim", o.dim, "dimension of l_q");
  };
  std::map<std::string, std::function<int(const Opts&)>> run;

  auto* gen = app.add_subcommand("gen", "generate a tree");
  gen->add_option("family", o.family, "dyadic, chain or random")->required();
  gen->add_option("--depth", o.depth)->required();
  gen->add_option("--delta", o.delta, "chain split");
  gen->add_option("--max-children", o.max_children);
  gen->add_option("--seed", o.seed);
  gen->add_option("--out", o.out);
  run["gen"] = cmd_gen;

  auto* car = app.add_subcommand("carleson", "Carleson constant of a derived collection");
  car->add_option("--collection", o.collection, "E, B or C");
  car->add_option("--in,--tree", o.tree)->required();
  car->add_flag("--naive", o.naive, "use the double loop");
  car->add_flag("--with-omega", o.omega, "include Omega in E");
  run["carleson"] = cmd_carleson;

  auto* md = app.add_subcommand("mdiff", "martingale differences of a function");
  md->add_option("--fn", o.fn)->required();
  md->add_option("--tree", o.tree)->required();
  md->add_option("--p", o.p);
  md->add_option("--report", o.report)->check(CLI::IsMember({"csv", "json"}));
  md->add_option("--out", o.out);
  space_opts(md);
  run["mdiff"] = cmd_mdiff;

  auto* ph = app.add_subcommand("protohaar", "greedy proto-Haar certificate");
  ph->add_option("--tree", o.tree)->required();
  ph->add_option("--atom", o.atom)->required();
  ph->add_option("--eps", o.eps);
  ph->add_option("--k", o.k);
  ph->add_option("--out", o.out);
  run["protohaar"] = cmd_protohaar;

  auto* cd = app.add_subcommand("condense", "condensation of a collection");
  cd->add_option("--tree", o.tree)->required();
  cd->add_option("--eps", o.eps);
  cd->add_option("--n", o.n);
  cd->add_option("--k", o.k);
  cd->add_option("--collection", o.collection);
  cd->add_option("--out", o.out);
  run["condense"] = cmd_condense;

  auto* dj = app.add_subcommand("disjointify", "split a collection into halving families");
  dj->add_option("--tree", o.tree)->required();
  dj->add_option("--collection", o.collection);
  dj->add_flag("--with-omega", o.omega);
  dj->add_option("--report", o.report)->check(CLI::IsMember({"csv", "json"}));
  dj->add_option("--out", o.out);
  run["disjointify"] = cmd_disjointify;

  auto* gb = app.add_subcommand("gg-build", "build a generalized Haar supporting system");
  gb->add_option("--tree", o.tree)->required();
  gb->add_option("--n", o.n);
  gb->add_option("--delta", o.delta);
  gb->add_option("--params", o.params, "desk or conservative");
  gb->add_option("--eps-h", o.eps_h);
  gb->add_option("--eps-tilde", o.eps_tilde);
  gb->add_option("--k", o.gg_k);
  gb->add_option("--out", o.out);
  run["gg-build"] = cmd_gg_build;

  auto* gv = app.add_subcommand("gg-verify", "re-verify a stored system");
  gv->add_option("--system", o.system)->required();
  gv->add_option("--p", o.p);
  gv->add_option("--x", o.x, "coefficients for the transfer check, one per interval");
  gv->add_option("--out", o.out);
  space_opts(gv);
  run["gg-verify"] = cmd_gg_verify;

  auto* te = app.add_subcommand("type-est", "empirical martingale type constant");
  te->add_option("--tree", o.tree)->required();
  te->add_option("--p", o.p);
  te->add_option("--budget", o.budget);
  te->add_option("--seed", o.seed);
  te->add_option("--report", o.report)->check(CLI::IsMember({"csv", "json"}));
  te->add_option("--out", o.out);
  space_opts(te);
  run["type-est"] = cmd_type_est;

  auto* rz = app.add_subcommand("rzeszut", "variation of the sign of a Haar sum");
  rz->add_option("--n", o.n)->required();
  rz->add_option("--random", o.random, "random L2-normalized functions to test against sqrt(n)");
  rz->add_option("--seed", o.seed);
  rz->add_option("--out", o.out);
  run["rzeszut"] = cmd_rzeszut;

  auto* di = app.add_subcommand("dichotomy", "Carleson constant against empirical type over depths");
  di->add_option("--family", o.family);
  di->add_option("--depths", o.depths, "a..b or a,b,c");
  di->add_option("--p", o.p);
  di->add_option("--budget", o.budget);
  di->add_option("--delta", o.delta);
  di->add_option("--max-children", o.max_children);
  di->add_option("--seed", o.seed);
  di->add_option("--report", o.report)->check(CLI::IsMember({"csv", "json"}));
  di->add_option("--out", o.out);
  space_opts(di);
  run["dichotomy"] = cmd_dichotomy;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  try {
    set_jobs(jobs);
    for (auto* sub : app.get_subcommands()) {
      if (sub->get_name() == "dichotomy" && sub->count("--report") == 0) o.report = "csv";
      return run.at(sub->get_name())(o);
    }
  } catch (const TreeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
