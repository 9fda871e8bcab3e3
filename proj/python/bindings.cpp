#include "mtype/carleson_toolkit.hpp"
#include "mtype/gamlen_gaudet.hpp"
#include "mtype/io.hpp"
#include "mtype/protohaar.hpp"
#include "mtype/type_analyzer.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

namespace py = pybind11;
using namespace mtype;
using nlohmann::json;

namespace {

// Trees are shared so that results holding pointers into them stay valid.
using TreePtr = std::shared_ptr<FiltrationTree>;

AtomCollection pick(const FiltrationTree& t, const std::string& name, bool omega) {
  DerivedCollections dc = derive_collections(t, omega);
  if (name == "E") return dc.E;
  if (name == "B") return dc.B;
  if (name == "C") return dc.C;
  throw std::invalid_argument("unknown collection '" + name + "' (E, B, C)");
}

json paths(const AtomCollection& r, const std::vector<int>& idx) {
  json a = json::array();
  for (int i : idx) a.push_back(r.tree().path(r[i].atom));
  return a;
}

std::string protohaar(const TreePtr& t, const std::string& atom, const std::string& eps, int k) {
  AtomCollection e = error_collection(*t);
  int id = t->find_path(atom);
  ProtoHaarParams prm{parse_rational(eps), k};
  validate_protohaar_params(prm);
  LarconResult lc = check_larcon(*t, e, id, prm);
  if (!lc.holds) return json{{"admissible", false}, {"witness", to_string(lc.witness)}}.dump();
  ProtoHaarCertificate c = construct_protohaar(*t, e, id, prm);
  MonotoneReport mr = verify_monotone_projections(c, e);
  json j = certificate_to_json(c, e);
  j["admissible"] = true;
  j["all_ok"] = c.all_ok();
  j["monotone_projections"] = {{"ok", mr.ok}, {"strata", mr.strata_checked}, {"violation", mr.violation}};
  return j.dump();
}

std::string condense_json(const TreePtr& t, const std::string& eps, int n, int k, const std::string& coll) {
  AtomCollection r = pick(*t, coll, false);
  CondensationResult c = condense(r, parse_rational(eps), n, k);
  json j = {{"found", c.found}, {"reason", c.reason}};
  if (c.found) {
    json fams = json::array();
    for (const auto& f : c.families) fams.push_back(paths(r, f));
    j["seed"] = t->path(r[c.seed].atom);
    j["families"] = fams;
    j["verified"] = c.verified();
  }
  return j.dump();
}

std::string disjointify_json(const TreePtr& t, const std::string& coll) {
  AtomCollection r = pick(*t, coll, false);
  Disjointification d = disjointify(r);
  json fams = json::array();
  for (const auto& f : d.families()) fams.push_back(paths(r, f));
  return json{{"families", fams},      {"m", d.m},           {"bound", d.bound},
              {"carleson", to_string(d.carleson)},   {"cover", d.cover_ok},
              {"halving", d.halving_ok}, {"geometric", d.geomet_ok}, {"ok", d.ok()}}
      .dump();
}

std::string gg_build(const TreePtr& t, int n, const std::string& delta, const std::string& params) {
  Q dl = parse_rational(delta);
  GGParams prm;
  if (params == "desk")
    prm = desk_gg_params(n, dl);
  else if (params == "conservative")
    prm = conservative_gg_params(n, dl);
  else
    throw std::invalid_argument("params must be desk or conservative");
  GGBuild b = build_gg_system(*t, n, dl, prm);
  if (!b.feasible) return json{{"feasible", false}, {"reason", b.reason}}.dump();
  GGVerification v = verify_gg_system(b.system);
  json conds = json::object();
  for (int i = 1; i <= 10; ++i) conds["A" + std::to_string(i)] = v.cond[i];
  std::vector<Vec> x;
  for (size_t i = 0; i < dyadics_up_to(n - 1).size(); ++i) x.push_back(Vec{Q(static_cast<long>(i % 3) - 1)});
  TransferReport tr = transfer_check(b.system, x, 2.0, NormedSpace::real());
  json j = gg_system_to_json(b.system);
  j.erase("tree");
  j["feasible"] = true;
  j["conditions"] = conds;
  j["all"] = v.all();
  j["K"] = b.system.big_k;
  j["distribution_match"] = tr.distribution_match;
  return j.dump();
}

std::string mdiff(const TreePtr& t, const std::string& fn_json, double p, const std::string& space) {
  SimpleFunction f = function_from_json(*t, json::parse(fn_json));
  NormedSpace x = NormedSpace::parse(space);
  if (x.dim != f.dim()) throw std::invalid_argument("space dimension does not match the function");
  MartingaleDecomposition md = martingale_diffs(f);
  Coefficients co = coeffs_from_function(f);
  json mean = json::array(), norms = json::array(), y = json::object();
  for (const Q& v : md.mean) mean.push_back(to_string(v));
  for (const auto& d : md.diffs) norms.push_back(lp_norm(d, p, x));
  for (int id = 1; id < t->size(); ++id) {
    json v = json::array();
    for (const Q& q : co.y[id]) v.push_back(to_string(q));
    y[t->path(id)] = v;
  }
  SimpleFunction back = expand_y(*t, co.mean, co.y);
  bool same = true;
  for (int l = 0; l < t->leaf_count() && same; ++l)
    for (int c = 0; c < f.dim(); ++c) same = same && back.at(l, c) == f.at(l, c);
  return json{{"mean", mean}, {"diff_norms", norms}, {"variation", variation_norm(f, x)}, {"y", y}, {"round_trip", same}}
      .dump();
}

std::string type_est(const TreePtr& t, double p, const std::string& space, int budget, std::uint64_t seed) {
  TypeEstimate e = empirical_type_constant(*t, NormedSpace::parse(space), p, budget, seed);
  AtomCollection ec = error_collection(*t);
  double carl = ec.empty() ? 0.0 : to_double(carleson_constant(ec));
  return json{{"empirical_constant", e.constant}, {"max_probe_kind", e.max_kind}, {"probes", e.probes},
              {"carleson", carl}, {"tp_bound", tp_bound(p, carl)}}
      .dump();
}

std::string rzeszut(int n, int random, std::uint64_t seed) {
  RzeszutResult r = rzeszut_example(n, random, seed);
  return json{{"variation", to_string(r.variation)}, {"lower", r.lower},         {"lower_ok", r.lower_ok},
              {"worst_random", r.worst_random},      {"upper", r.upper},         {"upper_ok", r.upper_ok},
              {"random_checks", r.random_checks}}
      .dump();
}

std::string dichotomy(const std::string& family, const std::vector<int>& depths, double p, const std::string& space,
                      int budget, std::uint64_t seed, const std::string& delta, int max_children) {
  std::function<FiltrationTree(int)> gen;
  Q dl = parse_rational(delta);
  if (family == "dyadic")
    gen = [](int d) { return build_dyadic(d); };
  else if (family == "chain")
    gen = [dl](int d) { return build_chain(d, dl); };
  else if (family == "random")
    gen = [max_children, seed](int d) { return build_random(d, max_children, seed); };
  else
    throw std::invalid_argument("unknown family '" + family + "' (dyadic, chain, random)");
  return dichotomy_csv(dichotomy_report(gen, depths, NormedSpace::parse(space), p, budget, seed));
}

}  // namespace

PYBIND11_MODULE(_mtype, m) {
  py::register_exception<TreeError>(m, "TreeError", PyExc_ValueError);

  py::class_<FiltrationTree, TreePtr>(m, "Tree")
      .def_static("dyadic", [](int d) { return std::make_shared<FiltrationTree>(build_dyadic(d)); })
      .def_static("chain",
                  [](int d, const std::string& delta) {
                    return std::make_shared<FiltrationTree>(build_chain(d, parse_rational(delta)));
                  })
      .def_static("random",
                  [](int d, int max_children, std::uint64_t seed) {
                    return std::make_shared<FiltrationTree>(build_random(d, max_children, seed));
                  })
      .def_static("from_json",
                  [](const std::string& s) { return std::make_shared<FiltrationTree>(tree_from_json(json::parse(s))); })
      .def("to_json", [](const FiltrationTree& t) { return tree_to_json(t).dump(); })
      .def_property_readonly("depth", &FiltrationTree::depth)
      .def_property_readonly("size", &FiltrationTree::size)
      .def_property_readonly("leaf_count", &FiltrationTree::leaf_count)
      .def("path", &FiltrationTree::path)
      .def("find_path", &FiltrationTree::find_path)
      .def("level", [](const FiltrationTree& t, int id) { return t.atom(id).level; })
      .def("prob", [](const FiltrationTree& t, int id) { return to_string(t.atom(id).prob); });

  m.def("carleson",
        [](const TreePtr& t, const std::string& coll, bool naive, bool omega) {
          AtomCollection r = pick(*t, coll, omega);
          if (r.empty()) throw std::invalid_argument("collection is empty");
          return to_string(naive ? carleson_constant_naive(r) : carleson_constant(r));
        },
        py::arg("tree"), py::arg("collection") = "E", py::arg("naive") = false, py::arg("with_omega") = false);
  m.def("collection_sizes", [](const TreePtr& t) {
    DerivedCollections dc = derive_collections(*t);
    return std::map<std::string, int>{{"E", dc.E.size()}, {"B", dc.B.size()}, {"C", dc.C.size()}};
  });
  m.def("generation_decay_violations", [](const TreePtr& t) { return check_generation_decay(*t, error_collection(*t)); });
  m.def("protohaar", &protohaar, py::arg("tree"), py::arg("atom"), py::arg("eps"), py::arg("k"));
  m.def("condense", &condense_json, py::arg("tree"), py::arg("eps_tilde"), py::arg("n"), py::arg("k"),
        py::arg("collection") = "E");
  m.def("disjointify", &disjointify_json, py::arg("tree"), py::arg("collection") = "E");
  m.def("gg_build", &gg_build, py::arg("tree"), py::arg("n") = 2, py::arg("delta") = "1/2", py::arg("params") = "desk");
  m.def("mdiff", &mdiff, py::arg("tree"), py::arg("function"), py::arg("p") = 2.0, py::arg("space") = "real");
  m.def("type_estimate", &type_est, py::arg("tree"), py::arg("p") = 2.0, py::arg("space") = "real",
        py::arg("budget") = 500, py::arg("seed") = 1);
  m.def("tp_bound", &tp_bound, py::arg("p"), py::arg("carleson"));
  m.def("rzeszut", &rzeszut, py::arg("n"), py::arg("random") = 0, py::arg("seed") = 1);
  m.def("dichotomy", &dichotomy, py::arg("family"), py::arg("depths"), py::arg("p") = 1.5, py::arg("space") = "real",
        py::arg("budget") = 200, py::arg("seed") = 1, py::arg("delta") = "1/2", py::arg("max_children") = 3);
}
