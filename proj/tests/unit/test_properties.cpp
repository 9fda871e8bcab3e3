#include "doctest.h"
#include "helpers.hpp"
#include "mtype/carleson_toolkit.hpp"
#include "mtype/io.hpp"
#include "mtype/parallel.hpp"
#include "mtype/protohaar.hpp"
#include "mtype/type_analyzer.hpp"

#include <atomic>
#include <cmath>

using namespace mtype;
using namespace testing_helpers;

namespace {
// Trees of depth 1..5 with up to 5 children, one per seed.
FiltrationTree small_tree(std::uint64_t seed) {
  std::mt19937_64 rng(seed * 7919 + 1);
  int depth = std::uniform_int_distribution<int>(1, 5)(rng);
  int kids = std::uniform_int_distribution<int>(2, 5)(rng);
  return build_random(depth, kids, seed);
}
}  // namespace

TEST_CASE("property: trees survive a json round trip") {
  for (std::uint64_t s = 0; s < 40; ++s) {
    FiltrationTree t = small_tree(s);
    CHECK(t.same_structure(tree_from_json(tree_to_json(t))));
  }
}

TEST_CASE("property: both Carleson routes agree") {
  for (std::uint64_t s = 0; s < 40; ++s) {
    FiltrationTree t = small_tree(s);
    DerivedCollections dc = derive_collections(t);
    for (const AtomCollection* r : {&dc.E, &dc.B, &dc.C}) {
      if (r->empty()) continue;
      CHECK(carleson_constant(*r) == carleson_constant_naive(*r));
    }
    if (!dc.B.empty()) {
      Q b = carleson_constant(dc.B), e = carleson_constant(dc.E);
      CHECK(b <= e);
      CHECK(e <= 1 + b);
    }
  }
}

TEST_CASE("property: generations decay geometrically and collections link up") {
  for (std::uint64_t s = 0; s < 40; ++s) {
    FiltrationTree t = small_tree(s);
    CHECK(check_generation_decay(t, error_collection(t)).empty());
    CHECK(check_collection_links(t).empty());
  }
}

TEST_CASE("property: conditional expectation is a tower and preserves integrals") {
  std::mt19937_64 rng(99);
  for (std::uint64_t s = 0; s < 25; ++s) {
    FiltrationTree t = small_tree(s);
    SimpleFunction f = random_function(t, 2, rng);
    for (int m = 0; m <= t.depth(); ++m)
      for (int n = m; n <= t.depth(); ++n) CHECK(cond_expectation(cond_expectation(f, n), m) == cond_expectation(f, m));
    CHECK(cond_expectation(f, 0).integral() == f.integral());
  }
}

TEST_CASE("property: coefficients round trip and the y identity is exact") {
  std::mt19937_64 rng(4);
  for (std::uint64_t s = 0; s < 25; ++s) {
    FiltrationTree t = small_tree(s);
    int dim = 1 + static_cast<int>(s % 3);
    SimpleFunction f = random_function(t, dim, rng);
    Coefficients c = coeffs_from_function(f);
    CHECK(expand_coeffs(t, c.mean, c.x) == f);
    GBDecomposition gb = gb_decompose(f);
    CHECK(gb.exact);
    CHECK(gb.diffs_match);
    CHECK(gb_holder_check(gb, 1.5, NormedSpace::lq(2, dim)).empty());
  }
}

TEST_CASE("property: proto-Haar certificates on admissible atoms") {
  int checked = 0;
  for (std::uint64_t s = 0; s < 60 && checked < 25; ++s) {
    FiltrationTree t = build_random(8, 4, 500 + s);
    AtomCollection e = error_collection(t);
    ProtoHaarParams prm{Q(2, 5), 2};
    for (int a = 0; a < t.size() && t.atom(a).level <= 2 && checked < 25; ++a) {
      if (!check_larcon(t, e, a, prm).holds) continue;
      ProtoHaarCertificate c = construct_protohaar(t, e, a, prm);
      CHECK(c.all_ok());
      CHECK(c.variation <= 6 * c.pa);
      CHECK(verify_monotone_projections(c, e).ok);
      ++checked;
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("property: disjointification is valid on random trees") {
  for (std::uint64_t s = 0; s < 30; ++s) {
    FiltrationTree t = small_tree(s);
    AtomCollection e = error_collection(t);
    if (e.empty()) continue;
    Disjointification d = disjointify(e);
    CHECK(d.ok());
  }
}

TEST_CASE("property: probe ratios are at most one for scalar p = 2") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (std::uint64_t s = 0; s < 20; ++s) {
    FiltrationTree t = small_tree(s);
    std::vector<double> mean{g(rng)}, x(t.size());
    for (double& v : x) v = g(rng);
    CHECK(probe_ratio(t, NormedSpace::real(), 2.0, mean, x) <= 1 + 1e-12);
  }
}

TEST_CASE("property: parallel loops match sequential ones") {
  set_jobs(4);
  std::vector<int> out(1000, 0);
  parallel_for(1000, [&](int i) { out[i] = i * i; });
  for (int i = 0; i < 1000; ++i) CHECK(out[i] == i * i);
  std::atomic<int> hits{0};
  CHECK_THROWS(parallel_for(10, [&](int i) {
    ++hits;
    if (i == 3) throw std::runtime_error("boom");
  }));
  set_jobs(1);
}
