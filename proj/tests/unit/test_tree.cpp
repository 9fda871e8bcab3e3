#include "doctest.h"
#include "helpers.hpp"
#include "mtype/collections.hpp"

using namespace mtype;
using testing_helpers::sample_spec;

TEST_CASE("rational parsing") {
  CHECK(parse_rational("3/6") == Q(1, 2));
  CHECK(parse_rational("-2/4") == Q(-1, 2));
  CHECK(parse_rational("0.25") == Q(1, 4));
  CHECK(parse_rational("7") == Q(7));
  CHECK(to_string(Q(4, 2)) == "2");
  CHECK(to_string(Q(-3, 9)) == "-1/3");
  CHECK(pow2(-3) == Q(1, 8));
  CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("abc"), std::invalid_argument);
}

TEST_CASE("dyadic tree shape") {
  FiltrationTree t = build_dyadic(3);
  CHECK(t.depth() == 3);
  CHECK(t.leaf_count() == 8);
  CHECK(t.size() == 15);
  CHECK(t.leaf_prob(5) == Q(1, 8));
  CHECK(t.path(t.leaf_atom(5)) == "1/0/1");
  CHECK(t.find_path("1/0/1") == t.leaf_atom(5));
  CHECK(t.ancestor_at(5, 1) == t.find_path("1"));
  CHECK(t.tilde(0) == Interval{4, 8});
  CHECK_THROWS_AS(t.find_path("2"), TreeError);
}

TEST_CASE("chain tree of depth 2 with split 1/4") {
  FiltrationTree t = build_chain(2, Q(1, 4));
  REQUIRE(t.leaf_count() == 3);
  CHECK(t.leaf_prob(0) == Q(9, 16));
  CHECK(t.leaf_prob(1) == Q(3, 16));
  CHECK(t.leaf_prob(2) == Q(1, 4));
  CHECK(carleson_constant(error_collection(t)) == 1);
}

TEST_CASE("sample tree collections against the brute-force oracle") {
  FiltrationTree t(sample_spec());
  DerivedCollections dc = derive_collections(t);
  CHECK(dc.E.size() == 5);
  CHECK(dc.B.size() == 3);
  CHECK(dc.C.size() == 4);
  CHECK(carleson_constant(dc.E) == Q(3, 2));
  CHECK(carleson_constant(dc.B) == Q(4, 3));
  CHECK(carleson_constant(dc.C) == Q(7, 4));
  CHECK(carleson_constant_naive(dc.C) == Q(7, 4));
  CHECK(check_collection_links(t).empty());
  CHECK(check_generation_decay(t, dc.E).empty());
}

TEST_CASE("dyadic Carleson constants against the oracle") {
  const Q expected[] = {Q(3, 2), Q(2), Q(5, 2), Q(3), Q(7, 2), Q(4), Q(9, 2)};
  for (int d = 2; d <= 8; ++d) {
    FiltrationTree t = build_dyadic(d);
    AtomCollection e = error_collection(t);
    CHECK(e.size() == (1 << d) - 1);
    CHECK(carleson_constant(e) == expected[d - 2]);
    CHECK(carleson_constant_naive(e) == expected[d - 2]);
  }
}

TEST_CASE("generations on the dyadic tree") {
  FiltrationTree t = build_dyadic(4);
  AtomCollection e = error_collection(t);
  Interval all{0, t.leaf_count()};
  // right children along the left spine
  CHECK(e.mass(e.g1(all)) == 1 - pow2(-4));
  auto gens = e.generations(all, 3);
  REQUIRE(gens.size() == 3);
  CHECK(gens[0].size() == 4);
  CHECK(e.generation(all, 2) == gens[1]);
  CHECK(e.nested());
  CHECK_THROWS(carleson_constant(AtomCollection(t, Kind::Generic, {})));
}

TEST_CASE("order on atoms") {
  FiltrationTree t(sample_spec());
  int a = t.find_path("0"), b = t.find_path("1"), c = t.find_path("1/2");
  CHECK(t.precedes(a, b));
  CHECK(!t.precedes(b, a));
  CHECK(t.precedes(b, c));
}

TEST_CASE("json round trip and loader diagnostics") {
  FiltrationTree t = build_random(5, 4, 11);
  FiltrationTree u = tree_from_json(tree_to_json(t));
  CHECK(t.same_structure(u));

  using nlohmann::json;
  json bad_sum = json::parse(R"({"p":"1","children":[{"p":"1/2"},{"p":"1/3"}]})");
  CHECK_THROWS_WITH_AS(tree_from_json(bad_sum), doctest::Contains("sum"), TreeError);
  json bad_order = json::parse(R"({"p":"1","children":[{"p":"1/3"},{"p":"2/3"}]})");
  CHECK_THROWS_AS(tree_from_json(bad_order), TreeError);
  json short_branch = json::parse(R"({"p":"1","children":[{"p":"1/2","children":[{"p":"1/2"}]},{"p":"1/2"}]})");
  try {
    tree_from_json(short_branch);
    FAIL("accepted a branch ending above the depth");
  } catch (const TreeError& e) {
    CHECK(e.path() == "1");
  }
  json bad_root = json::parse(R"({"p":"1/2"})");
  CHECK_THROWS_AS(tree_from_json(bad_root), TreeError);
}

TEST_CASE("random trees are valid and reproducible") {
  FiltrationTree a = build_random(6, 5, 3), b = build_random(6, 5, 3);
  CHECK(a.same_structure(b));
  for (int id = 0; id < a.size(); ++id) {
    if (!a.internal(id)) continue;
    Q s = 0;
    for (int c : a.atom(id).children) s += a.atom(c).prob;
    CHECK(s == a.atom(id).prob);
  }
}
