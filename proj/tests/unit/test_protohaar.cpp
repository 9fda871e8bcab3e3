#include "doctest.h"
#include "helpers.hpp"
#include "mtype/protohaar.hpp"

using namespace mtype;

TEST_CASE("covering hypothesis") {
  // on dyadic depth d the witness is the share of points with at least k ones among d digits
  FiltrationTree t6 = build_dyadic(6);
  CHECK(check_larcon(t6, error_collection(t6), 0, {Q(1, 4), 3}).witness == Q(21, 32));
  FiltrationTree t = build_dyadic(10);
  AtomCollection e = error_collection(t);
  LarconResult r = check_larcon(t, e, 0, {Q(1, 4), 3});
  CHECK(r.holds);
  CHECK(r.witness == Q(121, 128));

  FiltrationTree c = build_chain(6, Q(1, 3));
  AtomCollection ce = error_collection(c);
  CHECK_FALSE(check_larcon(c, ce, 0, {Q(1, 4), 3}).holds);
  CHECK(check_larcon(c, ce, 0, {Q(1, 4), 3}).witness == 0);

  CHECK_THROWS_AS(check_larcon(t, e, 0, {Q(1, 4), 2}), std::invalid_argument);
  CHECK_THROWS_AS(check_larcon(t, e, 0, {Q(1, 2), 3}), std::invalid_argument);
}

TEST_CASE("default parameters") {
  ProtoHaarParams p = default_protohaar_params(2);
  CHECK(p.eps == Q(1, 32));
  CHECK(pow2(-p.k) < p.eps);
  CHECK_NOTHROW(validate_protohaar_params(p));
}

TEST_CASE("on the dyadic tree the construction returns the Haar function") {
  FiltrationTree t = build_dyadic(10);
  AtomCollection e = error_collection(t);
  ProtoHaarCertificate c = construct_protohaar(t, e, 0, {Q(1, 4), 3});
  CHECK(c.all_ok());
  CHECK(c.c0 == 1);
  CHECK(c.t == 1);
  for (int l = 0; l < t.leaf_count(); ++l) CHECK(c.h.at(l) == (l < 512 ? -1 : 1));
  CHECK(c.variation == 1);
  CHECK(verify_monotone_projections(c, e).ok);

  FiltrationTree t12 = build_dyadic(12);
  AtomCollection e12 = error_collection(t12);
  int a = t12.find_path("1/0");
  ProtoHaarCertificate c2 = construct_protohaar(t12, e12, a, {Q(1, 4), 3});
  CHECK(c2.all_ok());
  CHECK(c2.pa == Q(1, 4));
  CHECK(c2.h.integral()[0] == 0);
}

TEST_CASE("greedy steps keep the balance condition") {
  FiltrationTree t = build_random(7, 3, 21);
  AtomCollection e = error_collection(t);
  ProtoHaarParams prm{Q(1, 4), 3};
  for (int a = 0; a < t.size(); ++a) {
    if (!check_larcon(t, e, a, prm).holds) continue;
    GreedyState st = greedy_start(t, a);
    CHECK(balance_condition(st));
    int guard = 0;
    while (!st.done && guard++ < 100) {
      GreedyStep s = greedy_step(t, e, st, prm);
      CHECK(balance_condition(st));
      if (!s.truncated) CHECK(st.y.size() > 0);
    }
    CHECK(st.done);
    break;
  }
}

TEST_CASE("uncovered atoms are rejected") {
  FiltrationTree c = build_chain(5, Q(1, 2));
  AtomCollection ce = error_collection(c);
  CHECK_THROWS_AS(construct_protohaar(c, ce, 0, {Q(1, 4), 3}), std::invalid_argument);
}

TEST_CASE("certificate json carries the regions and the bounds") {
  FiltrationTree t = build_dyadic(10);
  AtomCollection e = error_collection(t);
  ProtoHaarCertificate c = construct_protohaar(t, e, 0, {Q(1, 4), 3});
  nlohmann::json j = certificate_to_json(c, e);
  CHECK(j.contains("c0"));
  CHECK(j["bounds"]["H7"] == true);
  // greedy stops after two steps: plus = [3/4,1) u [5/8,3/4), neutral = [1/2,5/8)
  CHECK(j["plus_set"] == nlohmann::json::array({"1/1", "1/0/1"}));
  CHECK(j["minus_set"] == nlohmann::json::array({"0"}));
  CHECK(j["neutral_set"] == nlohmann::json::array({"1/0/0"}));
  CHECK(j["c0"] == "1");
}
