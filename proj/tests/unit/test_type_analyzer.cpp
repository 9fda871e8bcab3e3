#include "doctest.h"
#include "helpers.hpp"
#include "mtype/type_analyzer.hpp"

#include <cmath>

using namespace mtype;
using namespace testing_helpers;

TEST_CASE("constants") {
  double p = 2;
  double mt = 2 * std::sqrt(2.0);
  double expected = (2 + 1 / (1 - std::pow(2.0, -0.5))) * std::pow(2.0, 1.5) * std::sqrt(1 + mt * mt) * std::sqrt(5.0);
  CHECK(tp_bound(p, 1) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(ctilde_bound(p, 1) == doctest::Approx(expected / 2).epsilon(1e-14));
  CHECK(cp_constant(1.5) == doctest::Approx(1 / (1 - std::pow(2.0, -2.0 / 3))));
  CHECK(mt_surrogate(1.5) == doctest::Approx(2 * std::pow(3.0, 2.0 / 3)));
  CHECK_THROWS_AS(mt_surrogate(1.0), std::invalid_argument);
}

TEST_CASE("Parseval pins the scalar p = 2 constant") {
  for (FiltrationTree t : {build_dyadic(4), build_chain(5, Q(1, 3)), build_random(4, 4, 17)}) {
    TypeEstimate e = empirical_type_constant(t, NormedSpace::real(), 2.0, 100);
    CHECK(std::fabs(e.constant - 1) < 1e-12);
    for (const auto& pr : e.inventory) CHECK(pr.ratio <= 1 + 1e-12);
  }
}

TEST_CASE("estimates are monotone, at least one and reproducible") {
  FiltrationTree t = build_dyadic(4);
  NormedSpace x = NormedSpace::lq(1, 3);
  TypeEstimate a = empirical_type_constant(t, x, 1.5, 80, 4);
  TypeEstimate b = empirical_type_constant(t, x, 1.5, 80, 4);
  CHECK(a.constant == b.constant);
  CHECK(a.constant >= 1);
  for (size_t i = 1; i < a.running_max.size(); ++i) CHECK(a.running_max[i] >= a.running_max[i - 1]);
  CHECK(a.running_max.back() == a.constant);
  CHECK(a.constant <= tp_bound(1.5, to_double(carleson_constant(error_collection(t)))));
  CHECK_THROWS_AS(empirical_type_constant(t, x, 2.5, 10), std::invalid_argument);
  CHECK_THROWS_AS(empirical_type_constant(t, x, 1.5, 0), std::invalid_argument);
}

TEST_CASE("chain trees stay below the bound for Carleson constant one") {
  FiltrationTree t = build_chain(6, Q(1, 4));
  for (NormedSpace x : {NormedSpace::real(), NormedSpace::lq(1, 3), NormedSpace::lq(kInf, 3)}) {
    TypeEstimate e = empirical_type_constant(t, x, 1.5, 60);
    CHECK(e.constant <= tp_bound(1.5, 1) + 1e-9);
  }
}

TEST_CASE("g + b decomposition") {
  std::mt19937_64 rng(12);
  FiltrationTree t = build_dyadic(3);
  SimpleFunction f = random_function(t, 1, rng);
  GBDecomposition gb = gb_decompose(f);
  CHECK(gb.exact);
  CHECK(gb.diffs_match);
  CHECK(gb_holder_check(gb, 1.5, NormedSpace::real()).empty());

  FiltrationTree s(sample_spec());
  SimpleFunction c = SimpleFunction::constant(s, Vec{Q(2), Q(-1)});
  GBDecomposition gc = gb_decompose(c);
  CHECK(gc.exact);
  CHECK(gc.b.is_zero());
  for (int id = 1; id < s.size(); ++id) CHECK(gc.coeffs.y[id] == Vec{Q(0), Q(0)});

  int b = s.find_path("1/1");
  GBDecomposition gk = gb_decompose(basis_k(s, b));
  for (int id = 1; id < s.size(); ++id)
    if (s.atom(id).level != 2) CHECK(gk.coeffs.y[id][0] == 0);
  CHECK(gk.coeffs.y[b][0] == 1);
  CHECK(gk.z[s.find_path("2")].empty());
}

TEST_CASE("nested collection estimate") {
  FiltrationTree t = build_dyadic(4);
  AtomCollection e = error_collection(t);
  std::mt19937_64 rng(3);
  for (double p : {1.5, 2.0}) {
    ConscolReport r = verify_conscol(e, random_vectors(e.size(), 3, rng), p, NormedSpace::lq(1, 3));
    CHECK(r.holds());
    CHECK(r.families_ok);
  }
  // one set
  AtomCollection single = e.subset({0});
  Q pa = single.mass(0);
  ConscolReport r1 = verify_conscol(single, {Vec{Q(3)}}, 1.5, NormedSpace::real());
  CHECK(r1.lhs == doctest::Approx(3 * std::pow(to_double(pa), 1 / 1.5)));
  CHECK(r1.holds());
  // disjoint sets need one family and the estimate is an equality up to C_p
  FiltrationTree c = build_chain(4, Q(1, 3));
  AtomCollection ce = error_collection(c);
  std::vector<Vec> xs = random_vectors(ce.size(), 1, rng);
  ConscolReport r2 = verify_conscol(ce, xs, 1.5, NormedSpace::real());
  CHECK(r2.m == 1);
  double s = 0;
  for (int i = 0; i < ce.size(); ++i) s += std::pow(std::fabs(to_double(xs[i][0])), 1.5) * to_double(ce.mass(i));
  CHECK(r2.lhs == doctest::Approx(std::pow(s, 1 / 1.5)));
}

TEST_CASE("largest-child part estimates") {
  FiltrationTree t = build_dyadic(4);
  std::mt19937_64 rng(6);
  std::vector<Vec> z(t.size());
  for (int id = 0; id < t.size(); ++id)
    if (t.num_children(id) >= 2) z[id] = Vec{random_rational(rng), random_rational(rng), random_rational(rng)};
  SingleColReport r = verify_singlecol_estcolb(t, z, 1.5, NormedSpace::lq(kInf, 3));
  CHECK(r.holds());
  CHECK(r.single_checks > 0);

  std::vector<Vec> zero(t.size());
  SingleColReport r0 = verify_singlecol_estcolb(t, zero, 2.0, NormedSpace::real());
  CHECK(r0.estcolb_lhs == 0);
  CHECK(r0.holds());

  // one term: ||z|| P(A~) P(A*)^(1/p) against the constant times ||z|| ||phi_A||_p
  std::vector<Vec> one(t.size());
  one[0] = Vec{Q(2)};
  SingleColReport r1 = verify_singlecol_estcolb(t, one, 2.0, NormedSpace::real());
  CHECK(r1.estcolb_lhs == doctest::Approx(2 * 0.5 * std::sqrt(0.5)));
  CHECK(r1.holds());
}

TEST_CASE("sign of a Haar sum against the oracle") {
  const Q expected[] = {Q(1), Q(3, 2), Q(3, 2), Q(15, 8), Q(15, 8), Q(35, 16)};
  for (int n = 1; n <= 6; ++n) {
    RzeszutResult r = rzeszut_example(n);
    CHECK(r.variation == expected[n - 1]);
    CHECK(r.lower_ok);
  }
  RzeszutResult r9 = rzeszut_example(9, 20);
  CHECK(to_double(r9.variation) >= std::sqrt(4.5));
  CHECK(r9.upper_ok);
  CHECK(r9.worst_random <= 3 + 1e-9);
  CHECK_THROWS_AS(rzeszut_example(0), std::invalid_argument);
  CHECK_THROWS_AS(rzeszut_example(17), std::invalid_argument);
}

TEST_CASE("the sign example through the general machinery") {
  // same function built on a tree object, variation through exact conditional means
  int n = 3;
  FiltrationTree t = build_dyadic(n + 1);
  SimpleFunction f(t, 1, n + 1);
  for (int l = 0; l < t.leaf_count(); ++l) {
    int s = 0;
    for (int k = 0; k <= n; ++k) s += ((l >> (n - k)) & 1) ? -1 : 1;
    f.at(l) = (s > 0) - (s < 0);
  }
  CHECK(variation_norm_exact(f) + qabs(f.integral()[0]) == rzeszut_example(n).variation);
}

TEST_CASE("dichotomy table") {
  NormedSpace r = NormedSpace::real();
  DichotomyReport chain = dichotomy_report([](int d) { return build_chain(d, Q(1, 2)); }, {2, 3, 4}, r, 1.5, 40);
  CHECK(chain.branch == "bounded-constant branch");
  for (const auto& row : chain.rows) {
    CHECK(row.carleson == 1);
    CHECK(row.empirical <= row.tp);
  }
  DichotomyReport dy = dichotomy_report([](int d) { return build_dyadic(d); }, {2, 3, 4, 5}, NormedSpace::lq(1, 3), 1.5, 60);
  CHECK(dy.branch == "growing-Carleson branch");
  for (size_t i = 1; i < dy.rows.size(); ++i) {
    CHECK(dy.rows[i].carleson == dy.rows[i - 1].carleson + Q(1, 2));
    CHECK(dy.rows[i].empirical >= dy.rows[i - 1].empirical);
  }
  DichotomyReport pin = dichotomy_report([](int d) { return build_dyadic(d); }, {2, 3, 4}, r, 2.0, 40);
  for (const auto& row : pin.rows) CHECK(std::fabs(row.empirical - 1) < 1e-12);
  CHECK(dichotomy_csv(pin).rfind("depth,carleson,empirical_constant,tp_bound,max_probe_id\n", 0) == 0);
}
