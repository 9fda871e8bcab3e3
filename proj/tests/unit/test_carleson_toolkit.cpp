#include "doctest.h"
#include "helpers.hpp"
#include "mtype/carleson_toolkit.hpp"

#include <cmath>

using namespace mtype;

TEST_CASE("disjointification of the dyadic error collection") {
  FiltrationTree t = build_dyadic(6);
  AtomCollection e = error_collection(t);
  Disjointification d = disjointify(e);
  CHECK(d.ok());
  CHECK(d.carleson == Q(7, 2));
  CHECK(d.bound == 15);
  CHECK(d.m <= d.bound);
  int total = 0;
  for (const auto& f : d.families()) total += static_cast<int>(f.size());
  CHECK(total == e.size());
  bool halving = false, geomet = false;
  CHECK(check_families(e, d.color, d.m, nullptr, &halving, &geomet));
  CHECK(halving);
  CHECK(geomet);
  // a single color cannot be halving here
  std::vector<int> mono(e.size(), 0);
  CHECK_FALSE(check_families(e, mono, 1, nullptr, &halving, &geomet));
}

TEST_CASE("disjoint collections need one color") {
  FiltrationTree t = build_chain(5, Q(1, 3));
  Disjointification d = disjointify(error_collection(t));
  CHECK(d.ok());
  CHECK(d.m == 1);
}

TEST_CASE("dense seeds and condensation") {
  FiltrationTree t = build_dyadic(14);
  AtomCollection e = error_collection(t);
  CHECK_THROWS_AS(find_dense_seed(e, Q(0), 2), std::invalid_argument);
  CHECK_THROWS_AS(find_dense_seed(e, Q(3, 2), 2), std::invalid_argument);
  CHECK(find_dense_seed(e, Q(1, 2), 1) >= 0);

  CondensationResult c = condense(e, Q(1, 2), 2, 2);
  REQUIRE(c.found);
  CHECK(c.verified());
  CHECK(c.families.size() == 3);
  for (const Q& m : c.min_coverage) CHECK(m > Q(1, 2));
  CHECK(e.tree().atom(e[c.seed].atom).level == 1);

  FiltrationTree chain = build_chain(8, Q(1, 2));
  CondensationResult none = condense(error_collection(chain), Q(1, 2), 2, 2);
  CHECK_FALSE(none.found);
  CHECK_FALSE(none.reason.empty());
}

TEST_CASE("almost disjoint supports") {
  FiltrationTree t = build_dyadic(3);
  NormedSpace x = NormedSpace::real();
  SimpleFunction g = SimpleFunction::indicator(t, {0, 4}, 1);
  EstddResult one = estdd_bound({g}, {{{0, 4}}}, {1.0}, 2, x);
  CHECK(one.hypotheses_ok);
  CHECK(one.lhs == doctest::Approx(std::sqrt(0.5)));
  CHECK(one.rhs == doctest::Approx(one.lhs));

  // support outside every D_k
  EstddResult off = estdd_bound({g}, {{{0, 2}}}, {1.0}, 2, x);
  CHECK_FALSE(off.hypotheses_ok);

  // nested pair with the decay the geometric families give
  SimpleFunction g2 = SimpleFunction::indicator(t, {0, 2}, 2);
  EstddResult two = estdd_bound({g, g2}, {{{0, 4}}, {{0, 2}}}, {1.0, std::pow(2.0, -0.5)}, 2, x);
  CHECK(two.hypotheses_ok);
  CHECK(two.lhs <= two.rhs + 1e-12);
}
