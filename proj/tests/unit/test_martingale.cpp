#include "doctest.h"
#include "helpers.hpp"
#include "mtype/io.hpp"

#include <cmath>

using namespace mtype;
using namespace testing_helpers;

namespace {
SimpleFunction sample_function(const FiltrationTree& t) {
  SimpleFunction f(t, 1, t.depth());
  const Q v[] = {Q(1), Q(-2), Q(3, 4), Q(0), Q(5), Q(-1, 3)};
  for (int l = 0; l < 6; ++l) f.at(l) = v[l];
  return f;
}
}  // namespace

TEST_CASE("variation of a fixed function against the oracle") {
  FiltrationTree t(sample_spec());
  SimpleFunction f = sample_function(t);
  CHECK(variation_norm_exact(f) == Q(637, 432));
  CHECK(std::fabs(variation_norm(f, NormedSpace::real()) - 637.0 / 432.0) < 1e-12);
}

TEST_CASE("conditional expectations and differences") {
  FiltrationTree t(sample_spec());
  SimpleFunction f = sample_function(t);
  SimpleFunction e1 = cond_expectation(f, 1);
  CHECK(e1.measurable_level() <= 1);
  CHECK(e1.at(0) == (Q(1) * Q(3, 8) + Q(-2) * Q(1, 8)) / Q(1, 2));
  CHECK(e1.integral() == f.integral());
  CHECK(cond_expectation(e1, 0) == cond_expectation(f, 0));
  CHECK_THROWS_AS(cond_expectation(f, 3), std::out_of_range);

  MartingaleDecomposition md = martingale_diffs(f);
  SimpleFunction back = SimpleFunction::constant(t, md.mean);
  for (const auto& d : md.diffs) back += d;
  CHECK(back == f);
  for (const auto& d : md.diffs) CHECK(d.integral()[0] == 0);
}

TEST_CASE("basis functions") {
  FiltrationTree t(sample_spec());
  int b = t.find_path("1/2");
  SimpleFunction k = basis_k(t, b);
  CHECK(k.integral()[0] == 0);
  CHECK(k.measurable_level() == 2);
  CHECK_THROWS(basis_k(t, t.find_path("1/0")));
  SimpleFunction phi = basis_phi(t, t.find_path("1"));
  CHECK(phi.integral()[0] == 0);
  CHECK(basis_phi(t, t.find_path("2")).is_zero());
  Coefficients c = coeffs_from_function(k);
  for (int id = 0; id < t.size(); ++id)
    if (!c.x[id].empty()) CHECK(c.x[id][0] == (id == b ? 1 : 0));
}

TEST_CASE("coefficient systems agree") {
  std::mt19937_64 rng(5);
  FiltrationTree t = build_random(4, 4, 9);
  SimpleFunction f = random_function(t, 2, rng);
  Coefficients c = coeffs_from_function(f);
  CHECK(expand_coeffs(t, c.mean, c.x) == f);
  CHECK(expand_y(t, c.mean, c.y) == f);
  CHECK(y_from_x(t, 2, c.x) == c.y);
  CHECK(x_from_y(t, 2, c.y) == c.x);
  std::vector<Vec> bad = c.y;
  bad[1][0] += 1;
  CHECK_THROWS_AS(x_from_y(t, 2, bad), std::logic_error);
}

TEST_CASE("difference sums from y-coefficients") {
  std::mt19937_64 rng(8);
  FiltrationTree t = build_random(4, 3, 2);
  SimpleFunction f = random_function(t, 3, rng);
  NormedSpace x = NormedSpace::lq(1, 3);
  Coefficients c = coeffs_from_function(f);
  MartingaleDecomposition md = martingale_diffs(f);
  double direct = 0;
  for (const auto& d : md.diffs) direct += std::pow(lp_norm(d, 1.5, x), 1.5);
  CHECK(diff_power_sum(t, c.y, 1.5, x) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("normed spaces") {
  NormedSpace inf = NormedSpace::parse("lq:inf:3");
  NormedSpace one = NormedSpace::parse("lq:1:3");
  NormedSpace two = NormedSpace::lq(2, 2);
  double v[] = {3, -4, 1};
  CHECK(inf.norm(v) == 4);
  CHECK(one.norm(v) == 8);
  CHECK(two.norm(v) == doctest::Approx(5));
  CHECK(NormedSpace::parse("real").dim == 1);
  CHECK_THROWS(NormedSpace::parse("lq:0.5:2"));
  CHECK_THROWS(NormedSpace::parse("banana"));
}

TEST_CASE("function files") {
  FiltrationTree t(sample_spec());
  SimpleFunction f = sample_function(t);
  SimpleFunction g = function_from_json(t, function_to_json(f));
  CHECK(g == f);
  SimpleFunction e1 = cond_expectation(f, 1);
  nlohmann::json j = function_to_json(e1);
  CHECK(j["level"] == 1);
  CHECK(function_from_json(t, j) == e1);
  j["values"].erase("2");
  CHECK_THROWS_WITH_AS(function_from_json(t, j), doctest::Contains("'2'"), TreeError);
}
