#pragma once
#include "mtype/martingale.hpp"

#include <random>

namespace testing_helpers {

using namespace mtype;

// Root splits 1/2, 1/3, 1/6; then [3/8, 1/8], [1/6, 1/9, 1/18] and a single copy of 1/6.
inline TreeSpec sample_spec() {
  auto leaf = [](Q p) { return TreeSpec{p, {}}; };
  return TreeSpec{Q(1),
                  {TreeSpec{Q(1, 2), {leaf(Q(3, 8)), leaf(Q(1, 8))}},
                   TreeSpec{Q(1, 3), {leaf(Q(1, 6)), leaf(Q(1, 9)), leaf(Q(1, 18))}},
                   TreeSpec{Q(1, 6), {leaf(Q(1, 6))}}}};
}

// Small signed rationals with denominators up to 8.
inline Q random_rational(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> num(-12, 12), den(1, 8);
  Q q(num(rng), den(rng));
  q.canonicalize();
  return q;
}

inline SimpleFunction random_function(const FiltrationTree& t, int dim, std::mt19937_64& rng) {
  SimpleFunction f(t, dim, t.depth());
  for (int l = 0; l < t.leaf_count(); ++l)
    for (int c = 0; c < dim; ++c) f.at(l, c) = random_rational(rng);
  return f;
}

inline std::vector<Vec> random_vectors(int count, int dim, std::mt19937_64& rng) {
  std::vector<Vec> out(count);
  for (auto& v : out)
    for (int c = 0; c < dim; ++c) v.push_back(random_rational(rng));
  return out;
}

}  // namespace testing_helpers
