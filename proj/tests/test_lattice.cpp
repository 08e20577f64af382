#include <cmath>
#include <set>

#include "doctest.h"
#include "nipoly/errors.hpp"
#include "nipoly/lattice.hpp"
#include "nipoly/special.hpp"

using namespace nipoly;

namespace {
// Independent count of non-intersecting k-paths by LGV over integer binomials.
double lgv_count(const KPoint& xs, const KPoint& ys) {
  const std::size_t k = xs.k();
  LogMatrix m(k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      const Point d = ys[j] - xs[i];
      m(i, j) = d.x1 < 0 || d.x2 < 0 ? LogSigned::zero() : log_binomial(d.x1 + d.x2, d.x1);
    }
  return logdet(m).to_double();
}
}  // namespace

TEST_CASE("KPoint rejects repeated points") {
  CHECK_THROWS(KPoint({{1, 1}, {1, 1}}));
  CHECK_NOTHROW(KPoint({{1, 1}, {1, 2}}));
}

TEST_CASE("stacks") {
  const auto u = stack_up({2, 3}, 3);
  CHECK(u[0] == Point{2, 3});
  CHECK(u[2] == Point{2, 5});
  const auto d = stack_down({4, 5}, 3);
  CHECK(d[0] == Point{4, 3});
  CHECK(d[2] == Point{4, 5});
  const auto g = stack_diag({5, 1}, 3);
  CHECK(g[2] == Point{3, 3});
  CHECK(is_nice(u));
  CHECK(is_nice(g));
  CHECK_FALSE(is_nice(KPoint({{1, 1}, {2, 2}})));
}

TEST_CASE("partial order and distance") {
  CHECK(precedes({1, 1}, {1, 1}));
  CHECK(precedes({1, 1}, {3, 2}));
  CHECK_FALSE(precedes({2, 1}, {1, 5}));
  CHECK(l1_distance({1, 1}, {4, 3}) == 5);
}

TEST_CASE("enumeration count equals MacMahon box count for all small rectangles") {
  for (int n = 1; n <= 5; ++n)
    for (int m = 1; m <= 5; ++m) {
      for (int k = 1; k <= std::min(n, m); ++k) {
        const auto xs = stack_up({1, 1}, k);
        const auto ys = stack_down({n, m}, k);
        const std::int64_t c = count_kpaths(xs, ys, 10'000'000);
        CAPTURE(n);
        CAPTURE(m);
        CAPTURE(k);
        CHECK(static_cast<double>(c) == doctest::Approx(std::exp(macmahon_log_count(n, m, k))).epsilon(1e-10));
        CHECK(std::llround(std::exp(macmahon_log_count(n, m, k))) == c);
        if (k == m) CHECK(c == 1);
      }
    }
}

TEST_CASE("every enumerated k-path is structurally valid, distinct and in lexicographic order") {
  const auto xs = stack_up({1, 1}, 2);
  const auto ys = stack_down({4, 4}, 2);
  const auto all = enumerate_kpaths(xs, ys, 100000);
  CHECK(static_cast<double>(all.size()) == doctest::Approx(lgv_count(xs, ys)));
  std::set<std::vector<std::vector<std::pair<std::int64_t, std::int64_t>>>> seen;
  std::vector<std::vector<std::pair<std::int64_t, std::int64_t>>> prev_key;
  for (const auto& p : all) {
    CHECK(is_valid_kpath(p, xs, ys));
    std::vector<std::vector<std::pair<std::int64_t, std::int64_t>>> key;
    for (const auto& c : p.components) {
      std::vector<std::pair<std::int64_t, std::int64_t>> steps;
      for (std::size_t s = 1; s < c.size(); ++s) steps.push_back({c[s].x2 - c[s - 1].x2, 0});
      key.push_back(steps);
    }
    if (!prev_key.empty()) CHECK(prev_key < key);  // east (0) sorts before north (1)
    prev_key = key;
    seen.insert(key);
  }
  CHECK(seen.size() == all.size());
}

TEST_CASE("structural validator rejects broken k-paths") {
  const auto xs = stack_up({1, 1}, 2);
  const auto ys = stack_down({3, 3}, 2);
  auto p = enumerate_kpaths(xs, ys, 1000).front();
  KPath shared = p;
  shared.components[1] = shared.components[0];
  CHECK_FALSE(is_valid_kpath(shared, xs, ys));
  KPath jump = p;
  jump.components[0].erase(jump.components[0].begin() + 1);
  CHECK_FALSE(is_valid_kpath(jump, xs, ys));
}

TEST_CASE("enumeration agrees with LGV on diagonal and mixed endpoints") {
  const auto xs = stack_diag({3, 1}, 3);
  const auto ys = stack_diag({7, 4}, 3);
  CHECK(static_cast<double>(count_kpaths(xs, ys, 10'000'000)) == doctest::Approx(lgv_count(xs, ys)));
}

TEST_CASE("cap is enforced, never truncated") {
  const auto xs = stack_up({1, 1}, 1);
  const auto ys = stack_down({6, 6}, 1);
  CHECK_THROWS_AS(count_kpaths(xs, ys, 100), CapExceededError);
  CHECK(count_kpaths(xs, ys, 1000) == 252);
}

TEST_CASE("no k-path gives zero") {
  const auto xs = stack_up({1, 1}, 3);
  const auto ys = stack_down({5, 2}, 3);
  CHECK(count_kpaths(xs, ys, 1000) == 0);
}

TEST_CASE("Krattenthaler product identity") {
  for (int k = 1; k <= 5; ++k)
    for (int a = 1; a <= 5; ++a)
      for (int b = 1; b <= 5; ++b) CHECK(krattenthaler_check(k, a, b).ok());
}
