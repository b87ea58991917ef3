#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

#include "dsplit/sft.hpp"

using namespace dsplit;

namespace {

// Independent count oracle: trace of the n-th power of the transition matrix.
std::uint64_t trace_power(const std::vector<std::vector<int>>& m, int n) {
  const int d = static_cast<int>(m.size());
  std::vector<std::vector<std::uint64_t>> acc(d, std::vector<std::uint64_t>(d, 0));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) acc[i][j] = static_cast<std::uint64_t>(m[i][j]);
  for (int p = 1; p < n; ++p) {
    std::vector<std::vector<std::uint64_t>> nxt(d, std::vector<std::uint64_t>(d, 0));
    for (int i = 0; i < d; ++i)
      for (int k = 0; k < d; ++k)
        for (int j = 0; j < d; ++j) nxt[i][j] += acc[i][k] * static_cast<std::uint64_t>(m[k][j]);
    acc = std::move(nxt);
  }
  std::uint64_t tr = 0;
  for (int i = 0; i < d; ++i) tr += acc[i][i];
  return tr;
}

}  // namespace

TEST_CASE("system construction and connection bound") {
  const SftSystem full = SftSystem::full_shift(2);
  CHECK(full.connection_bound() == 0);
  const SftSystem gm = SftSystem::golden_mean();
  CHECK(gm.connection_bound() == 1);
  CHECK(gm.connector(1, 1) == Word{0});
  CHECK(gm.connector(0, 1).empty());

  CHECK_THROWS_AS(SftSystem(2, {{1, 1}, {0, 1}}), DomainError);  // 1 cannot reach 0
  CHECK_THROWS_AS(SftSystem(2, {{1, 0}, {0, 1}}), DomainError);  // two components
  CHECK_THROWS_AS(SftSystem(2, {{1, 1}}), DomainError);
  CHECK_THROWS_AS(SftSystem(2, {{1, 2}, {1, 1}}), DomainError);
}

TEST_CASE("point distance examples") {
  const SftSystem sys = SftSystem::full_shift(2);
  const Point x = Point::periodic(sys, {0, 1});
  CHECK(point_distance(x, x) == 0.0);

  // Differ at coordinate 0.
  const Point a = Point::periodic(sys, {0});
  const Point b = Point::periodic(sys, {1});
  CHECK(point_distance(a, b) == 1.0);

  // Agree exactly on -2..2, first difference at |i| = 3.
  const Point u = Point::make(sys, {1}, {0, 0, 0, 0, 0, 0, 0}, {1}, 3);
  const Point v = Point::make(sys, {1}, {1, 0, 0, 0, 0, 0, 1}, {1}, 3);
  for (long long i = -2; i <= 2; ++i) REQUIRE(u.symbol(i) == v.symbol(i));
  REQUIRE(u.symbol(3) != v.symbol(3));
  REQUIRE(u.symbol(-3) != v.symbol(-3));
  CHECK(point_distance(u, v) == Catch::Approx(std::exp(-3.0)).epsilon(1e-14));
}

TEST_CASE("distance rejects mismatched systems") {
  const SftSystem full = SftSystem::full_shift(2);
  const SftSystem gm = SftSystem::golden_mean();
  const Point x = Point::periodic(full, {0});
  const Point y = Point::periodic(gm, {0});
  CHECK_THROWS_AS(point_distance(x, y), DomainError);
}

TEST_CASE("canonical form identifies equal sequences") {
  const SftSystem sys = SftSystem::full_shift(2);
  // (01)-periodic sequence written three different ways.
  const Point a = Point::periodic(sys, {0, 1});
  const Point b = Point::make(sys, {0, 1}, {0, 1, 0, 1}, {0, 1}, 2);
  const Point c = Point::make(sys, {1, 0}, {}, {1, 0}, 1);
  CHECK(a == b);
  for (long long i = -5; i <= 5; ++i) REQUIRE(b.symbol(i) == a.symbol(i));
  // c anchors the boundary one step later; same sequence iff symbols agree.
  for (long long i = -5; i <= 5; ++i) REQUIRE(c.symbol(i) == a.symbol(i));
  CHECK(a == c);
  // A word that is a proper power reduces to its primitive root.
  const Point d = Point::periodic(sys, {0, 1, 0, 1});
  CHECK(a == d);

  // Eventually periodic, not periodic: ...000111...
  const Point e1 = Point::make(sys, {0}, {0, 1}, {1}, 0);
  const Point e2 = Point::make(sys, {0}, {}, {1}, -1);
  CHECK(e1 == e2);
  CHECK(e1.symbol(0) == 0);
  CHECK(e1.symbol(1) == 1);
  CHECK(e1.symbol(-3) == 0);
}

TEST_CASE("shift examples and properties") {
  const SftSystem sys = SftSystem::golden_mean();
  Rng rng(7001);
  for (int trial = 0; trial < 50; ++trial) {
    const Point x = random_point(sys, rng);
    CHECK(shift(x, 0) == x);
    CHECK(shift(shift(x, 3), -3) == x);
    for (long long i = -4; i <= 4; ++i) REQUIRE(shift(x, 2).symbol(i) == x.symbol(i + 2));
  }
  const Point p = Point::periodic(sys, {0, 0, 1});
  CHECK(shift(p, 3) == p);
  CHECK(shift(p, -3) == p);
  CHECK(shift(p, 1) != p);
}

TEST_CASE("metric properties on random points") {
  const SftSystem sys = SftSystem::golden_mean();
  Rng rng(7002);
  for (int trial = 0; trial < 200; ++trial) {
    const Point x = random_point(sys, rng);
    const Point y = random_point(sys, rng);
    const Point z = random_point(sys, rng);
    const double dxy = point_distance(x, y);
    CHECK(dxy == point_distance(y, x));
    CHECK((dxy == 0.0) == (x == y));
    // Ultrametric inequality.
    CHECK(point_distance(x, z) <= std::max(dxy, point_distance(y, z)) * (1.0 + 1e-14));
    // Shift is e-Lipschitz in both directions (exact on separation indices).
    if (x != y) {
      const long long s = separation_index(x, y);
      CHECK(separation_index(shift(x, 1), shift(y, 1)) >= s - 1);
      CHECK(separation_index(shift(x, -1), shift(y, -1)) >= s - 1);
    }
  }
}

TEST_CASE("periodic enumeration matches the trace oracle") {
  const SftSystem full = SftSystem::full_shift(2);
  const SftSystem gm = SftSystem::golden_mean();

  CHECK(enumerate_periodic(full, 3).size() == 8);
  CHECK(enumerate_periodic(gm, 4).size() == 7);

  for (int n = 1; n <= 10; ++n) {
    CHECK(enumerate_periodic(full, n).size() == trace_power(full.transition_matrix(), n));
    CHECK(enumerate_periodic(gm, n).size() == trace_power(gm.transition_matrix(), n));
  }

  // No admissible self-loop: empty fixed-point set at n = 1.
  const SftSystem flip(2, {{0, 1}, {1, 0}});
  CHECK(enumerate_periodic(flip, 1).empty());

  // Every returned word is cyclically admissible, each exactly once.
  const auto orbits = enumerate_periodic(gm, 5);
  for (const auto& o : orbits) {
    CHECK(gm.cyclically_admissible(o.word));
    CHECK(shift(o.point(gm), o.period()) == o.point(gm));
  }
  for (std::size_t i = 1; i < orbits.size(); ++i) CHECK(orbits[i - 1].word < orbits[i].word);

  CHECK_THROWS_AS(enumerate_periodic(full, full.enumeration_cutoff() + 1), ResourceLimitError);
  CHECK_THROWS_AS(enumerate_periodic(full, 0), DomainError);
}

TEST_CASE("distinct orbit view") {
  const SftSystem full = SftSystem::full_shift(2);
  // Length 3: words 001,010,100 collapse to one orbit; 011 group to one; plus
  // the two fixed points are excluded (period 1, not 3).
  const auto orbits = distinct_orbits(full, 3);
  REQUIRE(orbits.size() == 2);
  CHECK(orbits[0].word == Word{0, 0, 1});
  CHECK(orbits[1].word == Word{0, 1, 1});
}

TEST_CASE("periodic measure support") {
  const SftSystem sys = SftSystem::full_shift(2);
  const PeriodicMeasure mu{PeriodicOrbit{{0, 1, 1}}};
  CHECK(mu.weight() == Catch::Approx(1.0 / 3.0));
  const auto pts = mu.support(sys);
  REQUIRE(pts.size() == 3);
  CHECK(pts[0] != pts[1]);
  CHECK(shift(pts[2], 1) == pts[0]);
}

TEST_CASE("closing a periodic point returns its own orbit") {
  const SftSystem sys = SftSystem::full_shift(2);
  const Point x = Point::periodic(sys, {0, 1, 1});
  const auto res = close_orbit(sys, x, 3);
  CHECK(res.j == 0);
  CHECK(res.orbit.point(sys) == x);
  CHECK(res.report.verified);
  for (const auto& row : res.report.rows) CHECK(row.distance == 0.0);
}

TEST_CASE("closing the 0110 block verifies with c = e, theta = 1") {
  const SftSystem sys = SftSystem::full_shift(2);
  // Coordinates -4..7 fixed so that d(sigma^4 x, x) = e^{-4} exactly:
  // x_{t+4} = x_t for |t| <= 3 and x_{-4} != x_0.
  const Point x = Point::make(sys, {0}, {1, 1, 1, 0, 0, 1, 1, 0, 0, 1, 1, 0}, {0}, 4);
  REQUIRE(x.window(0, 7) == Word{0, 1, 1, 0, 0, 1, 1, 0});
  REQUIRE(separation_index(shift(x, 4), x) == 4);

  const auto res = close_orbit(sys, x, 4);
  CHECK(res.j == 0);
  CHECK(res.orbit.word == Word{0, 1, 1, 0});
  REQUIRE(res.report.rows.size() == 5);
  CHECK(res.report.verified);

  // Exhaustive oracle: re-check every i against c = e, theta = 1 directly.
  const Point p = res.orbit.point(sys);
  for (int i = 0; i <= 4; ++i) {
    const double lhs = point_distance(shift(x, i), shift(p, i));
    const double rhs = std::exp(1.0) * std::exp(-std::min(i, 4 - i)) * std::exp(-4.0);
    CHECK(lhs <= rhs);
  }
}

TEST_CASE("closing with a connector on the golden mean shift") {
  const SftSystem sys = SftSystem::golden_mean();
  // Segment starts and ends with 1, so returning needs the connector 0.
  const Point x = Point::make(sys, {0}, {1, 0, 0, 1}, {0}, 0);
  const auto res = close_orbit(sys, x, 4);
  CHECK(res.j == 1);
  CHECK(res.orbit.word == Word{1, 0, 0, 1, 0});
  CHECK(res.report.verified);
  CHECK(sys.cyclically_admissible(res.orbit.word));
}

TEST_CASE("closing soundness on random segments") {
  for (const SftSystem& sys : {SftSystem::full_shift(2), SftSystem::golden_mean()}) {
    Rng rng(7003);
    for (int trial = 0; trial < 100; ++trial) {
      const Point x = random_point(sys, rng);
      const int n = rng.uniform_int(1, 30);
      const auto res = close_orbit(sys, x, n);
      CHECK(res.j <= sys.connection_bound());
      CHECK(res.report.verified);
    }
  }
}

TEST_CASE("closing rejects bad input") {
  const SftSystem sys = SftSystem::full_shift(2);
  const Point x = Point::periodic(sys, {0});
  CHECK_THROWS_AS(close_orbit(sys, x, 0), DomainError);
  const SftSystem gm = SftSystem::golden_mean();
  CHECK_THROWS_AS(close_orbit(gm, x, 2), DomainError);
}
