#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>

#include "dsplit/cocycle.hpp"
#include "test_util.hpp"

using namespace dsplit;

namespace {

const NormContext kEuclid2{NormKind::Euclidean, 2};

CocycleSpec constant_spec(const SftSystem& sys, const Matrix& a0, bool injective = true) {
  return CocycleSpec::locally_constant_from(
      sys, 0, [&](const Word&) { return a0; }, kEuclid2, injective);
}

}  // namespace

TEST_CASE("evaluate examples") {
  const SftSystem sys = SftSystem::full_shift(2);
  Matrix a0(2, 2);
  a0 << 2.0, 1.0, 0.0, 0.5;

  // Constant generator.
  const CocycleSpec c = constant_spec(sys, a0);
  Rng rng(31);
  for (int i = 0; i < 10; ++i) {
    const Point x = random_point(sys, rng);
    CHECK(c.evaluate(x) == a0);
  }

  // Trivial conjugation returns D itself.
  Vector d(2);
  d << 3.0, 0.25;
  std::map<Word, Matrix> ptab;
  ptab[Word{0}] = Matrix::Identity(2, 2);
  ptab[Word{1}] = Matrix::Identity(2, 2);
  const CocycleSpec conj = CocycleSpec::conjugated_diagonal(sys, d, 0, ptab, kEuclid2);
  const Point x = Point::periodic(sys, {0, 1});
  CHECK((conj.evaluate(x) - Vector(d).asDiagonal().toDenseMatrix()).cwiseAbs().maxCoeff() < 1e-14);

  // Table lookup at the center symbol.
  Matrix a1(2, 2);
  a1 << 1.0, 0.0, 0.0, 1.0;
  std::map<Word, Matrix> table;
  table[Word{0}] = a0;
  table[Word{1}] = a1;
  const CocycleSpec lc =
      CocycleSpec::locally_constant(sys, 0, table, kEuclid2, /*injective=*/true);
  const Point y = Point::periodic(sys, {1, 0});  // y_0 = 1
  CHECK(lc.evaluate(y) == a1);
  CHECK(lc.evaluate(shift(y, 1)) == a0);
}

TEST_CASE("spec construction rejects bad input") {
  const SftSystem sys = SftSystem::golden_mean();
  Matrix a(2, 2);
  a << 1.0, 0.0, 0.0, 1.0;
  std::map<Word, Matrix> missing;  // golden mean words of length 1: {0}, {1}
  missing[Word{0}] = a;
  CHECK_THROWS_AS(CocycleSpec::locally_constant(sys, 0, missing, kEuclid2, true), DomainError);

  std::map<Word, Matrix> extra;
  extra[Word{0}] = a;
  extra[Word{1}] = a;
  extra[Word{2}] = a;
  CHECK_THROWS_AS(CocycleSpec::locally_constant(sys, 0, extra, kEuclid2, true), DomainError);

  // Injective flag demands nonsingular generators.
  Matrix sing(2, 2);
  sing << 1.0, 0.0, 0.0, 0.0;
  std::map<Word, Matrix> tab;
  tab[Word{0}] = sing;
  tab[Word{1}] = a;
  CHECK_THROWS_AS(CocycleSpec::locally_constant(sys, 0, tab, kEuclid2, true), DomainError);
  CHECK_NOTHROW(CocycleSpec::locally_constant(sys, 0, tab, kEuclid2, false));

  // Windows from a different system are rejected at evaluation time.
  const SftSystem full = SftSystem::full_shift(2);
  const CocycleSpec spec = testutil::swap_family(full);
  const Point z = Point::periodic(sys, {0});
  CHECK_THROWS_AS(spec.evaluate(z), DomainError);
}

TEST_CASE("product examples") {
  const SftSystem sys = SftSystem::full_shift(2);
  Matrix a0(2, 2);
  a0 << 2.0, 0.0, 0.0, 0.5;
  const CocycleSpec spec = constant_spec(sys, a0);
  const Point x = Point::periodic(sys, {0, 1});

  CHECK(product(spec, x, 0) == Matrix::Identity(2, 2));
  CHECK(product(spec, x, 1) == a0);
  Matrix p5(2, 2);
  p5 << 32.0, 0.0, 0.0, 1.0 / 32.0;
  CHECK(product(spec, x, 5) == p5);  // dyadic, exact

  Matrix big(2, 2);
  big << 4.0, 0.0, 0.0, 4.0;
  const CocycleSpec huge = constant_spec(sys, big);
  CHECK_THROWS_AS(product(huge, x, 600), NumericError);
}

TEST_CASE("cocycle identity") {
  const SftSystem sys = SftSystem::full_shift(2);
  const CocycleSpec swap = testutil::swap_family(sys);  // dyadic entries: exact products
  Rng rng(32);
  for (int trial = 0; trial < 60; ++trial) {
    const Point x = random_point(sys, rng);
    const int n = rng.uniform_int(0, 20);
    const int m = rng.uniform_int(0, 20);
    const Matrix lhs = product(swap, x, n + m);
    const Matrix rhs = product(swap, shift(x, n), m) * product(swap, x, n);
    CHECK(lhs == rhs);  // entrywise equality for locally constant dyadic tables
  }

  const CocycleSpec conj = testutil::hyperbolic_family(sys);
  for (int trial = 0; trial < 40; ++trial) {
    const Point x = random_point(sys, rng);
    const int n = rng.uniform_int(0, 15);
    const int m = rng.uniform_int(0, 15);
    const Matrix lhs = product(conj, x, n + m);
    const Matrix rhs = product(conj, shift(x, n), m) * product(conj, x, n);
    const double rel = (lhs - rhs).norm() / std::max(1.0, lhs.norm());
    CHECK(rel <= 1e-10);
  }
}

TEST_CASE("conjugated diagonal closed form") {
  const SftSystem sys = SftSystem::full_shift(2);
  const CocycleSpec conj = testutil::hyperbolic_family(sys);
  const auto ptab = testutil::p_table_2d();
  Vector d(2);
  d << std::exp(1.0), std::exp(-1.0);
  Rng rng(33);
  for (int trial = 0; trial < 30; ++trial) {
    const Point x = random_point(sys, rng);
    const int n = rng.uniform_int(0, 18);
    const Matrix lhs = product(conj, x, n);
    Matrix dn = Matrix::Zero(2, 2);
    dn(0, 0) = std::exp(static_cast<double>(n));
    dn(1, 1) = std::exp(-static_cast<double>(n));
    const Matrix p_end = ptab.at(Word{shift(x, n).symbol(0)});
    const Matrix p_start = ptab.at(Word{x.symbol(0)});
    const Matrix rhs = p_end * dn * p_start.inverse();
    CHECK((lhs - rhs).norm() / rhs.norm() <= 1e-9);
  }
}

TEST_CASE("locally constant specs are constant on cylinders") {
  const SftSystem sys = SftSystem::golden_mean();
  Matrix m0(2, 2), m1(2, 2), m2(2, 2);
  m0 << 1.0, 0.5, 0.0, 1.0;
  m1 << 2.0, 0.0, 1.0, 1.0;
  m2 << 0.5, 0.0, 0.0, 2.0;
  int idx = 0;
  const CocycleSpec spec = CocycleSpec::locally_constant_from(
      sys, 1,
      [&](const Word&) {
        const Matrix pick = (idx % 3 == 0) ? m0 : (idx % 3 == 1 ? m1 : m2);
        ++idx;
        return pick;
      },
      kEuclid2, true);
  Rng rng(34);
  for (int trial = 0; trial < 50; ++trial) {
    const Point x = random_point(sys, rng);
    const Point y = random_point(sys, rng);
    if (x.window(-1, 1) == y.window(-1, 1)) {
      CHECK(spec.evaluate(x) == spec.evaluate(y));
    }
  }
  // Force a shared window.
  const Point a = Point::make(sys, {0}, {1, 0, 1}, {0}, 1);
  const Point b = Point::make(sys, {1, 0}, {1, 0, 1}, {0, 0, 1}, 1);
  REQUIRE(a.window(-1, 1) == b.window(-1, 1));
  CHECK(spec.evaluate(a) == spec.evaluate(b));
}

TEST_CASE("scaled product matches the raw product") {
  const SftSystem sys = SftSystem::full_shift(2);
  const CocycleSpec conj = testutil::hyperbolic_family(sys);
  Rng rng(35);
  for (int trial = 0; trial < 20; ++trial) {
    const Point x = random_point(sys, rng);
    const int n = rng.uniform_int(0, 20);
    const Matrix raw = product(conj, x, n);
    const auto sp = scaled_product<double>(conj, x, n);
    const Matrix rebuilt = std::exp(sp.log_scale) * sp.matrix;
    CHECK((raw - rebuilt).norm() <= 1e-10 * std::max(1.0, raw.norm()));
  }
}

TEST_CASE("restricted inverse on a diagonal cocycle") {
  const SftSystem sys = SftSystem::full_shift(2);
  Matrix a0(2, 2);
  a0 << 2.0, 0.0, 0.0, 0.5;
  const CocycleSpec spec = constant_spec(sys, a0);
  const Point x = Point::periodic(sys, {0});

  const Subspace e1 = Subspace::coordinate_span(2, 1);
  const auto inv = restricted_inverse(spec, x, 3, e1);
  // Action on span(e_1) is multiplication by 1/8.
  Vector u(2);
  u << 1.0, 0.0;
  CHECK(inv.log_image_norm(u) == Catch::Approx(std::log(1.0 / 8.0)).epsilon(1e-12));
  CHECK(inv.log_operator_norm() == Catch::Approx(std::log(1.0 / 8.0)).epsilon(1e-12));

  // n = 0 is the identity on E.
  const auto id = restricted_inverse(spec, x, 0, e1);
  CHECK(id.log_operator_norm() == Catch::Approx(0.0).margin(1e-14));
}

TEST_CASE("restricted inverse inverts the forward map on E") {
  const SftSystem sys = SftSystem::full_shift(2);
  const CocycleSpec conj = testutil::hyperbolic_family(sys);
  const auto ptab = testutil::p_table_2d();
  Rng rng(36);
  for (int trial = 0; trial < 20; ++trial) {
    const Point x = random_point(sys, rng);
    const int n = rng.uniform_int(1, 12);
    // Exact fast bundle E(x) = P(x) span(e_1).
    const Matrix px = ptab.at(Word{x.symbol(0)});
    const Subspace e = Subspace::from_columns(px.col(0));
    const auto inv = restricted_inverse(conj, x, n, e);
    // Forward map applied to the preimage recovers the basis.
    const Matrix fwd = product(conj, shift(x, -n), n);
    const Matrix recovered = fwd * (std::exp(inv.log_scale) * inv.preimage);
    CHECK((recovered - e.basis).cwiseAbs().maxCoeff() <= 1e-8);
    // Norm behaves like e^{-n} up to the conditioning of P.
    const double slack = 2.0 * std::log(10.0);
    CHECK(inv.log_operator_norm() <= -static_cast<double>(n) + slack);
    CHECK(inv.log_operator_norm() >= -static_cast<double>(n) - slack);
  }
}

TEST_CASE("restricted inverse error paths") {
  const SftSystem sys = SftSystem::full_shift(2);
  Matrix a0(2, 2);
  a0 << 2.0, 0.0, 0.0, 0.5;
  const CocycleSpec spec = constant_spec(sys, a0);
  const Point x = Point::periodic(sys, {0});
  const Subspace e1 = Subspace::coordinate_span(2, 1);
  CHECK_THROWS_AS(restricted_inverse(spec, x, -1, e1), DomainError);

  // A subspace far outside the numerical range of a rank-deficient product.
  Vector w(3);
  w << 1.0, 0.5, 0.25;
  Vector weights = w.head(2);
  const CocycleSpec shift_spec =
      CocycleSpec::galerkin_weighted_shift(sys, 3, weights, {1.0, 1.0}, kEuclid2);
  const Subspace e3 = Subspace::from_columns(Vector::Unit(3, 2));
  CHECK_THROWS_AS(restricted_inverse(shift_spec, x, 2, e3), Error);
}

TEST_CASE("holder estimate flags") {
  const SftSystem sys = SftSystem::full_shift(2);
  Matrix a0(2, 2);
  a0 << 2.0, 0.0, 0.0, 0.5;
  const CocycleSpec constant = constant_spec(sys, a0);
  const auto h0 = holder_estimate(constant, sys, 200, 99);
  CHECK(h0.degenerate);

  // Radius-2 table: differences vanish exactly below e^{-3}.
  Rng seed_rng(40);
  const CocycleSpec lc = CocycleSpec::locally_constant_from(
      sys, 2,
      [&](const Word& w) {
        Matrix m(2, 2);
        m << 1.0 + 0.1 * w[0], 0.2 * w[1], 0.1 * w[3], 1.0 + 0.1 * w[4];
        return m;
      },
      kEuclid2, false);
  const auto h1 = holder_estimate(lc, sys, 400, 100);
  CHECK(h1.locally_constant);
  CHECK(std::isinf(h1.alpha_hat));
  CHECK(h1.positive_pairs > 0);
  // The reported constant satisfies the bound with alpha = 1 on fresh pairs.
  Rng rng(101);
  for (int i = 0; i < 200; ++i) {
    const Point x = random_point(sys, rng);
    const Point y = random_point(sys, rng);
    const double d = point_distance(x, y);
    if (d <= 0) continue;
    CHECK(kEuclid2.operator_norm(lc.evaluate(x) - lc.evaluate(y)) <= h1.c_hat * d * (1 + 1e-12));
  }

  const auto h2 = holder_estimate(testutil::hyperbolic_family(sys), sys, 400, 102);
  CHECK(h2.locally_constant);
}

TEST_CASE("gelfand profile invariants") {
  const SftSystem sys = SftSystem::full_shift(2);
  const CocycleSpec conj = testutil::hyperbolic_family(sys);
  Rng rng(41);
  const Point x = random_point(sys, rng);
  const auto prof = gelfand_profile(conj, x, 2, 30);
  for (int n = 1; n <= 30; ++n) {
    CHECK(prof.log_c_at(1, n) >= prof.log_c_at(2, n));
    // c_1 row equals the operator norm of the product.
    const auto sp = scaled_product<double>(conj, x, n);
    const double log_norm = sp.log_scale + std::log(singular_values(sp.matrix)(0));
    CHECK(prof.log_c_at(1, n) == Catch::Approx(log_norm).margin(1e-9));
    // Volume rows accumulate the Gelfand rows.
    CHECK(prof.log_v_at(2, n) ==
          Catch::Approx(prof.log_c_at(1, n) + prof.log_c_at(2, n)).margin(1e-9));
  }
}
