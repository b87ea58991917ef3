#pragma once

// Shared helpers for the test suites: conditioned random matrices, family
// builders used across modules, and small brute-force oracles.

#include <Eigen/Dense>

#include <cmath>
#include <map>

#include "dsplit/cocycle.hpp"
#include "dsplit/sft.hpp"
#include "dsplit/snumbers.hpp"

namespace testutil {

using dsplit::Matrix;
using dsplit::NormContext;
using dsplit::NormKind;
using dsplit::Rng;
using dsplit::Vector;
using dsplit::Word;

// Uniform entries in [-1, 1], resampled until sigma_min >= floor so that
// determinant- and eigenvalue-based comparisons stay well conditioned.
inline Matrix random_matrix(Rng& rng, int d, double sigma_floor = 0.05) {
  for (;;) {
    Matrix m(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
    const Vector sv = dsplit::singular_values(m);
    if (sv(d - 1) >= sigma_floor) return m;
  }
}

// Brute-force c_2 for 2x2 under any norm: infimum over a fine angle grid of
// the exact restriction norm on lines.
inline double brute_force_c2(const Matrix& t, const NormContext& norm, int grid = 200000) {
  double best = std::numeric_limits<double>::infinity();
  for (int g = 0; g < grid; ++g) {
    const double theta = 3.14159265358979323846 * g / grid;
    Vector u(2);
    u << std::cos(theta), std::sin(theta);
    best = std::min(best, norm.vector_norm(t * u) / norm.vector_norm(u));
  }
  return best;
}

// diag(2, 1/2) / antidiag(2, 1/2) one-step family; periodic data is not
// constant (the 01-orbit has unit eigenvalue moduli), no dominated splitting.
inline dsplit::CocycleSpec swap_family(const dsplit::SftSystem& sys) {
  Matrix a0(2, 2), a1(2, 2);
  a0 << 2.0, 0.0, 0.0, 0.5;
  a1 << 0.0, 2.0, 0.5, 0.0;
  std::map<Word, Matrix> table;
  table[Word{0}] = a0;
  table[Word{1}] = a1;
  return dsplit::CocycleSpec::locally_constant(sys, 0, std::move(table),
                                               NormContext{NormKind::Euclidean, 2},
                                               /*injective=*/true);
}

// Well-conditioned 2x2 conjugations, cond(P) < 10.
inline std::map<Word, Matrix> p_table_2d() {
  Matrix p0(2, 2), p1(2, 2);
  p0 << 1.0, 0.25, -0.5, 1.0;
  p1 << 0.75, -0.5, 0.25, 1.25;
  std::map<Word, Matrix> t;
  t[Word{0}] = p0;
  t[Word{1}] = p1;
  return t;
}

// Hyperbolic conjugated-diagonal family: D = diag(e, e^{-1}).
inline dsplit::CocycleSpec hyperbolic_family(const dsplit::SftSystem& sys) {
  Vector d(2);
  d << std::exp(1.0), std::exp(-1.0);
  return dsplit::CocycleSpec::conjugated_diagonal(sys, d, 0, p_table_2d(),
                                                  NormContext{NormKind::Euclidean, 2});
}

inline std::map<Word, Matrix> p_table_3d() {
  Matrix p0(3, 3), p1(3, 3);
  p0 << 1.0, 0.2, -0.1,
        0.1, 1.0, 0.2,
       -0.2, 0.1, 1.0;
  p1 << 0.9, -0.3, 0.1,
        0.2, 1.1, -0.2,
        0.1, 0.2, 0.8;
  std::map<Word, Matrix> t;
  t[Word{0}] = p0;
  t[Word{1}] = p1;
  return t;
}

// Partially hyperbolic family: D = diag(e, 1, e^{-1}).
inline dsplit::CocycleSpec partial_family(const dsplit::SftSystem& sys) {
  Vector d(3);
  d << std::exp(1.0), 1.0, std::exp(-1.0);
  return dsplit::CocycleSpec::conjugated_diagonal(sys, d, 0, p_table_3d(),
                                                  NormContext{NormKind::Euclidean, 3});
}

}  // namespace testutil
