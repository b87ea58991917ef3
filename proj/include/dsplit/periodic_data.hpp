#pragma once

// Eigenvalue moduli of A^n(p) on periodic orbits, per-step exponents, and
// the constant / delta-narrow periodic-data scan.
//
// Moduli are computed from the rescaled product in extended precision and,
// for injective specs, rebalanced against the exact log-determinant (the
// product of the step determinants): the dominant eigenvalues carry tiny
// relative error, so the determinant identity pins down the smallest
// modulus far more accurately than the eigensolver alone.

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "dsplit/cocycle.hpp"

namespace dsplit {

struct PeriodicDatum {
  PeriodicOrbit orbit;
  Vector log_moduli;  // log |gamma_i(p)|, descending; -inf for zero eigenvalues
  Vector exponents;   // log_moduli / period, descending
  double det_residual = 0.0;  // determinant-identity defect before rebalancing
  bool conditioning_warning = false;

  // Raw moduli; may overflow to +inf for long periods, log_moduli is exact.
  Vector moduli() const {
    Vector m(log_moduli.size());
    for (int i = 0; i < m.size(); ++i) m(i) = std::exp(log_moduli(i));
    return m;
  }
};

// lambda_i(p) = log|gamma_i(p)| / n; -inf sentinels pass through.
inline Vector exponents_at(const PeriodicDatum& datum) {
  return datum.log_moduli / static_cast<double>(datum.orbit.period());
}

inline PeriodicDatum eigen_moduli(const CocycleSpec& spec, const SftSystem& sys,
                                  const PeriodicOrbit& orbit) {
  const int n = orbit.period();
  const int d = spec.dimension();
  if (n < 1) throw DomainError("eigen_moduli: empty orbit");
  const Point p = orbit.point(sys);

  const auto sp = scaled_product<long double>(spec, p, n);
  Eigen::EigenSolver<MatrixL> es(sp.matrix, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw NumericError("periodic_data",
                       "eigensolver did not converge on orbit " + word_to_string(orbit.word));

  std::vector<long double> logs(d);
  for (int i = 0; i < d; ++i) {
    const long double mod = std::abs(es.eigenvalues()(i));
    logs[static_cast<std::size_t>(i)] =
        mod > 0 ? std::log(mod) + sp.log_scale : -std::numeric_limits<long double>::infinity();
  }
  std::sort(logs.begin(), logs.end(), std::greater<long double>());

  PeriodicDatum out;
  out.orbit = orbit;

  if (spec.injective()) {
    // Exact log|det A^n(p)| accumulated step by step.
    long double log_det = 0;
    Point cursor = p;
    for (int j = 0; j < n; ++j) {
      const MatrixL a = spec.evaluate_as<long double>(cursor);
      log_det += std::log(std::abs(a.determinant()));
      cursor = shift(cursor, 1);
    }
    long double sum = 0;
    for (long double v : logs) sum += v;
    const long double residual = sum - log_det;
    out.det_residual = static_cast<double>(std::abs(residual));
    if (std::isfinite(static_cast<double>(residual)) && std::abs(residual) < 0.5L) {
      // Spread the defect over the group sharing the smallest modulus
      // (conjugate pairs have bit-identical moduli).
      std::size_t group_start = logs.size() - 1;
      while (group_start > 0 &&
             std::abs(logs[group_start - 1] - logs.back()) <= 1e-12L * (1 + std::abs(logs.back())))
        --group_start;
      const long double share = residual / static_cast<long double>(logs.size() - group_start);
      for (std::size_t i = group_start; i < logs.size(); ++i) logs[i] -= share;
      std::sort(logs.begin(), logs.end(), std::greater<long double>());
    } else {
      out.conditioning_warning = true;
    }
  }

  out.log_moduli = Vector(d);
  for (int i = 0; i < d; ++i) out.log_moduli(i) = static_cast<double>(logs[static_cast<std::size_t>(i)]);
  out.exponents = exponents_at(out);
  return out;
}

struct NarrownessOffender {
  Word word;
  int index = 0;        // 1-based exponent index
  double exponent = 0;  // lambda_index(p)
  double deviation = 0;  // |lambda_index(p) - lambda_hat_index|
};

struct NarrownessReport {
  int k = 0;
  int levels = 0;  // number of exponent levels scanned, min(k+1, d)
  Vector lambda_hat;   // spread midpoints per level
  Vector spread_low;   // min over orbits per level
  Vector spread_high;  // max over orbits per level
  double delta_hat = 0.0;
  double tol_const = 0.0;
  double gap = 0.0;  // lambda_hat_k - lambda_hat_{k+1} (0 when k+1 > d)
  bool constant_verdict = false;
  bool viable = false;  // gap > 2 * delta_hat
  bool advisory_only = false;
  int max_period = 0;
  int orbit_count = 0;
  int excluded_orbits = 0;
  std::vector<NarrownessOffender> worst_offenders;
};

// Scans every sigma^n-fixed word with n <= max_period, computes the top
// min(k+1, d) exponents per orbit and reports the midpoints lambda_hat_i,
// the half-spread delta_hat (the least delta certifying a delta-narrow band
// around lambda_hat over the scanned orbits), the constant-data verdict and
// the gap viability check.
inline NarrownessReport scan_narrowness(const CocycleSpec& spec, const SftSystem& sys, int k,
                                        int max_period, double tol_const = 1e-8,
                                        int threads = 1) {
  if (k < 1 || k > spec.dimension()) throw DomainError("scan_narrowness: k out of range");
  if (max_period < 1) throw DomainError("scan_narrowness: max_period must be >= 1");
  const int levels = std::min(k + 1, spec.dimension());

  std::vector<PeriodicOrbit> orbits;
  for (int n = 1; n <= max_period; ++n) {
    auto batch = enumerate_periodic(sys, n);
    orbits.insert(orbits.end(), batch.begin(), batch.end());
  }
  if (orbits.empty()) throw DomainError("scan_narrowness: no periodic orbits up to max_period");

  std::vector<Vector> exps(orbits.size());
  parallel_for(orbits.size(), threads, [&](std::size_t i) {
    exps[i] = eigen_moduli(spec, sys, orbits[i]).exponents.head(levels);
  });

  NarrownessReport rep;
  rep.k = k;
  rep.levels = levels;
  rep.tol_const = tol_const;
  rep.max_period = max_period;
  rep.advisory_only = !spec.injective();
  rep.lambda_hat = Vector::Zero(levels);
  rep.spread_low = Vector::Constant(levels, std::numeric_limits<double>::infinity());
  rep.spread_high = Vector::Constant(levels, -std::numeric_limits<double>::infinity());

  std::vector<char> included(orbits.size(), 1);
  for (std::size_t i = 0; i < orbits.size(); ++i) {
    for (int j = 0; j < levels; ++j) {
      if (!std::isfinite(exps[i](j))) {
        included[i] = 0;  // zero eigenvalue among the tracked levels
        break;
      }
    }
    if (!included[i]) {
      ++rep.excluded_orbits;
      continue;
    }
    ++rep.orbit_count;
    for (int j = 0; j < levels; ++j) {
      rep.spread_low(j) = std::min(rep.spread_low(j), exps[i](j));
      rep.spread_high(j) = std::max(rep.spread_high(j), exps[i](j));
    }
  }
  if (rep.orbit_count == 0)
    throw DomainError("scan_narrowness: every orbit was excluded (zero eigenvalues)");

  rep.delta_hat = 0.0;
  for (int j = 0; j < levels; ++j) {
    rep.lambda_hat(j) = 0.5 * (rep.spread_low(j) + rep.spread_high(j));
    rep.delta_hat = std::max(rep.delta_hat, 0.5 * (rep.spread_high(j) - rep.spread_low(j)));
  }
  rep.constant_verdict = rep.delta_hat <= tol_const;
  if (levels == k + 1) {
    rep.gap = rep.lambda_hat(k - 1) - rep.lambda_hat(k);
    rep.viable = rep.gap > 2.0 * rep.delta_hat;
  }

  // Worst offenders: largest deviation from the midpoints.
  std::vector<NarrownessOffender> all;
  for (std::size_t i = 0; i < orbits.size(); ++i) {
    if (!included[i]) continue;
    for (int j = 0; j < levels; ++j) {
      const double dev = std::abs(exps[i](j) - rep.lambda_hat(j));
      if (dev > 0.25 * rep.delta_hat) {
        all.push_back(NarrownessOffender{orbits[i].word, j + 1, exps[i](j), dev});
      }
    }
  }
  std::sort(all.begin(), all.end(), [](const NarrownessOffender& a, const NarrownessOffender& b) {
    if (a.deviation != b.deviation) return a.deviation > b.deviation;
    if (a.word != b.word) return a.word < b.word;
    return a.index < b.index;
  });
  if (all.size() > 5) all.resize(5);
  rep.worst_offenders = std::move(all);
  return rep;
}

}  // namespace dsplit
