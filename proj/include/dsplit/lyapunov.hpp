#pragma once

// Finite-time volume-growth rates l_q, exceptional-exponent estimates
// zeta_q, the uniform-convergence diagnostic for Gelfand exponents and the
// semicontinuity probe along periodic-measure sequences.

#include <algorithm>
#include <cmath>
#include <vector>

#include "dsplit/cocycle.hpp"
#include "dsplit/periodic_data.hpp"

namespace dsplit {

// (1/n) log V_q(A^n(x)), computed from the rescaled product; exact in the
// Euclidean norm. -inf when the product has rank below q.
inline double finite_time_lq(const CocycleSpec& spec, const Point& x, int q, int n) {
  if (q < 1 || q > spec.dimension()) throw DomainError("finite_time_lq: q out of range");
  if (n < 1) throw DomainError("finite_time_lq: n must be >= 1");
  const auto sp = scaled_product<double>(spec, x, n);
  const Vector sv = singular_values(sp.matrix);
  double log_v = 0.0;
  for (int j = 0; j < q; ++j) log_v += std::log(sv(j));  // -inf on exact zeros
  log_v += q * sp.log_scale;
  return log_v / n;
}

struct LyapunovSpectrum {
  Vector l;     // averaged l_q, q = 1..q_max
  Vector zeta;  // zeta_1 = l_1, zeta_q = l_q - l_{q-1}
  std::vector<int> multiplicities;  // run lengths of zeta groups within tol_group
  double kappa = kNegInf;  // compact specialization
  double tol_group = 0.0;
  bool has_minus_inf = false;
  int horizon = 0;
  int sample_count = 0;
};

// Averages finite-time volume growth over sampled eventually-periodic points
// and differences the result. Multiplicities group zeta values closer than
// tol_group (default 0.02 * (zeta_1 - zeta_d + 1) over the finite range).
inline LyapunovSpectrum spectrum_estimate(const CocycleSpec& spec, const SftSystem& sys,
                                          int q_max, int n, int samples, std::uint64_t seed,
                                          double tol_group = -1.0, int threads = 1) {
  if (q_max < 1 || q_max > spec.dimension())
    throw DomainError("spectrum_estimate: q_max out of range");
  if (n < 1) throw DomainError("spectrum_estimate: n must be >= 1");
  if (samples < 1) throw DomainError("spectrum_estimate: samples must be >= 1");
  Rng rng(seed);
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(samples));
  for (int s = 0; s < samples; ++s) pts.push_back(random_point(sys, rng));

  std::vector<Vector> per_point(pts.size());
  parallel_for(pts.size(), threads, [&](std::size_t i) {
    Vector lq(q_max);
    const auto sp = scaled_product<double>(spec, pts[i], n);
    const Vector sv = singular_values(sp.matrix);
    double acc = 0.0;
    for (int q = 1; q <= q_max; ++q) {
      acc += std::log(sv(q - 1));
      lq(q - 1) = (acc + q * sp.log_scale) / n;
    }
    per_point[i] = lq;
  });

  LyapunovSpectrum out;
  out.horizon = n;
  out.sample_count = samples;
  out.l = Vector::Zero(q_max);
  for (const Vector& lq : per_point) out.l += lq;
  out.l /= static_cast<double>(pts.size());

  out.zeta = Vector(q_max);
  for (int q = 0; q < q_max; ++q) out.zeta(q) = q == 0 ? out.l(0) : out.l(q) - out.l(q - 1);
  for (int q = 0; q < q_max; ++q) out.has_minus_inf |= !std::isfinite(out.zeta(q));

  double zmax = kNegInf, zmin = std::numeric_limits<double>::infinity();
  for (int q = 0; q < q_max; ++q) {
    if (std::isfinite(out.zeta(q))) {
      zmax = std::max(zmax, out.zeta(q));
      zmin = std::min(zmin, out.zeta(q));
    }
  }
  out.tol_group = tol_group > 0 ? tol_group
                                : (std::isfinite(zmax) ? 0.02 * (zmax - zmin + 1.0) : 0.02);
  int run = 1;
  for (int q = 1; q <= q_max; ++q) {
    const bool same = q < q_max && std::isfinite(out.zeta(q)) && std::isfinite(out.zeta(q - 1)) &&
                      std::abs(out.zeta(q) - out.zeta(q - 1)) <= out.tol_group;
    if (same) {
      ++run;
    } else {
      out.multiplicities.push_back(run);
      run = 1;
    }
  }
  return out;
}

struct ConvergenceProfile {
  int k = 0;
  double lambda_ref = 0.0;   // lambda_hat_k from the narrowness scan
  std::vector<int> horizons;
  std::vector<double> e;     // e_n = max_x |(1/n) log c_k(A^n(x)) - lambda_ref|
  bool advisory = false;     // constant-data verdict did not hold
  int sample_count = 0;
};

// Empirical uniform-convergence profile of the k-th Gelfand exponent.
inline ConvergenceProfile uniform_convergence_profile(const CocycleSpec& spec,
                                                      const SftSystem& sys,
                                                      const NarrownessReport& narrowness,
                                                      int k, const std::vector<int>& n_list,
                                                      int sample_count, std::uint64_t seed,
                                                      int threads = 1) {
  if (k < 1 || k > spec.dimension())
    throw DomainError("uniform_convergence_profile: k out of range");
  if (narrowness.levels < k)
    throw DomainError("uniform_convergence_profile: narrowness report does not cover k");
  if (n_list.empty()) throw DomainError("uniform_convergence_profile: empty horizon list");
  if (sample_count < 1) throw DomainError("uniform_convergence_profile: need samples");

  ConvergenceProfile out;
  out.k = k;
  out.lambda_ref = narrowness.lambda_hat(k - 1);
  out.advisory = !narrowness.constant_verdict;
  out.sample_count = sample_count;
  out.horizons = n_list;

  Rng rng(seed);
  std::vector<Point> pts;
  for (int s = 0; s < sample_count; ++s) pts.push_back(random_point(sys, rng));

  const int n_top = *std::max_element(n_list.begin(), n_list.end());
  std::vector<std::vector<double>> per_point(pts.size());
  parallel_for(pts.size(), threads, [&](std::size_t i) {
    std::vector<double> vals;
    Matrix acc = Matrix::Identity(spec.dimension(), spec.dimension());
    double log_scale = 0.0;
    Point cursor = pts[i];
    std::size_t next = 0;
    std::vector<int> sorted_n = n_list;
    std::sort(sorted_n.begin(), sorted_n.end());
    for (int n = 1; n <= n_top && next < sorted_n.size(); ++n) {
      acc = spec.evaluate(cursor) * acc;
      const double s = acc.colwise().norm().maxCoeff();
      if (s > 0) {
        acc /= s;
        log_scale += std::log(s);
      }
      cursor = shift(cursor, 1);
      if (n == sorted_n[next]) {
        const double log_ck = std::log(singular_values(acc)(k - 1)) + log_scale;
        vals.push_back(std::abs(log_ck / n - out.lambda_ref));
        ++next;
      }
    }
    per_point[i] = vals;
  });

  std::vector<int> sorted_n = n_list;
  std::sort(sorted_n.begin(), sorted_n.end());
  std::vector<double> e_sorted(sorted_n.size(), 0.0);
  for (const auto& vals : per_point)
    for (std::size_t j = 0; j < vals.size(); ++j) e_sorted[j] = std::max(e_sorted[j], vals[j]);
  // Restore the caller's horizon order.
  out.e.resize(n_list.size());
  for (std::size_t j = 0; j < n_list.size(); ++j) {
    const auto it = std::lower_bound(sorted_n.begin(), sorted_n.end(), n_list[j]);
    out.e[j] = e_sorted[static_cast<std::size_t>(it - sorted_n.begin())];
  }
  return out;
}

// Rigorous envelope constant for conjugated-diagonal specs:
// |log c_k(A^n(x)) - n lambda_k| <= max_e log||P_e|| + max_e log||P_e^{-1}||.
inline double conjugation_envelope_constant(const CocycleSpec& spec) {
  if (spec.family() != CocycleFamily::ConjugatedDiagonal)
    throw DomainError("conjugation_envelope_constant: not a conjugated-diagonal spec");
  double max_log_p = 0.0, max_log_pinv = 0.0;
  for (const auto& [w, p] : spec.table()) {
    const Vector sv = singular_values(p);
    max_log_p = std::max(max_log_p, std::log(sv(0)));
    max_log_pinv = std::max(max_log_pinv, -std::log(sv(sv.size() - 1)));
  }
  return max_log_p + max_log_pinv;
}

struct SemicontinuityRow {
  int segment_length = 0;  // n handed to the closing construction
  int period = 0;          // n + connector length
  double l_periodic = 0.0;         // exact l_q of the periodic measure (eigenvalue route)
  double l_periodic_one_block = 0.0;  // (1/period) log V_q(A^{period}(p)), diagnostic
  double l_finite = 0.0;           // (1/n) log V_q(A^n(x))
  double gap = 0.0;                // l_periodic - reference value at the deepest horizon
};

struct SemicontinuityProbe {
  int q = 0;
  double reference = 0.0;  // finite-time l_q at x at the deepest horizon
  double limsup_gap = 0.0;  // max over the tail rows of (l_periodic - reference)
  std::vector<SemicontinuityRow> rows;
};

// Closes length-n segments of x into periodic orbits and compares their
// exact volume-growth rates against the finite-time value at x. Diagnostic
// only: the underlying inequality concerns true limits, so nothing here is
// asserted as a failure.
inline SemicontinuityProbe semicontinuity_probe(const CocycleSpec& spec, const SftSystem& sys,
                                                const Point& x, int q,
                                                const std::vector<int>& periods) {
  if (q < 1 || q > spec.dimension()) throw DomainError("semicontinuity_probe: q out of range");
  if (periods.empty()) throw DomainError("semicontinuity_probe: empty period list");
  SemicontinuityProbe out;
  out.q = q;
  const int deepest = *std::max_element(periods.begin(), periods.end());
  out.reference = finite_time_lq(spec, x, q, deepest);
  for (int n : periods) {
    if (n < 1) throw DomainError("semicontinuity_probe: periods must be positive");
    const auto closed = close_orbit(sys, x, n);
    const int m = closed.orbit.period();
    SemicontinuityRow row;
    row.segment_length = n;
    row.period = m;
    const auto datum = eigen_moduli(spec, sys, closed.orbit);
    double acc = 0.0;
    for (int i = 0; i < q; ++i) acc += datum.log_moduli(i);
    row.l_periodic = acc / m;
    row.l_periodic_one_block = finite_time_lq(spec, closed.orbit.point(sys), q, m);
    row.l_finite = finite_time_lq(spec, x, q, n);
    row.gap = row.l_periodic - out.reference;
    out.rows.push_back(row);
  }
  const std::size_t tail_start = out.rows.size() / 2;
  out.limsup_gap = kNegInf;
  for (std::size_t i = tail_start; i < out.rows.size(); ++i)
    out.limsup_gap = std::max(out.limsup_gap, out.rows[i].gap);
  return out;
}

}  // namespace dsplit
