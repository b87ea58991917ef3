#pragma once

// The domination engine: gap-ratio profiles
//   log max{c_{k+1}(A^n(x)), c_{k+1}(A^n(f x))} - log c_k(A^{n+1}(x)),
// least-squares fitting of (C, tau) on the upper envelope over samples,
// splitting reconstruction from finite-time singular subspaces, direct
// verification of the domination inequality and the classification into
// dominated / uniformly hyperbolic / partially hyperbolic.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dsplit/cocycle.hpp"
#include "dsplit/periodic_data.hpp"
#include "dsplit/subspace.hpp"

namespace dsplit {

struct GapProfile {
  std::string sample_key;
  int k = 0;
  int n_max = 0;
  std::vector<double> log_ratio;       // staggered horizon: c_k taken at n+1
  std::vector<double> log_ratio_flat;  // same-horizon variant, diagnostics only

  double at(int n) const { return log_ratio[static_cast<std::size_t>(n - 1)]; }
};

// Profile of the gap criterion along one sample point; log scale throughout.
inline GapProfile gap_profile(const CocycleSpec& spec, const Point& x, int k, int n_max) {
  if (k < 1 || k >= spec.dimension()) throw DomainError("gap_profile: need 1 <= k < dimension");
  if (n_max < 1) throw DomainError("gap_profile: n_max must be >= 1");
  GapProfile gp;
  gp.sample_key = x.key();
  gp.k = k;
  gp.n_max = n_max;
  const auto prof_x = gelfand_profile(spec, x, k + 1, n_max + 1);
  const auto prof_fx = gelfand_profile(spec, shift(x, 1), k + 1, n_max);
  for (int n = 1; n <= n_max; ++n) {
    const double num = std::max(prof_x.log_c_at(k + 1, n), prof_fx.log_c_at(k + 1, n));
    const double den = prof_x.log_c_at(k, n + 1);
    if (!std::isfinite(den))
      throw NumericError("certifier", "c_k(A^{n+1}(x)) vanished at n=" + std::to_string(n) +
                                          "; the cocycle is not injective along " + x.key());
    gp.log_ratio.push_back(num - den);
    gp.log_ratio_flat.push_back(num - prof_x.log_c_at(k, n));
  }
  return gp;
}

enum class Verdict { Certified, Rejected, Inconclusive };

inline std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Certified: return "certified";
    case Verdict::Rejected: return "rejected";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

struct Witness {
  std::string sample_key;
  int n = 0;
  double log_ratio = 0.0;
};

struct FitOptions {
  double tau_accept = 0.999;
  double slope_reject = 0.0;
  double res_accept = 1.0;  // log scale
};

struct DominationCertificate {
  int index = 0;
  int n_min = 0;
  int n_max = 0;
  int profile_count = 0;
  double c_fit = 0.0;
  double tau_fit = 0.0;
  double slope = 0.0;
  double residual = 0.0;  // max envelope deviation from the fit, log scale
  Verdict verdict = Verdict::Inconclusive;
  std::vector<Witness> witnesses;  // worst offenders, meaningful on rejection
  // Same-horizon variant (c_k at n instead of n+1), reported for comparison.
  double c_fit_flat = 0.0;
  double tau_fit_flat = 0.0;
  double residual_flat = 0.0;
  FitOptions options;
};

namespace detail {

struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double residual = 0.0;
};

inline LineFit fit_line(const std::vector<std::pair<double, double>>& pts) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(pts.size());
  LineFit f;
  const double denom = m * sxx - sx * sx;
  if (denom == 0.0) {
    f.intercept = sy / m;
    f.slope = 0.0;
  } else {
    f.slope = (m * sxy - sx * sy) / denom;
    f.intercept = (sy - f.slope * sx) / m;
  }
  for (auto [x, y] : pts) f.residual = std::max(f.residual, std::abs(y - (f.intercept + f.slope * x)));
  return f;
}

}  // namespace detail

// Fits log C + n log tau to the pointwise-max envelope of the profiles over
// [n_min, n_max]. Certified iff tau_fit <= tau_accept and the residual stays
// under res_accept; rejected iff the envelope slope reaches slope_reject.
inline DominationCertificate fit_certificate(const std::vector<GapProfile>& profiles, int n_min,
                                             int n_max, FitOptions options = {}) {
  if (profiles.empty()) throw DomainError("fit_certificate: no profiles");
  if (n_min < 1 || n_max <= n_min) throw DomainError("fit_certificate: bad n range");
  for (const auto& p : profiles) {
    if (p.n_max < n_max) throw DomainError("fit_certificate: profile does not cover n_max");
    if (p.k != profiles.front().k) throw DomainError("fit_certificate: mixed indices");
  }

  DominationCertificate cert;
  cert.index = profiles.front().k;
  cert.n_min = n_min;
  cert.n_max = n_max;
  cert.profile_count = static_cast<int>(profiles.size());
  cert.options = options;

  std::vector<std::pair<double, double>> env, env_flat;
  for (int n = n_min; n <= n_max; ++n) {
    double best = kNegInf, best_flat = kNegInf;
    for (const auto& p : profiles) {
      best = std::max(best, p.at(n));
      best_flat = std::max(best_flat, p.log_ratio_flat[static_cast<std::size_t>(n - 1)]);
    }
    env.emplace_back(static_cast<double>(n), best);
    env_flat.emplace_back(static_cast<double>(n), best_flat);
  }

  const auto fit = detail::fit_line(env);
  cert.slope = fit.slope;
  cert.tau_fit = std::exp(fit.slope);
  cert.c_fit = std::exp(fit.intercept);
  cert.residual = fit.residual;

  const auto fit_flat = detail::fit_line(env_flat);
  cert.tau_fit_flat = std::exp(fit_flat.slope);
  cert.c_fit_flat = std::exp(fit_flat.intercept);
  cert.residual_flat = fit_flat.residual;

  if (fit.slope >= options.slope_reject) {
    cert.verdict = Verdict::Rejected;
  } else if (cert.tau_fit <= options.tau_accept && cert.residual <= options.res_accept) {
    cert.verdict = Verdict::Certified;
  } else {
    cert.verdict = Verdict::Inconclusive;
  }

  // Worst offenders: per profile the largest ratio over the window (last n
  // among ties, to reflect tail behaviour), globally sorted by value.
  for (const auto& p : profiles) {
    Witness w;
    w.sample_key = p.sample_key;
    w.log_ratio = kNegInf;
    for (int n = n_min; n <= n_max; ++n) {
      if (p.at(n) >= w.log_ratio) {
        w.log_ratio = p.at(n);
        w.n = n;
      }
    }
    cert.witnesses.push_back(w);
  }
  std::stable_sort(cert.witnesses.begin(), cert.witnesses.end(),
                   [](const Witness& a, const Witness& b) { return a.log_ratio > b.log_ratio; });
  if (cert.witnesses.size() > 8) cert.witnesses.resize(8);
  return cert;
}

struct SplittingSample {
  std::string sample_key;
  std::optional<Point> point;  // the base point the sample was reconstructed at
  int k = 0;
  int depth = 0;  // reconstruction horizon n
  Subspace e;     // top-k left singular subspace of A^n(f^{-n} x)
  Subspace f;     // bottom-(d-k) right singular subspace of A^n(x)
  double f_complement_angle = 0.0;  // minimal principal angle between E and F
  double convergence_gap = 0.0;     // principal-angle distance to the n+1 reconstruction
  double spectral_gap_rel = 0.0;    // relative sigma_k - sigma_{k+1} gap, min of both products
};

// Finite-time realization of the splitting at one point.
inline SplittingSample reconstruct_splitting(const CocycleSpec& spec, const Point& x, int k,
                                             int n) {
  if (spec.norm().kind != NormKind::Euclidean)
    throw DomainError("reconstruct_splitting: Euclidean norm context required");
  if (!spec.injective()) throw DomainError("reconstruct_splitting: spec must be injective");
  if (k < 1 || k >= spec.dimension())
    throw DomainError("reconstruct_splitting: need 1 <= k < dimension");
  if (n < 1) throw DomainError("reconstruct_splitting: n must be >= 1");
  const int d = spec.dimension();

  auto subspaces_at = [&](int depth) {
    const auto back = scaled_product<double>(spec, shift(x, -depth), depth);
    Eigen::JacobiSVD<Matrix> svd_b(back.matrix, Eigen::ComputeFullU);
    const auto fwd = scaled_product<double>(spec, x, depth);
    Eigen::JacobiSVD<Matrix> svd_f(fwd.matrix, Eigen::ComputeFullV);
    const Vector sb = svd_b.singularValues();
    const Vector sf = svd_f.singularValues();
    const double gap_b = (sb(k - 1) - sb(k)) / sb(0);
    const double gap_f = (sf(k - 1) - sf(k)) / sf(0);
    Subspace e;
    e.basis = svd_b.matrixU().leftCols(k);
    Subspace f;
    f.basis = svd_f.matrixV().rightCols(d - k);
    return std::tuple<Subspace, Subspace, double>(e, f, std::min(gap_b, gap_f));
  };

  auto [e_n, f_n, gap_n] = subspaces_at(n);
  if (gap_n < 1e-10)
    throw NumericError("certifier", "ill-conditioned subspace extraction: spectral gap " +
                                        format_sig(gap_n) + " at depth " + std::to_string(n));
  auto [e_n1, f_n1, gap_n1] = subspaces_at(n + 1);

  SplittingSample s;
  s.sample_key = x.key();
  s.point = x;
  s.k = k;
  s.depth = n;
  s.e = e_n;
  s.f = f_n;
  s.spectral_gap_rel = gap_n;
  s.f_complement_angle = min_principal_angle(e_n, f_n);
  s.convergence_gap =
      std::max(principal_angle_distance(e_n, e_n1), principal_angle_distance(f_n, f_n1));
  return s;
}

// log ||A^n(x) w|| for every column w of vecs and every n = 1..n_max.
// Returned matrix is (cols x n_max).
inline Matrix log_image_norms(const CocycleSpec& spec, const Point& x, const Matrix& vecs,
                              int n_max) {
  Matrix out(vecs.cols(), n_max);
  Matrix acc = Matrix::Identity(spec.dimension(), spec.dimension());
  double log_scale = 0.0;
  Point cursor = x;
  for (int n = 1; n <= n_max; ++n) {
    acc = spec.evaluate(cursor) * acc;
    const double s = acc.colwise().norm().maxCoeff();
    if (s > 0) {
      acc /= s;
      log_scale += std::log(s);
    }
    cursor = shift(cursor, 1);
    for (int c = 0; c < vecs.cols(); ++c)
      out(c, n - 1) = std::log((acc * vecs.col(c)).norm()) + log_scale;
  }
  return out;
}

struct DominationVerification {
  double c = 0.0;
  double tau = 0.0;
  double slack = 2.0;
  int n_check = 0;
  int pairs_per_sample = 0;
  int sample_count = 0;
  double pass_rate = 0.0;     // fraction of (sample, pair) passing at every n
  double worst_margin = 0.0;  // min over checks of rhs - lhs in log scale
  double worst_equivariance_e = 0.0;  // principal-angle defect of A(x)E(x) vs E(f x)
  double worst_equivariance_f = 0.0;  // containment defect of A(x)F(x) in F(f x)
};

// Checks |A^n(x) v| <= slack * C tau^n |A^n(x) u| on random unit pairs
// u in E(x), v in F(x), n = 1..n_check, plus one-step equivariance of the
// reconstructed bundles.
inline DominationVerification verify_domination(const CocycleSpec& spec,
                                                const std::vector<SplittingSample>& samples,
                                                double c, double tau, int n_check,
                                                int pairs_per_sample, std::uint64_t seed,
                                                double slack = 2.0) {
  if (samples.empty()) throw DomainError("verify_domination: no samples");
  if (n_check < 1) throw DomainError("verify_domination: n_check must be >= 1");
  if (pairs_per_sample < 1) throw DomainError("verify_domination: need at least one pair");
  if (!(c > 0.0) || !(tau > 0.0)) throw DomainError("verify_domination: need positive C, tau");

  DominationVerification rep;
  rep.c = c;
  rep.tau = tau;
  rep.slack = slack;
  rep.n_check = n_check;
  rep.pairs_per_sample = pairs_per_sample;
  rep.sample_count = static_cast<int>(samples.size());
  rep.worst_margin = std::numeric_limits<double>::infinity();
  const double log_slack_c = std::log(slack * c);
  const double log_tau = std::log(tau);

  int pass = 0, total = 0;
  Rng base(seed);
  for (std::size_t si = 0; si < samples.size(); ++si) {
    const SplittingSample& s = samples[si];
    if (!s.point) throw DomainError("verify_domination: sample without a base point");
    Rng rng = base.fork(si);
    const int k = s.e.dim();
    const int dc = s.f.dim();
    Matrix dirs(s.e.ambient_dim(), 2 * pairs_per_sample);
    for (int p = 0; p < pairs_per_sample; ++p) {
      Vector zu(k), zv(dc);
      for (int i = 0; i < k; ++i) zu(i) = rng.normal();
      for (int i = 0; i < dc; ++i) zv(i) = rng.normal();
      Vector u = s.e.basis * zu;
      Vector v = s.f.basis * zv;
      u /= u.norm();
      v /= v.norm();
      dirs.col(2 * p) = u;
      dirs.col(2 * p + 1) = v;
    }
    const Point& x = *s.point;
    const Matrix norms = log_image_norms(spec, x, dirs, n_check);
    for (int p = 0; p < pairs_per_sample; ++p) {
      bool ok = true;
      for (int n = 1; n <= n_check; ++n) {
        const double lhs = norms(2 * p + 1, n - 1);
        const double rhs = log_slack_c + n * log_tau + norms(2 * p, n - 1);
        const double margin = rhs - lhs;
        rep.worst_margin = std::min(rep.worst_margin, margin);
        ok = ok && margin >= 0.0;
      }
      pass += ok ? 1 : 0;
      ++total;
    }
    // Equivariance at one step: A(x)E(x) vs E(f x), A(x)F(x) inside F(f x).
    const Matrix a = spec.evaluate(x);
    const auto next = reconstruct_splitting(spec, shift(x, 1), s.k, s.depth);
    const Subspace ae = Subspace::from_columns(a * s.e.basis);
    const Subspace af = Subspace::from_columns(a * s.f.basis);
    rep.worst_equivariance_e =
        std::max(rep.worst_equivariance_e, principal_angle_distance(ae, next.e));
    rep.worst_equivariance_f =
        std::max(rep.worst_equivariance_f, principal_angle_distance(af, next.f));
  }
  rep.pass_rate = total > 0 ? static_cast<double>(pass) / total : 0.0;
  return rep;
}

enum class HyperbolicityClass { None, Dominated, UniformlyHyperbolic, PartiallyHyperbolic };

inline std::string hyperbolicity_name(HyperbolicityClass c) {
  switch (c) {
    case HyperbolicityClass::None: return "none";
    case HyperbolicityClass::Dominated: return "dominated";
    case HyperbolicityClass::UniformlyHyperbolic: return "uniformly_hyperbolic";
    case HyperbolicityClass::PartiallyHyperbolic: return "partially_hyperbolic";
  }
  return "?";
}

struct ClassifyOptions {
  double gap_min = 0.1;    // exponent gaps above this demand a certificate
  double zero_tol = 0.05;  // |lambda_hat| below this counts as a zero exponent
  double eps = 0.05;       // rate slack in the exponential estimates
  double slack = 2.0;      // multiplicative slack on the calibrated constants
  int n_check = 40;
  int recon_depth = 60;
  int calib_period_max = 5;  // calibration points: periodic orbits up to here
  int verify_samples = 50;   // fresh random points for the verification pass
  int pairs_per_sample = 4;
  double h_growth_tol = 0.05;  // per-step growth tolerance on the center bundle
  int h_horizon = 100;
  std::uint64_t seed = 1;
  int threads = 1;
};

// One exponential envelope check: the constant is calibrated on periodic
// points, then the inequality (with multiplicative slack) is verified on
// fresh samples.
struct ExponentialEstimate {
  double tau = 0.0;
  double c_calibrated = 0.0;
  double slack = 2.0;
  double pass_rate = 0.0;
  double worst_margin = 0.0;  // min of log rhs - log lhs over all checks
  int n_check = 0;
  int sample_count = 0;
};

struct UniformHyperbolicityReport {
  int k = 0;
  ExponentialEstimate contraction;  // |A^n(x) v| <= C tau^n on F(x)
  ExponentialEstimate expansion;    // |A^{-n}(x) u| <= C tau^n on E(x)
};

struct CenterGrowthReport {
  int k1 = 0;
  int k2 = 0;
  double worst_rate = 0.0;      // max |(1/n) log |A^n(x) h|| over samples
  double min_alignment = 1.0;   // worst principal cosine of the intersection
  int horizon = 0;
  int sample_count = 0;
  bool within_tolerance = false;
};

struct Classification {
  HyperbolicityClass kind = HyperbolicityClass::None;
  std::vector<int> dominated_indices;
  int uh_index = 0;
  std::pair<int, int> ph_indices{0, 0};
  Vector lambda_hat;
  std::optional<UniformHyperbolicityReport> uh;
  std::optional<CenterGrowthReport> center;
  std::optional<ExponentialEstimate> ph_contraction;
  std::optional<ExponentialEstimate> ph_expansion;
};

namespace detail {

inline std::vector<Point> calibration_points(const SftSystem& sys, int period_max) {
  std::vector<Point> pts;
  for (int n = 1; n <= period_max; ++n)
    for (const auto& orbit : enumerate_periodic(sys, n)) pts.push_back(orbit.point(sys));
  return pts;
}

// max over points, pairs, n of log|A^n(x) v| - n log tau with v unit in the
// F bundle of the splitting at index k (contraction calibration), or the
// restricted-inverse analogue on E (expansion calibration).
struct EnvelopeChecker {
  const CocycleSpec& spec;
  int k;
  int recon_depth;
  int n_check;
  int pairs;
  double log_tau;
  bool expansion;  // false: forward on F; true: restricted inverse on E

  double max_intercept(const std::vector<Point>& pts, std::uint64_t seed) const {
    double best = 0.0;  // C >= 1 always (n = 0 gives equality at unit vectors)
    Rng base(seed);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      Rng rng = base.fork(i);
      best = std::max(best, point_max(pts[i], rng, nullptr, 0.0));
    }
    return best;
  }

  // Returns the max intercept; when `margins` is set, also records the worst
  // slack margin against log_bound + n log tau and the pass/fail per pair.
  double point_max(const Point& x, Rng& rng, std::vector<std::pair<double, bool>>* margins,
                   double log_bound) const {
    const auto split = reconstruct_splitting(spec, x, k, recon_depth);
    const Subspace& bundle = expansion ? split.e : split.f;
    Matrix dirs(bundle.ambient_dim(), pairs);
    for (int p = 0; p < pairs; ++p) {
      Vector z(bundle.dim());
      for (int i = 0; i < z.size(); ++i) z(i) = rng.normal();
      Vector v = bundle.basis * z;
      dirs.col(p) = v / v.norm();
    }
    double best = 0.0;
    std::vector<double> worst_per_pair(static_cast<std::size_t>(pairs),
                                       std::numeric_limits<double>::infinity());
    if (!expansion) {
      const Matrix norms = log_image_norms(spec, x, dirs, n_check);
      for (int p = 0; p < pairs; ++p) {
        for (int n = 1; n <= n_check; ++n) {
          const double centered = norms(p, n - 1) - n * log_tau;
          best = std::max(best, centered);
          worst_per_pair[static_cast<std::size_t>(p)] =
              std::min(worst_per_pair[static_cast<std::size_t>(p)], log_bound - centered);
        }
      }
    } else {
      for (int n = 1; n <= n_check; ++n) {
        const auto inv = restricted_inverse(spec, x, n, bundle);
        for (int p = 0; p < pairs; ++p) {
          const double centered = inv.log_image_norm(dirs.col(p)) - n * log_tau;
          best = std::max(best, centered);
          worst_per_pair[static_cast<std::size_t>(p)] =
              std::min(worst_per_pair[static_cast<std::size_t>(p)], log_bound - centered);
        }
      }
    }
    if (margins) {
      for (int p = 0; p < pairs; ++p) {
        const double m = worst_per_pair[static_cast<std::size_t>(p)];
        margins->emplace_back(m, m >= 0.0);
      }
    }
    return best;
  }
};

inline ExponentialEstimate run_exponential_check(const CocycleSpec& spec, const SftSystem& sys,
                                                 int k, double tau, bool expansion,
                                                 const ClassifyOptions& opts) {
  EnvelopeChecker checker{spec,           k,
                          opts.recon_depth, opts.n_check,
                          opts.pairs_per_sample, std::log(tau),
                          expansion};
  const auto calib = calibration_points(sys, opts.calib_period_max);
  const double c_cal = std::exp(checker.max_intercept(calib, opts.seed ^ 0xca11b8u));

  ExponentialEstimate est;
  est.tau = tau;
  est.c_calibrated = c_cal;
  est.slack = opts.slack;
  est.n_check = opts.n_check;
  est.sample_count = opts.verify_samples;
  est.worst_margin = std::numeric_limits<double>::infinity();

  Rng rng(opts.seed ^ 0xf4e5a);
  std::vector<std::pair<double, bool>> margins;
  for (int s = 0; s < opts.verify_samples; ++s) {
    const Point x = random_point(sys, rng);
    Rng pair_rng = rng.fork(static_cast<std::uint64_t>(s));
    checker.point_max(x, pair_rng, &margins, std::log(opts.slack * c_cal));
  }
  int pass = 0;
  for (auto [m, ok] : margins) {
    est.worst_margin = std::min(est.worst_margin, m);
    pass += ok ? 1 : 0;
  }
  est.pass_rate = margins.empty() ? 0.0 : static_cast<double>(pass) / margins.size();
  return est;
}

}  // namespace detail

// Classifies the cocycle from the scanned periodic data and the fitted
// certificates. Precondition: the narrowness report covers the full exponent
// range (scan with k = dimension - 1) and a certificate exists for every
// index whose exponent gap exceeds gap_min.
inline Classification classify(const CocycleSpec& spec, const SftSystem& sys,
                               const NarrownessReport& narrowness,
                               const std::vector<DominationCertificate>& certificates,
                               ClassifyOptions opts = {}) {
  if (!spec.injective()) throw DomainError("classify: spec must be injective");
  const int d = spec.dimension();
  if (narrowness.levels != d)
    throw DomainError("classify: narrowness report must cover the full exponent range");

  std::map<int, DominationCertificate> by_index;
  for (const auto& cert : certificates) {
    const auto it = by_index.find(cert.index);
    if (it != by_index.end()) {
      if (it->second.verdict != cert.verdict)
        throw DiagnosticsConflict("classify: conflicting certificates at index " +
                                  std::to_string(cert.index));
      continue;
    }
    by_index.emplace(cert.index, cert);
  }

  const Vector& lam = narrowness.lambda_hat;
  for (int k = 1; k < d; ++k) {
    if (lam(k - 1) - lam(k) > opts.gap_min && by_index.find(k) == by_index.end())
      throw DomainError("classify: missing certificate for gap index " + std::to_string(k));
  }

  Classification cls;
  cls.lambda_hat = lam;
  for (const auto& [k, cert] : by_index)
    if (cert.verdict == Verdict::Certified) cls.dominated_indices.push_back(k);

  auto certified = [&](int k) {
    const auto it = by_index.find(k);
    return it != by_index.end() && it->second.verdict == Verdict::Certified;
  };

  // Uniform hyperbolicity: a certified index separating positive from
  // negative exponents.
  int uh_k = 0;
  double uh_gap = 0.0;
  for (int k : cls.dominated_indices) {
    if (lam(k - 1) > opts.zero_tol && lam(k) < -opts.zero_tol) {
      const double gap = lam(k - 1) - lam(k);
      if (gap > uh_gap) {
        uh_gap = gap;
        uh_k = k;
      }
    }
  }
  if (uh_k > 0) {
    cls.kind = HyperbolicityClass::UniformlyHyperbolic;
    cls.uh_index = uh_k;
    UniformHyperbolicityReport rep;
    rep.k = uh_k;
    rep.contraction = detail::run_exponential_check(
        spec, sys, uh_k, std::exp(lam(uh_k) + opts.eps), /*expansion=*/false, opts);
    rep.expansion = detail::run_exponential_check(
        spec, sys, uh_k, std::exp(-lam(uh_k - 1) + opts.eps), /*expansion=*/true, opts);
    cls.uh = rep;
    return cls;
  }

  // Partial hyperbolicity: certified indices around a zero block,
  // lambda_{k1} > 0, lambda_{k1+1} = ... = lambda_{k2} = 0 > lambda_{k2+1}.
  int k1 = 0;
  for (int t = 1; t <= d; ++t)
    if (lam(t - 1) > opts.zero_tol) k1 = t;
  int k2 = 0;
  for (int i = 1; i <= d; ++i)
    if (std::abs(lam(i - 1)) <= opts.zero_tol) k2 = i;
  bool center_is_zero = k1 > 0 && k2 > k1 && k2 < d && lam(k2) < -opts.zero_tol;
  for (int i = k1 + 1; center_is_zero && i <= k2; ++i)
    center_is_zero = std::abs(lam(i - 1)) <= opts.zero_tol;
  if (center_is_zero && certified(k1) && certified(k2)) {
    cls.kind = HyperbolicityClass::PartiallyHyperbolic;
    cls.ph_indices = {k1, k2};

    CenterGrowthReport center;
    center.k1 = k1;
    center.k2 = k2;
    center.horizon = opts.h_horizon;
    center.sample_count = opts.verify_samples;
    Rng rng(opts.seed ^ 0xce17e4u);
    for (int s = 0; s < opts.verify_samples; ++s) {
      const Point x = random_point(sys, rng);
      const auto wide = reconstruct_splitting(spec, x, k2, opts.recon_depth);
      const auto narrow = reconstruct_splitting(spec, x, k1, opts.recon_depth);
      const auto inter = intersect(wide.e, narrow.f, k2 - k1);
      center.min_alignment = std::min(center.min_alignment, inter.cosines.minCoeff());
      const Matrix norms = log_image_norms(spec, x, inter.space.basis, opts.h_horizon);
      for (int c = 0; c < norms.rows(); ++c)
        center.worst_rate =
            std::max(center.worst_rate, std::abs(norms(c, opts.h_horizon - 1) / opts.h_horizon));
    }
    center.within_tolerance =
        center.worst_rate <= opts.h_growth_tol && center.min_alignment >= 0.9;
    cls.center = center;
    cls.ph_contraction = detail::run_exponential_check(
        spec, sys, k2, std::exp(lam(k2) + opts.eps), /*expansion=*/false, opts);
    cls.ph_expansion = detail::run_exponential_check(
        spec, sys, k1, std::exp(-lam(k1 - 1) + opts.eps), /*expansion=*/true, opts);
    return cls;
  }

  cls.kind = cls.dominated_indices.empty() ? HyperbolicityClass::None
                                           : HyperbolicityClass::Dominated;
  return cls;
}

}  // namespace dsplit
