#pragma once

// Norm contexts, Gelfand numbers c_k, maximal k-volume growth V_k and the
// measure-of-noncompactness convention for finite rank. Euclidean values are
// exact (eigen-decomposition of T^T T); the polyhedral norms L1/LInf come
// with sampled brackets instead of exact values.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "dsplit/common.hpp"

namespace dsplit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class NormKind { Euclidean, L1, LInf };

inline std::string norm_kind_name(NormKind k) {
  switch (k) {
    case NormKind::Euclidean: return "euclidean";
    case NormKind::L1: return "l1";
    case NormKind::LInf: return "linf";
  }
  return "?";
}

// A vector norm on R^d together with its induced operator norm. alpha and
// beta are the equivalence constants alpha*|v|_2 <= N(v) <= beta*|v|_2.
struct NormContext {
  NormKind kind = NormKind::Euclidean;
  int dimension = 0;

  double vector_norm(const Vector& v) const {
    switch (kind) {
      case NormKind::Euclidean: return v.norm();
      case NormKind::L1: return v.lpNorm<1>();
      case NormKind::LInf: return v.lpNorm<Eigen::Infinity>();
    }
    return 0.0;
  }

  double operator_norm(const Matrix& t) const {
    switch (kind) {
      case NormKind::Euclidean: {
        Eigen::JacobiSVD<Matrix> svd(t);
        return svd.singularValues()(0);
      }
      case NormKind::L1: return t.cwiseAbs().colwise().sum().maxCoeff();
      case NormKind::LInf: return t.cwiseAbs().rowwise().sum().maxCoeff();
    }
    return 0.0;
  }

  double alpha() const {
    switch (kind) {
      case NormKind::Euclidean: return 1.0;
      case NormKind::L1: return 1.0;
      case NormKind::LInf: return 1.0 / std::sqrt(static_cast<double>(dimension));
    }
    return 1.0;
  }

  double beta() const {
    switch (kind) {
      case NormKind::Euclidean: return 1.0;
      case NormKind::L1: return std::sqrt(static_cast<double>(dimension));
      case NormKind::LInf: return 1.0;
    }
    return 1.0;
  }
};

// Singular values of T, descending. Eigen-decomposition of T^T T with an
// explicit descending sort; negative round-off eigenvalues are clamped to 0.
inline Vector singular_values(const Matrix& t) {
  const Matrix gram = t.transpose() * t;
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
  if (es.info() != Eigen::Success)
    throw NumericError("snumbers", "eigensolver failed on T^T T");
  Vector ev = es.eigenvalues();  // ascending
  Vector out(ev.size());
  for (int i = 0; i < ev.size(); ++i) {
    const double e = ev(ev.size() - 1 - i);
    out(i) = e <= 0.0 ? 0.0 : std::sqrt(e);
  }
  return out;
}

namespace detail {

inline void check_k(const Matrix& t, int k) {
  if (t.rows() != t.cols()) throw DomainError("snumbers: matrix must be square");
  if (k < 1 || k > t.rows()) throw DomainError("snumbers: k out of range");
}

// Orthonormal basis of the column span.
inline Matrix orthonormalize(const Matrix& cols) {
  Eigen::HouseholderQR<Matrix> qr(cols);
  const Matrix q = qr.householderQ();
  return q.leftCols(cols.cols());
}

inline Matrix random_subspace(int d, int k, Rng& rng) {
  Matrix g(d, k);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < k; ++j) g(i, j) = rng.normal();
  return orthonormalize(g);
}

// Lebesgue volume of the k-dimensional Euclidean unit ball.
inline double euclidean_ball_volume(int k) {
  // omega_k = pi^{k/2} / Gamma(k/2 + 1)
  return std::pow(3.14159265358979323846, 0.5 * k) / std::tgamma(0.5 * k + 1.0);
}

// Monte-Carlo Lebesgue volume of {z in R^k : N(Q z) <= 1} by rejection
// sampling inside the enclosing Euclidean ball of radius 1/alpha.
inline double mc_norm_ball_volume(const Matrix& q, const NormContext& norm, int samples,
                                  Rng& rng) {
  const int k = static_cast<int>(q.cols());
  const double radius = 1.0 / norm.alpha();
  int hits = 0;
  for (int s = 0; s < samples; ++s) {
    Vector z(k);
    for (int i = 0; i < k; ++i) z(i) = rng.normal();
    const double nz = z.norm();
    if (nz == 0.0) continue;
    const double r = radius * std::pow(rng.uniform01(), 1.0 / k);
    z *= r / nz;
    if (norm.vector_norm(q * z) <= 1.0) ++hits;
  }
  const double ball = euclidean_ball_volume(k) * std::pow(radius, k);
  return ball * static_cast<double>(hits) / static_cast<double>(samples);
}

}  // namespace detail

// Maximal k-volume growth V_k(T): supremum over k-dimensional subspaces of
// the volume distortion of T. Euclidean: exact (top-k singular value product,
// |det| when k = d). Polyhedral norms: Monte-Carlo estimate over sampled
// subspaces with rejection-sampled ball volumes; estimate only, except k = d
// which is the norm-independent |det T|.
inline double volume_growth(const Matrix& t, int k, const NormContext& norm,
                            int subspace_samples = 128, std::uint64_t seed = 0x5eedu) {
  detail::check_k(t, k);
  const int d = static_cast<int>(t.rows());
  if (k == d) return std::abs(t.determinant());
  if (norm.kind == NormKind::Euclidean) {
    const Vector sv = singular_values(t);
    double v = 1.0;
    for (int j = 0; j < k; ++j) v *= sv(j);
    return v;
  }
  Rng rng(seed);
  double best = 0.0;
  for (int s = 0; s < subspace_samples; ++s) {
    const Matrix q = detail::random_subspace(d, k, rng);
    const Matrix tq = t * q;
    Eigen::HouseholderQR<Matrix> qr(tq);
    double det_eucl = 1.0;
    for (int j = 0; j < k; ++j) det_eucl *= std::abs(qr.matrixQR()(j, j));
    if (det_eucl <= 0.0) continue;  // singular restriction contributes 0
    const Matrix qtv = detail::orthonormalize(tq);
    const double vol_dom = detail::mc_norm_ball_volume(q, norm, 2048, rng);
    const double vol_img = detail::mc_norm_ball_volume(qtv, norm, 2048, rng);
    if (vol_img <= 0.0) continue;
    best = std::max(best, det_eucl * vol_dom / vol_img);
  }
  return best;
}

struct GelfandBracket {
  double lower = 0.0;
  double upper = 0.0;
  double lemma_lower = 0.0;  // volume-ratio route, kept for diagnostics
  bool certified = false;    // both ends are rigorous bounds
};

// Two-sided bracket for c_k(T). The upper end samples codimension-(k-1)
// subspaces V (any V gives ||T|V|| >= c_k); one-dimensional V are evaluated
// exactly, higher-dimensional ones by direction sampling. The lower end
// combines the volume-ratio bound V_k / (C prod_{j<k} upper_j), with C the
// norm-equivalence constant (C = 1 in the Euclidean case), and, for d = 2
// line sampling, a Lipschitz certificate over the angle grid.
inline GelfandBracket gelfand_bracket(const Matrix& t, int k, const NormContext& norm,
                                      int samples, std::uint64_t seed) {
  detail::check_k(t, k);
  if (samples < 1) throw DomainError("gelfand_bracket: samples must be >= 1");
  const int d = static_cast<int>(t.rows());
  const Vector sv = singular_values(t);

  GelfandBracket out;
  if (sv(0) == 0.0) {  // zero map
    out.certified = true;
    return out;
  }
  if (k == 1) {
    const double n1 = norm.operator_norm(t);
    out.lower = out.upper = out.lemma_lower = n1;
    out.certified = true;
    return out;
  }

  const int dim_v = d - k + 1;
  Rng rng(seed);

  // Restriction norm of T to span(q): exact for lines, sampled otherwise.
  auto restriction_norm = [&](const Matrix& q) {
    if (q.cols() == 1) {
      const Vector u = q.col(0);
      return norm.vector_norm(t * u) / norm.vector_norm(u);
    }
    double best = 0.0;
    const int dirs = 64;
    for (int s = 0; s < dirs; ++s) {
      Vector z(q.cols());
      for (int i = 0; i < z.size(); ++i) z(i) = rng.normal();
      if (z.norm() == 0.0) continue;
      const Vector v = q * z;
      best = std::max(best, norm.vector_norm(t * v) / norm.vector_norm(v));
    }
    return best;
  };

  const bool angle_grid = (d == 2 && dim_v == 1);
  double upper = std::numeric_limits<double>::infinity();
  double grid_min = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    Matrix q;
    if (angle_grid) {
      const double theta = 3.14159265358979323846 * s / samples;
      q = Matrix(2, 1);
      q(0, 0) = std::cos(theta);
      q(1, 0) = std::sin(theta);
    } else {
      q = detail::random_subspace(d, dim_v, rng);
    }
    const double v = restriction_norm(q);
    upper = std::min(upper, v);
    grid_min = std::min(grid_min, v);
  }

  // Volume-ratio lower bound: c_k >= V_k / (C prod_{j<k} c_j) and c_j <= upper_j.
  double prod_upper = 1.0;
  for (int j = 1; j < k; ++j) {
    if (j == 1) {
      prod_upper *= norm.operator_norm(t);
    } else {
      GelfandBracket bj = gelfand_bracket(t, j, norm, std::max(64, samples / 4), seed + j);
      prod_upper *= bj.upper;
    }
  }
  const double vk = (norm.kind == NormKind::Euclidean)
                        ? [&] {
                            double v = 1.0;
                            for (int j = 0; j < k; ++j) v *= sv(j);
                            return v;
                          }()
                        : volume_growth(t, k, norm, 64, seed + 17);
  const double ratio = norm.beta() / norm.alpha();
  const double lemma_c = std::pow(ratio, 2.0 * k);  // = 1 for Euclidean
  out.lemma_lower = prod_upper > 0.0 ? vk / (lemma_c * prod_upper) : 0.0;
  double lower = out.lemma_lower;

  if (angle_grid) {
    // phi(theta) = N(T u)/N(u) on the unit circle has Lipschitz constant at
    // most 2 beta^2 ||T||_2 / alpha^2; the grid minimum certifies c_k from
    // below up to half a step.
    const double lip = 2.0 * norm.beta() * norm.beta() * sv(0) / (norm.alpha() * norm.alpha());
    const double h = 3.14159265358979323846 / samples;
    lower = std::max(lower, grid_min - 0.5 * lip * h);
    out.certified = true;
  }
  out.lower = std::max(0.0, std::min(lower, upper));
  out.upper = upper;
  if (norm.kind == NormKind::Euclidean) out.certified = true;
  return out;
}

// k-th Gelfand number. Euclidean: the k-th singular value, exact. L1/LInf:
// c_1 is the induced operator norm; for k > 1 the certified upper end of
// gelfand_bracket is returned.
inline double gelfand(const Matrix& t, int k, const NormContext& norm,
                      int bracket_samples = 4096, std::uint64_t seed = 0x9e1fULL) {
  detail::check_k(t, k);
  if (norm.kind == NormKind::Euclidean) return singular_values(t)(k - 1);
  if (k == 1) return norm.operator_norm(t);
  return gelfand_bracket(t, k, norm, bracket_samples, seed).upper;
}

// ||T||_ic and its log. Finite matrices have finite rank, hence value 0 and
// log -inf; the sentinel orders below every finite number without NaN.
struct NoncompactnessValue {
  double value = 0.0;
  double log_value = kNegInf;
};

inline NoncompactnessValue noncompactness(const Matrix& t) {
  if (!t.allFinite()) throw NumericError("snumbers", "noncompactness of non-finite matrix");
  return {};
}

// log c_q(A^n(x)) and log V_q(A^n(x)) over 1 <= q <= q_max, 1 <= n <= n_max
// for one base point; filled by gelfand_profile() in cocycle.hpp.
struct GelfandProfile {
  std::string base_key;
  int q_max = 0;
  int n_max = 0;
  Matrix log_c;  // (q_max) x (n_max)
  Matrix log_v;

  double log_c_at(int q, int n) const { return log_c(q - 1, n - 1); }
  double log_v_at(int q, int n) const { return log_v(q - 1, n - 1); }
};

}  // namespace dsplit
