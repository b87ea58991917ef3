#pragma once

// Cocycle specifications over an SFT base in three constructive families
// (locally constant tables, conjugated diagonal, truncated weighted shift),
// generator evaluation, raw and log-rescaled products, restricted inverses
// on finite-dimensional fast bundles and the Hoelder-constant estimator.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "dsplit/common.hpp"
#include "dsplit/sft.hpp"
#include "dsplit/snumbers.hpp"
#include "dsplit/subspace.hpp"

namespace dsplit {

using MatrixL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

enum class CocycleFamily { LocallyConstant, ConjugatedDiagonal, Galerkin };

inline std::string family_name(CocycleFamily f) {
  switch (f) {
    case CocycleFamily::LocallyConstant: return "locally_constant";
    case CocycleFamily::ConjugatedDiagonal: return "conjugated_diagonal";
    case CocycleFamily::Galerkin: return "galerkin";
  }
  return "?";
}

// All admissible words of the given length (lexicographic).
inline std::vector<Word> admissible_words(const SftSystem& sys, int length) {
  std::vector<Word> out;
  Word w(length, 0);
  std::function<void(int)> rec = [&](int depth) {
    if (depth == length) {
      out.push_back(w);
      return;
    }
    for (int s = 0; s < sys.alphabet_size(); ++s) {
      if (depth > 0 && !sys.allowed(w[depth - 1], s)) continue;
      w[depth] = s;
      rec(depth + 1);
    }
  };
  if (length > 0) rec(0);
  return out;
}

// Generator map x -> A(x). Immutable after construction and freely shareable.
class CocycleSpec {
 public:
  // table: one matrix per admissible central word x_{[-r, r]}.
  static CocycleSpec locally_constant(const SftSystem& sys, int radius,
                                      std::map<Word, Matrix> table, NormContext norm,
                                      bool injective, double holder_alpha = 1.0) {
    CocycleSpec spec;
    spec.family_ = CocycleFamily::LocallyConstant;
    spec.radius_ = radius;
    spec.table_ = std::move(table);
    spec.init_common(sys, norm, injective, holder_alpha);
    spec.validate_table_cover(sys, radius, spec.table_);
    for (const auto& [w, m] : spec.table_) spec.check_entry(m, injective);
    return spec;
  }

  // Convenience builder from a window function.
  static CocycleSpec locally_constant_from(const SftSystem& sys, int radius,
                                           const std::function<Matrix(const Word&)>& build,
                                           NormContext norm, bool injective,
                                           double holder_alpha = 1.0) {
    std::map<Word, Matrix> table;
    for (const Word& w : admissible_words(sys, 2 * radius + 1)) table[w] = build(w);
    return locally_constant(sys, radius, std::move(table), norm, injective, holder_alpha);
  }

  // A(x) = P(sigma x) D P(x)^{-1} with locally constant P (window radius
  // p_radius) and fixed diagonal D of moduli e^{lambda_i}. Always injective.
  static CocycleSpec conjugated_diagonal(const SftSystem& sys, const Vector& diag_moduli,
                                         int p_radius, std::map<Word, Matrix> p_table,
                                         NormContext norm, double holder_alpha = 1.0,
                                         double cond_bound = 1e8) {
    CocycleSpec spec;
    spec.family_ = CocycleFamily::ConjugatedDiagonal;
    spec.radius_ = p_radius + 1;  // windows of both x and sigma x
    spec.p_radius_ = p_radius;
    spec.diag_ = diag_moduli;
    spec.table_ = std::move(p_table);
    spec.init_common(sys, norm, /*injective=*/true, holder_alpha);
    for (int i = 0; i < diag_moduli.size(); ++i)
      if (!(diag_moduli(i) > 0.0))
        throw DomainError("CocycleSpec: diagonal moduli must be positive");
    spec.validate_table_cover(sys, p_radius, spec.table_);
    for (const auto& [w, p] : spec.table_) {
      spec.check_entry(p, /*need_injective=*/true);
      const Vector sv = singular_values(p);
      if (sv(sv.size() - 1) <= 0.0 || sv(0) / sv(sv.size() - 1) > cond_bound)
        throw DomainError("CocycleSpec: conjugation matrix exceeds condition bound");
      spec.p_inverse_[w] = p.inverse();
    }
    return spec;
  }

  // Truncated weighted shift (T v)_i = w_i s_{x_0} v_{i+1}; compact model,
  // never injective (the last coordinate is annihilated).
  static CocycleSpec galerkin_weighted_shift(const SftSystem& sys, int dim,
                                             const Vector& weights,
                                             std::vector<double> symbol_scale,
                                             NormContext norm) {
    if (dim < 2) throw DomainError("CocycleSpec: truncation dimension must be >= 2");
    if (weights.size() != dim - 1)
      throw DomainError("CocycleSpec: weighted shift needs dim-1 weights");
    if (static_cast<int>(symbol_scale.size()) != sys.alphabet_size())
      throw DomainError("CocycleSpec: one scale per symbol required");
    CocycleSpec spec;
    spec.family_ = CocycleFamily::Galerkin;
    spec.radius_ = 0;
    spec.weights_ = weights;
    spec.symbol_scale_ = std::move(symbol_scale);
    spec.init_common(sys, norm, /*injective=*/false, /*holder_alpha=*/1.0);
    for (double s : spec.symbol_scale_)
      if (!std::isfinite(s)) throw DomainError("CocycleSpec: non-finite symbol scale");
    if (!weights.allFinite()) throw DomainError("CocycleSpec: non-finite weights");
    return spec;
  }

  CocycleFamily family() const { return family_; }
  int dimension() const { return dimension_; }
  bool injective() const { return injective_; }
  double holder_alpha() const { return holder_alpha_; }
  const NormContext& norm() const { return norm_; }
  std::uint64_t system_fingerprint() const { return fingerprint_; }
  // Window radius that determines A(x).
  int dependence_radius() const { return radius_; }

  const std::map<Word, Matrix>& table() const { return table_; }
  const Vector& diagonal() const { return diag_; }
  int conjugation_radius() const { return p_radius_; }

  Matrix evaluate(const Point& x) const { return evaluate_as<double>(x); }

  template <typename Scalar>
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> evaluate_as(const Point& x) const {
    if (x.system_fingerprint() != fingerprint_)
      throw DomainError("CocycleSpec: point does not belong to the spec's system");
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    switch (family_) {
      case CocycleFamily::LocallyConstant: {
        const auto it = table_.find(x.window(-radius_, radius_));
        if (it == table_.end())
          throw DomainError("CocycleSpec: inadmissible window");  // unreachable for valid points
        return it->second.cast<Scalar>();
      }
      case CocycleFamily::ConjugatedDiagonal: {
        const auto cur = table_.find(x.window(-p_radius_, p_radius_));
        const auto nxt = table_.find(x.window(-p_radius_ + 1, p_radius_ + 1));
        if (cur == table_.end() || nxt == table_.end())
          throw DomainError("CocycleSpec: inadmissible window");
        Mat p_next = nxt->second.cast<Scalar>();
        Mat p_cur_inv;
        if constexpr (std::is_same_v<Scalar, double>) {
          p_cur_inv = p_inverse_.at(cur->first);
        } else {
          Mat p_cur = cur->second.cast<Scalar>();
          p_cur_inv = p_cur.inverse();
        }
        Mat d = Mat::Zero(dimension_, dimension_);
        for (int i = 0; i < dimension_; ++i) d(i, i) = static_cast<Scalar>(diag_(i));
        return p_next * d * p_cur_inv;
      }
      case CocycleFamily::Galerkin: {
        Mat m = Mat::Zero(dimension_, dimension_);
        const double s = symbol_scale_[static_cast<std::size_t>(x.symbol(0))];
        for (int i = 0; i + 1 < dimension_; ++i)
          m(i, i + 1) = static_cast<Scalar>(weights_(i) * s);
        return m;
      }
    }
    throw InvariantViolation("CocycleSpec: unknown family");
  }

 private:
  void init_common(const SftSystem& sys, NormContext norm, bool injective, double holder_alpha) {
    fingerprint_ = sys.fingerprint();
    injective_ = injective;
    if (!(holder_alpha > 0.0) || holder_alpha > 1.0)
      throw DomainError("CocycleSpec: holder_alpha must lie in (0, 1]");
    holder_alpha_ = holder_alpha;
    if (family_ == CocycleFamily::Galerkin) {
      dimension_ = static_cast<int>(weights_.size()) + 1;
    } else {
      if (table_.empty()) throw DomainError("CocycleSpec: empty table");
      dimension_ = static_cast<int>(table_.begin()->second.rows());
    }
    norm.dimension = dimension_;
    norm_ = norm;
  }

  void validate_table_cover(const SftSystem& sys, int radius,
                            const std::map<Word, Matrix>& table) const {
    if (radius < 0) throw DomainError("CocycleSpec: negative window radius");
    const auto words = admissible_words(sys, 2 * radius + 1);
    if (words.size() != table.size())
      throw DomainError("CocycleSpec: table must cover exactly the admissible windows");
    for (const Word& w : words)
      if (table.find(w) == table.end())
        throw DomainError("CocycleSpec: table missing admissible window " + word_to_string(w));
  }

  void check_entry(const Matrix& m, bool need_injective) const {
    if (m.rows() != dimension_ || m.cols() != dimension_)
      throw DomainError("CocycleSpec: table matrices must be square of equal size");
    if (!m.allFinite()) throw DomainError("CocycleSpec: non-finite table entry");
    if (need_injective) {
      const Vector sv = singular_values(m);
      if (!(sv(sv.size() - 1) > sv(0) * 1e-13) || sv(0) == 0.0)
        throw DomainError("CocycleSpec: injective spec contains a singular generator");
    }
  }

  CocycleFamily family_ = CocycleFamily::LocallyConstant;
  int dimension_ = 0;
  int radius_ = 0;
  int p_radius_ = 0;
  std::map<Word, Matrix> table_;      // generator table, or P table for conjugated specs
  std::map<Word, Matrix> p_inverse_;  // cached inverses of P
  Vector diag_;
  Vector weights_;
  std::vector<double> symbol_scale_;
  NormContext norm_;
  double holder_alpha_ = 1.0;
  bool injective_ = false;
  std::uint64_t fingerprint_ = 0;
};

// A^n(x) = A(f^{n-1} x) ... A(f x) A(x), accumulated left to right in that
// order; n = 0 gives the identity. Raw products overflow near
// n ~ 700 / lambda_1, use scaled_product past that.
inline Matrix product(const CocycleSpec& spec, const Point& x, int n) {
  if (n < 0) throw DomainError("product: n must be >= 0");
  Matrix acc = Matrix::Identity(spec.dimension(), spec.dimension());
  Point cursor = x;
  for (int j = 0; j < n; ++j) {
    acc = spec.evaluate(cursor) * acc;
    if (!acc.allFinite())
      throw NumericError("cocycle",
                         "product overflow at step " + std::to_string(j + 1) +
                             "; use the log-scaled profile operations instead");
    cursor = shift(cursor, 1);
  }
  return acc;
}

// A^n(x) = e^{log_scale} * matrix, with the largest column norm factored out
// at every step. A vanishing product (possible for the weighted shift)
// leaves matrix = 0 with the scale accumulated so far.
template <typename Scalar = double>
struct ScaledProduct {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> matrix;
  Scalar log_scale = 0;
};

template <typename Scalar = double>
ScaledProduct<Scalar> scaled_product(const CocycleSpec& spec, const Point& x, int n) {
  if (n < 0) throw DomainError("scaled_product: n must be >= 0");
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  ScaledProduct<Scalar> out;
  out.matrix = Mat::Identity(spec.dimension(), spec.dimension());
  Point cursor = x;
  for (int j = 0; j < n; ++j) {
    out.matrix = spec.template evaluate_as<Scalar>(cursor) * out.matrix;
    const Scalar s = out.matrix.colwise().norm().maxCoeff();
    if (s > 0) {
      out.matrix /= s;
      out.log_scale += std::log(s);
    }
    cursor = shift(cursor, 1);
  }
  return out;
}

// Inverse of A^n(f^{-n} x) restricted to the bundle mapping onto E.
// The true preimage of domain.basis.col(j) is e^{log_scale} * preimage.col(j).
struct RestrictedInverse {
  Subspace domain;
  Matrix preimage;
  double log_scale = 0.0;

  double log_operator_norm() const {
    Eigen::JacobiSVD<Matrix> svd(preimage);
    return log_scale + std::log(svd.singularValues()(0));
  }

  // log ||A^{-n}(x) u|| for a unit u in the domain.
  double log_image_norm(const Vector& unit_u) const {
    const Vector coeff = domain.basis.transpose() * unit_u;
    return log_scale + std::log((preimage * coeff).norm());
  }
};

inline RestrictedInverse restricted_inverse(const CocycleSpec& spec, const Point& x, int n,
                                            const Subspace& e) {
  if (n < 0) throw DomainError("restricted_inverse: n must be >= 0");
  if (e.ambient_dim() != spec.dimension())
    throw DomainError("restricted_inverse: subspace dimension mismatch");
  RestrictedInverse out;
  out.domain = e;
  if (n == 0) {
    out.preimage = e.basis;
    out.log_scale = 0.0;
    return out;
  }
  const auto sp = scaled_product<double>(spec, shift(x, -n), n);
  Eigen::JacobiSVD<Matrix> svd(sp.matrix, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector sv = svd.singularValues();
  const double cut = sv(0) * 1e-13;
  int rank = 0;
  while (rank < sv.size() && sv(rank) > cut) ++rank;
  if (rank == 0) throw SingularityError("restricted_inverse: product is numerically zero");
  const Matrix u_r = svd.matrixU().leftCols(rank);
  const Matrix proj_coeff = u_r.transpose() * e.basis;
  const double range_residual = (e.basis - u_r * proj_coeff).cwiseAbs().maxCoeff();
  if (range_residual > 1e-8)
    throw DomainError("restricted_inverse: E is not carried by the range of A^n(f^{-n}x)");
  out.preimage =
      svd.matrixV().leftCols(rank) * sv.head(rank).cwiseInverse().asDiagonal() * proj_coeff;
  out.log_scale = -sp.log_scale;
  // Smallest singular value of the forward restriction, in log scale.
  Eigen::JacobiSVD<Matrix> inv_svd(out.preimage);
  const double fwd_sigma_min_log = sp.log_scale - std::log(inv_svd.singularValues()(0));
  if (fwd_sigma_min_log < std::log(1e-12))
    throw SingularityError("restricted_inverse: restriction numerically singular");
  return out;
}

struct HolderEstimate {
  double alpha_hat = 0.0;  // +inf sentinel for locally constant behaviour
  double c_hat = 0.0;
  bool degenerate = false;        // every sampled difference vanished
  bool locally_constant = false;  // differences vanish below the window scale
  int positive_pairs = 0;
};

// Least-squares fit of log ||A(x)-A(y)|| against log d(x,y) over random
// pairs. Locally constant specs produce zero differences below e^{-radius};
// that case is reported via the flag with alpha_hat = +inf and c_hat the
// smallest constant making ||A(x)-A(y)|| <= C d(x,y) hold on the sample.
inline HolderEstimate holder_estimate(const CocycleSpec& spec, const SftSystem& sys,
                                      int sample_pairs, std::uint64_t seed) {
  if (sample_pairs < 2) throw DomainError("holder_estimate: need at least two pairs");
  if (sys.fingerprint() != spec.system_fingerprint())
    throw DomainError("holder_estimate: system does not match the spec");
  Rng rng(seed);
  std::vector<std::pair<double, double>> pts;  // (log d, log diff)
  HolderEstimate out;
  double max_ratio = 0.0;
  double min_positive_d = std::numeric_limits<double>::infinity();
  const double window_scale = std::exp(-static_cast<double>(spec.dependence_radius()));
  for (int i = 0; i < sample_pairs; ++i) {
    const Point x = random_point(sys, rng);
    const Point y = random_point(sys, rng);
    const double d = point_distance(x, y);
    if (d <= 0.0) continue;
    const double diff = spec.norm().operator_norm(spec.evaluate(x) - spec.evaluate(y));
    if (diff > 0.0) {
      ++out.positive_pairs;
      pts.emplace_back(std::log(d), std::log(diff));
      max_ratio = std::max(max_ratio, diff / d);
      min_positive_d = std::min(min_positive_d, d);
    }
  }
  if (out.positive_pairs == 0) {
    out.degenerate = true;
    return out;
  }
  if (min_positive_d >= window_scale * (1.0 - 1e-12)) {
    out.locally_constant = true;
    out.alpha_hat = std::numeric_limits<double>::infinity();
    out.c_hat = max_ratio;
    return out;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [lx, ly] : pts) {
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double m = static_cast<double>(pts.size());
  const double denom = m * sxx - sx * sx;
  if (std::abs(denom) < 1e-12) {
    out.locally_constant = false;
    out.alpha_hat = 0.0;
    out.c_hat = max_ratio;
    return out;
  }
  out.alpha_hat = (m * sxy - sx * sy) / denom;
  out.c_hat = std::exp((sy - out.alpha_hat * sx) / m);
  return out;
}

// Euclidean Gelfand/volume profile of one base point: log c_q(A^n(x)) and
// log V_q(A^n(x)) for q <= q_max, n <= n_max, from one incremental rescaled
// product sweep.
inline GelfandProfile gelfand_profile(const CocycleSpec& spec, const Point& x, int q_max,
                                      int n_max) {
  if (q_max < 1 || q_max > spec.dimension())
    throw DomainError("gelfand_profile: q_max out of range");
  if (n_max < 1) throw DomainError("gelfand_profile: n_max must be >= 1");
  GelfandProfile prof;
  prof.base_key = x.key();
  prof.q_max = q_max;
  prof.n_max = n_max;
  prof.log_c = Matrix::Zero(q_max, n_max);
  prof.log_v = Matrix::Zero(q_max, n_max);
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
    const Vector sv = singular_values(acc);
    double vol = 0.0;
    for (int q = 1; q <= q_max; ++q) {
      const double lc = std::log(sv(q - 1)) + log_scale;  // -inf on exact zeros
      vol += lc;
      prof.log_c(q - 1, n - 1) = lc;
      prof.log_v(q - 1, n - 1) = vol;
    }
  }
  return prof;
}

}  // namespace dsplit
