#pragma once

// Subspaces as orthonormal column frames plus the principal-angle utilities
// used for splitting reconstruction, equivariance and transversality checks.

#include <Eigen/Dense>

#include <cmath>

#include "dsplit/common.hpp"
#include "dsplit/snumbers.hpp"

namespace dsplit {

struct Subspace {
  Matrix basis;  // ambient_dim x dim, orthonormal columns

  static Subspace from_columns(const Matrix& cols) {
    if (cols.cols() == 0 || cols.rows() == 0) throw DomainError("Subspace: empty frame");
    Eigen::HouseholderQR<Matrix> qr(cols);
    const Matrix q = qr.householderQ();
    Subspace s;
    s.basis = q.leftCols(cols.cols());
    return s;
  }

  static Subspace coordinate_span(int ambient_dim, int dim) {
    Subspace s;
    s.basis = Matrix::Identity(ambient_dim, ambient_dim).leftCols(dim);
    return s;
  }

  int ambient_dim() const { return static_cast<int>(basis.rows()); }
  int dim() const { return static_cast<int>(basis.cols()); }

  Vector project(const Vector& v) const { return basis * (basis.transpose() * v); }

  // Largest deviation of the frame from orthonormality.
  double orthonormality_defect() const {
    const Matrix g = basis.transpose() * basis - Matrix::Identity(dim(), dim());
    return g.cwiseAbs().maxCoeff();
  }

  Subspace orthogonal_complement() const {
    const int d = ambient_dim();
    const int k = dim();
    if (k >= d) throw DomainError("Subspace: no orthogonal complement in equal dimension");
    Eigen::HouseholderQR<Matrix> qr(basis);
    const Matrix q = qr.householderQ();
    Subspace s;
    s.basis = q.rightCols(d - k);
    return s;
  }
};

// sin of the largest principal angle of A against B; for dim A <= dim B this
// is the containment distance ||(I - P_B) Q_A||_2, zero iff A is a subspace
// of B. Symmetric when the dimensions match.
inline double principal_angle_distance(const Subspace& a, const Subspace& b) {
  if (a.ambient_dim() != b.ambient_dim())
    throw DomainError("principal_angle_distance: ambient dimensions differ");
  if (a.dim() > b.dim()) return principal_angle_distance(b, a);
  const Matrix residual = a.basis - b.basis * (b.basis.transpose() * a.basis);
  Eigen::JacobiSVD<Matrix> svd(residual);
  return std::min(1.0, svd.singularValues()(0));
}

// Smallest canonical angle between the two spans, in radians. Positive iff
// the spans intersect trivially; used as the transversality margin.
inline double min_principal_angle(const Subspace& a, const Subspace& b) {
  if (a.ambient_dim() != b.ambient_dim())
    throw DomainError("min_principal_angle: ambient dimensions differ");
  Eigen::JacobiSVD<Matrix> svd(Matrix(a.basis.transpose() * b.basis));
  const double c = std::clamp(svd.singularValues()(0), -1.0, 1.0);
  return std::acos(c);
}

struct IntersectionResult {
  Subspace space;
  Vector cosines;  // principal cosines of the extracted directions, near 1
};

// Numerical intersection: the `expected_dim` most aligned principal
// directions between the spans. The caller checks the cosines.
inline IntersectionResult intersect(const Subspace& a, const Subspace& b, int expected_dim) {
  if (expected_dim < 1) throw DomainError("intersect: expected_dim must be >= 1");
  if (expected_dim > std::min(a.dim(), b.dim()))
    throw DomainError("intersect: expected_dim exceeds operand dimensions");
  Eigen::JacobiSVD<Matrix> svd(Matrix(a.basis.transpose() * b.basis), Eigen::ComputeFullU);
  IntersectionResult out;
  out.cosines = svd.singularValues().head(expected_dim);
  out.space = Subspace::from_columns(a.basis * svd.matrixU().leftCols(expected_dim));
  return out;
}

}  // namespace dsplit
