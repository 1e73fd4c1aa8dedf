// Pointwise linear algebra for a constant complex structure J on R^{2m}:
// co-real / totally real tests, complex parts, complexified covectors and
// the fibrewise Hopf map.
#pragma once

#include "preleg/common.hpp"

#include <complex>
#include <utility>
#include <vector>

namespace preleg::linalg {

class ComplexStructure {
 public:
  /// Validates J*J = -I to `tol` (relative to the entry scale of J).
  explicit ComplexStructure(Matrix j, double tol = 1e-12) : j_(std::move(j)) {
    if (j_.rows() != j_.cols() || j_.rows() == 0 || j_.rows() % 2 != 0)
      throw DimensionError("complex structure must be a square matrix of even size");
    if (!j_.allFinite()) throw DomainError("complex structure has non-finite entries");
    const auto n = j_.rows();
    Matrix sq = j_ * j_ + Matrix::Identity(n, n);
    const double scale = std::max(1.0, j_.cwiseAbs().maxCoeff() * j_.cwiseAbs().maxCoeff());
    if (sq.cwiseAbs().maxCoeff() > tol * scale)
      throw DomainError("matrix does not square to -Identity");
    build_complex_basis();
  }

  int dim() const { return static_cast<int>(j_.rows()); }
  int complex_dim() const { return dim() / 2; }
  const Matrix& matrix() const { return j_; }

  /// Real basis b_1, ..., b_m with {b_1, J b_1, ..., b_m, J b_m} a real basis.
  /// Chosen greedily from the standard basis, lowest index first.
  const Matrix& complex_basis() const { return basis_; }

  /// Inverse of [b_1, J b_1, ..., b_m, J b_m]: real coordinates to the
  /// adapted coordinates (Re w_1, Im w_1, ..., Re w_m, Im w_m).
  const Matrix& adapted_coordinates() const { return to_adapted_; }

 private:
  void build_complex_basis() {
    const int n = dim();
    basis_.resize(n, n / 2);
    Matrix span(n, 0);
    int found = 0;
    for (int i = 0; i < n && found < n / 2; ++i) {
      Vector e = Vector::Unit(n, i);
      Matrix trial(n, span.cols() + 2);
      trial << span, e, j_ * e;
      if (numerical_rank(trial, 1e-10) == trial.cols()) {
        span = trial;
        basis_.col(found++) = e;
      }
    }
    if (found != n / 2) throw ConsistencyError("failed to build a complex basis");
    to_adapted_ = span.inverse();
  }

  Matrix j_;
  Matrix basis_;
  Matrix to_adapted_;
};

/// Block-diagonal J with J e_{2i-1} = e_{2i}.
inline ComplexStructure standard_J(int m) {
  if (m < 1) throw DomainError("standard_J requires m >= 1");
  Matrix j = Matrix::Zero(2 * m, 2 * m);
  for (int i = 0; i < m; ++i) {
    j(2 * i + 1, 2 * i) = 1.0;
    j(2 * i, 2 * i + 1) = -1.0;
  }
  return ComplexStructure(j);
}

/// J from 1-based coordinate pairs (a, b) meaning J e_a = e_b, J e_b = -e_a.
inline ComplexStructure J_from_pairs(int dim, const std::vector<std::pair<int, int>>& pairs) {
  Matrix j = Matrix::Zero(dim, dim);
  for (auto [a, b] : pairs) {
    if (a < 1 || b < 1 || a > dim || b > dim || a == b) throw DomainError("bad coordinate pair");
    j(b - 1, a - 1) = 1.0;
    j(a - 1, b - 1) = -1.0;
  }
  return ComplexStructure(j);
}

class Subspace {
 public:
  Subspace(Matrix basis, double rel_tol = kDefaultRankTol) : basis_(std::move(basis)) {
    if (basis_.rows() == 0) throw DimensionError("subspace needs a positive ambient dimension");
    if (!basis_.allFinite()) throw DomainError("subspace basis has non-finite entries");
    if (basis_.cols() > 0 && numerical_rank(basis_, rel_tol) != basis_.cols())
      throw DomainError("subspace basis columns are linearly dependent");
    ortho_ = basis_.cols() > 0 ? orthonormal_basis(basis_, rel_tol) : Matrix(basis_.rows(), 0);
  }

  static Subspace span_of(const Matrix& vectors, double rel_tol = kDefaultRankTol) {
    return Subspace(orthonormal_basis(vectors, rel_tol));
  }

  int ambient_dim() const { return static_cast<int>(basis_.rows()); }
  int dim() const { return static_cast<int>(basis_.cols()); }
  const Matrix& basis() const { return basis_; }
  const Matrix& orthonormal() const { return ortho_; }
  Matrix projector() const { return ortho_ * ortho_.transpose(); }

 private:
  Matrix basis_;
  Matrix ortho_;
};

struct Covector {
  Vector coeffs;
  int ambient_dim() const { return static_cast<int>(coeffs.size()); }
  double operator()(const Vector& v) const { return coeffs.dot(v); }
};

/// alpha^J = re + i im as a pair of real covectors.
struct ComplexCovector {
  Covector re;
  Covector im;
  std::complex<double> operator()(const Vector& v) const { return {re(v), im(v)}; }
};

struct RankTest {
  bool flag = false;
  double margin = 0.0;
};

namespace detail {
inline void check_dims(int a, int b) {
  if (a != b) throw DimensionError("dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
}
inline Matrix with_j(const Matrix& q, const ComplexStructure& j) {
  Matrix m(q.rows(), 2 * q.cols());
  m << q, j.matrix() * q;
  return m;
}
}  // namespace detail

/// S + JS = V. Margin: the ambient-th singular value of [Q | JQ] for an
/// orthonormal basis Q of S.
inline RankTest is_coreal(const Subspace& s, const ComplexStructure& j, double tol = kDefaultRankTol) {
  detail::check_dims(s.ambient_dim(), j.dim());
  if (s.dim() == 0) return {};
  Vector sv = singular_values(detail::with_j(s.orthonormal(), j));
  return {numerical_rank(sv, tol) == j.dim(), kth_singular_value(sv, j.dim())};
}

/// S ∩ JS = 0.
inline RankTest is_real(const Subspace& s, const ComplexStructure& j, double tol = kDefaultRankTol) {
  detail::check_dims(s.ambient_dim(), j.dim());
  if (s.dim() == 0) return {true, 1.0};
  Vector sv = singular_values(detail::with_j(s.orthonormal(), j));
  return {numerical_rank(sv, tol) == 2 * s.dim(), kth_singular_value(sv, 2 * s.dim())};
}

/// JS = S.
inline bool is_complex_invariant(const Subspace& s, const ComplexStructure& j, double tol = kDefaultRankTol) {
  detail::check_dims(s.ambient_dim(), j.dim());
  if (s.dim() == 0) return true;
  return numerical_rank(detail::with_j(s.orthonormal(), j), tol) == s.dim();
}

/// H ∩ JH, returned with an orthonormal basis.
inline Subspace complex_part(const Subspace& h, const ComplexStructure& j, double tol = kDefaultRankTol) {
  detail::check_dims(h.ambient_dim(), j.dim());
  const Matrix& q = h.orthonormal();
  if (q.cols() == 0) return Subspace(Matrix(h.ambient_dim(), 0));
  // v = Q a = J Q b  <=>  [Q, -JQ] (a; b) = 0
  Matrix m(q.rows(), 2 * q.cols());
  m << q, -(j.matrix() * q);
  Matrix ns = null_space(m, tol);
  if (ns.cols() == 0) return Subspace(Matrix(h.ambient_dim(), 0));
  Matrix vecs = q * ns.topRows(q.cols());
  return Subspace(orthonormal_basis(vecs, tol));
}

/// alpha^J = alpha - i alpha∘J.
inline ComplexCovector complexify(const Covector& alpha, const ComplexStructure& j) {
  detail::check_dims(alpha.ambient_dim(), j.dim());
  Vector im = -(j.matrix().transpose() * alpha.coeffs);
  return {alpha, Covector{im}};
}

/// Coefficients c_k = alpha^J(b_k) in the J-adapted complex basis.
inline CVector complex_coefficients(const ComplexCovector& a, const ComplexStructure& j) {
  detail::check_dims(a.re.ambient_dim(), j.dim());
  const Matrix& b = j.complex_basis();
  CVector c(b.cols());
  for (Eigen::Index k = 0; k < b.cols(); ++k) c(k) = a(b.col(k));
  return c;
}

/// Normalizes a projective representative: the largest-modulus coordinate
/// (lowest index on ties) becomes 1.
inline CVector projective_normalize(const CVector& v, double tie_tol = 1e-12) {
  Eigen::Index best = -1;
  double best_abs = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    double a = std::abs(v(i));
    if (a > best_abs * (1.0 + tie_tol) + tie_tol) {
      best_abs = a;
      best = i;
    }
  }
  if (best < 0 || best_abs == 0.0) throw DomainError("zero vector has no projective class");
  return v / v(best);
}

inline bool projectively_equal(const CVector& a, const CVector& b, double tol = 1e-9) {
  if (a.size() != b.size()) return false;
  // rank of the 2 x m complex matrix
  CMatrix m(2, a.size());
  m.row(0) = a.transpose();
  m.row(1) = b.transpose();
  Eigen::JacobiSVD<CMatrix> svd(m);
  auto sv = svd.singularValues();
  return sv(0) > 0 && sv(1) <= tol * sv(0);
}

/// [p_1 + i p_2 : ... : p_{2m-1} + i p_{2m}], normalized.
inline CVector hopf(const Vector& p, double unit_tol = 1e-9) {
  if (p.size() == 0 || p.size() % 2 != 0) throw DimensionError("hopf needs an even-dimensional vector");
  const double norm = p.norm();
  if (norm == 0.0) throw DomainError("hopf of the zero vector");
  if (std::abs(norm - 1.0) > unit_tol) throw DomainError("hopf input is not a unit vector");
  CVector z(p.size() / 2);
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = {p(2 * i), p(2 * i + 1)};
  return projective_normalize(z);
}

/// C-linear dependence of two complexified covectors.
inline bool lines_dependent_C(const ComplexCovector& a1, const ComplexCovector& a2, const ComplexStructure& j,
                              double tol = kDefaultRankTol) {
  if (a1.re.coeffs.isZero(0) && a1.im.coeffs.isZero(0)) throw DomainError("zero covector");
  if (a2.re.coeffs.isZero(0) && a2.im.coeffs.isZero(0)) throw DomainError("zero covector");
  CVector c1 = complex_coefficients(a1, j);
  CVector c2 = complex_coefficients(a2, j);
  CMatrix m(2, c1.size());
  m.row(0) = c1.transpose();
  m.row(1) = c2.transpose();
  Eigen::JacobiSVD<CMatrix> svd(m);
  auto sv = svd.singularValues();
  return sv(1) <= tol * sv(0);
}

/// Intersection of two kernels of real covectors.
inline Subspace kernel_intersection(const Covector& a, const Covector& b) {
  Matrix m(2, a.ambient_dim());
  m.row(0) = a.coeffs.transpose();
  m.row(1) = b.coeffs.transpose();
  return Subspace(null_space(m));
}

}  // namespace preleg::linalg
