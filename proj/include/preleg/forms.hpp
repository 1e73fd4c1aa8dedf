// Polynomial exterior calculus on R^m and corank-2 distributions:
// curvature matrices, fatness tests and the nilpotent local model.
#pragma once

#include "preleg/common.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <complex>
#include <istream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace preleg::forms {

/// Sparse real polynomial in `num_vars` variables.
class Poly {
 public:
  using Exponent = std::vector<int>;

  explicit Poly(int num_vars = 0) : n_(num_vars) {}

  static Poly constant(int num_vars, double c) {
    Poly p(num_vars);
    p.add_term(Exponent(num_vars, 0), c);
    return p;
  }
  static Poly variable(int num_vars, int i, double c = 1.0) {
    if (i < 0 || i >= num_vars) throw DimensionError("variable index out of range");
    Exponent e(num_vars, 0);
    e[i] = 1;
    Poly p(num_vars);
    p.add_term(e, c);
    return p;
  }

  int num_vars() const { return n_; }
  const std::map<Exponent, double>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_term(const Exponent& e, double c) {
    if (static_cast<int>(e.size()) != n_) throw DimensionError("exponent length mismatch");
    for (int k : e)
      if (k < 0) throw DomainError("negative exponent");
    if (c == 0.0) return;
    double& slot = terms_[e];
    slot += c;
    if (slot == 0.0) terms_.erase(e);
  }

  Poly& operator+=(const Poly& o) {
    check(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  Poly& operator-=(const Poly& o) {
    check(o);
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }
  Poly& operator*=(double s) {
    if (s == 0.0) {
      terms_.clear();
      return *this;
    }
    for (auto& [e, c] : terms_) c *= s;
    return *this;
  }
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(Poly a, double s) { return a *= s; }
  friend Poly operator*(double s, Poly a) { return a *= s; }
  friend Poly operator*(const Poly& a, const Poly& b) {
    a.check(b);
    Poly out(a.n_);
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) {
        Exponent e(a.n_);
        for (int i = 0; i < a.n_; ++i) e[i] = ea[i] + eb[i];
        out.add_term(e, ca * cb);
      }
    return out;
  }

  Poly derivative(int i) const {
    if (i < 0 || i >= n_) throw DimensionError("derivative index out of range");
    Poly out(n_);
    for (const auto& [e, c] : terms_) {
      if (e[i] == 0) continue;
      Exponent d = e;
      d[i] -= 1;
      out.add_term(d, c * e[i]);
    }
    return out;
  }

  double operator()(const Vector& x) const {
    if (x.size() != n_) throw DimensionError("evaluation point has wrong dimension");
    double s = 0.0;
    for (const auto& [e, c] : terms_) {
      double t = c;
      for (int i = 0; i < n_; ++i)
        for (int k = 0; k < e[i]; ++k) t *= x(i);
      s += t;
    }
    return s;
  }

  int degree() const {
    int d = 0;
    for (const auto& [e, c] : terms_) {
      int s = 0;
      for (int k : e) s += k;
      d = std::max(d, s);
    }
    return d;
  }

  std::string to_string(const std::vector<std::string>& names) const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    os.precision(17);
    bool first = true;
    for (const auto& [e, c] : terms_) {
      os << (first ? (c < 0 ? "-" : "") : (c < 0 ? " - " : " + "));
      first = false;
      double a = std::abs(c);
      bool monic = true;
      for (int k : e) monic = monic && k == 0;
      if (a != 1.0 || monic) os << a;
      bool need_star = a != 1.0;
      for (int i = 0; i < n_; ++i) {
        if (e[i] == 0) continue;
        os << (need_star ? "*" : "") << names.at(i);
        if (e[i] > 1) os << '^' << e[i];
        need_star = true;
      }
    }
    return os.str();
  }

 private:
  void check(const Poly& o) const {
    if (o.n_ != n_) throw DimensionError("polynomials live in different variable sets");
  }
  int n_;
  std::map<Exponent, double> terms_;
};

/// Σ coeffs[i] dx_i.
class OneForm {
 public:
  explicit OneForm(int dim) : coeffs_(dim, Poly(dim)) {
    if (dim < 1) throw DimensionError("form dimension must be positive");
  }
  OneForm(std::vector<Poly> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) throw DimensionError("form dimension must be positive");
    for (const auto& p : coeffs_)
      if (p.num_vars() != dim()) throw DimensionError("coefficient variable count differs from form dimension");
  }

  static OneForm differential(int dim, int i) {
    OneForm f(dim);
    f.coeffs_.at(i) = Poly::constant(dim, 1.0);
    return f;
  }

  int dim() const { return static_cast<int>(coeffs_.size()); }
  const Poly& coeff(int i) const { return coeffs_.at(i); }
  Poly& coeff(int i) { return coeffs_.at(i); }

  Vector eval(const Vector& x) const {
    Vector v(dim());
    for (int i = 0; i < dim(); ++i) v(i) = coeffs_[i](x);
    return v;
  }

  OneForm& operator+=(const OneForm& o) {
    if (o.dim() != dim()) throw DimensionError("form dimension mismatch");
    for (int i = 0; i < dim(); ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
  }
  friend OneForm operator+(OneForm a, const OneForm& b) { return a += b; }
  friend OneForm operator*(double s, OneForm a) {
    for (auto& c : a.coeffs_) c *= s;
    return a;
  }

  std::string to_string(const std::vector<std::string>& names) const {
    std::string out;
    for (int i = 0; i < dim(); ++i) {
      if (coeffs_[i].is_zero()) continue;
      if (!out.empty()) out += " + ";
      out += "(" + coeffs_[i].to_string(names) + ") d" + names.at(i);
    }
    return out.empty() ? "0" : out;
  }

 private:
  std::vector<Poly> coeffs_;
};

/// Σ_{i<j} c_ij dx_i ∧ dx_j; eval gives M with ω(u, v) = uᵀ M v.
class TwoForm {
 public:
  explicit TwoForm(int dim) : dim_(dim) {
    if (dim < 1) throw DimensionError("form dimension must be positive");
  }

  int dim() const { return dim_; }

  Poly coeff(int i, int j) const {
    if (!(i < j)) throw DomainError("two-form coefficients are stored for i < j only");
    auto it = coeffs_.find({i, j});
    return it == coeffs_.end() ? Poly(dim_) : it->second;
  }

  void add(int i, int j, const Poly& p) {
    if (i == j || p.is_zero()) return;
    if (i > j) {
      add(j, i, p * -1.0);
      return;
    }
    auto [it, inserted] = coeffs_.try_emplace({i, j}, Poly(dim_));
    it->second += p;
    if (it->second.is_zero()) coeffs_.erase(it);
  }

  const std::map<std::pair<int, int>, Poly>& coeffs() const { return coeffs_; }

  Matrix eval(const Vector& x) const {
    Matrix m = Matrix::Zero(dim_, dim_);
    for (const auto& [ij, p] : coeffs_) {
      double v = p(x);
      m(ij.first, ij.second) = v;
      m(ij.second, ij.first) = -v;
    }
    return m;
  }

 private:
  int dim_;
  std::map<std::pair<int, int>, Poly> coeffs_;
};

inline TwoForm exterior_derivative(const OneForm& f) {
  TwoForm out(f.dim());
  for (int j = 0; j < f.dim(); ++j)
    for (int i = 0; i < f.dim(); ++i)
      if (i != j) {
        Poly d = f.coeff(j).derivative(i);
        // d(a_j dx_j) ∋ ∂_i a_j dx_i ∧ dx_j
        if (!d.is_zero()) out.add(i, j, d);
      }
  return out;
}

/// ker λ¹ ∩ ker λ² on R^m.
class Distribution2 {
 public:
  Distribution2(OneForm l1, OneForm l2, std::vector<std::string> coord_names = {})
      : l1_(std::move(l1)),
        l2_(std::move(l2)),
        names_(std::move(coord_names)),
        dl1_(exterior_derivative(l1_)),
        dl2_(exterior_derivative(l2_)) {
    if (l1_.dim() != l2_.dim()) throw DimensionError("forms of a distribution differ in dimension");
    if (names_.empty())
      for (int i = 0; i < dim(); ++i) names_.push_back("x" + std::to_string(i + 1));
    if (static_cast<int>(names_.size()) != dim()) throw DimensionError("coordinate name count mismatch");
  }

  int dim() const { return l1_.dim(); }
  const OneForm& lambda1() const { return l1_; }
  const OneForm& lambda2() const { return l2_; }
  const std::vector<std::string>& names() const { return names_; }

  /// 2 x m matrix of the covectors at x.
  Matrix eval(const Vector& x) const {
    Matrix m(2, dim());
    m.row(0) = l1_.eval(x).transpose();
    m.row(1) = l2_.eval(x).transpose();
    return m;
  }

  const TwoForm& d1() const { return dl1_; }
  const TwoForm& d2() const { return dl2_; }

 private:
  OneForm l1_;
  OneForm l2_;
  std::vector<std::string> names_;
  TwoForm dl1_;
  TwoForm dl2_;
};

/// Coordinate indices of the standard fat structure on R^{4n+2}:
/// (x_11, x_12, ..., x_n1, x_n2, z1, z2, y_11, y_12, ..., y_n1, y_n2).
struct StandardCoords {
  int n;
  int x(int j, int c) const { return 2 * (j - 1) + (c - 1); }
  int z(int c) const { return 2 * n + (c - 1); }
  int y(int j, int c) const { return 2 * n + 2 + 2 * (j - 1) + (c - 1); }
  int dim() const { return 4 * n + 2; }
};

/// Real and imaginary parts of dz + Σ y_j dx_j on C^{2n+1}.
inline Distribution2 standard_fat(int n) {
  if (n < 1) throw DomainError("standard_fat requires n >= 1");
  StandardCoords c{n};
  const int m = c.dim();
  OneForm l1 = OneForm::differential(m, c.z(1));
  OneForm l2 = OneForm::differential(m, c.z(2));
  for (int j = 1; j <= n; ++j) {
    l1.coeff(c.x(j, 1)) += Poly::variable(m, c.y(j, 1));
    l1.coeff(c.x(j, 2)) += Poly::variable(m, c.y(j, 2), -1.0);
    l2.coeff(c.x(j, 1)) += Poly::variable(m, c.y(j, 2));
    l2.coeff(c.x(j, 2)) += Poly::variable(m, c.y(j, 1));
  }
  std::vector<std::string> names(m);
  for (int j = 1; j <= n; ++j)
    for (int k = 1; k <= 2; ++k) {
      names[c.x(j, k)] = "x" + std::to_string(j) + std::to_string(k);
      names[c.y(j, k)] = "y" + std::to_string(j) + std::to_string(k);
    }
  names[c.z(1)] = "z1";
  names[c.z(2)] = "z2";
  return Distribution2(l1, l2, names);
}

/// ker dz1 ∩ ker dz2 on R^{2n+2} with z1, z2 the last two coordinates.
inline Distribution2 integrable_distribution(int n = 2) {
  const int m = 2 * n + 2;
  return Distribution2(OneForm::differential(m, m - 2), OneForm::differential(m, m - 1));
}

/// The explicit kernel frame X_j1, X_j2, Y_j1, Y_j2 of the standard structure.
inline Matrix standard_fat_frame(int n, const Vector& p) {
  StandardCoords c{n};
  Matrix f = Matrix::Zero(c.dim(), 4 * n);
  for (int j = 1; j <= n; ++j) {
    const double y1 = p(c.y(j, 1)), y2 = p(c.y(j, 2));
    const int col = 4 * (j - 1);
    f(c.x(j, 1), col) = 1;
    f(c.z(1), col) = -y1;
    f(c.z(2), col) = -y2;
    f(c.x(j, 2), col + 1) = 1;
    f(c.z(1), col + 1) = y2;
    f(c.z(2), col + 1) = -y1;
    f(c.y(j, 1), col + 2) = 1;
    f(c.y(j, 2), col + 3) = 1;
  }
  return f;
}

/// Orthonormal basis of a subspace that depends only on the subspace:
/// Gram-Schmidt on the projector columns in index order, first nonzero entry positive.
inline Matrix canonical_frame(const Matrix& q, double tol = 1e-10) {
  const auto n = q.rows();
  const auto k = q.cols();
  Matrix p = q * q.transpose();
  Matrix out(n, k);
  Eigen::Index found = 0;
  for (Eigen::Index i = 0; i < n && found < k; ++i) {
    Vector v = p.col(i);
    for (Eigen::Index j = 0; j < found; ++j) v -= out.col(j).dot(v) * out.col(j);
    for (Eigen::Index j = 0; j < found; ++j) v -= out.col(j).dot(v) * out.col(j);
    double norm = v.norm();
    if (norm <= tol) continue;
    v /= norm;
    for (Eigen::Index r = 0; r < n; ++r)
      if (std::abs(v(r)) > tol) {
        if (v(r) < 0) v = -v;
        break;
      }
    out.col(found++) = v;
  }
  if (found != k) throw ConsistencyError("canonical frame construction lost rank");
  return out;
}

/// Orthonormal basis of D_p (m x (m-2)).
inline Matrix kernel_frame(const Distribution2& d, const Vector& p, double tol = kDefaultRankTol) {
  if (p.size() != d.dim()) throw DimensionError("point dimension differs from distribution dimension");
  Matrix ev = d.eval(p);
  if (numerical_rank(ev, tol) < 2) throw DomainError("degenerate forms: the two covectors are dependent at the point");
  return canonical_frame(null_space(ev, tol));
}

struct Curvature {
  Matrix omega1;
  Matrix omega2;
  Matrix frame;
};

inline Curvature curvature_matrices(const Distribution2& d, const Vector& p, const Matrix& frame) {
  Matrix m1 = d.d1().eval(p), m2 = d.d2().eval(p);
  return {frame.transpose() * m1 * frame, frame.transpose() * m2 * frame, frame};
}

inline Curvature curvature_matrices(const Distribution2& d, const Vector& p) {
  return curvature_matrices(d, p, kernel_frame(d, p));
}

inline constexpr double kMaxCondition = 1e12;

/// A with Ω₁ = Ω₂ A.
inline Matrix connecting_isomorphism(const Matrix& omega1, const Matrix& omega2) {
  if (omega1.rows() != omega2.rows() || omega1.cols() != omega2.cols() || omega1.rows() != omega1.cols())
    throw DimensionError("curvature matrices must be square of equal size");
  Vector sv = singular_values(omega2);
  if (sv.size() == 0 || sv(sv.size() - 1) <= 0.0 || sv(0) / sv(sv.size() - 1) > kMaxCondition)
    throw DomainError("second curvature matrix is singular");
  return omega2.fullPivLu().solve(omega1);
}

struct FatResult {
  bool flag = false;
  /// min |Im λ| / (1 + |λ|) over eigenvalues of A; zero when not fat.
  double min_imag = 0.0;
  /// Distance of the verdict from the fat/non-fat boundary: min_imag when fat;
  /// otherwise the smallest relative gap separating the real eigenvalue pairs
  /// from each other and from the rest of the spectrum.
  double robustness = 0.0;
  CVector eigenvalues;
};

namespace detail {

inline double real_spectrum_gap(const CVector& ev, double cluster_tol) {
  std::vector<std::complex<double>> e(ev.begin(), ev.end());
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (std::abs(e[i].imag()) / (1 + std::abs(e[i])) > cluster_tol) continue;
    int partners = 0;
    for (std::size_t j = 0; j < e.size(); ++j) {
      if (i == j) continue;
      double rel = std::abs(e[i] - e[j]) / (1 + std::abs(e[i]));
      if (rel <= cluster_tol && partners == 0) {
        ++partners;  // the twin of a real eigenvalue of a skew pencil
        continue;
      }
      gap = std::min(gap, rel);
    }
  }
  return std::isfinite(gap) ? gap : 1.0;
}

}  // namespace detail

inline FatResult fatness_from_curvature(const Matrix& omega1, const Matrix& omega2, double tol = 1e-9) {
  FatResult r;
  if (omega1.rows() == 0) return r;
  const int k = static_cast<int>(omega1.rows());
  if (numerical_rank(omega1, 1.0 / kMaxCondition) < k || numerical_rank(omega2, 1.0 / kMaxCondition) < k) return r;
  Matrix a = connecting_isomorphism(omega1, omega2);
  // the real QR iteration can stall on exactly repeated +-i with denormal
  // off-block entries; the complex solver handles those
  Eigen::EigenSolver<Matrix> es(a, false);
  if (es.info() == Eigen::Success) {
    r.eigenvalues = es.eigenvalues();
  } else {
    Eigen::ComplexEigenSolver<Matrix> ces(a, false);
    if (ces.info() != Eigen::Success) throw ConsistencyError("connecting isomorphism: eigenvalue iteration did not converge");
    r.eigenvalues = ces.eigenvalues();
  }
  double m = std::numeric_limits<double>::infinity();
  for (const auto& ev : r.eigenvalues) m = std::min(m, std::abs(ev.imag()) / (1.0 + std::abs(ev)));
  r.min_imag = m;
  r.flag = m > tol;
  r.robustness = r.flag ? m : detail::real_spectrum_gap(r.eigenvalues, 1e-7);
  if (!r.flag) r.min_imag = 0.0;
  return r;
}

/// Fat at p iff the connecting isomorphism has no real eigenvalue.
inline FatResult is_fat_at(const Distribution2& d, const Vector& p, double tol = 1e-9) {
  Matrix frame;
  try {
    frame = kernel_frame(d, p);
  } catch (const DomainError&) {
    return {};
  }
  if (frame.cols() == 0) return {};
  auto c = curvature_matrices(d, p, frame);
  return fatness_from_curvature(c.omega1, c.omega2, tol);
}

/// Pfaffian of an antisymmetric matrix (zero for odd size).
inline double pfaffian(Matrix a) {
  const auto n = a.rows();
  if (n != a.cols()) throw DimensionError("pfaffian needs a square matrix");
  if (n % 2 == 1) return 0.0;
  double pf = 1.0;
  for (Eigen::Index k = 0; k + 1 < n; k += 2) {
    Eigen::Index piv;
    a.row(k).tail(n - k - 1).cwiseAbs().maxCoeff(&piv);
    piv += k + 1;
    if (piv != k + 1) {
      a.row(k + 1).swap(a.row(piv));
      a.col(k + 1).swap(a.col(piv));
      pf = -pf;
    }
    const double p = a(k, k + 1);
    if (p == 0.0) return 0.0;
    pf *= p;
    for (Eigen::Index i = k + 2; i < n; ++i) {
      const double t = a(k, i) / p;
      a.row(i) -= t * a.row(k + 1);
      a.col(i) -= t * a.col(k + 1);
    }
  }
  return pf;
}

namespace detail {

/// True iff the sampled function on a closed loop has no sample at or below
/// `floor` in modulus and never changes sign, with `wrap_sign` applied across
/// the seam.
inline bool nonvanishing_on_loop(const std::vector<double>& f, double floor, double wrap_sign) {
  for (double v : f)
    if (!(std::abs(v) > floor)) return false;
  for (std::size_t i = 0; i + 1 < f.size(); ++i)
    if ((f[i] > 0) != (f[i + 1] > 0)) return false;
  return (f.back() > 0) == (wrap_sign * f.front() > 0);
}

}  // namespace detail

/// Samples Pf(cos θ Ω₁ + sin θ Ω₂) at K equispaced θ ∈ [0, π). Fails on a
/// vanishing sample or on a sign change between neighbours (a zero crossed
/// between samples). Across θ = π the Pfaffian picks up (-1)^n.
inline bool sphere_test_curvature(const Matrix& omega1, const Matrix& omega2, int K = 360, double tol = 1e-12) {
  if (K < 8) throw DomainError("sphere test needs at least 8 samples");
  const auto k = omega1.rows();
  if (k == 0 || k % 2 == 1) return false;
  const double scale = std::max(omega1.norm(), omega2.norm());
  if (scale == 0.0) return false;
  std::vector<double> f(K);
  for (int i = 0; i < K; ++i) {
    const double th = std::numbers::pi * i / K;
    f[i] = pfaffian((std::cos(th) * omega1 + std::sin(th) * omega2) / scale);
  }
  const double wrap = (k / 2) % 2 == 0 ? 1.0 : -1.0;
  return detail::nonvanishing_on_loop(f, tol, wrap);
}

inline bool sphere_test(const Distribution2& d, const Vector& p, int K = 360, double tol = 1e-12) {
  if (K < 8) throw DomainError("sphere test needs at least 8 samples");
  Matrix frame;
  try {
    frame = kernel_frame(d, p);
  } catch (const DomainError&) {
    return false;
  }
  auto c = curvature_matrices(d, p, frame);
  return sphere_test_curvature(c.omega1, c.omega2, K, tol);
}

/// Matrix of ω = Σ (da_i ∧ λⁱ + a_i dλⁱ) at (p, a) on R^m × R² (coordinates
/// (x, a1, a2)).
inline Matrix symplectisation_matrix(const Distribution2& d, const Vector& p, const std::array<double, 2>& a) {
  const int m = d.dim();
  Matrix w = Matrix::Zero(m + 2, m + 2);
  w.topLeftCorner(m, m) = a[0] * d.d1().eval(p) + a[1] * d.d2().eval(p);
  Matrix ev = d.eval(p);
  for (int i = 0; i < 2; ++i) {
    w.row(m + i).head(m) = ev.row(i);
    w.col(m + i).head(m) = -ev.row(i).transpose();
  }
  return w;
}

/// Non-degeneracy of ω at (p, a).
inline bool symplectisation_check(const Distribution2& d, const Vector& p, const std::array<double, 2>& a,
                                  double tol = 1e-10) {
  if (a[0] == 0.0 && a[1] == 0.0) throw DomainError("zero covector: (a1, a2) must be nonzero");
  Matrix w = symplectisation_matrix(d, p, a);
  return numerical_rank(w, tol) == w.rows();
}

/// Fatness read off the symplectisation alone: Pf ω(p, a) sampled over the
/// full circle of a, rejecting vanishing samples and sign changes.
inline bool symplectisation_fat(const Distribution2& d, const Vector& p, int K = 360, double tol = 1e-12) {
  if (K < 8) throw DomainError("symplectisation test needs at least 8 samples");
  const Matrix m1 = d.d1().eval(p), m2 = d.d2().eval(p);
  const Matrix ev = d.eval(p);
  const int m = d.dim();
  const double scale = std::max({m1.norm(), m2.norm(), ev.norm(), 1e-300});
  std::vector<double> f(2 * K);
  for (int i = 0; i < 2 * K; ++i) {
    const double th = std::numbers::pi * i / K;
    Matrix w = Matrix::Zero(m + 2, m + 2);
    w.topLeftCorner(m, m) = (std::cos(th) * m1 + std::sin(th) * m2) / scale;
    for (int r = 0; r < 2; ++r) {
      w.row(m + r).head(m) = ev.row(r) / scale;
      w.col(m + r).head(m) = -ev.row(r).transpose() / scale;
    }
    f[i] = pfaffian(w);
  }
  return detail::nonvanishing_on_loop(f, tol, 1.0);
}

/// Three forms λ_X = dz_X + ½ Σ (W_X)_{jk} x_j dx_k on R⁴ × R³ with dλ_X|R⁴ = ω_X,
/// ω_X(u, v) = <X u, v> for X = left multiplication by i, j, k on H = R⁴.
struct CorankThree {
  std::array<OneForm, 3> lambda{OneForm(7), OneForm(7), OneForm(7)};
  std::array<Matrix, 3> complex_structures;
};

inline std::array<Matrix, 3> quaternion_structures() {
  // basis 1, i, j, k of H; left multiplication
  Matrix qi(4, 4), qj(4, 4), qk(4, 4);
  qi << 0, -1, 0, 0, 1, 0, 0, 0, 0, 0, 0, -1, 0, 0, 1, 0;
  qj << 0, 0, -1, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, -1, 0, 0;
  qk << 0, 0, 0, -1, 0, 0, -1, 0, 0, 1, 0, 0, 1, 0, 0, 0;
  return {qi, qj, qk};
}

inline CorankThree quaternionic_fatization() {
  CorankThree out;
  out.complex_structures = quaternion_structures();
  for (int s = 0; s < 3; ++s) {
    Matrix w = out.complex_structures[s].transpose();  // ω(u, v) = uᵀ W v = <Xu, v>
    OneForm l = OneForm::differential(7, 4 + s);
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        if (w(j, k) != 0.0) l.coeff(k) += Poly::variable(7, j, 0.5 * w(j, k));
    out.lambda[s] = l;
  }
  return out;
}

/// Σ a_s dλ_s restricted to the R⁴ factor at p.
inline Matrix corank_three_combination(const CorankThree& q, const Vector& p, const std::array<double, 3>& a) {
  if (a[0] == 0.0 && a[1] == 0.0 && a[2] == 0.0) throw DomainError("zero covector: combination must be nonzero");
  Matrix m = Matrix::Zero(7, 7);
  for (int s = 0; s < 3; ++s) m += a[s] * exterior_derivative(q.lambda[s]).eval(p);
  return m.topLeftCorner(4, 4);
}

struct NilpotentData {
  Matrix omega1;
  Matrix omega2;
  Matrix frame;
};

inline NilpotentData nilpotentisation_at(const Distribution2& d, const Vector& p) {
  auto c = curvature_matrices(d, p);
  return {c.omega1, c.omega2, c.frame};
}

/// λⁱ = dz_i + ½ Σ (Ω_i)_{jk} x_j dx_k on R^{2n+2} = (x_1..x_2n, z1, z2).
inline Distribution2 model_forms(const NilpotentData& nd) {
  const auto k = nd.omega1.rows();
  if (k != nd.omega1.cols() || nd.omega2.rows() != k || nd.omega2.cols() != k)
    throw DimensionError("structure constant matrices must be square of equal size");
  if ((nd.omega1 + nd.omega1.transpose()).cwiseAbs().maxCoeff() > 1e-12 ||
      (nd.omega2 + nd.omega2.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw DomainError("structure constants must be antisymmetric");
  const int m = static_cast<int>(k) + 2;
  std::array<OneForm, 2> ls{OneForm::differential(m, m - 2), OneForm::differential(m, m - 1)};
  const std::array<const Matrix*, 2> om{&nd.omega1, &nd.omega2};
  for (int s = 0; s < 2; ++s)
    for (int j = 0; j < k; ++j)
      for (int l = 0; l < k; ++l)
        if ((*om[s])(j, l) != 0.0) ls[s].coeff(l) += Poly::variable(m, j, 0.5 * (*om[s])(j, l));
  std::vector<std::string> names;
  for (int i = 0; i < k; ++i) names.push_back("u" + std::to_string(i + 1));
  names.push_back("z1");
  names.push_back("z2");
  return Distribution2(ls[0], ls[1], names);
}

/// Random corank-2 distribution with affine coefficients, entries N(0, 1).
inline Distribution2 random_affine_distribution(int m, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::array<OneForm, 2> ls{OneForm(m), OneForm(m)};
  for (auto& l : ls)
    for (int i = 0; i < m; ++i) {
      Poly c = Poly::constant(m, g(rng));
      for (int k = 0; k < m; ++k) c += Poly::variable(m, k, g(rng));
      l.coeff(i) = c;
    }
  return Distribution2(ls[0], ls[1]);
}

// ---------------------------------------------------------------------------
// Text format. Comments start with '#'. An optional header line
//   vars: x11 x12 z1 z2 y11 y12
// names the coordinates (otherwise `dim: m` gives x1..xm). Then exactly two
// lines, one per form, each a signed sum of terms `coef*x1^2*y3 dx4`.

namespace detail {

inline std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct FormParser {
  const std::vector<std::string>& names;
  int line;
  std::string s;
  std::size_t pos = 0;

  int lookup(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == name) return static_cast<int>(i);
    throw ParseError("unknown coordinate '" + name + "'", line);
  }
  void skip_ws() {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  }
  bool at_end() {
    skip_ws();
    return pos >= s.size();
  }
  std::string ident() {
    skip_ws();
    std::size_t b = pos;
    while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_')) ++pos;
    if (b == pos) throw ParseError("expected a coordinate name at column " + std::to_string(b + 1), line);
    return s.substr(b, pos - b);
  }
  double number() {
    skip_ws();
    const char* begin = s.c_str() + pos;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) throw ParseError("expected a number at column " + std::to_string(pos + 1), line);
    pos += static_cast<std::size_t>(end - begin);
    return v;
  }

  OneForm parse() {
    const int m = static_cast<int>(names.size());
    OneForm out(m);
    bool first = true;
    while (!at_end()) {
      double sign = 1.0;
      if (s[pos] == '+' || s[pos] == '-') {
        sign = s[pos] == '-' ? -1.0 : 1.0;
        ++pos;
      } else if (!first) {
        throw ParseError("expected '+' or '-' between terms at column " + std::to_string(pos + 1), line);
      }
      first = false;
      skip_ws();
      double coef = 1.0;
      Poly::Exponent e(m, 0);
      if (pos < s.size() && (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.')) {
        coef = number();
        skip_ws();
        if (pos < s.size() && s[pos] == '*') ++pos;
      }
      int differential = -1;
      while (differential < 0) {
        std::string id = ident();
        skip_ws();
        bool more = pos < s.size() && s[pos] == '*';
        bool power = pos < s.size() && s[pos] == '^';
        if (id.size() > 1 && id[0] == 'd' && !power && !more && !names_contains(id)) {
          differential = lookup(id.substr(1));
          break;
        }
        int v = lookup(id);
        int k = 1;
        if (power) {
          ++pos;
          double kk = number();
          if (kk < 0 || kk != std::floor(kk)) throw ParseError("exponent must be a non-negative integer", line);
          k = static_cast<int>(kk);
          skip_ws();
          more = pos < s.size() && s[pos] == '*';
        }
        e[v] += k;
        if (more) ++pos;
      }
      Poly term(m);
      term.add_term(e, sign * coef);
      out.coeff(differential) += term;
    }
    if (first) throw ParseError("empty form", line);
    return out;
  }

  bool names_contains(const std::string& id) const {
    for (const auto& n : names)
      if (n == id) return true;
    return false;
  }
};

}  // namespace detail

inline Distribution2 parse_distribution(std::istream& in) {
  std::vector<std::string> names;
  std::vector<std::pair<std::string, int>> form_lines;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    auto hash = raw.find('#');
    std::string s = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.rfind("vars:", 0) == 0) {
      if (!names.empty() || !form_lines.empty()) throw ParseError("coordinate header must come first", line);
      std::istringstream is(s.substr(5));
      for (std::string t; is >> t;) names.push_back(t);
      if (names.empty()) throw ParseError("empty coordinate list", line);
      continue;
    }
    if (s.rfind("dim:", 0) == 0) {
      if (!names.empty() || !form_lines.empty()) throw ParseError("dimension header must come first", line);
      int m = 0;
      try {
        m = std::stoi(s.substr(4));
      } catch (const std::exception&) {
        throw ParseError("bad dimension", line);
      }
      if (m < 1) throw ParseError("dimension must be positive", line);
      for (int i = 0; i < m; ++i) names.push_back("x" + std::to_string(i + 1));
      continue;
    }
    form_lines.emplace_back(s, line);
  }
  if (names.empty()) throw ParseError("missing 'vars:' or 'dim:' header", 0);
  if (form_lines.size() != 2)
    throw ParseError("expected exactly two form lines, found " + std::to_string(form_lines.size()),
                     form_lines.empty() ? line : form_lines.back().second);
  std::vector<OneForm> forms;
  for (const auto& [text, ln] : form_lines) forms.push_back(detail::FormParser{names, ln, text}.parse());
  return Distribution2(forms[0], forms[1], names);
}

inline Distribution2 parse_distribution(const std::string& text) {
  std::istringstream in(text);
  return parse_distribution(in);
}

inline std::string format_distribution(const Distribution2& d) {
  std::ostringstream os;
  os << "vars:";
  for (const auto& n : d.names()) os << ' ' << n;
  os << '\n';
  for (const OneForm* f : {&d.lambda1(), &d.lambda2()}) {
    bool first = true;
    for (int i = 0; i < f->dim(); ++i)
      for (const auto& [e, c] : f->coeff(i).terms()) {
        os << (first ? (c < 0 ? "-" : "") : (c < 0 ? " - " : " + "));
        first = false;
        os.precision(17);
        os << std::abs(c);
        for (int v = 0; v < f->dim(); ++v)
          if (e[v] > 0) os << '*' << d.names()[v] << (e[v] > 1 ? "^" + std::to_string(e[v]) : "");
        os << " d" << d.names()[i];
      }
    if (first) os << "0 d" << d.names()[0];
    os << '\n';
  }
  return os.str();
}

}  // namespace preleg::forms
