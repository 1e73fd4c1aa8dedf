// Shared numeric helpers: error types, SVD-based rank tools, threading.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace preleg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Raised when a computed object fails its own internal consistency gate.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

inline constexpr double kDefaultRankTol = 1e-9;

inline Vector singular_values(const Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return Vector();
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues();
}

/// Count of singular values above `rel_tol` times the largest one.
inline int numerical_rank(const Vector& sv, double rel_tol = kDefaultRankTol) {
  if (sv.size() == 0 || sv(0) <= 0.0) return 0;
  const double cut = rel_tol * sv(0);
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) ++r;
  return r;
}

inline int numerical_rank(const Matrix& m, double rel_tol = kDefaultRankTol) {
  return numerical_rank(singular_values(m), rel_tol);
}

/// k-th singular value (1-based), zero when the matrix has fewer.
inline double kth_singular_value(const Vector& sv, int k) {
  if (k < 1 || k > sv.size()) return 0.0;
  return sv(k - 1);
}

/// Orthonormal basis of the column span.
inline Matrix orthonormal_basis(const Matrix& m, double rel_tol = kDefaultRankTol) {
  if (m.cols() == 0) return Matrix(m.rows(), 0);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU);
  int r = numerical_rank(svd.singularValues(), rel_tol);
  return svd.matrixU().leftCols(r);
}

/// Orthonormal basis of the right null space.
inline Matrix null_space(const Matrix& m, double rel_tol = kDefaultRankTol) {
  const auto n = m.cols();
  if (m.rows() == 0) return Matrix::Identity(n, n);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  int r = numerical_rank(svd.singularValues(), rel_tol);
  return svd.matrixV().rightCols(n - r);
}

/// Vector N with <N, w> = det[v_1, ..., v_{d-1}, w]; orthogonal to every v_i.
inline Vector generalized_cross(const Matrix& vs) {
  const auto d = vs.rows();
  if (vs.cols() != d - 1) throw DimensionError("generalized_cross needs d-1 vectors in R^d");
  Vector out(d);
  Matrix m(d, d);
  m.leftCols(d - 1) = vs;
  for (Eigen::Index i = 0; i < d; ++i) {
    m.col(d - 1).setZero();
    m(i, d - 1) = 1.0;
    out(i) = m.determinant();
  }
  return out;
}

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

/// Thread cap: PRELEG_THREADS if set, otherwise the hardware concurrency.
inline unsigned thread_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("PRELEG_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return std::min<unsigned>(static_cast<unsigned>(v), 256u);
  }
  return hw;
}

/// Runs fn(i) for i in [0, n); results must be written to per-index slots.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const unsigned t = std::min<std::size_t>(thread_count(), std::max<std::size_t>(n, 1));
  if (t <= 1 || n < 64) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(t);
  pool.reserve(t);
  for (unsigned w = 0; w < t; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += t) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace preleg
