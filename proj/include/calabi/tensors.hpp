#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace calabi {

std::int64_t binomial(int n, int k);

// Thrown by SpdFactor when a pivot falls below the positive-definiteness
// threshold. pivot_index is 1-based.
class NotPositiveDefinite : public std::runtime_error {
public:
  NotPositiveDefinite(int index, double pivot);
  int pivot_index;
  double pivot_value;
};

// Fully symmetric tensor of order 1..4 on an n-dimensional space.
// Storage is one double per non-decreasing multi-index, so reading any
// permutation of a multi-index returns the same entry by construction.
class SymTensor {
public:
  SymTensor(int dim, int order);

  int dim() const { return dim_; }
  int order() const { return order_; }
  std::size_t size() const { return a_.size(); }

  double get(std::span<const int> idx) const { return a_[index_of(idx)]; }
  void set(std::span<const int> idx, double v) { a_[index_of(idx)] = v; }
  void add(std::span<const int> idx, double v) { a_[index_of(idx)] += v; }

  double operator()(int i) const;
  double operator()(int i, int j) const;
  double operator()(int i, int j, int k) const;
  double operator()(int i, int j, int k, int l) const;

  std::span<const double> raw() const { return a_; }
  std::span<double> raw_mutable() { return a_; }

  double max_abs() const;

  // Applies fn(idx, multiplicity) to every canonical (non-decreasing)
  // multi-index; multiplicity is the number of distinct permutations.
  template <typename Fn>
  void for_each_canonical(Fn&& fn) const;

  static std::size_t canonical_count(int dim, int order);

  // combinatorial rank of a non-decreasing multi-index; the storage order
  // shared by SymTensor and the derivative tables
  static std::size_t multiset_rank(std::span<const int> sorted_idx);

private:
  std::size_t index_of(std::span<const int> idx) const;

  int dim_;
  int order_;
  std::vector<double> a_;
};

// Dense tensor of order 0..4; used for objects without full symmetry
// (Christoffel symbols, curvature, covariant derivatives).
class DenseTensor {
public:
  DenseTensor(int dim, int order);

  int dim() const { return dim_; }
  int order() const { return order_; }

  double& at(std::span<const int> idx) { return a_[flat(idx)]; }
  double at(std::span<const int> idx) const { return a_[flat(idx)]; }

  double& operator()(int i);
  double& operator()(int i, int j);
  double& operator()(int i, int j, int k);
  double& operator()(int i, int j, int k, int l);
  double operator()(int i) const;
  double operator()(int i, int j) const;
  double operator()(int i, int j, int k) const;
  double operator()(int i, int j, int k, int l) const;

  double max_abs() const;
  std::span<const double> raw() const { return a_; }

private:
  std::size_t flat(std::span<const int> idx) const;

  int dim_;
  int order_;
  std::vector<double> a_;
};

// Cholesky factor of a symmetric positive definite matrix given as an
// order-2 SymTensor. Pivots must exceed 1e-12 times the largest absolute
// input entry, otherwise NotPositiveDefinite is raised (or try_compute
// returns nullopt with the failing 1-based pivot index).
class SpdFactor {
public:
  static SpdFactor compute(const SymTensor& m);
  static std::optional<SpdFactor> try_compute(const SymTensor& m,
                                              int* bad_pivot = nullptr,
                                              double* bad_value = nullptr);

  int dim() const { return n_; }
  double log_det() const { return log_det_; }
  double pivot(int i) const { return lower_[static_cast<std::size_t>(i) * n_ + i]; }
  double min_pivot() const;

  // row-major n*n, strict upper triangle zero
  const std::vector<double>& lower() const { return lower_; }

  std::vector<double> solve(std::span<const double> rhs) const;
  void solve_in_place(std::span<double> rhs) const;
  SymTensor inverse() const;

  // u = L^T v maps the G-sphere to the Euclidean sphere; from_euclidean
  // is the inverse map v = L^{-T} u.
  std::vector<double> to_euclidean(std::span<const double> v) const;
  std::vector<double> from_euclidean(std::span<const double> u) const;

private:
  SpdFactor(int n) : n_(n), lower_(static_cast<std::size_t>(n) * n, 0.0) {}

  int n_;
  double log_det_ = 0.0;
  std::vector<double> lower_;
};

// Contraction of two fully symmetric tensors over the given slot pairs.
// Free slots of `a` come first in the result. Because both inputs are
// fully symmetric only the number of pairs matters, but the descriptor is
// validated (slots in range, no slot used twice, equal dims).
struct SlotPair {
  int a_slot;
  int b_slot;
};

DenseTensor contract(const SymTensor& a, const SymTensor& b,
                     std::span<const SlotPair> pairs);
double contract_scalar(const SymTensor& a, const SymTensor& b,
                       std::span<const SlotPair> pairs);

// ---- small dense matrix helpers ----

struct Matrix {
  Matrix() : rows(0), cols(0) {}
  Matrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}
  static Matrix identity(int n);

  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }

  int rows, cols;
  std::vector<double> a;
};

Matrix mat_mul(const Matrix& x, const Matrix& y);
Matrix mat_transpose(const Matrix& x);
std::vector<double> mat_vec(const Matrix& x, std::span<const double> v);

// Gaussian elimination with partial pivoting; nullopt when |det| does not
// exceed 1e-12 times the product of row max-norms.
std::optional<Matrix> mat_inverse(const Matrix& m, double* det_out = nullptr);

// Deterministic cyclic Jacobi for symmetric matrices. Eigenvalues are
// returned in descending order; eigenvectors are the columns of `vecs`,
// each with its largest-magnitude component made positive.
void jacobi_eigen_sym(const Matrix& sym, std::vector<double>& vals, Matrix& vecs);

// Householder completion: columns form an orthonormal basis of the
// complement of the given unit vector.
Matrix orthonormal_complement(std::span<const double> unit);

template <typename Fn>
void SymTensor::for_each_canonical(Fn&& fn) const {
  std::vector<int> idx(static_cast<std::size_t>(order_), 0);
  while (true) {
    // multiplicity = order! / prod(run lengths!)
    const int fact[5] = {1, 1, 2, 6, 24};
    int mult = fact[order_];
    int t = 0;
    while (t < order_) {
      int s = t;
      while (t < order_ && idx[t] == idx[s]) ++t;
      mult /= fact[t - s];
    }
    fn(std::span<const int>(idx), mult);
    int pos = order_ - 1;
    while (pos >= 0 && idx[pos] == dim_ - 1) --pos;
    if (pos < 0) break;
    int v = idx[pos] + 1;
    for (int q = pos; q < order_; ++q) idx[q] = v;
  }
}

}  // namespace calabi
