#include "calabi/tensors.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace calabi {

std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
  }
  return r;
}

NotPositiveDefinite::NotPositiveDefinite(int index, double pivot)
    : std::runtime_error("matrix not positive definite at pivot " +
                         std::to_string(index)),
      pivot_index(index),
      pivot_value(pivot) {}

// ---- SymTensor ----

SymTensor::SymTensor(int dim, int order) : dim_(dim), order_(order) {
  if (dim < 1 || order < 1 || order > 4) {
    throw std::invalid_argument("SymTensor: dim must be >=1, order in 1..4");
  }
  a_.assign(canonical_count(dim, order), 0.0);
}

std::size_t SymTensor::canonical_count(int dim, int order) {
  return static_cast<std::size_t>(binomial(dim + order - 1, order));
}

std::size_t SymTensor::index_of(std::span<const int> idx) const {
  if (static_cast<int>(idx.size()) != order_) {
    throw std::invalid_argument("SymTensor: wrong multi-index length");
  }
  std::array<int, 4> s{};
  for (int t = 0; t < order_; ++t) {
    if (idx[t] < 0 || idx[t] >= dim_) {
      throw std::out_of_range("SymTensor: index out of range");
    }
    s[static_cast<std::size_t>(t)] = idx[t];
  }
  std::sort(s.begin(), s.begin() + order_);
  return multiset_rank(std::span<const int>(s.data(), static_cast<std::size_t>(order_)));
}

std::size_t SymTensor::multiset_rank(std::span<const int> sorted_idx) {
  std::size_t r = 0;
  for (std::size_t t = 0; t < sorted_idx.size(); ++t) {
    r += static_cast<std::size_t>(
        binomial(sorted_idx[t] + static_cast<int>(t), static_cast<int>(t) + 1));
  }
  return r;
}

double SymTensor::operator()(int i) const {
  const int ix[1] = {i};
  return get(ix);
}
double SymTensor::operator()(int i, int j) const {
  const int ix[2] = {i, j};
  return get(ix);
}
double SymTensor::operator()(int i, int j, int k) const {
  const int ix[3] = {i, j, k};
  return get(ix);
}
double SymTensor::operator()(int i, int j, int k, int l) const {
  const int ix[4] = {i, j, k, l};
  return get(ix);
}

double SymTensor::max_abs() const {
  double m = 0.0;
  for (double v : a_) m = std::max(m, std::fabs(v));
  return m;
}

// ---- DenseTensor ----

DenseTensor::DenseTensor(int dim, int order) : dim_(dim), order_(order) {
  if (dim < 1 || order < 0 || order > 4) {
    throw std::invalid_argument("DenseTensor: dim must be >=1, order in 0..4");
  }
  std::size_t n = 1;
  for (int t = 0; t < order; ++t) n *= static_cast<std::size_t>(dim);
  a_.assign(n, 0.0);
}

std::size_t DenseTensor::flat(std::span<const int> idx) const {
  if (static_cast<int>(idx.size()) != order_) {
    throw std::invalid_argument("DenseTensor: wrong multi-index length");
  }
  std::size_t f = 0;
  for (int t = 0; t < order_; ++t) {
    if (idx[t] < 0 || idx[t] >= dim_) {
      throw std::out_of_range("DenseTensor: index out of range");
    }
    f = f * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(idx[t]);
  }
  return f;
}

double& DenseTensor::operator()(int i) {
  const int ix[1] = {i};
  return at(ix);
}
double& DenseTensor::operator()(int i, int j) {
  const int ix[2] = {i, j};
  return at(ix);
}
double& DenseTensor::operator()(int i, int j, int k) {
  const int ix[3] = {i, j, k};
  return at(ix);
}
double& DenseTensor::operator()(int i, int j, int k, int l) {
  const int ix[4] = {i, j, k, l};
  return at(ix);
}
double DenseTensor::operator()(int i) const {
  const int ix[1] = {i};
  return at(ix);
}
double DenseTensor::operator()(int i, int j) const {
  const int ix[2] = {i, j};
  return at(ix);
}
double DenseTensor::operator()(int i, int j, int k) const {
  const int ix[3] = {i, j, k};
  return at(ix);
}
double DenseTensor::operator()(int i, int j, int k, int l) const {
  const int ix[4] = {i, j, k, l};
  return at(ix);
}

double DenseTensor::max_abs() const {
  double m = 0.0;
  for (double v : a_) m = std::max(m, std::fabs(v));
  return m;
}

// ---- SpdFactor ----

std::optional<SpdFactor> SpdFactor::try_compute(const SymTensor& m, int* bad_pivot,
                                                double* bad_value) {
  if (m.order() != 2) {
    throw std::invalid_argument("SpdFactor: order-2 tensor required");
  }
  const int n = m.dim();
  const double threshold = 1e-12 * m.max_abs();
  SpdFactor f(n);
  auto& L = f.lower_;
  double logdet = 0.0;
  for (int j = 0; j < n; ++j) {
    double d = m(j, j);
    for (int k = 0; k < j; ++k) {
      const double ljk = L[static_cast<std::size_t>(j) * n + k];
      d -= ljk * ljk;
    }
    if (!(d > threshold)) {
      if (bad_pivot) *bad_pivot = j + 1;
      if (bad_value) *bad_value = d;
      return std::nullopt;
    }
    const double ljj = std::sqrt(d);
    L[static_cast<std::size_t>(j) * n + j] = ljj;
    logdet += 2.0 * std::log(ljj);
    for (int i = j + 1; i < n; ++i) {
      double s = m(i, j);
      for (int k = 0; k < j; ++k) {
        s -= L[static_cast<std::size_t>(i) * n + k] * L[static_cast<std::size_t>(j) * n + k];
      }
      L[static_cast<std::size_t>(i) * n + j] = s / ljj;
    }
  }
  f.log_det_ = logdet;
  return f;
}

SpdFactor SpdFactor::compute(const SymTensor& m) {
  int bad = 0;
  double val = 0.0;
  auto f = try_compute(m, &bad, &val);
  if (!f) throw NotPositiveDefinite(bad, val);
  return *f;
}

double SpdFactor::min_pivot() const {
  double p = lower_[0];
  for (int i = 1; i < n_; ++i) {
    p = std::min(p, lower_[static_cast<std::size_t>(i) * n_ + i]);
  }
  return p;
}

void SpdFactor::solve_in_place(std::span<double> rhs) const {
  const int n = n_;
  if (static_cast<int>(rhs.size()) != n) {
    throw std::invalid_argument("SpdFactor::solve: wrong rhs length");
  }
  // forward substitution L y = b
  for (int i = 0; i < n; ++i) {
    double s = rhs[static_cast<std::size_t>(i)];
    for (int k = 0; k < i; ++k) {
      s -= lower_[static_cast<std::size_t>(i) * n + k] * rhs[static_cast<std::size_t>(k)];
    }
    rhs[static_cast<std::size_t>(i)] = s / lower_[static_cast<std::size_t>(i) * n + i];
  }
  // backward substitution L^T x = y
  for (int i = n - 1; i >= 0; --i) {
    double s = rhs[static_cast<std::size_t>(i)];
    for (int k = i + 1; k < n; ++k) {
      s -= lower_[static_cast<std::size_t>(k) * n + i] * rhs[static_cast<std::size_t>(k)];
    }
    rhs[static_cast<std::size_t>(i)] = s / lower_[static_cast<std::size_t>(i) * n + i];
  }
}

std::vector<double> SpdFactor::solve(std::span<const double> rhs) const {
  std::vector<double> x(rhs.begin(), rhs.end());
  solve_in_place(x);
  return x;
}

SymTensor SpdFactor::inverse() const {
  SymTensor inv(n_, 2);
  std::vector<double> e(static_cast<std::size_t>(n_), 0.0);
  for (int j = 0; j < n_; ++j) {
    std::fill(e.begin(), e.end(), 0.0);
    e[static_cast<std::size_t>(j)] = 1.0;
    solve_in_place(e);
    for (int i = j; i < n_; ++i) {
      const int ix[2] = {i, j};
      inv.set(ix, e[static_cast<std::size_t>(i)]);
    }
  }
  return inv;
}

std::vector<double> SpdFactor::to_euclidean(std::span<const double> v) const {
  std::vector<double> u(static_cast<std::size_t>(n_), 0.0);
  for (int a = 0; a < n_; ++a) {
    double s = 0.0;
    for (int i = a; i < n_; ++i) {
      s += lower_[static_cast<std::size_t>(i) * n_ + a] * v[static_cast<std::size_t>(i)];
    }
    u[static_cast<std::size_t>(a)] = s;
  }
  return u;
}

std::vector<double> SpdFactor::from_euclidean(std::span<const double> u) const {
  // solve L^T v = u
  std::vector<double> v(u.begin(), u.end());
  for (int i = n_ - 1; i >= 0; --i) {
    double s = v[static_cast<std::size_t>(i)];
    for (int k = i + 1; k < n_; ++k) {
      s -= lower_[static_cast<std::size_t>(k) * n_ + i] * v[static_cast<std::size_t>(k)];
    }
    v[static_cast<std::size_t>(i)] = s / lower_[static_cast<std::size_t>(i) * n_ + i];
  }
  return v;
}

// ---- contraction ----

namespace {

void validate_pairs(const SymTensor& a, const SymTensor& b,
                    std::span<const SlotPair> pairs) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("contract: incompatible dimensions");
  }
  std::vector<bool> ua(static_cast<std::size_t>(a.order()), false);
  std::vector<bool> ub(static_cast<std::size_t>(b.order()), false);
  for (const auto& p : pairs) {
    if (p.a_slot < 0 || p.a_slot >= a.order() || p.b_slot < 0 || p.b_slot >= b.order()) {
      throw std::invalid_argument("contract: slot out of range");
    }
    if (ua[static_cast<std::size_t>(p.a_slot)] || ub[static_cast<std::size_t>(p.b_slot)]) {
      throw std::invalid_argument("contract: slot paired twice");
    }
    ua[static_cast<std::size_t>(p.a_slot)] = true;
    ub[static_cast<std::size_t>(p.b_slot)] = true;
  }
}

// Sum over one canonical contracted multi-index p (with multiplicity) of
// a(free_a, p) * b(free_b, p), iterating the free indices densely.
void accumulate_contraction(const SymTensor& a, const SymTensor& b, int c,
                            DenseTensor& out) {
  const int n = a.dim();
  const int fa = a.order() - c;
  const int fb = b.order() - c;
  const int fr = fa + fb;
  std::vector<int> p(static_cast<std::size_t>(std::max(c, 1)), 0);
  std::vector<int> ia(static_cast<std::size_t>(a.order()));
  std::vector<int> ib(static_cast<std::size_t>(b.order()));
  std::vector<int> fidx(static_cast<std::size_t>(std::max(fr, 1)), 0);

  auto loop_free = [&](double weight) {
    std::fill(fidx.begin(), fidx.end(), 0);
    while (true) {
      for (int t = 0; t < fa; ++t) ia[static_cast<std::size_t>(t)] = fidx[static_cast<std::size_t>(t)];
      for (int t = 0; t < c; ++t) ia[static_cast<std::size_t>(fa + t)] = p[static_cast<std::size_t>(t)];
      for (int t = 0; t < fb; ++t) ib[static_cast<std::size_t>(t)] = fidx[static_cast<std::size_t>(fa + t)];
      for (int t = 0; t < c; ++t) ib[static_cast<std::size_t>(fb + t)] = p[static_cast<std::size_t>(t)];
      const double va = a.get(std::span<const int>(ia.data(), ia.size()));
      const double vb = b.get(std::span<const int>(ib.data(), ib.size()));
      if (fr == 0) {
        out.at(std::span<const int>()) += weight * va * vb;
      } else {
        out.at(std::span<const int>(fidx.data(), static_cast<std::size_t>(fr))) +=
            weight * va * vb;
      }
      int pos = fr - 1;
      while (pos >= 0 && fidx[static_cast<std::size_t>(pos)] == n - 1) --pos;
      if (pos < 0) break;
      ++fidx[static_cast<std::size_t>(pos)];
      for (int q = pos + 1; q < fr; ++q) fidx[static_cast<std::size_t>(q)] = 0;
    }
  };

  if (c == 0) {
    loop_free(1.0);
    return;
  }
  std::fill(p.begin(), p.end(), 0);
  const int fact[5] = {1, 1, 2, 6, 24};
  while (true) {
    int mult = fact[c];
    int t = 0;
    while (t < c) {
      int s = t;
      while (t < c && p[static_cast<std::size_t>(t)] == p[static_cast<std::size_t>(s)]) ++t;
      mult /= fact[t - s];
    }
    loop_free(static_cast<double>(mult));
    int pos = c - 1;
    while (pos >= 0 && p[static_cast<std::size_t>(pos)] == n - 1) --pos;
    if (pos < 0) break;
    const int v = p[static_cast<std::size_t>(pos)] + 1;
    for (int q = pos; q < c; ++q) p[static_cast<std::size_t>(q)] = v;
  }
}

}  // namespace

DenseTensor contract(const SymTensor& a, const SymTensor& b,
                     std::span<const SlotPair> pairs) {
  validate_pairs(a, b, pairs);
  const int c = static_cast<int>(pairs.size());
  DenseTensor out(a.dim(), a.order() + b.order() - 2 * c);
  accumulate_contraction(a, b, c, out);
  return out;
}

double contract_scalar(const SymTensor& a, const SymTensor& b,
                       std::span<const SlotPair> pairs) {
  if (static_cast<int>(pairs.size()) * 2 != a.order() + b.order()) {
    throw std::invalid_argument("contract_scalar: pattern must pair every slot");
  }
  DenseTensor out = contract(a, b, pairs);
  return out.at(std::span<const int>());
}

// ---- matrices ----

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix mat_mul(const Matrix& x, const Matrix& y) {
  if (x.cols != y.rows) throw std::invalid_argument("mat_mul: shape mismatch");
  Matrix r(x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i) {
    for (int k = 0; k < x.cols; ++k) {
      const double v = x(i, k);
      if (v == 0.0) continue;
      for (int j = 0; j < y.cols; ++j) r(i, j) += v * y(k, j);
    }
  }
  return r;
}

Matrix mat_transpose(const Matrix& x) {
  Matrix r(x.cols, x.rows);
  for (int i = 0; i < x.rows; ++i) {
    for (int j = 0; j < x.cols; ++j) r(j, i) = x(i, j);
  }
  return r;
}

std::vector<double> mat_vec(const Matrix& x, std::span<const double> v) {
  if (x.cols != static_cast<int>(v.size())) {
    throw std::invalid_argument("mat_vec: shape mismatch");
  }
  std::vector<double> r(static_cast<std::size_t>(x.rows), 0.0);
  for (int i = 0; i < x.rows; ++i) {
    double s = 0.0;
    for (int j = 0; j < x.cols; ++j) s += x(i, j) * v[static_cast<std::size_t>(j)];
    r[static_cast<std::size_t>(i)] = s;
  }
  return r;
}

std::optional<Matrix> mat_inverse(const Matrix& m, double* det_out) {
  if (m.rows != m.cols) throw std::invalid_argument("mat_inverse: square required");
  const int n = m.rows;
  double scale = 1.0;
  for (int i = 0; i < n; ++i) {
    double rmax = 0.0;
    for (int j = 0; j < n; ++j) rmax = std::max(rmax, std::fabs(m(i, j)));
    scale *= rmax;
  }
  Matrix a = m;
  Matrix inv = Matrix::identity(n);
  double det = 1.0;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int i = col + 1; i < n; ++i) {
      if (std::fabs(a(i, col)) > std::fabs(a(piv, col))) piv = i;
    }
    if (piv != col) {
      for (int j = 0; j < n; ++j) {
        std::swap(a.a[static_cast<std::size_t>(piv) * n + j], a.a[static_cast<std::size_t>(col) * n + j]);
        std::swap(inv.a[static_cast<std::size_t>(piv) * n + j], inv.a[static_cast<std::size_t>(col) * n + j]);
      }
      det = -det;
    }
    const double d = a(col, col);
    det *= d;
    if (d == 0.0) {
      if (det_out) *det_out = 0.0;
      return std::nullopt;
    }
    for (int j = 0; j < n; ++j) {
      a(col, j) /= d;
      inv(col, j) /= d;
    }
    for (int i = 0; i < n; ++i) {
      if (i == col) continue;
      const double f = a(i, col);
      if (f == 0.0) continue;
      for (int j = 0; j < n; ++j) {
        a(i, j) -= f * a(col, j);
        inv(i, j) -= f * inv(col, j);
      }
    }
  }
  if (det_out) *det_out = det;
  if (!(std::fabs(det) > 1e-12 * scale)) return std::nullopt;
  return inv;
}

void jacobi_eigen_sym(const Matrix& sym, std::vector<double>& vals, Matrix& vecs) {
  if (sym.rows != sym.cols) throw std::invalid_argument("jacobi: square required");
  const int n = sym.rows;
  Matrix a = sym;
  vecs = Matrix::identity(n);
  double frob2 = 0.0;
  for (double v : a.a) frob2 += v * v;
  const int max_sweeps = 100;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    }
    if (off < 1e-30 * std::max(1.0, frob2)) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::fabs(apq) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = vecs(k, p), vkq = vecs(k, q);
          vecs(k, p) = c * vkp - s * vkq;
          vecs(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  vals.assign(static_cast<std::size_t>(n), 0.0);
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    vals[static_cast<std::size_t>(i)] = a(i, i);
    order[static_cast<std::size_t>(i)] = i;
  }
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
    return vals[static_cast<std::size_t>(x)] > vals[static_cast<std::size_t>(y)];
  });
  std::vector<double> sorted_vals(static_cast<std::size_t>(n));
  Matrix sorted_vecs(n, n);
  for (int j = 0; j < n; ++j) {
    const int src = order[static_cast<std::size_t>(j)];
    sorted_vals[static_cast<std::size_t>(j)] = vals[static_cast<std::size_t>(src)];
    int arg = 0;
    double best = -1.0;
    for (int i = 0; i < n; ++i) {
      const double m = std::fabs(vecs(i, src));
      if (m > best + 1e-15) {
        best = m;
        arg = i;
      }
    }
    const double sgn = vecs(arg, src) >= 0.0 ? 1.0 : -1.0;
    for (int i = 0; i < n; ++i) sorted_vecs(i, j) = sgn * vecs(i, src);
  }
  vals = std::move(sorted_vals);
  vecs = std::move(sorted_vecs);
}

Matrix orthonormal_complement(std::span<const double> unit) {
  const int n = static_cast<int>(unit.size());
  // Householder reflector H mapping e_axis to the unit vector; remaining
  // columns of H are the complement. axis = largest-|component| slot keeps
  // the reflector well conditioned.
  int axis = 0;
  for (int i = 1; i < n; ++i) {
    if (std::fabs(unit[static_cast<std::size_t>(i)]) >
        std::fabs(unit[static_cast<std::size_t>(axis)])) {
      axis = i;
    }
  }
  const double sgn = unit[static_cast<std::size_t>(axis)] >= 0.0 ? 1.0 : -1.0;
  std::vector<double> w(unit.begin(), unit.end());
  w[static_cast<std::size_t>(axis)] += sgn;
  double nrm2 = 0.0;
  for (double v : w) nrm2 += v * v;
  Matrix q(n, n - 1);
  int col = 0;
  for (int j = 0; j < n; ++j) {
    if (j == axis) continue;
    for (int i = 0; i < n; ++i) {
      double h = (i == j ? 1.0 : 0.0);
      if (nrm2 > 0.0) {
        h -= 2.0 * w[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(j)] / nrm2;
      }
      // H maps e_axis to -sgn*unit; either sign spans the same complement
      q(i, col) = h;
    }
    ++col;
  }
  return q;
}

}  // namespace calabi
