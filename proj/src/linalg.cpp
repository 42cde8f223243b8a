#include "annular/linalg.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace annular {

IVec IVec::from_point(std::span<const double> x) {
  std::vector<Interval> v;
  v.reserve(x.size());
  for (double xi : x) v.emplace_back(xi);
  return IVec(std::move(v));
}

Vec IVec::mid() const {
  Vec m(v_.size());
  for (std::size_t i = 0; i < v_.size(); ++i) m[i] = v_[i].mid();
  return m;
}

double IVec::max_width() const {
  double w = 0.0;
  for (const auto& x : v_) w = std::max(w, x.width());
  return w;
}

Mat Mat::identity(std::size_t n) {
  Mat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

IMat IMat::identity(std::size_t n) {
  IMat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

IMat IMat::from_point(const Mat& m) {
  IMat r(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = m(i, j);
  return r;
}

Mat IMat::mid() const {
  Mat r(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r(i, j) = (*this)(i, j).mid();
  return r;
}

SparseIMat SparseIMat::from_dense(const IMat& m) {
  SparseIMat s{m.rows(), m.cols(), {}};
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (!(m(i, j) == Interval(0.0))) s.entries.push_back({i, j, m(i, j)});
  return s;
}

IMat SparseIMat::to_dense() const {
  IMat m(rows, cols);
  for (const auto& e : entries) m(e.row, e.col) = e.value;
  return m;
}

Mat SparseIMat::mid() const {
  Mat m(rows, cols);
  for (const auto& e : entries) m(e.row, e.col) = e.value.mid();
  return m;
}

IPoint to_ipoint(const Point& p) { return {Interval(p[0]), Interval(p[1])}; }

Point mid(const IPoint& p) { return {p[0].mid(), p[1].mid()}; }

IMat2 to_imat2(const Mat2& m) {
  return {{{Interval(m[0][0]), Interval(m[0][1])}, {Interval(m[1][0]), Interval(m[1][1])}}};
}

Mat2 mid(const IMat2& m) {
  return {{{m[0][0].mid(), m[0][1].mid()}, {m[1][0].mid(), m[1][1].mid()}}};
}

IPoint apply(const IMat2& m, const IPoint& v) {
  return {m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]};
}

IMat2 mul(const IMat2& a, const IMat2& b) {
  IMat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return r;
}

Interval det(const IMat2& m) { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }

IMat2 inverse(const IMat2& m) {
  const Interval d = det(m);
  if (d.contains_zero()) throw SingularMatrix("2x2 interval matrix may be singular");
  return {{{m[1][1] / d, -m[0][1] / d}, {-m[1][0] / d, m[0][0] / d}}};
}

namespace {
void check_same(std::size_t a, std::size_t b, const char* what) {
  if (a != b)
    throw DimensionMismatch(std::string(what) + ": " + std::to_string(a) + " vs " +
                            std::to_string(b));
}
}  // namespace

bool subset_interior(const IVec& inner, const IVec& outer) {
  check_same(inner.size(), outer.size(), "subset_interior");
  for (std::size_t i = 0; i < inner.size(); ++i)
    if (!outer[i].interior_contains(inner[i])) return false;
  return true;
}

bool subset(const IVec& inner, const IVec& outer) {
  check_same(inner.size(), outer.size(), "subset");
  for (std::size_t i = 0; i < inner.size(); ++i)
    if (!outer[i].contains(inner[i])) return false;
  return true;
}

bool contains(const IVec& box, std::span<const double> x) {
  check_same(box.size(), x.size(), "contains");
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!box[i].contains(x[i])) return false;
  return true;
}

IVec hull(const IVec& a, const IVec& b) {
  check_same(a.size(), b.size(), "hull");
  IVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = hull(a[i], b[i]);
  return r;
}

IVec imat_apply(const IMat& a, const IVec& v) {
  check_same(a.cols(), v.size(), "imat_apply");
  IVec r(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Interval s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * v[j];
    r[i] = s;
  }
  return r;
}

IMat imat_mul(const IMat& a, const IMat& b) {
  check_same(a.cols(), b.rows(), "imat_mul");
  IMat r(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      Interval s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      r(i, j) = s;
    }
  return r;
}

namespace {

struct DenseLU {
  Mat lu;
  std::vector<std::size_t> perm;
};

DenseLU factor(const Mat& m) {
  check_same(m.rows(), m.cols(), "LU of non-square matrix");
  const std::size_t n = m.rows();
  DenseLU f{m, std::vector<std::size_t>(n)};
  std::iota(f.perm.begin(), f.perm.end(), 0);
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(m(i, j)));
  Mat& a = f.lu;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(p, k))) p = i;
    if (!(std::abs(a(p, k)) > scale * 1e-300) || !std::isfinite(a(p, k)))
      throw SingularMatrix("LU pivot vanished");
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
      std::swap(f.perm[k], f.perm[p]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double l = a(i, k) / a(k, k);
      a(i, k) = l;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= l * a(k, j);
    }
  }
  return f;
}

Vec lu_solve(const DenseLU& f, std::span<const double> b) {
  const std::size_t n = f.perm.size();
  Vec x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[f.perm[i]];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) x[i] -= f.lu(i, j) * x[j];
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = i + 1; j < n; ++j) x[i] -= f.lu(i, j) * x[j];
    x[i] /= f.lu(i, i);
  }
  return x;
}

}  // namespace

Mat approx_inverse(const Mat& m) {
  const auto f = factor(m);
  const std::size_t n = m.rows();
  Mat inv(n, n);
  Vec e(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    const Vec col = lu_solve(f, e);
    e[j] = 0.0;
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  return inv;
}

Vec solve(const Mat& m, std::span<const double> b) {
  check_same(m.rows(), b.size(), "solve");
  return lu_solve(factor(m), b);
}

}  // namespace annular
