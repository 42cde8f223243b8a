#include "annular/kernels.hpp"

#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace annular::kernels {

namespace {

constexpr std::size_t kParallelMinRows = 64;

void check(bool ok, const char* what) {
  if (!ok) throw DimensionMismatch(std::string("kernels: ") + what);
}

// One output row of Id - C*A. Entries of `a` are visited in stored order so
// every row is summed in the same sequence regardless of scheduling.
void idmp_row(const Mat& c, const SparseIMat& a, std::size_t i, IMat& out) {
  const auto crow = c.row(i);
  for (const auto& e : a.entries) {
    const double ci = crow[e.row];
    if (ci == 0.0) continue;
    out(i, e.col) += scale(ci, e.value);
  }
  for (std::size_t j = 0; j < out.cols(); ++j) {
    out(i, j) = (i == j ? Interval(1.0) : Interval(0.0)) - out(i, j);
  }
}

Interval imv_row(const IMat& m, const IVec& v, std::size_t i) {
  Interval s = 0.0;
  for (std::size_t j = 0; j < m.cols(); ++j) s += m(i, j) * v[j];
  return s;
}

Interval pmv_row(const Mat& m, const IVec& v, std::size_t i) {
  Interval s = 0.0;
  const auto row = m.row(i);
  for (std::size_t j = 0; j < m.cols(); ++j)
    if (row[j] != 0.0) s += scale(row[j], v[j]);
  return s;
}

bool use_parallel(Exec exec, std::size_t rows) {
  if (exec == Exec::Serial) return false;
  if (exec == Exec::Parallel) return true;
  return rows >= kParallelMinRows && parallel_available();
}

}  // namespace

bool parallel_available() {
#ifdef _OPENMP
  return !omp_in_parallel() && omp_get_max_threads() > 1;
#else
  return false;
#endif
}

namespace serial {

IMat identity_minus_product(const Mat& c, const SparseIMat& a) {
  check(c.cols() == a.rows && c.rows() == a.cols, "identity_minus_product shape");
  IMat out(c.rows(), a.cols);
  for (std::size_t i = 0; i < c.rows(); ++i) idmp_row(c, a, i, out);
  return out;
}

IVec matvec(const IMat& m, const IVec& v) {
  check(m.cols() == v.size(), "matvec shape");
  IVec r(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) r[i] = imv_row(m, v, i);
  return r;
}

IVec matvec(const Mat& m, const IVec& v) {
  check(m.cols() == v.size(), "matvec shape");
  IVec r(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) r[i] = pmv_row(m, v, i);
  return r;
}

}  // namespace serial

namespace parallel {

// Exceptions must not escape an OpenMP region; rows are computed into
// preallocated storage and the only throwing paths (NaN) are captured.
IMat identity_minus_product(const Mat& c, const SparseIMat& a) {
  check(c.cols() == a.rows && c.rows() == a.cols, "identity_minus_product shape");
  IMat out(c.rows(), a.cols);
  const auto n = static_cast<long>(c.rows());
  bool failed = false;
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    try {
      idmp_row(c, a, static_cast<std::size_t>(i), out);
    } catch (...) {
#pragma omp atomic write
      failed = true;
    }
  }
  if (failed) throw DomainError("identity_minus_product produced NaN");
  return out;
}

IVec matvec(const IMat& m, const IVec& v) {
  check(m.cols() == v.size(), "matvec shape");
  IVec r(m.rows());
  const auto n = static_cast<long>(m.rows());
  bool failed = false;
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    try {
      r[static_cast<std::size_t>(i)] = imv_row(m, v, static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp atomic write
      failed = true;
    }
  }
  if (failed) throw DomainError("matvec produced NaN");
  return r;
}

IVec matvec(const Mat& m, const IVec& v) {
  check(m.cols() == v.size(), "matvec shape");
  IVec r(m.rows());
  const auto n = static_cast<long>(m.rows());
  bool failed = false;
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    try {
      r[static_cast<std::size_t>(i)] = pmv_row(m, v, static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp atomic write
      failed = true;
    }
  }
  if (failed) throw DomainError("matvec produced NaN");
  return r;
}

}  // namespace parallel

IMat identity_minus_product(const Mat& c, const SparseIMat& a, Exec exec) {
  return use_parallel(exec, c.rows()) ? parallel::identity_minus_product(c, a)
                                      : serial::identity_minus_product(c, a);
}

IVec matvec(const IMat& m, const IVec& v, Exec exec) {
  return use_parallel(exec, m.rows()) ? parallel::matvec(m, v) : serial::matvec(m, v);
}

IVec matvec(const Mat& m, const IVec& v, Exec exec) {
  return use_parallel(exec, m.rows()) ? parallel::matvec(m, v) : serial::matvec(m, v);
}

}  // namespace annular::kernels
