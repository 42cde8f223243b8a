#pragma once

// Dense interval kernels behind the Krawczyk operator. Each has a serial
// reference version and an OpenMP version that partitions output rows, so
// both produce bit-identical results.

#include "annular/linalg.hpp"

namespace annular::kernels {

enum class Exec { Serial, Parallel, Auto };

/// c * x with outward rounding, c a point value.
inline Interval scale(double c, const Interval& x) {
  using namespace rounding;
  if (c >= 0) return {mul_down(c, x.lo()), mul_up(c, x.hi())};
  return {mul_down(c, x.hi()), mul_up(c, x.lo())};
}

namespace serial {
/// Id - C * A for point C and sparse interval A.
IMat identity_minus_product(const Mat& c, const SparseIMat& a);
/// Interval matrix times interval vector.
IVec matvec(const IMat& m, const IVec& v);
/// Point matrix times interval vector.
IVec matvec(const Mat& m, const IVec& v);
}  // namespace serial

namespace parallel {
IMat identity_minus_product(const Mat& c, const SparseIMat& a);
IVec matvec(const IMat& m, const IVec& v);
IVec matvec(const Mat& m, const IVec& v);
}  // namespace parallel

IMat identity_minus_product(const Mat& c, const SparseIMat& a, Exec exec = Exec::Auto);
IVec matvec(const IMat& m, const IVec& v, Exec exec = Exec::Auto);
IVec matvec(const Mat& m, const IVec& v, Exec exec = Exec::Auto);

/// True when OpenMP is compiled in and the caller is not already inside a
/// parallel region.
bool parallel_available();

}  // namespace annular::kernels
