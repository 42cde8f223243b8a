#include "annular/krawczyk.hpp"

#include <algorithm>
#include <cmath>

#include "annular/banded.hpp"

namespace annular {

namespace {

template <class T>
Pair<T> v0_at(const ShootingProblem& p, const T& z) {
  if (const auto* v = std::get_if<Point>(&p.v0)) return {T((*v)[0]), T((*v)[1])};
  const auto& f = std::get<FrameFamily>(p.v0);
  const T zl = T(f.L) * z;
  return {T(f.A[0][0]) + T(f.A[0][1]) * zl, T(f.A[1][0]) + T(f.A[1][1]) * zl};
}

template <class T>
Pair<T> start_point(const ShootingProblem& p, const T& h0, const T& z) {
  const auto v0 = v0_at<T>(p, z);
  return {detail::param<T>(p.q0[0]) + h0 * v0[0], detail::param<T>(p.q0[1]) + h0 * v0[1]};
}

template <class T>
std::vector<T> residual(const ShootingProblem& p, std::span<const T> X, const T& z) {
  const std::size_t m = static_cast<std::size_t>(p.m);
  std::vector<T> r(2 * m);
  auto pt = [&](std::size_t k) { return Pair<T>{X[2 * k], X[2 * k + 1]}; };
  for (std::size_t k = 1; k + 1 <= m; ++k) {
    const auto img = apply_map<T>(p.map, pt(k));
    const Pair<T> next = k + 1 < m ? pt(k + 1)
                                   : Pair<T>{T(p.q1[0]) + X[1] * T(p.v1[0]),
                                             T(p.q1[1]) + X[1] * T(p.v1[1])};
    r[2 * (k - 1)] = img[0] - next[0];
    r[2 * (k - 1) + 1] = img[1] - next[1];
  }
  const auto img = apply_map<T>(p.map, start_point<T>(p, X[0], z));
  r[2 * m - 2] = img[0] - X[2];
  r[2 * m - 1] = img[1] - X[3];
  return r;
}

// Calls emit(row, col, value) once for every structurally nonzero entry of DF.
template <class T, class Emit>
void jacobian_entries(const ShootingProblem& p, std::span<const T> X, const T& z, Emit&& emit) {
  const std::size_t m = static_cast<std::size_t>(p.m);
  for (std::size_t k = 1; k + 1 <= m; ++k) {
    const std::size_t r = 2 * (k - 1);
    const auto J = map_jacobian<T>(p.map, Pair<T>{X[2 * k], X[2 * k + 1]});
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) emit(r + i, 2 * k + j, J[i][j]);
    if (k + 1 < m) {
      emit(r, 2 * k + 2, T(-1.0));
      emit(r + 1, 2 * k + 3, T(-1.0));
    } else {
      emit(r, 1, T(-p.v1[0]));
      emit(r + 1, 1, T(-p.v1[1]));
    }
  }
  const auto J = map_jacobian<T>(p.map, start_point<T>(p, X[0], z));
  const std::size_t r = 2 * m - 2;
  if (const auto* f = std::get_if<FrameFamily>(&p.v0)) {
    // J A (1, zL) taken column by column: J a_s stays small when a_s is close
    // to the stable direction, which a product with the interval v0 loses.
    const T s = z * T(f->L);
    for (std::size_t i = 0; i < 2; ++i) {
      const T ju = J[i][0] * T(f->A[0][0]) + J[i][1] * T(f->A[1][0]);
      const T js = J[i][0] * T(f->A[0][1]) + J[i][1] * T(f->A[1][1]);
      emit(r + i, 0, ju + s * js);
    }
  } else {
    const auto v0 = v0_at<T>(p, z);
    emit(r, 0, J[0][0] * v0[0] + J[0][1] * v0[1]);
    emit(r + 1, 0, J[1][0] * v0[0] + J[1][1] * v0[1]);
  }
  emit(r, 2, T(-1.0));
  emit(r + 1, 3, T(-1.0));
}

// Row/column permutation that makes DF banded with kl = ku = 2: the closing
// rows move to the top and h1 moves to the last column.
std::size_t band_row(std::size_t r, std::size_t n) { return r >= n - 2 ? r - (n - 2) : r + 2; }
std::size_t band_col(std::size_t c, std::size_t n) {
  if (c == 0) return 0;
  if (c == 1) return n - 1;
  return c - 1;
}

BandedLU banded_point_jacobian(const ShootingProblem& p, std::span<const double> X, double z) {
  const std::size_t n = p.dim();
  BandedLU lu(n, 2, 2);
  jacobian_entries<double>(p, X, z, [&](std::size_t r, std::size_t c, double v) {
    lu.set(band_row(r, n), band_col(c, n), v);
  });
  lu.factor();
  return lu;
}

Interval z_or_zero(const ShootingProblem& p, std::optional<Interval> z) {
  if (z.has_value() != p.z_domain.has_value())
    throw DomainError("z must be supplied exactly when the problem has a z domain");
  return z.value_or(Interval(0.0));
}

// `cf` encloses C F(X0) over all parameters.
Certificate krawczyk_core(const IVec& cf, const SparseIMat& DF, const IVec& box,
                          std::span<const double> X0, const Mat& C, kernels::Exec exec) {
  Certificate cert;
  cert.X_enclosure = box;
  const std::size_t n = box.size();
  if (X0.size() != n || cf.size() != n || C.rows() != n || C.cols() != n || DF.rows != n ||
      DF.cols != n)
    throw DimensionMismatch("krawczyk: inconsistent dimensions");
  if (!contains(box, X0)) {
    cert.reason = "X0 outside box";
    return cert;
  }
  const IMat M = kernels::identity_minus_product(C, DF, exec);
  IVec d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = box[i] - Interval(X0[i]);
  const IVec md = kernels::matvec(M, d, exec);
  IVec K(n);
  for (std::size_t i = 0; i < n; ++i) K[i] = Interval(X0[i]) - cf[i] + md[i];
  cert.K = K;
  cert.verified = subset_interior(K, box);
  if (!cert.verified) cert.reason = "K not inside box";
  return cert;
}

// Derivatives of F with respect to the interval data: map parameters, then
// q0 (x, y), then z when the problem has a z domain.
template <class T, class Emit>
void param_entries(const ShootingProblem& p, std::span<const T> X, const T& z, Emit&& emit) {
  const std::size_t m = static_cast<std::size_t>(p.m);
  const std::size_t np = static_cast<std::size_t>(param_count(p.map));
  for (std::size_t k = 1; k + 1 <= m; ++k) {
    const auto D = map_param_jacobian<T>(p.map, Pair<T>{X[2 * k], X[2 * k + 1]});
    for (std::size_t j = 0; j < np; ++j) {
      emit(2 * (k - 1), j, D[j][0]);
      emit(2 * (k - 1) + 1, j, D[j][1]);
    }
  }
  const auto p0 = start_point<T>(p, X[0], z);
  const auto D = map_param_jacobian<T>(p.map, p0);
  const auto J = map_jacobian<T>(p.map, p0);
  const std::size_t r = 2 * m - 2;
  for (std::size_t j = 0; j < np; ++j) {
    emit(r, j, D[j][0]);
    emit(r + 1, j, D[j][1]);
  }
  for (std::size_t j = 0; j < 2; ++j) {
    emit(r, np + j, J[0][j]);
    emit(r + 1, np + j, J[1][j]);
  }
  if (const auto* f = std::get_if<FrameFamily>(&p.v0)) {
    const T dx = X[0] * (T(f->A[0][1]) * T(f->L));
    const T dy = X[0] * (T(f->A[1][1]) * T(f->L));
    emit(r, np + 2, J[0][0] * dx + J[0][1] * dy);
    emit(r + 1, np + 2, J[1][0] * dx + J[1][1] * dy);
  }
}

// Encloses C F(X0, P) for every P in the interval data by the mean value form
// C F(X0, mid P) + sum_j (C dF/dP_j(X0, [P])) ([P_j] - mid P_j). Forming
// C dF/dP_j before scaling keeps the correlation between rows that share a
// parameter.
IVec enclose_CF0(const ShootingProblem& prob, std::span<const double> X0, const Mat& C,
                 std::optional<Interval> z, kernels::Exec exec) {
  const Interval zz = z_or_zero(prob, z);
  ShootingProblem mid = prob;
  const int np = param_count(prob.map);
  std::vector<Interval> P;
  for (int j = 0; j < np; ++j) {
    Interval& slot = param_slot(mid.map, j);
    P.push_back(slot);
    slot = Interval(slot.mid());
  }
  for (auto& q : mid.q0) {
    P.push_back(q);
    q = Interval(q.mid());
  }
  P.push_back(zz);
  const Interval zmid(zz.mid());

  const IVec X0i = IVec::from_point(X0);
  IVec cf = kernels::matvec(C, IVec(residual<Interval>(mid, X0i.span(), zmid)), exec);
  if (std::all_of(P.begin(), P.end(), [](const Interval& x) { return x.is_point(); })) return cf;

  const std::size_t n = prob.dim();
  std::vector<std::vector<std::pair<std::size_t, Interval>>> cols(P.size());
  param_entries<Interval>(prob, X0i.span(), zz,
                          [&](std::size_t r, std::size_t j, const Interval& v) {
                            if (!P[j].is_point() && !(v == Interval(0.0))) cols[j].push_back({r, v});
                          });
  for (std::size_t j = 0; j < P.size(); ++j) {
    if (P[j].is_point()) continue;
    const Interval dP = P[j] - Interval(P[j].mid());
    for (std::size_t i = 0; i < n; ++i) {
      Interval s = 0.0;
      for (const auto& [r, v] : cols[j])
        if (C(i, r) != 0.0) s += kernels::scale(C(i, r), v);
      cf[i] += s * dP;
    }
  }
  return cf;
}

Certificate failed(const IVec& box, std::string reason) {
  Certificate c;
  c.X_enclosure = box;
  c.reason = std::move(reason);
  return c;
}

}  // namespace

void ShootingProblem::check() const {
  if (m < 2) throw DomainError("shooting needs m >= 2");
  if (candidate.size() != dim())
    throw DimensionMismatch("candidate dimension " + std::to_string(candidate.size()) +
                            " != 2m = " + std::to_string(dim()));
  if (z_domain.has_value() != std::holds_alternative<FrameFamily>(v0))
    throw DomainError("a z domain requires the v0(z) = A(1, zL) form and vice versa");
}

IVec eval_F(const ShootingProblem& prob, const IVec& X, std::optional<Interval> z) {
  if (X.size() != prob.dim()) throw DimensionMismatch("eval_F: dim(X) != 2m");
  return IVec(residual<Interval>(prob, X.span(), z_or_zero(prob, z)));
}

SparseIMat eval_DF_sparse(const ShootingProblem& prob, const IVec& X, std::optional<Interval> z) {
  if (X.size() != prob.dim()) throw DimensionMismatch("eval_DF: dim(X) != 2m");
  SparseIMat s{prob.dim(), prob.dim(), {}};
  s.entries.reserve(5 * prob.dim());
  jacobian_entries<Interval>(prob, X.span(), z_or_zero(prob, z),
                             [&](std::size_t r, std::size_t c, const Interval& v) {
                               if (!(v == Interval(0.0))) s.entries.push_back({r, c, v});
                             });
  return s;
}

IMat eval_DF(const ShootingProblem& prob, const IVec& X, std::optional<Interval> z) {
  return eval_DF_sparse(prob, X, z).to_dense();
}

Vec eval_F_point(const ShootingProblem& prob, std::span<const double> X, double z) {
  if (X.size() != prob.dim()) throw DimensionMismatch("eval_F_point: dim(X) != 2m");
  return residual<double>(prob, X, z);
}

Certificate krawczyk_test(const FEval& F, const DFEval& DF, const IVec& box,
                          std::span<const double> X0, const Mat& C, kernels::Exec exec) {
  try {
    if (C.cols() != X0.size()) throw DimensionMismatch("krawczyk: inconsistent dimensions");
    const IVec cf = kernels::matvec(C, F(IVec::from_point(X0)), exec);
    return krawczyk_core(cf, SparseIMat::from_dense(DF(box)), box, X0, C, exec);
  } catch (const DimensionMismatch&) {
    throw;
  } catch (const Error& e) {
    return failed(box, e.what());
  }
}

Certificate krawczyk_test_param(const FZEval& F, const DFZEval& DF, const IVec& box,
                                std::span<const double> X0, const Mat& C, const Interval& Z,
                                kernels::Exec exec) {
  return krawczyk_test([&](const IVec& x) { return F(x, Z); },
                       [&](const IVec& x) { return DF(x, Z); }, box, X0, C, exec);
}

Certificate krawczyk_test(const ShootingProblem& prob, const IVec& box,
                          std::span<const double> X0, const Mat& C, std::optional<Interval> z,
                          kernels::Exec exec) {
  Certificate cert;
  try {
    cert = krawczyk_core(enclose_CF0(prob, X0, C, z, exec), eval_DF_sparse(prob, box, z), box,
                         X0, C, exec);
  } catch (const DimensionMismatch&) {
    throw;
  } catch (const Error& e) {
    return failed(box, e.what());
  }
  const Interval h1 = cert.solution()[1];
  cert.h1_enclosure = h1;
  cert.endpoint_enclosure = IVec{Interval(prob.q1[0]) + h1 * Interval(prob.v1[0]),
                                 Interval(prob.q1[1]) + h1 * Interval(prob.v1[1])};
  return cert;
}

Certificate krawczyk_test_param(const ShootingProblem& prob, const IVec& box,
                                std::span<const double> X0, const Mat& C, const Interval& Z,
                                kernels::Exec exec) {
  return krawczyk_test(prob, box, X0, C, Z, exec);
}

IVec inflate_candidate(std::span<const double> x, double eps_rel, double eps_abs) {
  return inflate_box(IVec::from_point(x), eps_rel, eps_abs);
}

IVec inflate_box(const IVec& box, double eps_rel, double eps_abs) {
  using namespace rounding;
  if (!(eps_rel >= 0) || !(eps_abs >= 0)) throw DomainError("inflation radii must be >= 0");
  IVec out(box.size());
  for (std::size_t i = 0; i < box.size(); ++i) {
    const double lo = box[i].lo(), hi = box[i].hi();
    const double rlo = add_up(eps_abs, mul_up(eps_rel, std::abs(lo)));
    const double rhi = add_up(eps_abs, mul_up(eps_rel, std::abs(hi)));
    out[i] = Interval(sub_down(lo, rlo), add_up(hi, rhi));
  }
  return out;
}

Mat shooting_preconditioner(const ShootingProblem& prob, const IVec& box,
                            std::optional<Interval> z) {
  const std::size_t n = prob.dim();
  const SparseIMat DF = eval_DF_sparse(prob, box, z);
  BandedLU lu(n, 2, 2);
  for (const auto& e : DF.entries) lu.set(band_row(e.row, n), band_col(e.col, n), e.value.mid());
  lu.factor();
  Mat C(n, n);
  Vec rhs(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    rhs[band_row(j, n)] = 1.0;
    const Vec y = lu.solve(rhs);
    rhs[band_row(j, n)] = 0.0;
    for (std::size_t i = 0; i < n; ++i) C(i, j) = y[band_col(i, n)];
  }
  return C;
}

std::optional<Vec> newton_refine(const ShootingProblem& prob, Vec x, double z, int max_iter) {
  const std::size_t n = prob.dim();
  if (x.size() != n) throw DimensionMismatch("newton_refine: dim(x) != 2m");
  auto sup_norm = [](std::span<const double> v) {
    double s = 0.0;
    for (double e : v) s = std::max(s, std::abs(e));
    return s;
  };
  Vec rhs(n);
  for (int it = 0; it < max_iter; ++it) {
    const Vec F = residual<double>(prob, x, z);
    if (!std::isfinite(sup_norm(F))) return std::nullopt;
    Vec y;
    try {
      const BandedLU lu = banded_point_jacobian(prob, x, z);
      for (std::size_t r = 0; r < n; ++r) rhs[band_row(r, n)] = F[r];
      y = lu.solve(rhs);
    } catch (const SingularMatrix&) {
      return std::nullopt;
    }
    double step = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = y[band_col(i, n)];
      x[i] -= d;
      step = std::max(step, std::abs(d));
    }
    if (!std::isfinite(step)) return std::nullopt;
    if (step <= 1e-15 * (1.0 + sup_norm(x))) break;
  }
  const double res = sup_norm(residual<double>(prob, x, z));
  if (!(res <= 1e-9 * (1.0 + sup_norm(x)))) return std::nullopt;
  return x;
}

std::optional<IVec> newton_hull(const ShootingProblem& prob, int max_iter) {
  const auto base = newton_refine(prob, prob.candidate, 0.0, max_iter);
  if (!base) return std::nullopt;

  auto slots = [](ShootingProblem& p) {
    std::vector<Interval*> s;
    if (p.map.family == Family::VSF) {
      s.push_back(&p.map.c);
    } else {
      s.push_back(&p.map.a);
      s.push_back(&p.map.b);
    }
    s.push_back(&p.q0[0]);
    s.push_back(&p.q0[1]);
    std::erase_if(s, [](const Interval* x) { return x->is_point(); });
    return s;
  };
  ShootingProblem probe = prob;
  const std::size_t k = slots(probe).size();
  std::vector<double> zs{0.0};
  if (prob.z_domain) zs = {prob.z_domain->lo(), -0.5, 0.0, 0.5, prob.z_domain->hi()};

  IVec hull_box = IVec::from_point(*base);
  for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
    ShootingProblem corner = prob;
    auto s = slots(corner);
    for (std::size_t i = 0; i < k; ++i) {
      const double v = (mask >> i) & 1 ? s[i]->hi() : s[i]->lo();
      *s[i] = Interval(v);
    }
    for (double z : zs) {
      if (prob.z_domain && !prob.z_domain->contains(z)) continue;
      const auto sol = newton_refine(corner, *base, z, max_iter);
      if (!sol) return std::nullopt;
      hull_box = hull(hull_box, IVec::from_point(*sol));
    }
  }
  return hull_box;
}

Certificate certify(ShootingProblem& prob, const CertifyOptions& opts) {
  prob.check();
  const auto refined = newton_refine(prob, prob.candidate);
  if (!refined) return failed(IVec::from_point(prob.candidate), "newton did not converge");
  prob.candidate = *refined;
  const auto base = newton_hull(prob);
  if (!base) return failed(IVec::from_point(prob.candidate), "newton did not converge at a corner");

  Certificate last = failed(*base, "no inflation radius tried");
  std::vector<double> growth = opts.hull_growth;
  if (base->max_width() == 0.0 || growth.empty()) growth = {0.0};
  for (double t : growth) {
    for (double r : opts.radii) {
      IVec grown(base->size());
      for (std::size_t i = 0; i < base->size(); ++i) {
        const Interval& h = (*base)[i];
        const double w = rounding::mul_up(t, h.width());
        grown[i] = Interval(rounding::sub_down(h.lo(), w), rounding::add_up(h.hi(), w));
      }
      const IVec box = inflate_box(grown, r, r);
      const Vec X0 = box.mid();
      Mat C;
      try {
        C = shooting_preconditioner(prob, box, prob.z_domain);
      } catch (const Error& e) {
        last = failed(box, e.what());
        continue;
      }
      last = krawczyk_test(prob, box, X0, C, prob.z_domain, opts.exec);
      if (last.verified) return last;
    }
  }
  return last;
}

}  // namespace annular
