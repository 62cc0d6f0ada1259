#pragma once

// The fractional M-Laplacian applied pointwise, its weak form, and the
// cross-check between the two.

#include <cmath>
#include <string>

#include "folab/pair_kernel.hpp"
#include "folab/sobolev.hpp"

namespace folab {

struct KernelQuadrature {
  enum class PV { SymmetricPairs };

  BoxDomain outer_box;
  PV pv_policy = PV::SymmetricPairs;
  Exterior exterior = Exterior::Box;
  double margin_fraction = 0.25;  // required distance of supports from the box edge, relative to the diameter
  bool check_margin = true;
  bool diagonal_correction = true;  // 1-D: both the pointwise and the weak form add the skipped diagonal cell from a Taylor model

  explicit KernelQuadrature(const BoxDomain& box) : outer_box(box) {}
};

/// Throws precondition_error("support margin") when u is nonzero closer than
/// margin_fraction * diameter to the edge of the outer box.
inline void check_support(const GridFunction& u, const KernelQuadrature& kq, const char* which = "u") {
  if (!(u.domain() == kq.outer_box)) throw shape_error("grid function does not live on the outer box");
  if (!kq.check_margin) return;
  const auto& dom = kq.outer_box;
  const double margin = kq.margin_fraction * dom.diameter();
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] == 0.0) continue;
    const auto x = dom.point(i);
    for (int k = 0; k < dom.d(); ++k) {
      if (x[k] - dom.lo(k) < margin - 1e-12 || dom.hi(k) - x[k] < margin - 1e-12)
        throw precondition_error("support margin", std::string(which) + " is nonzero within " + std::to_string(margin) +
                                                       " of the outer box edge");
    }
  }
}

/// (-Delta)^s_m u at every grid point: the sum over y != x is taken as
/// m(h_u(x,x+z)) + m(h_u(x,x-z)) over mirrored offsets z, one-sided where the
/// mirror leaves the box; in 1-D the diagonal cell is added from a local
/// quadratic model of u.
inline GridFunction apply_mlap(const GridFunction& u, const NFunction& M, const FractionalParams& fp,
                               const KernelQuadrature& kq) {
  detail::match(u, fp);
  check_support(u, kq);
  const PairKernel k(kq.outer_box, fp.s, kq.exterior);
  GridFunction out = k.apply(u, M);
  if (kq.diagonal_correction && fp.d == 1) out += k.diagonal_correction(u, M);
  return out;
}

/// <(-Delta)^s_m u, v> = (1/2) sum_{x != y} m(h_u) h_v w^2 / |x-y|^d, plus
/// the diagonal cell in 1-D when enabled.
inline double weak_pairing(const GridFunction& u, const GridFunction& v, const NFunction& M, const FractionalParams& fp,
                           const KernelQuadrature& kq) {
  detail::match(u, fp);
  check_support(u, kq, "u");
  check_support(v, kq, "v");
  const PairKernel k(kq.outer_box, fp.s, kq.exterior);
  double r = k.pairing(u, v, M);
  if (kq.diagonal_correction && fp.d == 1) r += k.pairing_diagonal_correction(u, v, M);
  return r;
}

struct ConsistencyReport {
  double pointwise = 0.0;  // sum_x apply_mlap(u)(x) v(x) w
  double weak = 0.0;       // weak_pairing(u, v)
  double rel_error = 0.0;
};

inline ConsistencyReport consistency_check(const GridFunction& u, const GridFunction& v, const NFunction& M,
                                           const FractionalParams& fp, const KernelQuadrature& kq) {
  ConsistencyReport r;
  r.weak = weak_pairing(u, v, M, fp, kq);
  r.pointwise = inner(apply_mlap(u, M, fp, kq), v);
  const double diff = std::abs(r.pointwise - r.weak);
  r.rel_error = r.weak == 0.0 ? (diff == 0.0 ? 0.0 : HUGE_VAL) : diff / std::abs(r.weak);
  return r;
}

}  // namespace folab
