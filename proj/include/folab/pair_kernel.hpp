#pragma once

// Double sums over grid-point pairs against the kernel |x-y|^{-d}, with the
// difference quotient (u(x)-u(y)) |x-y|^{-s}. Uniform grids make every pair
// quantity a function of the index offset, so r^{-s} and w^2 r^{-d} are
// tabulated once per offset. Pairs x = y are skipped.
//
// In 1-D the function may be zero-extended to the whole line: the exterior
// cells form a lattice continuing the grid, summed explicitly for the first
// kExplicit cells and by the continuum integral plus Euler-Maclaurin midpoint
// corrections beyond.

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "folab/grid.hpp"
#include "folab/nfunction.hpp"

namespace folab {

enum class Exterior {
  Box,            // both variables range over the box only
  ZeroExtension,  // 1-D: u = 0 outside the box, the outer variable ranges over R
};

namespace detail {

inline constexpr int kExplicit = 64;

/// sum_{k>=0} h F(a + (k + 1/2) h) given the closed-form tail integral
/// I(A) = int_A^inf F.
template <class F, class I>
double lattice_tail(F&& f, I&& tail_integral, double a, double h) {
  double s = 0.0;
  for (int k = 0; k < kExplicit; ++k) s += h * f(a + (k + 0.5) * h);
  const double A = a + kExplicit * h, dl = 0.5 * h;
  const double d1 = (f(A + dl) - f(A - dl)) / (2.0 * dl);
  const double d3 = (f(A + 2 * dl) - 2.0 * f(A + dl) + 2.0 * f(A - dl) - f(A - 2 * dl)) / (2.0 * dl * dl * dl);
  return s + tail_integral(A) + h * h / 24.0 * d1 - 7.0 * h * h * h * h / 5760.0 * d3;
}

}  // namespace detail

class PairKernel {
 public:
  PairKernel(const BoxDomain& dom, double s, Exterior ext = Exterior::Box) : dom_(dom), s_(s), ext_(ext) {
    if (!(s > 0.0 && s < 1.0)) throw std::domain_error("pair kernel: s must lie in (0,1)");
    if (ext == Exterior::ZeroExtension && dom.d() != 1)
      throw unsupported_spec("zero extension to the whole space is implemented for d = 1 only");
    const int n = dom.n();
    const double w = dom.cell_volume();
    rho_.assign(static_cast<std::size_t>(n) * (dom.d() == 2 ? n : 1), 0.0);
    ker_ = rho_;
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < (dom.d() == 2 ? n : 1); ++b) {
        if (a == 0 && b == 0) continue;
        const double dx = a * dom.h(0), dy = dom.d() == 2 ? b * dom.h(1) : 0.0;
        const double r = std::sqrt(dx * dx + dy * dy);
        rho_[offset(a, b)] = std::pow(r, -s);
        ker_[offset(a, b)] = w * w / (dom.d() == 2 ? r * r : r);
      }
    }
  }

  const BoxDomain& domain() const { return dom_; }
  double s() const { return s_; }
  Exterior exterior() const { return ext_; }

  /// fn(i, j, rho, ker) for every unordered pair i < j.
  template <class Fn>
  void for_pairs(Fn&& fn) const {
    const int n = dom_.n();
    if (dom_.d() == 1) {
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) fn(i, j, rho_[j - i], ker_[j - i]);
      return;
    }
    const std::size_t N = dom_.size();
    for (std::size_t i = 0; i < N; ++i) {
      const int i0 = static_cast<int>(i % n), i1 = static_cast<int>(i / n);
      for (std::size_t j = i + 1; j < N; ++j) {
        const int j0 = static_cast<int>(j % n), j1 = static_cast<int>(j / n);
        const std::size_t o = offset(std::abs(j0 - i0), std::abs(j1 - i1));
        fn(static_cast<int>(i), static_cast<int>(j), rho_[o], ker_[o]);
      }
    }
  }

  /// sum over unordered pairs of fn(u_i - u_j, rho, ker), rows reduced pairwise.
  template <class Fn>
  double sum_pairs(const std::vector<double>& u, Fn&& fn) const {
    std::vector<double> rows(u.size(), 0.0);
    for_pairs([&](int i, int j, double rho, double ker) { rows[i] += fn(u[i] - u[j], rho, ker, i, j); });
    return pairwise_sum(rows);
  }

  /// Ordered-pair modular sum_{x != y} M(c h_u) w^2 / r^d, including the
  /// exterior pairs when zero-extended.
  double modular(const GridFunction& u, const NFunction& M, double c = 1.0) const {
    check(u);
    const double inside = 2.0 * sum_pairs(u.values(), [&](double du, double rho, double ker, int, int) {
      return M.M_pos(std::abs(c * du) * rho) * ker;
    });
    if (ext_ == Exterior::Box) return inside;
    std::vector<double> terms(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double v = c * u[i];
      terms[i] = v == 0.0 ? 0.0 : exterior_M(M, v, gap_left(i)) + exterior_M(M, v, gap_right(i));
    }
    return inside + 2.0 * u.weight() * pairwise_sum(terms);
  }

  /// (1/2) sum_{x != y} m(h_u) h_v w^2 / r^d over ordered pairs.
  double pairing(const GridFunction& u, const GridFunction& v, const NFunction& M) const {
    check(u);
    u.same_domain(v);
    const auto& vv = v.values();
    const double inside = sum_pairs(u.values(), [&](double du, double rho, double ker, int i, int j) {
      return M.m(du * rho) * (vv[i] - vv[j]) * rho * ker;
    });
    if (ext_ == Exterior::Box) return inside;
    std::vector<double> terms(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
      terms[i] = u[i] == 0.0 ? 0.0 : vv[i] * (exterior_m(M, u[i], gap_left(i)) + exterior_m(M, u[i], gap_right(i)));
    return inside + u.weight() * pairwise_sum(terms);
  }

  /// sum_{y != x} m(h_u(x,y)) w_y / r^{d+s} at every grid point, plus the exterior part.
  GridFunction apply(const GridFunction& u, const NFunction& M) const {
    check(u);
    const double w = u.weight();
    std::vector<double> acc(u.size(), 0.0);
    const auto& uv = u.values();
    for_pairs([&](int i, int j, double rho, double ker) {
      const double t = M.m((uv[i] - uv[j]) * rho) * rho * ker;
      acc[i] += t;
      acc[j] -= t;
    });
    GridFunction out(u.domain());
    for (std::size_t i = 0; i < u.size(); ++i) {
      out[i] = acc[i] / w;
      if (ext_ == Exterior::ZeroExtension && u[i] != 0.0)
        out[i] += exterior_m(M, u[i], gap_left(i)) + exterior_m(M, u[i], gap_right(i));
    }
    return out;
  }

  /// d/du_x of modular(u) divided by the cell weight: 2 * apply(u).
  GridFunction modular_gradient(const GridFunction& u, const NFunction& M) const { return 2.0 * apply(u, M); }

  /// Hessian of modular(u) with respect to the grid values (no weight division).
  Eigen::MatrixXd modular_hessian(const GridFunction& u, const NFunction& M) const {
    check(u);
    const std::size_t N = u.size();
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
    const auto& uv = u.values();
    for_pairs([&](int i, int j, double rho, double ker) {
      const double t = 2.0 * M.dm((uv[i] - uv[j]) * rho) * rho * rho * ker;
      H(i, j) -= t;
      H(j, i) -= t;
      H(i, i) += t;
      H(j, j) += t;
    });
    if (ext_ == Exterior::ZeroExtension) {
      for (std::size_t i = 0; i < N; ++i)
        H(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) +=
            2.0 * u.weight() * (exterior_dm(M, uv[i], gap_left(i)) + exterior_dm(M, uv[i], gap_right(i)));
    }
    return H;
  }

  /// 1-D: integral of m(h_u) |z|^{-1-s} over the skipped diagonal cell |z| < h/2,
  /// from the local quadratic Taylor model of u (zero outside the box).
  GridFunction diagonal_correction(const GridFunction& u, const NFunction& M) const {
    check(u);
    GridFunction out(u.domain());
    if (dom_.d() != 1) return out;
    const double h = dom_.h(0), half = 0.5 * h, s = s_;
    const std::size_t N = u.size();
    for (std::size_t i = 0; i < N; ++i) {
      const double um = i > 0 ? u[i - 1] : 0.0, up = i + 1 < N ? u[i + 1] : 0.0;
      const double a = (up - um) / (2.0 * h), b = (up - 2.0 * u[i] + um) / (2.0 * h * h);
      if (a == 0.0 && b == 0.0) continue;
      // z = (h/2) t^3 concentrates nodes near the singular end
      out[i] = gl20().integrate(
          [&](double t) {
            if (t <= 0.0) return 0.0;
            const double z = half * t * t * t, dz = 3.0 * half * t * t;
            const double zs = std::pow(z, -s);
            const double f = M.m((-a * z - b * z * z) * zs) + M.m((a * z - b * z * z) * zs);
            return f * zs / z * dz;
          },
          0.0, 1.0);
    }
    return out;
  }

  /// 1-D: the diagonal-cell part of the weak form, (1/2) sum_x w times the
  /// integral of m(h_u) h_v |z|^{-1} over |z| < h/2, Taylor models for u and v.
  double pairing_diagonal_correction(const GridFunction& u, const GridFunction& v, const NFunction& M) const {
    check(u);
    u.same_domain(v);
    if (dom_.d() != 1) return 0.0;
    const double h = dom_.h(0), half = 0.5 * h, s = s_;
    const std::size_t N = u.size();
    auto taylor = [&](const GridFunction& f, std::size_t i) {
      const double fm = i > 0 ? f[i - 1] : 0.0, fp = i + 1 < N ? f[i + 1] : 0.0;
      return std::pair{(fp - fm) / (2.0 * h), (fp - 2.0 * f[i] + fm) / (2.0 * h * h)};
    };
    std::vector<double> terms(N, 0.0);
    for (std::size_t i = 0; i < N; ++i) {
      const auto [a, b] = taylor(u, i);
      const auto [av, bv] = taylor(v, i);
      if ((a == 0.0 && b == 0.0) || (av == 0.0 && bv == 0.0)) continue;
      terms[i] = gl20().integrate(
          [&](double t) {
            if (t <= 0.0) return 0.0;
            const double z = half * t * t * t, dz = 3.0 * half * t * t;
            const double zs = std::pow(z, -s);
            const double f = M.m((-a * z - b * z * z) * zs) * (-av * z - bv * z * z) * zs +
                             M.m((a * z - b * z * z) * zs) * (av * z - bv * z * z) * zs;
            return f / z * dz;
          },
          0.0, 1.0);
    }
    return 0.5 * u.weight() * pairwise_sum(terms);
  }

 private:
  std::size_t offset(int a, int b) const { return static_cast<std::size_t>(b) * dom_.n() + a; }
  double gap_left(std::size_t i) const { return dom_.center(0, static_cast<int>(i)) - dom_.lo(0); }
  double gap_right(std::size_t i) const { return dom_.hi(0) - dom_.center(0, static_cast<int>(i)); }
  void check(const GridFunction& u) const {
    if (!(u.domain() == dom_)) throw shape_error("pair kernel: grid function lives on another domain");
  }

  // sum over exterior cells at distances a + (k+1/2) h of h M(c r^{-s}) / r
  double exterior_M(const NFunction& M, double c, double a) const {
    const double s = s_, ac = std::abs(c);
    return detail::lattice_tail([&](double r) { return M.M_pos(ac * std::pow(r, -s)) / r; },
                                [&](double A) { return M.Q(ac * std::pow(A, -s)) / s; }, a, dom_.h(0));
  }
  // sum of h m(c r^{-s}) r^{-s} / r
  double exterior_m(const NFunction& M, double c, double a) const {
    const double s = s_;
    return detail::lattice_tail([&](double r) { return M.m(c * std::pow(r, -s)) * std::pow(r, -s) / r; },
                                [&](double A) { return M.M(c * std::pow(A, -s)) / (s * c); }, a, dom_.h(0));
  }
  // sum of h m'(c r^{-s}) r^{-2s} / r
  double exterior_dm(const NFunction& M, double c, double a) const {
    const double s = s_, ac = std::abs(c);
    if (ac == 0.0) {
      const double d0 = M.dm(0.0);
      if (!std::isfinite(d0)) return 0.0;
      return detail::lattice_tail([&](double r) { return d0 * std::pow(r, -2.0 * s) / r; },
                                  [&](double A) { return d0 * std::pow(A, -2.0 * s) / (2.0 * s); }, a, dom_.h(0));
    }
    return detail::lattice_tail([&](double r) { return M.dm(ac * std::pow(r, -s)) * std::pow(r, -2.0 * s) / r; },
                                [&](double A) {
                                  const double T = ac * std::pow(A, -s);
                                  return (T * M.m_pos(T) - M.M_pos(T)) / (s * ac * ac);
                                },
                                a, dom_.h(0));
  }

  BoxDomain dom_;
  double s_;
  Exterior ext_;
  std::vector<double> rho_, ker_;
};

}  // namespace folab
