#pragma once

// Box domains with midpoint quadrature, grid functions, modulars and the
// Luxemburg / Orlicz / weighted norms built on them.

#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "folab/nfunc.hpp"
#include "folab/numerics.hpp"

namespace folab {

/// Tolerances shared by every gauge-type norm.
struct NormTolerances {
  static constexpr double bisection_rel = 1e-12;
  static constexpr double post_check = 1e-8;
  static constexpr double bracket = 1099511627776.0;  // 2^40
};

class BoxDomain {
 public:
  BoxDomain() = default;
  BoxDomain(int d, std::array<double, 2> lo, std::array<double, 2> hi, int n) : d_(d), lo_(lo), hi_(hi), n_(n) {
    if (d != 1 && d != 2) throw std::invalid_argument("box domain: d must be 1 or 2");
    if (n < 8 || n > 256 || (n & (n - 1)) != 0) throw std::invalid_argument("box domain: n must be a power of two in [8, 256]");
    for (int k = 0; k < d; ++k)
      if (!(lo[k] < hi[k]) || !std::isfinite(lo[k]) || !std::isfinite(hi[k]))
        throw std::invalid_argument("box domain: need lo < hi componentwise");
    if (d == 1) lo_[1] = hi_[1] = 0.0;
  }
  static BoxDomain interval(double lo, double hi, int n) { return BoxDomain(1, {lo, 0.0}, {hi, 0.0}, n); }
  static BoxDomain square(double lo, double hi, int n) { return BoxDomain(2, {lo, lo}, {hi, hi}, n); }

  int d() const { return d_; }
  int n() const { return n_; }
  std::size_t size() const { return d_ == 1 ? static_cast<std::size_t>(n_) : static_cast<std::size_t>(n_) * n_; }
  double lo(int k) const { return lo_[k]; }
  double hi(int k) const { return hi_[k]; }
  double h(int k) const { return (hi_[k] - lo_[k]) / n_; }
  double cell_volume() const { return d_ == 1 ? h(0) : h(0) * h(1); }
  double volume() const { return d_ == 1 ? hi_[0] - lo_[0] : (hi_[0] - lo_[0]) * (hi_[1] - lo_[1]); }
  double diameter() const {
    double s = 0.0;
    for (int k = 0; k < d_; ++k) s += (hi_[k] - lo_[k]) * (hi_[k] - lo_[k]);
    return std::sqrt(s);
  }
  /// Volume of the unit ball in R^d.
  double omega() const { return d_ == 1 ? 2.0 : pi; }
  /// Surface area of the unit sphere in R^d.
  double sphere_area() const { return d_ == 1 ? 2.0 : 2.0 * pi; }

  /// Cell-center coordinate along axis k of grid index i.
  double center(int k, int i) const { return lo_[k] + (i + 0.5) * h(k); }
  /// Coordinates of flat index idx (x1 varies fastest).
  std::array<double, 2> point(std::size_t idx) const {
    const int i0 = static_cast<int>(idx % n_), i1 = static_cast<int>(idx / n_);
    return {center(0, i0), d_ == 2 ? center(1, i1) : 0.0};
  }

  bool operator==(const BoxDomain& o) const = default;

 private:
  int d_ = 1;
  std::array<double, 2> lo_{0.0, 0.0}, hi_{1.0, 0.0};
  int n_ = 8;
};

class GridFunction {
 public:
  GridFunction() = default;
  explicit GridFunction(const BoxDomain& dom) : dom_(dom), v_(dom.size(), 0.0) {}
  GridFunction(const BoxDomain& dom, std::vector<double> values) : dom_(dom), v_(std::move(values)) {
    if (v_.size() != dom_.size()) throw shape_error("grid function: value count does not match the domain");
  }
  template <class F>
  static GridFunction sample(const BoxDomain& dom, F&& f) {
    GridFunction g(dom);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto x = dom.point(i);
      if constexpr (std::is_invocable_v<F, double, double>) g.v_[i] = f(x[0], x[1]);
      else g.v_[i] = f(x[0]);
    }
    return g;
  }

  const BoxDomain& domain() const { return dom_; }
  std::size_t size() const { return v_.size(); }
  double weight() const { return dom_.cell_volume(); }
  std::vector<double> weights() const { return std::vector<double>(v_.size(), weight()); }
  const std::vector<double>& values() const { return v_; }
  std::vector<double>& values() { return v_; }
  double operator[](std::size_t i) const { return v_[i]; }
  double& operator[](std::size_t i) { return v_[i]; }

  double max_abs() const {
    double a = 0.0;
    for (double x : v_) a = std::max(a, std::abs(x));
    return a;
  }
  bool is_zero() const { return max_abs() == 0.0; }
  void require_finite() const {
    for (double x : v_)
      if (!std::isfinite(x)) throw std::domain_error("grid function has non-finite values");
  }

  GridFunction& operator+=(const GridFunction& o) {
    same_domain(o);
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
    return *this;
  }
  GridFunction& operator-=(const GridFunction& o) {
    same_domain(o);
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
    return *this;
  }
  GridFunction& operator*=(double c) {
    for (double& x : v_) x *= c;
    return *this;
  }
  friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
  friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
  friend GridFunction operator*(double c, GridFunction a) { return a *= c; }
  friend GridFunction operator*(GridFunction a, double c) { return a *= c; }
  GridFunction operator-() const { return -1.0 * *this; }

  template <class F>
  GridFunction map(F&& f) const {
    GridFunction g(dom_);
    for (std::size_t i = 0; i < v_.size(); ++i) g.v_[i] = f(v_[i]);
    return g;
  }

  void same_domain(const GridFunction& o) const {
    if (!(dom_ == o.dom_) || v_.size() != o.v_.size()) throw shape_error("grid functions live on different domains");
  }

 private:
  BoxDomain dom_;
  std::vector<double> v_;
};

/// sum_x f(x) w in fixed pairwise order.
template <class F>
double grid_sum(const GridFunction& u, F&& f) {
  std::vector<double> terms(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) terms[i] = f(i);
  return pairwise_sum(terms) * u.weight();
}

inline double integral(const GridFunction& u) {
  return grid_sum(u, [&](std::size_t i) { return u[i]; });
}

inline double inner(const GridFunction& u, const GridFunction& v) {
  u.same_domain(v);
  return grid_sum(u, [&](std::size_t i) { return u[i] * v[i]; });
}

/// rho(u, M) = sum M(u(x)) w.
template <NFunctionLike F>
double modular(const GridFunction& u, const F& M, double scale = 1.0) {
  return grid_sum(u, [&](std::size_t i) { return M.M(scale * u[i]); });
}

/// sum V(x) M(u(x)) w.
template <NFunctionLike F>
double weighted_modular(const GridFunction& u, const F& M, const GridFunction& V, double scale = 1.0) {
  u.same_domain(V);
  return grid_sum(u, [&](std::size_t i) { return V[i] * M.M(scale * u[i]); });
}

/// inf{lambda > 0 : rho(1/lambda) <= 1} for a modular rho(c) of c*u that is
/// continuous, increasing and vanishing at 0. `size` is a positive scale of u
/// (typically max |u|) used to place the bracket.
template <class Rho>
double gauge(Rho&& rho, double size) {
  if (!(size > 0.0)) return 0.0;
  // a tabulated M (the Sobolev conjugate) throws beyond its table, where the
  // modular is far above 1 anyway
  auto eval = [&](double c) {
    try {
      return rho(c);
    } catch (const std::range_error&) {
      return HUGE_VAL;
    }
  };
  double lo = size / NormTolerances::bracket, hi = size * NormTolerances::bracket;
  for (int g = 0; eval(1.0 / lo) < 1.0 && g < 200; ++g) lo /= 1024.0;
  for (int g = 0; eval(1.0 / hi) > 1.0 && g < 200; ++g) hi *= 1024.0;
  double a = std::log(lo), b = std::log(hi);
  for (int it = 0; it < 400 && b - a > NormTolerances::bisection_rel; ++it) {
    const double mid = 0.5 * (a + b);
    if (eval(std::exp(-mid)) > 1.0) a = mid; else b = mid;
  }
  const double lambda = std::exp(0.5 * (a + b));
  const double check = rho(1.0 / lambda);
  if (std::abs(check - 1.0) > NormTolerances::post_check)
    throw std::runtime_error("gauge: modular at the computed norm is " + std::to_string(check));
  return lambda;
}

template <NFunctionLike F>
double luxemburg_norm(const GridFunction& u, const F& M) {
  u.require_finite();
  if (u.is_zero()) return 0.0;
  return gauge([&](double c) { return modular(u, M, c); }, u.max_abs());
}

/// Orlicz (Amemiya) norm inf_k (1 + rho(k u)) / k: log-scan followed by golden section in log k.
template <NFunctionLike F>
double orlicz_norm(const GridFunction& u, const F& M) {
  u.require_finite();
  if (u.is_zero()) return 0.0;
  const double lux = luxemburg_norm(u, M);
  auto f = [&](double z) { const double k = std::exp(z); return (1.0 + modular(u, M, k)) / k; };
  // the minimizer lies in [1/(lux 2^20), 2^20 / lux] for any N-function on a finite grid
  const double a = -std::log(lux) - 20.0 * std::log(2.0), b = -std::log(lux) + 20.0 * std::log(2.0);
  const int scan = 241;
  int best = 0;
  double best_v = HUGE_VAL;
  for (int i = 0; i < scan; ++i) {
    const double v = f(a + (b - a) * i / (scan - 1));
    if (v < best_v) { best_v = v; best = i; }
  }
  const double za = a + (b - a) * std::max(0, best - 1) / (scan - 1);
  const double zb = a + (b - a) * std::min(scan - 1, best + 1) / (scan - 1);
  return std::min(best_v, golden_min(f, za, zb, 1e-13).second);
}

inline void require_v1(const GridFunction& V) {
  for (std::size_t i = 0; i < V.size(); ++i)
    if (!(V[i] > 0.0) || !std::isfinite(V[i]))
      throw precondition_error("(V1)", "potential must be bounded below by a positive constant on the grid");
}

/// ||u||_(V,M): gauge of sum V M(u/lambda) w.
template <NFunctionLike F>
double weighted_luxemburg(const GridFunction& u, const F& M, const GridFunction& V) {
  u.require_finite();
  u.same_domain(V);
  require_v1(V);
  if (u.is_zero()) return 0.0;
  return gauge([&](double c) { return weighted_modular(u, M, V, c); }, u.max_abs());
}

inline double lmu_norm(const GridFunction& u, double mu) {
  if (!(mu >= 1.0)) throw std::domain_error("L^mu norm: mu must be >= 1");
  return std::pow(grid_sum(u, [&](std::size_t i) { return std::pow(std::abs(u[i]), mu); }), 1.0 / mu);
}

struct HolderReport {
  double lhs = 0.0, rhs = 0.0;
  bool pass = false;
};

/// sum |u v| w <= ||u||_{L^M} ||v||_{L^{M-bar}} with Orlicz norms on both factors.
inline HolderReport holder_check(const GridFunction& u, const GridFunction& v, const NFunction& M) {
  u.same_domain(v);
  HolderReport r;
  r.lhs = grid_sum(u, [&](std::size_t i) { return std::abs(u[i] * v[i]); });
  r.rhs = orlicz_norm(u, M) * orlicz_norm(v, ConjugateView(M));
  r.pass = r.lhs <= r.rhs + 1e-8;
  return r;
}

// ---------------------------------------------------------------------------
// CSV exchange: header x1[,x2],value, one row per grid point.

inline void write_csv(const GridFunction& u, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(17);
  out << (u.domain().d() == 1 ? "x1,value\n" : "x1,x2,value\n");
  for (std::size_t i = 0; i < u.size(); ++i) {
    const auto x = u.domain().point(i);
    out << x[0] << ',';
    if (u.domain().d() == 2) out << x[1] << ',';
    out << u[i] << '\n';
  }
}

inline GridFunction read_csv(const BoxDomain& dom, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::getline(in, line);
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::string cell, last;
    while (std::getline(ls, cell, ',')) last = cell;
    values.push_back(std::stod(last));
  }
  return GridFunction(dom, std::move(values));
}

}  // namespace folab
