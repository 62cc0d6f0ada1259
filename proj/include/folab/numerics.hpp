#pragma once

// Scalar numerical kernels shared by every module: monotone root finding,
// golden-section search, Gauss-Legendre rules, log grids and a fixed-order
// pairwise summation.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace folab {

/// Raised when a structural condition required by an operation is violated.
/// `condition()` carries the short name of the violated hypothesis, e.g. "(M3)".
class precondition_error : public std::logic_error {
 public:
  precondition_error(std::string condition, const std::string& what)
      : std::logic_error(condition + ": " + what), condition_(std::move(condition)) {}
  const std::string& condition() const noexcept { return condition_; }

 private:
  std::string condition_;
};

/// Raised when an operation is asked for a spec it cannot handle.
class unsupported_spec : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when two grid objects do not share a domain.
class shape_error : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline constexpr double pi = 3.14159265358979323846;

inline void require_finite(double t, const char* where) {
  if (!std::isfinite(t)) throw std::domain_error(std::string(where) + ": non-finite argument");
}

inline double sign(double t) { return t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0); }

/// Logarithmically spaced grid with `count` points on [lo, hi], lo > 0.
inline std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  std::vector<double> g(count);
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < count; ++i) {
    const double f = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    g[i] = std::exp(a + (b - a) * f);
  }
  g.front() = lo;
  g.back() = hi;
  return g;
}

/// Pairwise (tree) summation in a fixed order; deterministic for a given input.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 16) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

/// Bisection for the root of an increasing function f on [lo, hi] with
/// f(lo) <= target <= f(hi). Terminates when the bracket is relatively
/// narrower than `rel_tol` or stops shrinking in floating point.
template <class F>
double bisect_increasing(F&& f, double target, double lo, double hi, double rel_tol = 1e-14) {
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) < target) lo = mid; else hi = mid;
    if (hi - lo <= rel_tol * std::max(std::abs(lo), std::abs(hi))) break;
  }
  return 0.5 * (lo + hi);
}

/// Root of an increasing f on (0, inf): brackets by doubling/halving from
/// `start`, then bisects in log space. Returns 0 when target <= 0.
template <class F>
double invert_increasing(F&& f, double target, double start = 1.0, double rel_tol = 1e-14) {
  if (!(target > 0.0)) return 0.0;
  double lo = start, hi = start;
  int guard = 0;
  while (f(lo) > target) {
    lo *= 0.5;
    if (++guard > 2200 || lo == 0.0) throw std::range_error("invert_increasing: lower bracket not found");
  }
  guard = 0;
  while (f(hi) < target) {
    hi *= 2.0;
    if (++guard > 2200 || !std::isfinite(hi)) throw std::range_error("invert_increasing: upper bracket not found");
  }
  // log-space bisection keeps the relative resolution uniform
  double a = std::log(lo), b = std::log(hi);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    if (f(std::exp(mid)) < target) a = mid; else b = mid;
    if (b - a <= rel_tol) break;
  }
  return std::exp(0.5 * (a + b));
}

/// Golden-section minimization of a unimodal f on [a, b].
template <class F>
std::pair<double, double> golden_min(F&& f, double a, double b, double tol = 1e-12, int max_iter = 300) {
  constexpr double r = 0.61803398874989484820;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < max_iter && std::abs(b - a) > tol * (1.0 + std::abs(a) + std::abs(b)); ++it) {
    if (fc < fd) {
      b = d; d = c; fd = fc;
      c = b - r * (b - a); fc = f(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + r * (b - a); fd = f(d);
    }
  }
  return fc < fd ? std::pair{c, fc} : std::pair{d, fd};
}

template <class F>
std::pair<double, double> golden_max(F&& f, double a, double b, double tol = 1e-12) {
  auto [x, v] = golden_min([&](double t) { return -f(t); }, a, b, tol);
  return {x, -v};
}

/// Gauss-Legendre rule on [-1, 1] with N nodes (Newton iteration on P_N).
template <std::size_t N>
struct GaussLegendre {
  std::array<double, N> x{}, w{};
  GaussLegendre() {
    for (std::size_t i = 0; i < N; ++i) {
      double z = std::cos(pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(N) + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = z;
        for (std::size_t k = 2; k <= N; ++k) {
          const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / static_cast<double>(k);
          p0 = p1;
          p1 = p2;
        }
        dp = static_cast<double>(N) * (z * p1 - p0) / (z * z - 1.0);
        const double dz = p1 / dp;
        z -= dz;
        if (std::abs(dz) < 1e-16) break;
      }
      x[i] = z;
      w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
  }
  template <class F>
  double integrate(F&& f, double a, double b) const {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) s += w[i] * f(c + h * x[i]);
    return s * h;
  }
};

inline const GaussLegendre<8>& gl8() {
  static const GaussLegendre<8> rule;
  return rule;
}
inline const GaussLegendre<20>& gl20() {
  static const GaussLegendre<20> rule;
  return rule;
}

/// Integral of f over [a, b] (0 < a < b) on geometric sub-intervals,
/// `per_decade` panels per decade, 8-point Gauss-Legendre in log variable.
template <class F>
double integrate_log(F&& f, double a, double b, int per_decade = 8) {
  if (!(b > a)) return 0.0;
  const double la = std::log(a), lb = std::log(b);
  const int panels = std::max(1, static_cast<int>(std::ceil((lb - la) / std::log(10.0) * per_decade)));
  const double step = (lb - la) / panels;
  double s = 0.0;
  for (int k = 0; k < panels; ++k) {
    s += gl8().integrate([&](double z) { const double t = std::exp(z); return f(t) * t; },
                         la + k * step, la + (k + 1) * step);
  }
  return s;
}

}  // namespace folab
