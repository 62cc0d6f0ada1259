#pragma once

// Gagliardo modulars and seminorms, the norms of W^{s,M}, Lipschitz
// composition, the W^{s',1} comparison and empirical embedding constants.

#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "folab/grid.hpp"
#include "folab/nfunc.hpp"
#include "folab/pair_kernel.hpp"

namespace folab {

struct FractionalParams {
  double s = 0.5;
  int d = 1;
  double s_prime = 0.25;

  FractionalParams() = default;
  FractionalParams(double s_, int d_, double s_prime_ = -1.0) : s(s_), d(d_), s_prime(s_prime_ < 0.0 ? 0.5 * s_ : s_prime_) {
    validate();
  }
  void validate() const {
    if (!(s > 0.0 && s < 1.0)) throw std::domain_error("fractional order s must lie in (0,1)");
    if (!(s_prime > 0.0 && s_prime < s)) throw std::domain_error("need 0 < s' < s");
    if (d != 1 && d != 2) throw std::domain_error("dimension must be 1 or 2");
  }
};

namespace detail {
inline void match(const GridFunction& u, const FractionalParams& fp) {
  if (u.domain().d() != fp.d) throw shape_error("grid dimension differs from the fractional parameters");
}
}  // namespace detail

/// rho-bar(u) = sum_{x != y} M(h_u(x,y)) w^2 / |x-y|^d.
inline double gagliardo_modular(const GridFunction& u, const NFunction& M, const FractionalParams& fp,
                                Exterior ext = Exterior::Box, double scale = 1.0) {
  detail::match(u, fp);
  return PairKernel(u.domain(), fp.s, ext).modular(u, M, scale);
}

/// [u]_(s,M): gauge of rho-bar; 0 for constants.
inline double gagliardo_seminorm(const GridFunction& u, const NFunction& M, const FractionalParams& fp,
                                 Exterior ext = Exterior::Box) {
  detail::match(u, fp);
  u.require_finite();
  const PairKernel k(u.domain(), fp.s, ext);
  if (k.modular(u, M) == 0.0) return 0.0;
  return gauge([&](double c) { return k.modular(u, M, c); }, u.max_abs());
}

struct SeminormBundle {
  double rho = 0.0, rho_bar = 0.0, rho_tilde = 0.0;
  double lux = 0.0, semi = 0.0, snorm = 0.0, tilde_norm = 0.0;
  std::optional<double> weighted, e_norm;
};

inline SeminormBundle norm_bundle(const GridFunction& u, const NFunction& M, const FractionalParams& fp,
                                  const GridFunction* V = nullptr, Exterior ext = Exterior::Box) {
  detail::match(u, fp);
  u.require_finite();
  const PairKernel k(u.domain(), fp.s, ext);
  SeminormBundle b;
  b.rho = modular(u, M);
  b.rho_bar = k.modular(u, M);
  b.rho_tilde = b.rho + b.rho_bar;
  b.lux = luxemburg_norm(u, M);
  b.semi = b.rho_bar == 0.0 ? 0.0 : gauge([&](double c) { return k.modular(u, M, c); }, u.max_abs());
  b.snorm = b.lux + b.semi;
  b.tilde_norm = u.is_zero() ? 0.0 : gauge([&](double c) { return modular(u, M, c) + k.modular(u, M, c); }, u.max_abs());
  if (V) {
    b.weighted = weighted_luxemburg(u, M, *V);
    b.e_norm = b.semi + *b.weighted;
  }
  return b;
}

struct LipschitzReport {
  SeminormBundle bundle;   // of f o u
  double contracted = 0;   // rho-bar of f o u with differences divided by K
  double original = 0;     // rho-bar of u
  bool pass = false;
};

/// Bundle of f o u and the modular contraction rho-bar((f o u)/K) <= rho-bar(u).
inline LipschitzReport compose_lipschitz(const GridFunction& u, const std::function<double(double)>& f, double K,
                                         const NFunction& M, const FractionalParams& fp) {
  if (!(K > 0.0)) throw std::domain_error("Lipschitz constant must be positive");
  if (std::abs(f(0.0)) > 1e-14) throw precondition_error("f(0)=0", "composed map must vanish at 0");
  const auto fu = u.map(f);
  // Lipschitz spot check on the sampled values of u
  std::vector<double> vals = u.values();
  std::sort(vals.begin(), vals.end());
  vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::size_t> pick(0, vals.size() - 1);
  const std::size_t pairs = std::min<std::size_t>(20000, vals.size() * vals.size());
  for (std::size_t p = 0; p < pairs; ++p) {
    const std::size_t a = vals.size() <= 141 ? p / vals.size() % vals.size() : pick(rng);
    const std::size_t b = vals.size() <= 141 ? p % vals.size() : pick(rng);
    if (std::abs(f(vals[a]) - f(vals[b])) > K * std::abs(vals[a] - vals[b]) * (1.0 + 1e-12) + 1e-300)
      throw precondition_error("Lipschitz", "|f(a)-f(b)| > K|a-b| on sampled values");
  }
  LipschitzReport r;
  r.bundle = norm_bundle(fu, M, fp);
  r.contracted = gagliardo_modular(fu, M, fp, Exterior::Box, 1.0 / K);
  r.original = gagliardo_modular(u, M, fp);
  r.pass = r.contracted <= r.original + 1e-10;
  return r;
}

/// Truncation at level n: n sgn(t) for |t| > n.
inline std::function<double(double)> truncation(double level) {
  return [level](double t) { return std::clamp(t, -level, level); };
}

struct WS1Report {
  double lhs = 0.0;          // [u]_{s',1}
  double rhs = 0.0;          // (meas omega / (s - s') + 1) delta^{s-s'} [u]_(s,M)
  double seminorm = 0.0;     // [u]_(s,M) for the normalized M
  double normalization = 1;  // c with c M(1) = 1
  double omega = 0.0;
  std::string omega_convention = "unit-sphere surface area";
  bool pass = false;
};

inline WS1Report w_s1_comparison(const GridFunction& u, const NFunction& M, const FractionalParams& fp) {
  detail::match(u, fp);
  const double M1 = M.M(1.0);
  if (!(M1 > 0.0) || !std::isfinite(M1)) throw std::invalid_argument("cannot normalize M(1) = 1");
  WS1Report r;
  r.normalization = 1.0 / M1;
  const NFunction Mn = M.scaled(r.normalization);
  const auto& dom = u.domain();
  const PairKernel k1(dom, fp.s_prime);
  r.lhs = 2.0 * k1.sum_pairs(u.values(), [](double du, double rho, double ker, int, int) { return std::abs(du) * rho * ker; });
  r.seminorm = gagliardo_seminorm(u, Mn, fp);
  r.omega = dom.sphere_area();
  const double ds = fp.s - fp.s_prime;
  r.rhs = (dom.volume() * r.omega / ds + 1.0) * std::pow(dom.diameter(), ds) * r.seminorm;
  r.pass = r.lhs <= r.rhs * (1.0 + 1e-6);
  return r;
}

struct EmbeddingRatio {
  double ratio = 0.0;
  double mstar_norm = 0.0;   // ||u||_(M_*)
  double snorm = 0.0;        // ||u||_(s,M)
  double normalization = 0;  // modular(u / ||u||_(M_*), M_*)
};

inline EmbeddingRatio embedding_ratio(const GridFunction& u, const NFunction& M, const FractionalParams& fp,
                                      const SobolevConjugate& star, Exterior ext = Exterior::Box) {
  detail::match(u, fp);
  if (u.is_zero()) throw std::domain_error("embedding ratio undefined for u = 0");
  EmbeddingRatio e;
  e.mstar_norm = luxemburg_norm(u, star);
  e.normalization = modular(u, star, 1.0 / e.mstar_norm);
  if (std::abs(e.normalization - 1.0) > 1e-8) throw std::runtime_error("M_* normalization not met");
  e.snorm = luxemburg_norm(u, M) + gagliardo_seminorm(u, M, fp, ext);
  e.ratio = e.mstar_norm / e.snorm;
  return e;
}

struct WholespaceRow {
  double half_width = 0.0;
  int n = 0;
  double max_ratio = 0.0;
  double lux = 0.0, semi = 0.0;  // norms of the first probe function
};

struct WholespaceReport {
  std::vector<WholespaceRow> rows;
  bool bounded = false;  // max/min of max_ratio over boxes within factor 2
};

/// Embedding ratios of fixed compactly supported functions on boxes
/// [-L, L] of growing L at fixed spacing; the functions are zero-extended to
/// the whole line (d = 1) so that the Gagliardo part integrates over R x R.
inline WholespaceReport wholespace_embedding_probe(const NFunction& M, const FractionalParams& fp,
                                                   const std::vector<double>& half_widths, double spacing,
                                                   const std::vector<std::function<double(double)>>& probes) {
  if (fp.d != 1) throw unsupported_spec("whole-space probe is implemented for d = 1");
  if (probes.empty()) throw std::invalid_argument("whole-space probe needs probe functions");
  const SobolevConjugate star(M, fp.d, fp.s);
  WholespaceReport rep;
  double lo = HUGE_VAL, hi = 0.0;
  for (double L : half_widths) {
    const int n = static_cast<int>(std::lround(2.0 * L / spacing));
    const auto dom = BoxDomain::interval(-L, L, n);
    WholespaceRow row{L, n, 0.0, 0.0, 0.0};
    for (std::size_t k = 0; k < probes.size(); ++k) {
      const auto u = GridFunction::sample(dom, probes[k]);
      const auto e = embedding_ratio(u, M, fp, star, Exterior::ZeroExtension);
      row.max_ratio = std::max(row.max_ratio, e.ratio);
      if (k == 0) {
        row.lux = luxemburg_norm(u, M);
        row.semi = e.snorm - row.lux;
      }
    }
    lo = std::min(lo, row.max_ratio);
    hi = std::max(hi, row.max_ratio);
    rep.rows.push_back(row);
  }
  rep.bounded = hi <= 2.0 * lo;
  return rep;
}

}  // namespace folab
