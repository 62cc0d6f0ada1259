#pragma once

// The model problem  (-Delta)^s_m u + V m(u) = lambda f(x,u),  f = p xi |u|^{p-2} u,
// on a box: energy I = G + Psi - lambda B, its gradient and Hessian, the
// inequalities used in the existence argument, sampling on sine-mode
// subspaces and a deflated Newton search for critical points.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "folab/sobolev.hpp"

namespace folab {

struct ProblemSpec {
  NFunction nfun = NFunction::power(3.0);
  FractionalParams fp;
  GridFunction V, xi;  // potential and weight on the computational box
  double p = 1.5;
  double mu = 2.0;
  double lambda = 1.0;
  Exterior exterior = Exterior::ZeroExtension;  // 1-D only; 2-D problems use Box
};

class Problem {
 public:
  explicit Problem(ProblemSpec spec) : spec_(validated(std::move(spec))), kernel_(spec_.V.domain(), spec_.fp.s, spec_.exterior) {
    const int d = spec_.fp.d;
    idx_ = estimate_indices(spec_.nfun, d);
    const bool m1 = d >= 2 ? idx_.m1 : (idx_.m0 > 1.0 && idx_.m0 <= idx_.m_sup && std::isfinite(idx_.m_sup));
    if (!m1) throw precondition_error("(m1)", "index condition fails for " + spec_.nfun.name());
    if (!(spec_.mu < idx_.m0))
      throw precondition_error("(M1)", "need mu < m0 = " + std::to_string(idx_.m0) + ", got mu = " + std::to_string(spec_.mu));
    growth_ = check_growth(spec_.nfun, spec_.mu, d, spec_.fp.s);
    xi_norm_ = lmu_norm(spec_.xi, spec_.mu / (spec_.mu - spec_.p));
    V0_ = *std::min_element(spec_.V.values().begin(), spec_.V.values().end());
  }

  const ProblemSpec& spec() const { return spec_; }
  const BoxDomain& domain() const { return spec_.V.domain(); }
  const PairKernel& kernel() const { return kernel_; }
  const NFunction& M() const { return spec_.nfun; }
  const IndexPair& indices() const { return idx_; }
  const GrowthReport& growth() const { return growth_; }
  /// ||xi||_{L^{mu/(mu-p)}}
  double xi_norm() const { return xi_norm_; }
  double V0() const { return V0_; }
  double lambda() const { return spec_.lambda; }

  Problem with_lambda(double lambda) const {
    if (!(lambda >= 1.0 && lambda <= 2.0)) throw std::domain_error("lambda must lie in [1,2]");
    Problem q = *this;
    q.spec_.lambda = lambda;
    return q;
  }

  void check(const GridFunction& u) const {
    if (!(u.domain() == domain())) throw shape_error("grid function does not live on the problem box");
    u.require_finite();
  }

 private:
  static ProblemSpec validated(ProblemSpec s) {
    s.fp.validate();
    s.V.same_domain(s.xi);
    if (s.V.domain().d() != s.fp.d) throw shape_error("grid dimension differs from the fractional parameters");
    require_v1(s.V);
    for (std::size_t i = 0; i < s.xi.size(); ++i)
      if (!(s.xi[i] >= 0.0) || !std::isfinite(s.xi[i])) throw precondition_error("(f1)", "weight xi must be finite and >= 0");
    if (!(s.p > 1.0 && s.p < s.mu)) throw precondition_error("(f1)", "need 1 < p < mu");
    if (!(s.lambda >= 1.0 && s.lambda <= 2.0)) throw std::domain_error("lambda must lie in [1,2]");
    return s;
  }

  ProblemSpec spec_;
  PairKernel kernel_;
  IndexPair idx_;
  GrowthReport growth_;
  double xi_norm_ = 0.0, V0_ = 0.0;
};

/// The prototype: d = 1, box [-8, 8], M = t^3, p = 1.5, mu = 2, s = 0.5,
/// V = 1 + x^2, xi = exp(-x^2), lambda = 1.
inline ProblemSpec prototype_spec(int n = 128, NFunction M = NFunction::power(3.0)) {
  ProblemSpec ps;
  const auto dom = BoxDomain::interval(-8.0, 8.0, n);
  ps.nfun = std::move(M);
  ps.fp = FractionalParams(0.5, 1);
  ps.V = GridFunction::sample(dom, [](double x) { return 1.0 + x * x; });
  ps.xi = GridFunction::sample(dom, [](double x) { return std::exp(-x * x); });
  return ps;
}

struct EnergyBreakdown {
  double G = 0.0, Psi = 0.0, B = 0.0, A = 0.0, I = 0.0;
};

inline EnergyBreakdown energy(const Problem& pb, const GridFunction& u) {
  pb.check(u);
  const auto& s = pb.spec();
  EnergyBreakdown e;
  e.G = pb.kernel().modular(u, s.nfun);
  e.Psi = weighted_modular(u, s.nfun, s.V);
  e.B = grid_sum(u, [&](std::size_t i) { return s.xi[i] * std::pow(std::abs(u[i]), s.p); });
  e.A = e.G + e.Psi;
  e.I = e.A - s.lambda * e.B;
  return e;
}

/// g with sum g v w = dI(u) v for every grid v (the exact derivative of the
/// discrete energy, so the G part is twice the half-sum weak pairing).
inline GridFunction grad_energy(const Problem& pb, const GridFunction& u) {
  pb.check(u);
  const auto& s = pb.spec();
  GridFunction g = pb.kernel().modular_gradient(u, s.nfun);
  for (std::size_t i = 0; i < u.size(); ++i)
    g[i] += s.V[i] * s.nfun.m(u[i]) - s.lambda * s.p * s.xi[i] * sign(u[i]) * std::pow(std::abs(u[i]), s.p - 1.0);
  return g;
}

inline constexpr double kRegularization = 1e-12;

/// d g / d u, symmetric; |u|^{p-2} is taken as (|u| + 1e-12)^{p-2} for p < 2.
inline Eigen::MatrixXd hessian(const Problem& pb, const GridFunction& u) {
  pb.check(u);
  const auto& s = pb.spec();
  Eigen::MatrixXd H = pb.kernel().modular_hessian(u, s.nfun) / u.weight();
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double a = std::abs(u[i]);
    const double b = s.p < 2.0 ? std::pow(a + kRegularization, s.p - 2.0) : std::pow(a, s.p - 2.0);
    const auto k = static_cast<Eigen::Index>(i);
    H(k, k) += s.V[i] * s.nfun.dm(u[i]) - s.lambda * s.p * (s.p - 1.0) * s.xi[i] * b;
  }
  return H;
}

/// sqrt(sum g^2 w): size of the gradient representer.
inline double residual_norm(const GridFunction& g) { return std::sqrt(inner(g, g)); }

struct ENorm {
  double semi = 0.0;      // [u]_(s,M)
  double weighted = 0.0;  // ||u||_(V,M)
  double total = 0.0;     // ||u|| = semi + weighted
};

/// ||u|| on E; a power M gives the gauges in closed form.
inline ENorm e_norm(const Problem& pb, const GridFunction& u) {
  pb.check(u);
  ENorm n;
  if (u.is_zero()) return n;
  const auto& s = pb.spec();
  if (const auto q = s.nfun.homogeneity()) {
    n.semi = std::pow(pb.kernel().modular(u, s.nfun), 1.0 / *q);
    n.weighted = std::pow(weighted_modular(u, s.nfun, s.V), 1.0 / *q);
  } else {
    const double G = pb.kernel().modular(u, s.nfun);
    n.semi = G == 0.0 ? 0.0 : gauge([&](double c) { return pb.kernel().modular(u, s.nfun, c); }, u.max_abs());
    n.weighted = weighted_luxemburg(u, s.nfun, s.V);
  }
  n.total = n.semi + n.weighted;
  return n;
}

namespace detail {

/// Raw partial derivatives of ||u|| with respect to the grid values, from
/// rho(u / lambda) = 1 for each of the two gauges.
inline std::vector<double> e_norm_gradient(const Problem& pb, const GridFunction& u, const ENorm& n) {
  const auto& s = pb.spec();
  std::vector<double> g(u.size(), 0.0);
  if (n.semi > 0.0) {
    const GridFunction v = (1.0 / n.semi) * u;
    const auto mg = pb.kernel().modular_gradient(v, s.nfun);
    double denom = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) denom += mg[i] * v[i];
    for (std::size_t i = 0; i < u.size(); ++i) g[i] += mg[i] / denom;
  }
  if (n.weighted > 0.0) {
    double denom = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) denom += s.V[i] * s.nfun.m(u[i] / n.weighted) * u[i] / n.weighted;
    for (std::size_t i = 0; i < u.size(); ++i) g[i] += s.V[i] * s.nfun.m(u[i] / n.weighted) / denom;
  }
  return g;
}

inline std::vector<double> lmu_gradient(const GridFunction& u, double mu) {
  const double nrm = lmu_norm(u, mu);
  std::vector<double> g(u.size(), 0.0);
  if (nrm == 0.0) return g;
  for (std::size_t i = 0; i < u.size(); ++i)
    g[i] = u.weight() * std::pow(std::abs(u[i]), mu - 1.0) * sign(u[i]) / std::pow(nrm, mu - 1.0);
  return g;
}

}  // namespace detail

/// Orthonormal (discrete L^2) sine modes of the box. Y_k = span(e_1..e_k),
/// Z_k = span(e_k..e_N).
class SubspaceLadder {
 public:
  SubspaceLadder(const BoxDomain& dom, int k_max, int modes = 0) : dom_(dom), k_max_(k_max) {
    if (k_max < 1) throw std::domain_error("ladder needs k_max >= 1");
    if (modes == 0) modes = k_max + 24;
    if (modes < k_max) throw std::domain_error("ladder needs at least k_max modes");
    std::vector<std::pair<int, int>> idx;
    const int top = dom.n();
    if (dom.d() == 1) {
      for (int j = 1; j <= std::min(modes, top); ++j) idx.emplace_back(j, 0);
    } else {
      for (int sum = 2; static_cast<int>(idx.size()) < modes && sum <= 2 * top; ++sum)
        for (int a = 1; a < sum && static_cast<int>(idx.size()) < modes; ++a)
          if (a <= top && sum - a <= top) idx.emplace_back(a, sum - a);
    }
    if (static_cast<int>(idx.size()) < modes) throw std::domain_error("grid too coarse for the requested modes");
    for (const auto& [a, b] : idx) {
      basis_.push_back(GridFunction::sample(dom, [&](double x, double y) {
        double v = mode(a, 0, x);
        if (dom.d() == 2) v *= mode(b, 1, y);
        return v;
      }));
    }
  }

  const BoxDomain& domain() const { return dom_; }
  int k_max() const { return k_max_; }
  int size() const { return static_cast<int>(basis_.size()); }
  const GridFunction& e(int j) const { return basis_.at(static_cast<std::size_t>(j - 1)); }

  /// sum_{j=first}^{last} c[j - first] e_j.
  GridFunction combine(const std::vector<double>& c, int first) const {
    GridFunction u(dom_);
    for (std::size_t j = 0; j < c.size(); ++j) {
      const auto& ej = e(first + static_cast<int>(j));
      for (std::size_t i = 0; i < u.size(); ++i) u[i] += c[j] * ej[i];
    }
    return u;
  }

  /// Gaussian coefficients on e_1..e_k.
  GridFunction random_in_Y(int k, std::mt19937_64& rng) const {
    check_k(k);
    std::normal_distribution<double> g;
    std::vector<double> c(static_cast<std::size_t>(k));
    for (auto& x : c) x = g(rng);
    return combine(c, 1);
  }

  /// Gaussian coefficients on e_k..e_N with a random power-law decay.
  GridFunction random_in_Z(int k, std::mt19937_64& rng) const {
    check_k(k);
    std::normal_distribution<double> g;
    const double alpha = std::uniform_real_distribution<double>(0.0, 2.0)(rng);
    std::vector<double> c(static_cast<std::size_t>(size() - k + 1));
    for (std::size_t j = 0; j < c.size(); ++j) c[j] = g(rng) * std::pow(static_cast<double>(j + 1), -alpha);
    return combine(c, k);
  }

 private:
  double mode(int j, int axis, double x) const {
    const double len = dom_.hi(axis) - dom_.lo(axis);
    return std::sqrt(2.0 / len) * std::sin(j * pi * (x - dom_.lo(axis)) / len);
  }
  void check_k(int k) const {
    if (k < 1 || k > size()) throw std::domain_error("subspace index out of range");
  }

  BoxDomain dom_;
  int k_max_;
  std::vector<GridFunction> basis_;
};

struct Lem3Report {
  EnergyBreakdown energy;
  ENorm norm;
  std::pair<double, double> G_bounds, Psi_bounds;  // (xi_0, xi_1) at [u] and at ||u||_(V,M)
  double worst_slack = 0.0;                         // min of the four margins, negative on failure
  bool pass = false;
};

inline Lem3Report lem3_check(const Problem& pb, const GridFunction& u) {
  Lem3Report r;
  r.energy = energy(pb, u);
  r.norm = e_norm(pb, u);
  r.G_bounds = xi_bounds(pb.indices(), r.norm.semi);
  r.Psi_bounds = xi_bounds(pb.indices(), r.norm.weighted);
  auto margin = [](double lo, double hi) { return (hi - lo) + 1e-8 * (1.0 + std::abs(hi)); };
  r.worst_slack = std::min({margin(r.G_bounds.first, r.energy.G), margin(r.energy.G, r.G_bounds.second),
                            margin(r.Psi_bounds.first, r.energy.Psi), margin(r.energy.Psi, r.Psi_bounds.second)});
  r.pass = r.worst_slack >= 0.0;
  return r;
}

/// Random direction in Y_16, normalized to ||v|| = 1.
inline GridFunction random_unit_direction(const Problem& pb, const SubspaceLadder& ladder, std::mt19937_64& rng) {
  for (;;) {
    const auto v = ladder.random_in_Y(std::min(16, ladder.size()), rng);
    const double n = e_norm(pb, v).total;
    if (n > 0.0) return (1.0 / n) * v;
  }
}

struct DerivativeBoundReport {
  double proxy = 0.0;  // max |<I'(u), v>| over the sampled unit directions
  double bound = 0.0;
  double norm = 0.0;   // ||u||
  double C = 0.0;      // embedding constant E -> L^mu used
  bool pass = false;
};

/// Dual-norm proxy of I'(u) against the explicit bound
/// [(m^0 xi_1)^{1/mb_0} + (m^0 xi_1)^{1/mb^0}] + m^0 xi_1 + 1 + 2p C^p ||xi|| ||u||^{p-1},
/// xi_1 = xi_1(||u||), mb_0 and mb^0 the conjugate indices.
inline DerivativeBoundReport derivative_bound_check(const Problem& pb, const GridFunction& u, double C,
                                                    int directions = 50, std::uint64_t seed = 11) {
  const auto g = grad_energy(pb, u);
  const SubspaceLadder ladder(pb.domain(), 1, std::min(16, pb.domain().n()));
  std::mt19937_64 rng(seed);
  DerivativeBoundReport r;
  r.C = C;
  for (int k = 0; k < directions; ++k) r.proxy = std::max(r.proxy, std::abs(inner(g, random_unit_direction(pb, ladder, rng))));
  const auto& idx = pb.indices();
  const double p = pb.spec().p;
  r.norm = e_norm(pb, u).total;
  const double xi1 = xi_bounds(idx, r.norm).second;
  const double mb_lo = idx.m_sup / (idx.m_sup - 1.0), mb_hi = idx.m0 / (idx.m0 - 1.0);
  r.bound = std::pow(idx.m_sup * xi1, 1.0 / mb_lo) + std::pow(idx.m_sup * xi1, 1.0 / mb_hi) + idx.m_sup * xi1 + 1.0 +
            2.0 * p * std::pow(C, p) * pb.xi_norm() * std::pow(r.norm, p - 1.0);
  r.pass = r.proxy <= r.bound;
  return r;
}

struct ConvexityReport {
  double lhs = 0.0;  // A(u)/2 + A(v)/2 - A((u+v)/2)
  double rhs = 0.0;  // A((u-v)/2)
  bool pass = false;
  bool skipped = false;
  std::string notice;
};

inline ConvexityReport convexity_inequality_check(const Problem& pb, const GridFunction& u, const GridFunction& v) {
  ConvexityReport r;
  const auto& g = pb.growth();
  if (!g.m2.pass || !g.delta2.pass) {
    r.skipped = true;
    r.notice = std::string("skipped: ") + (!g.m2.pass ? "(M2)" : "Delta2") + " verdict is false";
    return r;
  }
  auto A = [&](const GridFunction& w) { return energy(pb, w).A; };
  r.lhs = 0.5 * A(u) + 0.5 * A(v) - A(0.5 * (u + v));
  r.rhs = A(0.5 * (u - v));
  r.pass = r.lhs >= r.rhs - 1e-8;
  return r;
}

struct BCoercivityReport {
  int k = 0;
  double c_H = 0.0;               // min B(u) / ||u||^p over the samples
  double eps_k = 0.0;             // min over samples of the largest eps with meas{xi|u|^p >= eps ||u||^p} >= eps
  double homogeneity_error = 0.0; // max |B(2u) - 2^p B(u)| / (2^p B(u))
  Table level_measures;           // (c, min over samples of meas{xi |u|^p >= c ||u||^p})
  bool pass = false;
};

inline BCoercivityReport b_coercivity_check(const Problem& pb, const SubspaceLadder& ladder, int k, int samples = 200,
                                            std::uint64_t seed = 5) {
  if (k < 1 || k > ladder.k_max()) throw std::domain_error("b_coercivity_check: need 1 <= k <= k_max");
  const auto& s = pb.spec();
  if (s.xi.is_zero()) throw precondition_error("xi != 0", "weight xi vanishes on the grid");
  std::mt19937_64 rng(seed);
  BCoercivityReport r;
  r.k = k;
  r.c_H = HUGE_VAL;
  r.eps_k = HUGE_VAL;
  const std::vector<double> levels{1e-4, 1e-3, 1e-2, 1e-1};
  std::vector<double> meas(levels.size(), HUGE_VAL);
  const double w = pb.domain().cell_volume();
  for (int t = 0; t < samples; ++t) {
    auto u = ladder.random_in_Y(k, rng);
    u = (1.0 / e_norm(pb, u).total) * u;
    const double B1 = energy(pb, u).B, B2 = energy(pb, 2.0 * u).B;
    r.c_H = std::min(r.c_H, B1);
    r.homogeneity_error = std::max(r.homogeneity_error, std::abs(B2 - std::pow(2.0, s.p) * B1) / (std::pow(2.0, s.p) * B1));
    std::vector<double> a(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) a[i] = s.xi[i] * std::pow(std::abs(u[i]), s.p);
    std::sort(a.begin(), a.end(), std::greater<>());
    double eps = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) eps = std::max(eps, std::min(a[j], w * static_cast<double>(j + 1)));
    r.eps_k = std::min(r.eps_k, eps);
    for (std::size_t l = 0; l < levels.size(); ++l) {
      const auto cnt = std::count_if(a.begin(), a.end(), [&](double x) { return x >= levels[l]; });
      meas[l] = std::min(meas[l], w * static_cast<double>(cnt));
    }
  }
  for (std::size_t l = 0; l < levels.size(); ++l) r.level_measures.emplace_back(levels[l], meas[l]);
  r.pass = r.c_H > 0.0 && r.homogeneity_error <= 1e-12;
  return r;
}

struct LkReport {
  int k = 0;
  double value = 0.0;  // best ||u||_{L^mu} found on the unit sphere of Z_k
  GridFunction u;      // the maximizer, ||u|| = 1
  double norm_check = 0.0;
};

/// l_k = sup{||u||_{L^mu} : u in Z_k, ||u|| = 1} by random draws followed by
/// normalized gradient ascent in the coefficients of e_k..e_N.
inline LkReport subspace_lk(const Problem& pb, const SubspaceLadder& ladder, int k, int draws = 500, int steps = 20,
                            std::uint64_t seed = 0) {
  if (k < 1 || k >= ladder.k_max()) throw std::domain_error("subspace_lk: need 1 <= k < k_max");
  const double mu = pb.spec().mu;
  std::mt19937_64 rng(seed + 1000003ULL * static_cast<std::uint64_t>(k));
  auto ratio = [&](const GridFunction& u) {
    const double n = e_norm(pb, u).total;
    return n > 0.0 ? lmu_norm(u, mu) / n : 0.0;
  };
  LkReport r;
  r.k = k;
  GridFunction best;
  for (int t = 0; t < draws; ++t) {
    const auto u = ladder.random_in_Z(k, rng);
    const double q = ratio(u);
    if (q > r.value) { r.value = q; best = u; }
  }
  if (best.size() == 0) throw std::runtime_error("subspace_lk: every draw vanished");
  const int N = ladder.size();
  auto coeffs = [&](const GridFunction& u) {
    std::vector<double> c(static_cast<std::size_t>(N - k + 1));
    for (std::size_t j = 0; j < c.size(); ++j) c[j] = inner(u, ladder.e(k + static_cast<int>(j)));
    return c;
  };
  std::vector<double> c = coeffs(best);
  double step = 0.1;
  for (int it = 0; it < steps; ++it) {
    const auto u = ladder.combine(c, k);
    const auto n = e_norm(pb, u);
    const double L = lmu_norm(u, mu), R = L / n.total;
    const auto gl = detail::lmu_gradient(u, mu), gn = detail::e_norm_gradient(pb, u, n);
    std::vector<double> gc(c.size(), 0.0);
    for (std::size_t j = 0; j < c.size(); ++j) {
      const auto& ej = ladder.e(k + static_cast<int>(j));
      for (std::size_t i = 0; i < u.size(); ++i) gc[j] += (gl[i] - R * gn[i]) / n.total * ej[i];
    }
    double gnorm = 0.0, cnorm = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) { gnorm += gc[j] * gc[j]; cnorm += c[j] * c[j]; }
    gnorm = std::sqrt(gnorm);
    cnorm = std::sqrt(cnorm);
    if (gnorm == 0.0) break;
    bool improved = false;
    for (int h = 0; h < 30 && !improved; ++h, step *= 0.5) {
      std::vector<double> trial = c;
      for (std::size_t j = 0; j < c.size(); ++j) trial[j] += step * cnorm * gc[j] / gnorm;
      const double q = ratio(ladder.combine(trial, k));
      if (q > R) {
        c = trial;
        improved = true;
        r.value = std::max(r.value, q);
      }
    }
    if (!improved) break;
    step *= 4.0;
  }
  r.u = ladder.combine(c, k);
  const double n = e_norm(pb, r.u).total;
  r.u = (1.0 / n) * r.u;
  r.norm_check = e_norm(pb, r.u).total;
  r.value = std::max(r.value, lmu_norm(r.u, mu));
  return r;
}

struct FountainReport {
  int k = 0;
  double theta = 0.0, lambda = 1.0;
  double l_k = 0.0;
  double xi_norm = 0.0;  // ||xi||_{L^{mu/(mu-p)}}
  double rho_k = 0.0;    // (4 theta ||xi|| l_k^p)^{1/(m^0-p)}
  double eps_k = 0.0;
  double r_k = 0.0;      // half of min{rho_k, 4^{-1/(m0-p)} eps_k^{2/(m0-p)}, 1}
  double a_k = 0.0;      // min I over the sphere ||u|| = rho_k in Z_k
  double b_k = 0.0;      // max I over the sphere ||u|| = r_k in Y_k
  double d_k = 0.0;      // min I over the ball ||u|| <= rho_k in Z_k, u = 0 included
  double d_lower = 0.0;  // -2 ||xi|| l_k^p rho_k^p
  std::vector<double> sphere_energies;  // I at the Z_k sphere samples, in draw order
  bool a_positive = false, b_negative = false, d_in_range = false;
};

inline FountainReport fountain_diagnostics(const Problem& pb, const SubspaceLadder& ladder, int k, double theta,
                                           int samples = 500, std::uint64_t seed = 3) {
  const auto& idx = pb.indices();
  const double p = pb.spec().p;
  if (!(idx.m_sup > p) || !(idx.m0 > p)) throw unsupported_spec("fountain diagnostics need m0 > p");
  if (!(theta > std::pow(2.0, idx.m_sup - 2.0)))
    throw precondition_error("theta", "need theta > 2^(m^0 - 2) = " + std::to_string(std::pow(2.0, idx.m_sup - 2.0)));
  FountainReport r;
  r.k = k;
  r.theta = theta;
  r.lambda = pb.lambda();
  r.l_k = subspace_lk(pb, ladder, k).value;
  r.xi_norm = pb.xi_norm();
  r.rho_k = std::pow(4.0 * theta * r.xi_norm * std::pow(r.l_k, p), 1.0 / (idx.m_sup - p));
  r.eps_k = b_coercivity_check(pb, ladder, k).eps_k;
  r.r_k = 0.5 * std::min({r.rho_k, std::pow(4.0, -1.0 / (idx.m0 - p)) * std::pow(r.eps_k, 2.0 / (idx.m0 - p)), 1.0});
  r.d_lower = -2.0 * r.xi_norm * std::pow(r.l_k, p) * std::pow(r.rho_k, p);

  std::mt19937_64 rng(seed + 7919ULL * static_cast<std::uint64_t>(k));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  r.a_k = HUGE_VAL;
  r.d_k = 0.0;
  for (int t = 0; t < samples; ++t) {
    auto u = ladder.random_in_Z(k, rng);
    u = (r.rho_k / e_norm(pb, u).total) * u;
    const double e = energy(pb, u).I;
    r.sphere_energies.push_back(e);
    r.a_k = std::min(r.a_k, e);
    r.d_k = std::min({r.d_k, e, energy(pb, unit(rng) * u).I});
  }
  r.b_k = -HUGE_VAL;
  for (int t = 0; t < samples; ++t) {
    auto u = ladder.random_in_Y(k, rng);
    u = (r.r_k / e_norm(pb, u).total) * u;
    r.b_k = std::max(r.b_k, energy(pb, u).I);
  }
  r.a_positive = r.a_k > 0.0;
  r.b_negative = r.b_k < 0.0;
  r.d_in_range = r.d_k >= r.d_lower - 1e-8 && r.d_k <= 1e-8;
  return r;
}

struct CriticalPoint {
  GridFunction u;
  EnergyBreakdown energy;
  double residual = 0.0;            // sqrt(sum g^2 w) at u
  double tolerance = 0.0;           // acceptance threshold the residual met
  double deflation_distance = 0.0;  // min L^mu distance to 0 and to the earlier +-u_j
  int seed = 0;
  int subspace = 0;                 // k of the seed's Y_k
  int iterations = 0;
};

struct SearchOptions {
  double beta = 0.1;               // deflation weight
  double deflation_power = 1.0;    // each factor is 1 + beta / dist^q
  double accept_factor = 1e-6;     // residual <= accept_factor (1 + residual at the seed)
  double min_distance = 1e-3;
  double polish = 1e-11;           // Newton continues until the residual is below this
  int max_iterations = 200;
  std::vector<double> amplitudes{0.5, 0.25, 0.1, 0.05};  // seed sd has ||u|| = amplitudes[sd % size] (1 + k / 4)
  int batch = 8;                   // seeds per deflation batch
  std::uint64_t seed = 1;
};

struct SearchReport {
  std::vector<CriticalPoint> points;  // sorted by energy
  std::vector<std::string> diagnostics;
  int seeds_tried = 0;
  bool energies_negative = true;
  bool sorted_toward_zero = true;
};

namespace detail {

struct Deflation {
  const std::vector<GridFunction>* roots;
  double beta, q, mu;

  // (log eta, grad log eta, min distance)
  std::tuple<double, std::vector<double>, double> eval(const GridFunction& u) const {
    double log_eta = 0.0, dmin = HUGE_VAL;
    std::vector<double> grad(u.size(), 0.0);
    auto add = [&](const GridFunction& e) {
      const double dist = lmu_norm(e, mu);
      dmin = std::min(dmin, dist);
      if (dist == 0.0) {
        log_eta = HUGE_VAL;
        return;
      }
      const double dq = std::pow(dist, q);
      log_eta += std::log1p(beta / dq);
      const double f = -q * beta / (dist * (dq + beta));
      const auto gd = lmu_gradient(e, mu);
      for (std::size_t i = 0; i < u.size(); ++i) grad[i] += f * gd[i];
    };
    add(u);
    for (const auto& r : *roots) {
      add(u - r);
      add(u + r);
    }
    return {log_eta, grad, dmin};
  }
};

inline std::vector<double> solve_step(const Eigen::MatrixXd& J, const std::vector<double>& g, double lm) {
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) rhs(i) = -g[static_cast<std::size_t>(i)];
  Eigen::VectorXd x;
  if (lm == 0.0) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
    x = lu.solve(rhs);
  } else {
    Eigen::MatrixXd N = J.transpose() * J;
    N.diagonal().array() += lm;
    x = N.ldlt().solve(J.transpose() * rhs);
  }
  std::vector<double> out(g.size());
  for (Eigen::Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = x(i);
  return out;
}

}  // namespace detail

namespace detail {

struct NewtonRun {
  GridFunction u;
  double residual = 0.0;
  int iterations = 0;
  bool stalled = false;
};

/// Newton on I' = 0 with the step rescaled by the deflation factor and
/// backtracked on log|I'| + log(eta); Levenberg-Marquardt steps take over
/// when no backtracked Newton step decreases it.
inline NewtonRun deflated_newton(const Problem& pb, GridFunction u, const Deflation& defl, const SearchOptions& opt) {
  auto g = grad_energy(pb, u);
  auto merit = [&](const GridFunction& v, const GridFunction& gv) {
    return std::log(residual_norm(gv)) + std::get<0>(defl.eval(v));
  };
  double phi = merit(u, g);
  NewtonRun run;
  double lm = 0.0;
  for (; run.iterations < opt.max_iterations && residual_norm(g) > opt.polish; ++run.iterations) {
    const auto J = hessian(pb, u);
    const auto gle = std::get<1>(defl.eval(u));
    const auto delta = solve_step(J, g.values(), lm);
    double dot = 0.0;
    for (std::size_t i = 0; i < delta.size(); ++i) dot += gle[i] * delta[i];
    const double tau = lm == 0.0 && std::abs(1.0 - dot) > 1e-3 ? 1.0 / (1.0 - dot) : 1.0;
    bool ok = false;
    for (int h = 0; h < 20 && !ok; ++h) {
      GridFunction trial = u;
      for (std::size_t i = 0; i < u.size(); ++i) trial[i] += std::ldexp(tau, -h) * delta[i];
      if (!std::isfinite(trial.max_abs())) continue;
      const auto gt = grad_energy(pb, trial);
      const double pt = merit(trial, gt);
      if (pt < phi) {
        u = std::move(trial);
        g = gt;
        phi = pt;
        ok = true;
      }
    }
    if (ok) {
      lm = lm * 0.1 < 1e-10 ? 0.0 : lm * 0.1;
    } else if (lm > 1e8) {
      run.stalled = true;
      break;
    } else {
      lm = lm == 0.0 ? 1e-4 * (1.0 + J.diagonal().cwiseAbs().maxCoeff()) : lm * 10.0;
    }
  }
  run.residual = residual_norm(g);
  run.u = std::move(u);
  return run;
}

}  // namespace detail

/// Deflated Newton from seeds in Y_1, Y_2, ... at several amplitudes. Seeds
/// run in batches against the deflation set {0, +-u_j} frozen at the start
/// of the batch; candidates are accepted in seed order at the batch barrier.
inline SearchReport find_critical_points(const Problem& pb, int count_target, int seeds, const SubspaceLadder& ladder,
                                         const SearchOptions& opt = {}) {
  if (pb.lambda() != 1.0) throw precondition_error("lambda=1", "critical points are searched for I_1");
  const auto& gr = pb.growth();
  if (!gr.m1.pass) throw precondition_error("(M1)", gr.m1.detail);
  if (!gr.m2.pass) throw precondition_error("(M2)", gr.m2.detail);
  if (opt.amplitudes.empty() || opt.batch < 1) throw std::invalid_argument("search options: empty amplitude list or batch");
  SearchReport rep;
  if (pb.spec().xi.is_zero()) {
    rep.diagnostics.push_back("xi vanishes: I_1 = A >= 0 = I_1(0), only the trivial critical point");
    return rep;
  }
  const double mu = pb.spec().mu;
  std::vector<GridFunction> roots;
  std::mt19937_64 rng(opt.seed);
  auto distance = [&](const GridFunction& u) {
    double d = lmu_norm(u, mu);
    for (const auto& r : roots) d = std::min({d, lmu_norm(u - r, mu), lmu_norm(u + r, mu)});
    return d;
  };
  for (int first = 0; first < seeds && static_cast<int>(rep.points.size()) < count_target; first += opt.batch) {
    const std::vector<GridFunction> frozen = roots;
    const detail::Deflation defl{&frozen, opt.beta, opt.deflation_power, mu};
    std::vector<std::pair<int, detail::NewtonRun>> runs;
    std::vector<double> seed_residual;
    for (int sd = first; sd < std::min(seeds, first + opt.batch); ++sd) {
      ++rep.seeds_tried;
      const int k = std::min(sd + 1, ladder.size());
      GridFunction u = ladder.random_in_Y(k, rng);
      const double amp = opt.amplitudes[static_cast<std::size_t>(sd) % opt.amplitudes.size()];
      u = (amp * (1.0 + 0.25 * k) / e_norm(pb, u).total) * u;
      seed_residual.push_back(residual_norm(grad_energy(pb, u)));
      runs.emplace_back(sd, detail::deflated_newton(pb, std::move(u), defl, opt));
    }
    for (std::size_t c = 0; c < runs.size(); ++c) {
      const auto& [sd, run] = runs[c];
      const double accept = opt.accept_factor * (1.0 + seed_residual[c]);
      const std::string tag = "seed " + std::to_string(sd) + ": ";
      if (run.residual > accept) {
        rep.diagnostics.push_back(tag + "no convergence (residual " + std::to_string(run.residual) +
                                  (run.stalled ? ", stalled)" : ")"));
        continue;
      }
      const double dist = distance(run.u);
      if (dist < opt.min_distance) {
        rep.diagnostics.push_back(tag + "converged to a known point (distance " + std::to_string(dist) + ")");
        continue;
      }
      if (static_cast<int>(rep.points.size()) >= count_target) break;
      CriticalPoint cp;
      cp.u = run.u;
      cp.energy = energy(pb, run.u);
      cp.residual = run.residual;
      cp.tolerance = accept;
      cp.deflation_distance = dist;
      cp.seed = sd;
      cp.subspace = std::min(sd + 1, ladder.size());
      cp.iterations = run.iterations;
      roots.push_back(run.u);
      rep.points.push_back(std::move(cp));
    }
  }
  std::sort(rep.points.begin(), rep.points.end(),
            [](const CriticalPoint& a, const CriticalPoint& b) { return a.energy.I < b.energy.I; });
  for (std::size_t i = 0; i < rep.points.size(); ++i) {
    if (!(rep.points[i].energy.I < 0.0)) rep.energies_negative = false;
    if (i > 0 && rep.points[i].energy.I < rep.points[i - 1].energy.I) rep.sorted_toward_zero = false;
  }
  if (rep.points.empty()) rep.diagnostics.push_back("no nontrivial critical point found");
  return rep;
}

/// max |<I'(u), v>| over random directions with ||v|| = 1.
inline double residual_recheck(const Problem& pb, const GridFunction& u, int directions = 20, std::uint64_t seed = 17) {
  const auto g = grad_energy(pb, u);
  const SubspaceLadder ladder(pb.domain(), 1, std::min(16, pb.domain().n()));
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int k = 0; k < directions; ++k) worst = std::max(worst, std::abs(inner(g, random_unit_direction(pb, ladder, rng))));
  return worst;
}

/// Pairing of I'(u) with the highest sine modes of the grid, normalized in E.
inline double high_frequency_pairing(const Problem& pb, const GridFunction& u, int modes = 8) {
  const auto g = grad_energy(pb, u);
  const int n = pb.domain().n();
  const SubspaceLadder ladder(pb.domain(), 1, pb.domain().d() == 1 ? n : std::min(n * n, 4 * n));
  double worst = 0.0;
  for (int j = ladder.size() - modes + 1; j <= ladder.size(); ++j) {
    const auto& e = ladder.e(j);
    worst = std::max(worst, std::abs(inner(g, e)) / e_norm(pb, e).total);
  }
  return worst;
}

struct BoundednessReport {
  ENorm norm;
  double energy = 0.0;
  double lhs = 0.0;  // ||u||^{m0} / 2^{m0-1}
  double rhs = 0.0;  // I_1(u) + 2 ||xi|| C^p ||u||^p + 1e-6
  bool applies = false;  // ||u|| >= 1
  bool pass = true;
};

inline BoundednessReport boundedness_check(const Problem& pb, const GridFunction& u, double C) {
  BoundednessReport r;
  r.norm = e_norm(pb, u);
  r.energy = energy(pb, u).I;
  const double m0 = pb.indices().m0, p = pb.spec().p, N = r.norm.total;
  r.lhs = std::pow(N, m0) / std::pow(2.0, m0 - 1.0);
  r.rhs = r.energy + 2.0 * pb.xi_norm() * std::pow(C, p) * std::pow(N, p) + 1e-6;
  r.applies = N >= 1.0;
  r.pass = !r.applies || r.lhs <= r.rhs;
  return r;
}

enum class ProbeKind { TranslatingBumps, TailMass };

struct CompactnessReport {
  ProbeKind kind = ProbeKind::TranslatingBumps;
  Table table;                // bumps: (centre, ||u/||u|| ||_{L^mu}); tail: (solution index, tail fraction)
  double decay = 0.0;         // bumps: value at the centre over the smallest value
  double level = 0.0;         // tail: L, the 90th percentile of V
  double tail_fraction = 0.0; // tail: worst fraction of sum |u|^mu w outside {V <= L}
  double C = 0.0;             // empirical embedding constant max ||u||_{L^mu} / ||u||
  bool pass = false;
};

namespace detail {

/// Grid analogue of (V2): V on the outer eighth of the box is at least twice its minimum.
inline void require_v2(const GridFunction& V) {
  const auto& dom = V.domain();
  const double vmin = *std::min_element(V.values().begin(), V.values().end());
  double outer = HUGE_VAL;
  for (std::size_t i = 0; i < V.size(); ++i) {
    const auto x = dom.point(i);
    bool edge = false;
    for (int k = 0; k < dom.d(); ++k) {
      const double len = dom.hi(k) - dom.lo(k);
      edge = edge || x[k] - dom.lo(k) < len / 8.0 || dom.hi(k) - x[k] < len / 8.0;
    }
    if (edge) outer = std::min(outer, V[i]);
  }
  if (!(outer >= 2.0 * vmin)) throw precondition_error("(V2)", "potential does not grow toward the box edge");
}

}  // namespace detail

/// Empirical E -> L^mu constant: max ratio over random functions in Y_16 and
/// over the supplied functions.
inline double embedding_constant(const Problem& pb, const std::vector<GridFunction>& extra = {}, int samples = 200,
                                 std::uint64_t seed = 7) {
  const SubspaceLadder ladder(pb.domain(), 1, std::min(16, pb.domain().n()));
  std::mt19937_64 rng(seed);
  double C = 0.0;
  const double mu = pb.spec().mu;
  for (int t = 0; t < samples; ++t) C = std::max(C, lmu_norm(random_unit_direction(pb, ladder, rng), mu));
  for (const auto& u : extra)
    if (!u.is_zero()) C = std::max(C, lmu_norm(u, mu) / e_norm(pb, u).total);
  return C;
}

inline CompactnessReport compactness_probe(const Problem& pb, ProbeKind kind, const std::vector<GridFunction>& solutions = {}) {
  detail::require_v2(pb.spec().V);
  const auto& dom = pb.domain();
  const double mu = pb.spec().mu;
  CompactnessReport r;
  r.kind = kind;
  r.C = embedding_constant(pb, solutions);
  if (kind == ProbeKind::TranslatingBumps) {
    const double half = 0.5 * (dom.hi(0) - dom.lo(0)), mid = 0.5 * (dom.hi(0) + dom.lo(0));
    const double radius = half / 6.0;
    double first = 0.0, smallest = HUGE_VAL;
    for (double f : {0.0, -0.25, 0.25, -0.5, 0.5}) {
      const double c = mid + f * half;
      const auto u = GridFunction::sample(dom, [&](double x, double y) {
        double r2 = (x - c) * (x - c);
        if (dom.d() == 2) r2 += y * y;
        const double t = r2 / (radius * radius);
        return t < 1.0 ? std::exp(-1.0 / (1.0 - t)) : 0.0;
      });
      const double v = lmu_norm(u, mu) / e_norm(pb, u).total;
      r.table.emplace_back(c, v);
      if (f == 0.0) first = v;
      smallest = std::min(smallest, v);
    }
    r.decay = first / smallest;
    r.pass = r.decay >= 2.0;
    return r;
  }
  std::vector<double> vs = pb.spec().V.values();
  std::sort(vs.begin(), vs.end());
  r.level = vs[static_cast<std::size_t>(0.9 * static_cast<double>(vs.size() - 1))];
  for (std::size_t j = 0; j < solutions.size(); ++j) {
    const auto& u = solutions[j];
    double total = 0.0, tail = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double m = std::pow(std::abs(u[i]), mu);
      total += m;
      if (pb.spec().V[i] > r.level) tail += m;
    }
    const double frac = total > 0.0 ? tail / total : 0.0;
    r.table.emplace_back(static_cast<double>(j), frac);
    r.tail_fraction = std::max(r.tail_fraction, frac);
  }
  r.pass = !solutions.empty() && r.tail_fraction < 1e-3;
  return r;
}

}  // namespace folab
