#pragma once

// Growth indices, structural condition checks, Young's inequality, the
// Sobolev conjugate and domination relations between N-functions.
//
// Every "for all t > 0" statement is evaluated on a logarithmic scan grid over
// the function's eval range; limits are judged from decade trends and the
// sampled evidence is returned with each verdict.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "folab/nfunction.hpp"
#include "folab/numerics.hpp"

namespace folab {

/// Anything exposing M(t), m(t) and eval_range() can be analysed.
template <class F>
concept NFunctionLike = requires(const F& f, double t) {
  { f.M(t) } -> std::convertible_to<double>;
  { f.m(t) } -> std::convertible_to<double>;
  { f.eval_range() } -> std::convertible_to<std::pair<double, double>>;
};

using Table = std::vector<std::pair<double, double>>;

struct IndexPair {
  double m0 = 0.0;     // inf t m(t) / M(t)
  double m_sup = 0.0;  // sup t m(t) / M(t)
  int d = 0;
  std::optional<double> m0_star;    // d m0 / (d - m0)
  std::optional<double> msup_star;  // d m_sup / (d - m_sup)
  bool m1 = false;                  // 1 < m0 <= m_sup < m0_star and m0 < d
};

namespace detail {

inline Table subsample(const std::vector<double>& t, const std::vector<double>& v, std::size_t rows = 32) {
  Table out;
  if (t.empty()) return out;
  const std::size_t step = std::max<std::size_t>(1, t.size() / rows);
  for (std::size_t i = 0; i < t.size(); i += step) out.emplace_back(t[i], v[i]);
  if (out.back().first != t.back()) out.emplace_back(t.back(), v.back());
  return out;
}

}  // namespace detail

/// Infimum and supremum of t m(t)/M(t) over a log grid refined by golden section.
template <NFunctionLike F>
IndexPair estimate_indices(const F& f, int d, std::size_t points = 4096) {
  const auto [lo, hi] = f.eval_range();
  const auto grid = log_grid(lo, hi, points);
  auto ratio = [&f](double t) {
    const double M = f.M(t);
    if (!(M > 0.0)) throw std::invalid_argument("estimate_indices: M vanishes at t > 0 (degenerate spec)");
    return t * f.m(t) / M;
  };
  auto ratio_log = [&](double z) { return ratio(std::exp(z)); };
  std::size_t imin = 0, imax = 0;
  std::vector<double> r(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    r[i] = ratio(grid[i]);
    if (r[i] < r[imin]) imin = i;
    if (r[i] > r[imax]) imax = i;
  }
  auto refine = [&](std::size_t i, bool minimize) {
    const double a = std::log(grid[i == 0 ? 0 : i - 1]);
    const double b = std::log(grid[std::min(i + 1, grid.size() - 1)]);
    if (!(b > a)) return r[i];
    const auto v = minimize ? golden_min(ratio_log, a, b, 1e-10).second : golden_max(ratio_log, a, b, 1e-10).second;
    return minimize ? std::min(v, r[i]) : std::max(v, r[i]);
  };
  IndexPair out;
  out.m0 = refine(imin, true);
  out.m_sup = refine(imax, false);
  out.d = d;
  if (d >= 2) {
    // indices within 1e-9 of d count as equal to d: the starred index is undefined there
    const double below = d * (1.0 - 1e-9);
    if (out.m0 < below) out.m0_star = d * out.m0 / (d - out.m0);
    if (out.m_sup < below) out.msup_star = d * out.m_sup / (d - out.m_sup);
    out.m1 = out.m0 > 1.0 && out.m0_star && out.m_sup < *out.m0_star;
  }
  return out;
}

/// (xi_0(beta), xi_1(beta)) = (min, max) of {beta^m0, beta^m_sup}.
inline std::pair<double, double> xi_bounds(double m0, double m_sup, double beta) {
  if (!(beta >= 0.0)) throw std::domain_error("xi_bounds: beta < 0");
  const double a = std::pow(beta, m0), b = std::pow(beta, m_sup);
  return {std::min(a, b), std::max(a, b)};
}
inline std::pair<double, double> xi_bounds(const IndexPair& idx, double beta) {
  return xi_bounds(idx.m0, idx.m_sup, beta);
}

/// M(s) + M-bar(t) - s t; nonnegative, zero iff t = m(s).
inline double young_gap(const NFunction& f, double s, double t) {
  if (!(s >= 0.0 && t >= 0.0)) throw std::domain_error("young_gap: negative argument");
  return f.M(s) + f.conjugate(t) - s * t;
}

struct Verdict {
  bool pass = false;
  double value = 0.0;  // the estimated constant or the decisive statistic
  std::string detail;
  Table evidence;
};

struct GrowthReport {
  Verdict delta2;  // value = K
  Verdict m1;      // (M1) for the given mu
  Verdict m2;      // (M2)
  Verdict m3;      // (M3) for the given (d, s); value = estimate of int_0^1
  double mu = 0.0;
  int d = 0;
  double s = 0.0;
  bool all() const { return delta2.pass && m1.pass && m2.pass && m3.pass; }
};

struct M3Evidence {
  bool near_zero_converges = false;
  bool diverges_at_infinity = false;
  double integral_0_1 = 0.0;
  Table zero_decades;      // (10^-j, int_{10^-j}^1)
  Table infinity_decades;  // (10^j, int_1^{10^j})
};

/// Decade-refinement study of int M^{-1}(tau) / tau^{(d+s)/d} near 0 and at infinity.
inline M3Evidence probe_m3(const NFunction& f, int d, double s) {
  const double expo = (d + s) / static_cast<double>(d);
  auto integrand = [&](double tau) { return f.inverse(tau) / std::pow(tau, expo); };
  M3Evidence ev;
  std::vector<double> inc;
  double acc = 0.0;
  for (int j = 1; j <= 14; ++j) {
    const double piece = integrate_log(integrand, std::pow(10.0, -j), std::pow(10.0, -j + 1), 8);
    acc += piece;
    inc.push_back(piece);
    ev.zero_decades.emplace_back(std::pow(10.0, -j), acc);
  }
  bool shrinking = true;
  for (std::size_t j = inc.size() - 4; j + 1 < inc.size(); ++j)
    if (!(inc[j + 1] < 0.99 * inc[j])) shrinking = false;
  ev.near_zero_converges = shrinking && std::isfinite(acc);
  if (ev.near_zero_converges) {
    const double r = inc.back() / inc[inc.size() - 2];
    ev.integral_0_1 = acc + inc.back() * r / (1.0 - r);
  } else {
    ev.integral_0_1 = HUGE_VAL;
  }
  // at infinity: unbounded partial sums, i.e. decade increments that do not decay
  const double top = std::min(f.M(f.t_max()), 1e30);
  const int decades = std::max(3, static_cast<int>(std::floor(std::log10(top))));
  inc.clear();
  acc = 0.0;
  for (int j = 1; j <= decades; ++j) {
    const double piece = integrate_log(integrand, std::pow(10.0, j - 1), std::pow(10.0, j), 8);
    acc += piece;
    inc.push_back(piece);
    ev.infinity_decades.emplace_back(std::pow(10.0, j), acc);
  }
  bool sustained = true;
  for (std::size_t j = inc.size() - 3; j + 1 < inc.size(); ++j)
    if (!(inc[j + 1] >= 0.99 * inc[j])) sustained = false;
  ev.diverges_at_infinity = sustained;
  return ev;
}

/// Finite-evidence verdicts for Delta_2, (M1), (M2) and (M3).
inline GrowthReport check_growth(const NFunction& f, double mu, int d, double s_frac) {
  if (!(mu > 1.0)) throw std::domain_error("check_growth: mu must exceed 1");
  if (!(s_frac > 0.0 && s_frac < 1.0)) throw std::domain_error("check_growth: s must lie in (0,1)");
  if (d < 1) throw std::domain_error("check_growth: d must be positive");
  GrowthReport rep;
  rep.mu = mu;
  rep.d = d;
  rep.s = s_frac;
  const double lo = f.t_min(), hi = f.t_max();

  {  // Delta_2: K = max M(2t)/M(t) over [t_min, t_max/2]
    const auto g = log_grid(lo, hi / 2.0, 4096);
    std::vector<double> r(g.size());
    double K = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      r[i] = f.M(2.0 * g[i]) / f.M(g[i]);
      K = std::max(K, r[i]);
    }
    const double top = g.back();
    const double last_decade = f.M(2.0 * top) / f.M(top) / (f.M(0.2 * top) / f.M(0.1 * top));
    rep.delta2.value = K;
    rep.delta2.pass = std::isfinite(K) && last_decade <= 1.05;
    rep.delta2.detail = "K = max M(2t)/M(t); last-decade ratio growth " + std::to_string(last_decade);
    rep.delta2.evidence = detail::subsample(g, r);
  }
  const IndexPair idx = estimate_indices(f, std::max(d, 2));
  {  // (M1): t^mu / M(t) -> 0
    const auto g = log_grid(hi / 100.0, hi, 64);
    std::vector<double> r(g.size());
    bool decreasing = true;
    for (std::size_t i = 0; i < g.size(); ++i) {
      r[i] = std::pow(g[i], mu) / f.M(g[i]);
      if (i > 0 && !(r[i] < r[i - 1])) decreasing = false;
    }
    const double at_one = 1.0 / f.M(1.0);
    rep.m1.value = r.back() / at_one;
    rep.m1.pass = decreasing && rep.m1.value < 1e-3 && mu < idx.m0;
    rep.m1.detail = "t^mu/M(t) at t_max relative to t=1: " + std::to_string(rep.m1.value) +
                    "; mu < m0: " + (mu < idx.m0 ? "yes" : "no");
    rep.m1.evidence = detail::subsample(g, r);
  }
  {  // (M2): t -> M(sqrt t) convex, midpoint test on 4096 adjacent pairs
    const auto g = log_grid(lo * lo, hi * hi, 4097);
    double worst = 0.0;
    std::vector<double> viol(g.size() - 1);
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
      const double a = g[i], b = g[i + 1];
      const double mid = f.M(std::sqrt(0.5 * (a + b)));
      const double avg = 0.5 * (f.M(std::sqrt(a)) + f.M(std::sqrt(b)));
      viol[i] = (mid - avg) / std::max(avg, 1e-300);
      worst = std::max(worst, viol[i]);
    }
    std::vector<double> tg(g.begin(), g.end() - 1);
    rep.m2.value = worst;
    rep.m2.pass = worst <= 1e-12;
    rep.m2.detail = "worst relative midpoint excess of M(sqrt t): " + std::to_string(worst);
    rep.m2.evidence = detail::subsample(tg, viol);
  }
  {
    const M3Evidence ev = probe_m3(f, d, s_frac);
    rep.m3.pass = ev.near_zero_converges && ev.diverges_at_infinity;
    rep.m3.value = ev.integral_0_1;
    rep.m3.detail = std::string("near 0: ") + (ev.near_zero_converges ? "converges" : "does not converge") +
                    "; at infinity: " + (ev.diverges_at_infinity ? "diverges" : "appears bounded");
    rep.m3.evidence = ev.zero_decades;
    rep.m3.evidence.insert(rep.m3.evidence.end(), ev.infinity_decades.begin(), ev.infinity_decades.end());
  }
  return rep;
}

/// The Sobolev conjugate M_* defined through
///   M_*^{-1}(t) = int_0^t M^{-1}(tau) / tau^{(d+s)/d} dtau,
/// tabulated eagerly on a geometric grid of tau (50 knots per decade, graded
/// down to 1e-14 with a power-law tail below). Evaluation of M_*, M_*^{-1}
/// and m_* uses piecewise power-law interpolation of the monotone table.
class SobolevConjugate {
 public:
  SobolevConjugate(const NFunction& f, int d, double s, int per_decade = 50) : d_(d), s_(s) {
    if (!(s > 0.0 && s <= 1.0) || d < 1) throw std::domain_error("sobolev conjugate: need d >= 1, 0 < s <= 1");
    const M3Evidence ev = probe_m3(f, d, s);
    if (!ev.near_zero_converges || !ev.diverges_at_infinity)
      throw unsupported_spec("(M3) fails for " + f.name() + ": Sobolev conjugate undefined");
    expo_ = (d + s) / static_cast<double>(d);
    const double tau_lo = 1e-14;
    const double tau_hi = std::min(f.M(f.t_max()), 1e30);
    auto g = [&](double tau) { return f.inverse(tau) / std::pow(tau, expo_); };
    // power-law tail below tau_lo
    const double a = std::log10(f.inverse(10.0 * tau_lo) / f.inverse(tau_lo));
    const double tail_expo = a - s / static_cast<double>(d);
    if (!(tail_expo > 0.0)) throw unsupported_spec("(M3) fails near zero");
    const int knots = static_cast<int>(std::ceil(std::log10(tau_hi / tau_lo) * per_decade)) + 1;
    tau_ = log_grid(tau_lo, tau_hi, static_cast<std::size_t>(knots));
    y_.resize(tau_.size());
    y_[0] = tau_lo * g(tau_lo) / tail_expo;
    for (std::size_t i = 1; i < tau_.size(); ++i) {
      const double la = std::log(tau_[i - 1]), lb = std::log(tau_[i]);
      y_[i] = y_[i - 1] + gl8().integrate([&](double z) { const double t = std::exp(z); return g(t) * t; }, la, lb);
    }
  }

  int d() const { return d_; }
  double s() const { return s_; }
  /// Range of arguments t over which M_* is tabulated.
  std::pair<double, double> eval_range() const { return {y_.front(), y_.back()}; }

  /// M_*^{-1}(tau).
  double inverse(double tau) const {
    if (!(tau >= 0.0)) throw std::domain_error("M_*^{-1}: negative argument");
    if (tau == 0.0) return 0.0;
    if (tau > tau_.back()) throw std::range_error("M_*^{-1}: argument beyond tabulated range");
    if (tau <= tau_.front()) return y_.front() * std::pow(tau / tau_.front(), slope(0));
    const std::size_t i = segment(tau_, tau);
    return y_[i] * std::pow(tau / tau_[i], slope(i));
  }

  /// M_*(t) by inverse interpolation of the monotone table.
  double M(double t) const {
    const double a = std::abs(t);
    if (a == 0.0) return 0.0;
    if (a > y_.back() * (1.0 + 1e-12))
      throw std::range_error("M_*: argument " + std::to_string(a) + " beyond tabulated range; extend eval_range");
    if (a <= y_.front()) return tau_.front() * std::pow(a / y_.front(), 1.0 / slope(0));
    const std::size_t i = segment(y_, a);
    return tau_[i] * std::pow(a / y_[i], 1.0 / slope(i));
  }

  /// m_* by central finite differences of the tabulated M_*.
  double m(double t) const {
    const double a = std::abs(t);
    if (a == 0.0) return 0.0;
    const double h = 1e-5 * a;
    const double up = std::min(a + h, y_.back());
    const double dn = a - h;
    return sign(t) * (M(up) - M(dn)) / (up - dn);
  }

  const std::vector<double>& tau_knots() const { return tau_; }
  const std::vector<double>& y_knots() const { return y_; }

 private:
  double slope(std::size_t i) const {
    const std::size_t j = std::min(i, tau_.size() - 2);
    return std::log(y_[j + 1] / y_[j]) / std::log(tau_[j + 1] / tau_[j]);
  }
  static std::size_t segment(const std::vector<double>& knots, double v) {
    std::size_t i = static_cast<std::size_t>(std::upper_bound(knots.begin(), knots.end(), v) - knots.begin());
    i = i == 0 ? 0 : i - 1;
    return std::min(i, knots.size() - 2);
  }

  int d_;
  double s_;
  double expo_ = 0.0;
  std::vector<double> tau_, y_;
};

/// Numerical index of M_* next to the bounds d m0/(d - m0), d m_sup/(d - m_sup).
struct MstarIndexReport {
  bool supported = false;
  double observed_inf = 0.0, observed_sup = 0.0;
  std::optional<double> claimed_lower, claimed_upper;
  double fractional_lower = 0.0, fractional_upper = 0.0;  // d m/(d - s m) at m0 and m_sup
  bool agrees_with_claim = false;
  bool unstable = false;
  std::string note;
};

inline MstarIndexReport mstar_index_report(const NFunction& f, int d, double s) {
  MstarIndexReport rep;
  const IndexPair idx = estimate_indices(f, std::max(d, 2));
  if (idx.m0 < d) rep.claimed_lower = d * idx.m0 / (d - idx.m0);
  if (idx.m_sup < d) rep.claimed_upper = d * idx.m_sup / (d - idx.m_sup);
  auto frac = [&](double m) { return d - s * m > 0.0 ? d * m / (d - s * m) : HUGE_VAL; };
  rep.fractional_lower = frac(idx.m0);
  rep.fractional_upper = frac(idx.m_sup);
  try {
    const SobolevConjugate star(f, d, s);
    struct Trimmed {
      const SobolevConjugate* c;
      std::pair<double, double> r;
      double M(double t) const { return c->M(t); }
      double m(double t) const { return c->m(t); }
      std::pair<double, double> eval_range() const { return r; }
    };
    const auto [lo, hi] = star.eval_range();
    const Trimmed view{&star, {lo * 10.0, hi / 10.0}};
    const IndexPair obs = estimate_indices(view, 2, 1024);
    rep.supported = true;
    rep.observed_inf = obs.m0;
    rep.observed_sup = obs.m_sup;
    rep.unstable = !(obs.m_sup < 100.0);
    rep.agrees_with_claim = rep.claimed_lower && rep.claimed_upper &&
                            obs.m0 >= *rep.claimed_lower * (1.0 - 2e-2) &&
                            obs.m_sup <= *rep.claimed_upper * (1.0 + 2e-2);
    rep.note = rep.agrees_with_claim ? "observed index lies within the claimed bounds"
                                     : "observed index disagrees with the claimed bounds";
    if (rep.unstable) rep.note += "; index is very large (s m approaches d), estimate unstable";
  } catch (const unsupported_spec& e) {
    rep.supported = false;
    rep.unstable = true;
    rep.note = std::string("Sobolev conjugate not computable: ") + e.what() +
               "; exponent d m/(d - s m) = " + std::to_string(rep.fractional_upper) + " is unstable";
  }
  return rep;
}

/// K_eps = max(0, sup_t ([M_*(t)]^{(d-s)/d} - eps M_*(t)) / t) over the tabulated range.
inline double kepsilon_constant(const SobolevConjugate& star, double eps, std::size_t points = 4096) {
  if (!(eps > 0.0)) throw std::domain_error("kepsilon: eps must be positive");
  const double expo = (star.d() - star.s()) / static_cast<double>(star.d());
  const auto [lo, hi] = star.eval_range();
  const auto g = log_grid(lo, hi, points);
  double best = 0.0;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double Ms = star.M(g[i]);
    const double v = (std::pow(Ms, expo) - eps * Ms) / g[i];
    if (v > best) { best = v; arg = i; }
  }
  if (best > 0.0 && arg + 1 == g.size())
    throw unsupported_spec("kepsilon: supremum not attained inside the tabulated range");
  return best;
}

inline double kepsilon_constant(const NFunction& f, int d, double s, double eps) {
  return kepsilon_constant(SobolevConjugate(f, d, s), eps);
}

struct DominanceReport {
  bool verdict = false;
  std::vector<double> ks;
  std::vector<Table> ratios;  // per k: (t, B(kt)/A(t))
  std::vector<bool> per_k;
};

/// Decade-trend test of B(kt)/A(t) -> 0 on the top three decades of A's range:
/// each sequence must decrease, and either drop below 1e-3 of its first value
/// or have a reciprocal whose per-decade growth does not decelerate.
template <NFunctionLike FB, NFunctionLike FA>
DominanceReport essentially_stronger(const FB& b, const FA& a, const std::vector<double>& ks) {
  if (ks.empty()) throw std::invalid_argument("essentially_stronger: ks empty");
  DominanceReport rep;
  rep.ks = ks;
  rep.verdict = true;
  const double hi = a.eval_range().second;
  const auto g = log_grid(hi / 1000.0, hi, 31);
  for (double k : ks) {
    if (!(k > 0.0)) throw std::invalid_argument("essentially_stronger: k must be positive");
    Table tab;
    bool decreasing = true;
    for (std::size_t i = 0; i < g.size(); ++i) {
      tab.emplace_back(g[i], b.M(k * g[i]) / a.M(g[i]));
      if (i > 0 && !(tab[i].second < tab[i - 1].second)) decreasing = false;
    }
    bool ok = false;
    if (decreasing) {
      const double first = tab.front().second, last = tab.back().second;
      if (last < 1e-3 * first) {
        ok = true;
      } else {
        // reciprocal increments per decade (10 samples per decade)
        const double d1 = 1.0 / tab[10].second - 1.0 / tab[0].second;
        const double d3 = 1.0 / tab[30].second - 1.0 / tab[20].second;
        ok = d1 > 0.0 && d3 >= 0.9 * d1;
      }
    }
    rep.per_k.push_back(ok);
    rep.ratios.push_back(std::move(tab));
    rep.verdict = rep.verdict && ok;
  }
  return rep;
}

struct CompositionReport {
  bool preconditions = false;
  std::string precondition_detail;
  IndexPair phi, psi, m;
  std::optional<DominanceReport> dominance;
};

/// Psi o Phi essentially weaker than M, gated by the index conditions
/// 1 < phi_0 <= phi^0 < m_0 and psi^0 < m_0 / phi^0.
inline CompositionReport composition_dominance(const NFunction& phi, const NFunction& psi, const NFunction& m,
                                               const std::vector<double>& ks = {1.0, 2.0, 10.0}) {
  CompositionReport rep;
  rep.phi = estimate_indices(phi, 2);
  rep.psi = estimate_indices(psi, 2);
  rep.m = estimate_indices(m, 2);
  const bool c1 = rep.phi.m0 > 1.0 && rep.phi.m_sup < rep.m.m0;
  const bool c2 = rep.psi.m0 > 1.0 && rep.psi.m_sup < rep.m.m0 / rep.phi.m_sup;
  rep.preconditions = c1 && c2;
  rep.precondition_detail = std::string("phi^0 < m_0: ") + (c1 ? "yes" : "no") + "; psi^0 < m_0/phi^0: " + (c2 ? "yes" : "no") +
                            " (phi^0 psi^0 = " + std::to_string(rep.phi.m_sup * rep.psi.m_sup) +
                            ", m_0 = " + std::to_string(rep.m.m0) + ")";
  if (rep.preconditions) rep.dominance = essentially_stronger(NFunction::compose(psi, phi), m, ks);
  return rep;
}

}  // namespace folab
