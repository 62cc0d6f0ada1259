#pragma once

// N-functions M(t) = int_0^|t| m, represented through their density m.

#include <cmath>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "folab/numerics.hpp"

namespace folab {

class NFunction;

namespace family {

/// m(t) = q|t|^{q-2}t, M(t) = |t|^q.
struct Power {
  double q;
};

/// m(t) = p|t|^{p-2}t + q|t|^{q-2}t, M(t) = |t|^p + |t|^q.
struct PowerSum {
  double p, q;
};

/// m(t) = q|t|^{q-2}t log(1+|t|) + |t|^{q-1}t/(1+|t|), M(t) = |t|^q log(1+|t|).
struct LogWeighted {
  double q;
};

/// Density given at knots, piecewise linear in log-log coordinates and
/// extended as a power law beyond the first and last knot.
struct Tabulated {
  std::vector<double> t, m;
  std::vector<double> slope;   // log-log slope on [t_i, t_{i+1}]; slope.back() used above the last knot
  std::vector<double> M_knot;  // M(t_i)
};

/// c * M.
struct Scaled {
  std::shared_ptr<const NFunction> base;
  double c;
};

/// Psi(Phi(t)).
struct Composite {
  std::shared_ptr<const NFunction> outer, inner;
};

}  // namespace family

namespace detail {

inline double ipow(double t, double q) {
  // exact small integer exponents are common (q = 2, 3, 4)
  if (q == 2.0) return t * t;
  if (q == 3.0) return t * t * t;
  if (q == 4.0) { const double s = t * t; return s * s; }
  if (q == 1.0) return t;
  return std::pow(t, q);
}

inline family::Tabulated make_tabulated(std::vector<double> t, std::vector<double> m) {
  if (t.size() != m.size() || t.size() < 2) throw std::invalid_argument("tabulated density needs >= 2 knots");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] > 0.0) || !(m[i] > 0.0) || !std::isfinite(t[i]) || !std::isfinite(m[i]))
      throw std::invalid_argument("tabulated density: knots must be positive and finite");
    if (i > 0 && !(t[i] > t[i - 1] && m[i] > m[i - 1]))
      throw std::invalid_argument("tabulated density: both columns must be strictly increasing");
  }
  family::Tabulated tab;
  tab.slope.resize(t.size() - 1);
  for (std::size_t i = 0; i + 1 < t.size(); ++i)
    tab.slope[i] = std::log(m[i + 1] / m[i]) / std::log(t[i + 1] / t[i]);
  tab.M_knot.resize(t.size());
  tab.M_knot[0] = m[0] * t[0] / (tab.slope[0] + 1.0);
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const double a = tab.slope[i];
    tab.M_knot[i + 1] = tab.M_knot[i] + m[i] * t[i] / (a + 1.0) * (std::pow(t[i + 1] / t[i], a + 1.0) - 1.0);
  }
  tab.t = std::move(t);
  tab.m = std::move(m);
  return tab;
}

}  // namespace detail

/// An N-function with its density, derivative of the density, inverse,
/// complementary function and the auxiliary integral Q(T) = int_0^T M(tau)/tau.
/// Immutable; cheap to copy.
class NFunction {
 public:
  using Family = std::variant<family::Power, family::PowerSum, family::LogWeighted, family::Tabulated,
                              family::Scaled, family::Composite>;

  static NFunction power(double q) {
    if (!(q > 1.0)) throw std::invalid_argument("Power(q) needs q > 1");
    return NFunction(family::Power{q}, {1e-6, 1e6});
  }
  static NFunction power_sum(double p, double q) {
    if (!(p > 1.0 && q > p)) throw std::invalid_argument("PowerSum(p,q) needs 1 < p < q");
    return NFunction(family::PowerSum{p, q}, {1e-6, 1e6});
  }
  static NFunction log_weighted(double q) {
    if (!(q > 1.0)) throw std::invalid_argument("LogWeighted(q) needs q > 1");
    return NFunction(family::LogWeighted{q}, {1e-6, 1e6});
  }
  static NFunction tabulated(std::vector<double> t, std::vector<double> m) {
    auto tab = detail::make_tabulated(std::move(t), std::move(m));
    std::pair<double, double> range{tab.t.front(), tab.t.back()};
    return NFunction(std::move(tab), range);
  }
  static NFunction load_csv(const std::string& path);

  /// c * M, sharing the range of the base.
  NFunction scaled(double c) const {
    if (!(c > 0.0)) throw std::invalid_argument("scale factor must be positive");
    return NFunction(family::Scaled{std::make_shared<const NFunction>(*this), c}, range_);
  }
  /// outer(inner(t)).
  static NFunction compose(const NFunction& outer, const NFunction& inner) {
    return NFunction(family::Composite{std::make_shared<const NFunction>(outer),
                                       std::make_shared<const NFunction>(inner)},
                     inner.range_);
  }

  NFunction with_range(double t_min, double t_max) const {
    if (!(t_min > 0.0 && t_max > t_min)) throw std::invalid_argument("eval range must satisfy 0 < t_min < t_max");
    NFunction copy = *this;
    copy.range_ = {t_min, t_max};
    return copy;
  }

  const Family& family() const noexcept { return family_; }
  std::pair<double, double> eval_range() const noexcept { return range_; }
  double t_min() const noexcept { return range_.first; }
  double t_max() const noexcept { return range_.second; }

  std::string name() const;

  /// M(t), even.
  double M(double t) const {
    require_finite(t, "M");
    return M_pos(std::abs(t));
  }
  /// m(t), odd.
  double m(double t) const {
    require_finite(t, "m");
    return sign(t) * m_pos(std::abs(t));
  }
  /// m'(t), even.
  double dm(double t) const { return dm_pos(std::abs(t)); }

  /// M^{-1}(tau) for tau >= 0.
  double inverse(double tau) const;
  /// Q(T) = int_0^T M(tau)/tau dtau for T >= 0.
  double Q(double T) const;

  /// sup{s : m(s) <= t}.
  double conj_density(double t) const;
  /// Complementary N-function at t.
  double conjugate(double t) const {
    require_finite(t, "conjugate");
    const double a = std::abs(t);
    if (a == 0.0) return 0.0;
    if (auto* p = std::get_if<family::Power>(&family_)) {
      const double q = p->q;
      return (q - 1.0) * std::pow(a / q, q / (q - 1.0));
    }
    const double s = conj_density(a);
    return a * s - M_pos(s);
  }

  /// q when M(ct) = c^q M(t) for all c > 0 (powers and their multiples).
  std::optional<double> homogeneity() const {
    if (auto* p = std::get_if<family::Power>(&family_)) return p->q;
    if (auto* sc = std::get_if<family::Scaled>(&family_)) return sc->base->homogeneity();
    return std::nullopt;
  }

  double M_pos(double t) const;
  double m_pos(double t) const;
  double dm_pos(double t) const;

 private:
  NFunction(Family f, std::pair<double, double> range) : family_(std::move(f)), range_(range) {}

  Family family_;
  std::pair<double, double> range_;
};

/// The complementary function viewed as an N-function (density m-bar).
class ConjugateView {
 public:
  explicit ConjugateView(const NFunction& base) : base_(&base) {}
  double M(double t) const { return base_->conjugate(t); }
  double m(double t) const { return sign(t) * base_->conj_density(std::abs(t)); }
  std::pair<double, double> eval_range() const { return base_->eval_range(); }

 private:
  const NFunction* base_;
};

// ---------------------------------------------------------------------------

inline double NFunction::M_pos(double t) const {
  if (t == 0.0) return 0.0;
  return std::visit(
      [t](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, family::Power>) {
          return detail::ipow(t, f.q);
        } else if constexpr (std::is_same_v<T, family::PowerSum>) {
          return detail::ipow(t, f.p) + detail::ipow(t, f.q);
        } else if constexpr (std::is_same_v<T, family::LogWeighted>) {
          return detail::ipow(t, f.q) * std::log1p(t);
        } else if constexpr (std::is_same_v<T, family::Tabulated>) {
          const auto& k = f.t;
          if (t <= k.front()) return f.M_knot.front() * std::pow(t / k.front(), f.slope.front() + 1.0);
          std::size_t i = static_cast<std::size_t>(std::upper_bound(k.begin(), k.end(), t) - k.begin()) - 1;
          if (i >= f.slope.size()) i = f.slope.size() - 1;
          const double a = f.slope[i];
          return f.M_knot[i] + f.m[i] * k[i] / (a + 1.0) * (std::pow(t / k[i], a + 1.0) - 1.0);
        } else if constexpr (std::is_same_v<T, family::Scaled>) {
          return f.c * f.base->M_pos(t);
        } else {
          return f.outer->M_pos(f.inner->M_pos(t));
        }
      },
      family_);
}

inline double NFunction::m_pos(double t) const {
  if (t == 0.0) return 0.0;
  return std::visit(
      [t](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, family::Power>) {
          return f.q * detail::ipow(t, f.q - 1.0);
        } else if constexpr (std::is_same_v<T, family::PowerSum>) {
          return f.p * detail::ipow(t, f.p - 1.0) + f.q * detail::ipow(t, f.q - 1.0);
        } else if constexpr (std::is_same_v<T, family::LogWeighted>) {
          return f.q * detail::ipow(t, f.q - 1.0) * std::log1p(t) + detail::ipow(t, f.q) / (1.0 + t);
        } else if constexpr (std::is_same_v<T, family::Tabulated>) {
          const auto& k = f.t;
          if (t <= k.front()) return f.m.front() * std::pow(t / k.front(), f.slope.front());
          std::size_t i = static_cast<std::size_t>(std::upper_bound(k.begin(), k.end(), t) - k.begin()) - 1;
          if (i >= f.slope.size()) i = f.slope.size() - 1;
          return f.m[i] * std::pow(t / k[i], f.slope[i]);
        } else if constexpr (std::is_same_v<T, family::Scaled>) {
          return f.c * f.base->m_pos(t);
        } else {
          return f.outer->m_pos(f.inner->M_pos(t)) * f.inner->m_pos(t);
        }
      },
      family_);
}

inline double NFunction::dm_pos(double t) const {
  return std::visit(
      [this, t](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, family::Power>) {
          if (t == 0.0) return f.q == 2.0 ? 2.0 : (f.q > 2.0 ? 0.0 : HUGE_VAL);
          return f.q * (f.q - 1.0) * detail::ipow(t, f.q - 2.0);
        } else if constexpr (std::is_same_v<T, family::PowerSum>) {
          auto term = [t](double e) {
            if (t == 0.0) return e == 2.0 ? 2.0 : (e > 2.0 ? 0.0 : HUGE_VAL);
            return e * (e - 1.0) * detail::ipow(t, e - 2.0);
          };
          return term(f.p) + term(f.q);
        } else if constexpr (std::is_same_v<T, family::LogWeighted>) {
          if (t == 0.0) return f.q > 2.0 ? 0.0 : HUGE_VAL;
          const double q = f.q;
          return q * (q - 1.0) * detail::ipow(t, q - 2.0) * std::log1p(t) + 2.0 * q * detail::ipow(t, q - 1.0) / (1.0 + t) -
                 detail::ipow(t, q) / ((1.0 + t) * (1.0 + t));
        } else if constexpr (std::is_same_v<T, family::Tabulated>) {
          if (t == 0.0) return f.slope.front() >= 1.0 ? (f.slope.front() == 1.0 ? f.m.front() / f.t.front() : 0.0) : HUGE_VAL;
          const auto& k = f.t;
          std::size_t i = 0;
          if (t > k.front()) {
            i = static_cast<std::size_t>(std::upper_bound(k.begin(), k.end(), t) - k.begin()) - 1;
            if (i >= f.slope.size()) i = f.slope.size() - 1;
          }
          return f.slope[i] * this->m_pos(t) / t;
        } else if constexpr (std::is_same_v<T, family::Scaled>) {
          return f.c * f.base->dm_pos(t);
        } else {
          const double inner = f.inner->m_pos(t);
          return f.outer->dm_pos(f.inner->M_pos(t)) * inner * inner +
                 f.outer->m_pos(f.inner->M_pos(t)) * f.inner->dm_pos(t);
        }
      },
      family_);
}

inline double NFunction::inverse(double tau) const {
  if (!(tau >= 0.0)) throw std::domain_error("inverse: negative argument");
  if (tau == 0.0) return 0.0;
  if (auto* p = std::get_if<family::Power>(&family_)) return std::pow(tau, 1.0 / p->q);
  if (auto* s = std::get_if<family::Scaled>(&family_)) return s->base->inverse(tau / s->c);
  if (auto* c = std::get_if<family::Composite>(&family_)) return c->inner->inverse(c->outer->inverse(tau));
  return invert_increasing([this](double t) { return M_pos(t); }, tau, 1.0);
}

inline double NFunction::Q(double T) const {
  T = std::abs(T);
  if (T == 0.0) return 0.0;
  if (auto* p = std::get_if<family::Power>(&family_)) return detail::ipow(T, p->q) / p->q;
  if (auto* p = std::get_if<family::PowerSum>(&family_)) return detail::ipow(T, p->p) / p->p + detail::ipow(T, p->q) / p->q;
  if (auto* s = std::get_if<family::Scaled>(&family_)) return s->c * s->base->Q(T);
  // M(tau)/tau vanishes at least linearly; 16 decades below T leave < 1e-16 relative
  return integrate_log([this](double t) { return M_pos(t) / t; }, T * 1e-16, T, 6);
}

inline double NFunction::conj_density(double t) const {
  if (!(t >= 0.0)) throw std::domain_error("conjugate density: negative argument");
  if (t == 0.0) return 0.0;
  if (auto* p = std::get_if<family::Power>(&family_)) return std::pow(t / p->q, 1.0 / (p->q - 1.0));
  return invert_increasing([this](double s) { return m_pos(s); }, t, 1.0);
}

inline std::string NFunction::name() const {
  std::ostringstream os;
  std::visit(
      [&os](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, family::Power>) os << "Power(" << f.q << ")";
        else if constexpr (std::is_same_v<T, family::PowerSum>) os << "PowerSum(" << f.p << "," << f.q << ")";
        else if constexpr (std::is_same_v<T, family::LogWeighted>) os << "LogWeighted(" << f.q << ")";
        else if constexpr (std::is_same_v<T, family::Tabulated>) os << "Tabulated(" << f.t.size() << " knots)";
        else if constexpr (std::is_same_v<T, family::Scaled>) os << f.c << "*" << f.base->name();
        else os << f.outer->name() << "o" << f.inner->name();
      },
      family_);
  return os.str();
}

inline NFunction NFunction::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open density table " + path);
  std::vector<double> t, m;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    for (char& c : line) if (c == ',' || c == ';' || c == '\t') c = ' ';
    std::istringstream ls(line);
    double a, b;
    if (!(ls >> a >> b)) {
      if (t.empty()) continue;  // header
      throw std::runtime_error("malformed row in " + path + ": " + line);
    }
    t.push_back(a);
    m.push_back(b);
  }
  return tabulated(std::move(t), std::move(m));
}

/// Sampled structural check: m strictly increasing on a 256-point log grid
/// and M midpoint convex. Throws std::invalid_argument on failure.
inline void validate(const NFunction& f) {
  const auto g = log_grid(f.t_min(), f.t_max(), 256);
  for (std::size_t i = 1; i < g.size(); ++i) {
    if (!(f.m(g[i]) > f.m(g[i - 1]))) throw std::invalid_argument(f.name() + ": density not strictly increasing");
    const double a = g[i - 1], b = g[i];
    const double mid = f.M(0.5 * (a + b));
    if (mid > 0.5 * (f.M(a) + f.M(b)) * (1.0 + 1e-12)) throw std::invalid_argument(f.name() + ": M not convex");
  }
}

}  // namespace folab
