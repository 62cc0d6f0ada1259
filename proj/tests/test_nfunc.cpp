#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "catch_amalgamated.hpp"
#include "folab/nfunc.hpp"

using namespace folab;
using Catch::Approx;

namespace {

// composite trapezoid rule on [a, b] with n intervals
template <class F>
double trapezoid(F&& f, double a, double b, long n) {
  const double h = (b - a) / static_cast<double>(n);
  double s = 0.5 * (f(a) + f(b));
  for (long i = 1; i < n; ++i) s += f(a + h * static_cast<double>(i));
  return s * h;
}

// sup_s (s t - M(s)) by golden section on [0, hi]
template <class F>
double legendre_oracle(F&& M, double t, double hi) {
  return golden_max([&](double s) { return s * t - M(s); }, 0.0, hi, 1e-14).second;
}

std::vector<NFunction> families() {
  return {NFunction::power(2.0), NFunction::power(3.0), NFunction::power_sum(3.0, 4.0), NFunction::log_weighted(3.0)};
}

}  // namespace

TEST_CASE("eval M closed forms and quadrature oracle") {
  CHECK(NFunction::power(3.0).M(2.0) == 8.0);
  CHECK(NFunction::power(3.0).M(-2.0) == 8.0);
  for (const auto& f : families()) CHECK(f.M(0.0) == 0.0);
  const auto lw = NFunction::log_weighted(3.0);
  const double oracle = trapezoid([&](double t) { return lw.m(t); }, 0.0, 1.0, 1000000);
  CHECK(lw.M(1.0) == Approx(oracle).epsilon(1e-8));
  CHECK_THROWS_AS(lw.M(NAN), std::domain_error);
  CHECK_THROWS_AS(lw.M(INFINITY), std::domain_error);
}

TEST_CASE("tabulated density integrates its own interpolant") {
  const auto g = log_grid(1e-3, 1e3, 40);
  std::vector<double> m;
  for (double t : g) m.push_back(3.0 * t * t + t);
  const auto f = NFunction::tabulated(g, m);
  const double oracle = trapezoid([&](double t) { return f.m(t); }, 0.0, 2.0, 2000000);
  CHECK(f.M(2.0) == Approx(oracle).epsilon(1e-8));
  CHECK_THROWS_AS(NFunction::tabulated({1.0, 2.0}, {2.0, 1.0}), std::invalid_argument);
  CHECK_NOTHROW(validate(f));
}

TEST_CASE("tabulated density CSV round trip") {
  const auto path = std::filesystem::temp_directory_path() / "folab_density.csv";
  {
    std::ofstream out(path);
    out << "t,m\n";
    for (double t : log_grid(1e-2, 1e2, 30)) out << t << "," << 2.0 * t << "\n";
  }
  const auto f = NFunction::load_csv(path.string());
  CHECK(f.M(1.0) == Approx(1.0).epsilon(1e-5));
  std::filesystem::remove(path);
}

TEST_CASE("conjugate density") {
  CHECK(NFunction::power(2.0).conj_density(4.0) == Approx(2.0).epsilon(1e-14));
  CHECK(NFunction::power(2.0).conj_density(0.0) == 0.0);
  CHECK_THROWS_AS(NFunction::power(2.0).conj_density(-1.0), std::domain_error);

  const auto ps = NFunction::power_sum(3.0, 4.0);
  const double root = ps.conj_density(5.0);
  CHECK(std::abs(3.0 * root * root + 4.0 * root * root * root - 5.0) < 1e-10);
  // scan oracle with step 1e-6
  double s = 0.0;
  while (3.0 * s * s + 4.0 * s * s * s <= 5.0) s += 1e-6;
  CHECK(std::abs(root - s) < 1e-6);

  for (const auto& f : families())
    for (double t : {1e-3, 0.1, 1.0, 7.0, 300.0}) CHECK(f.conj_density(f.m(t)) == Approx(t).epsilon(1e-12));
}

TEST_CASE("complementary function and Legendre identity") {
  const auto p2 = NFunction::power(2.0);
  CHECK(p2.conjugate(2.0) == Approx(1.0).epsilon(1e-14));
  CHECK(p2.conjugate(0.0) == 0.0);
  const auto lw = NFunction::log_weighted(3.0);
  const double oracle = legendre_oracle([&](double s) { return lw.M(s); }, 1.0, 10.0);
  CHECK(lw.conjugate(1.0) == Approx(oracle).epsilon(1e-6));
  for (const auto& f : families()) {
    for (double t : {0.01, 0.5, 3.0, 40.0}) {
      const double hi = 4.0 * f.conj_density(t) + 1.0;
      CHECK(f.conjugate(t) == Approx(legendre_oracle([&](double s) { return f.M(s); }, t, hi)).epsilon(1e-6));
    }
  }
}

TEST_CASE("conjugate of the conjugate of a power") {
  for (double q : {1.5, 2.0, 3.0, 4.0}) {
    const auto f = NFunction::power(q);
    const auto g = log_grid(1e-2, 1e2, 100);
    for (double t : g) {
      const double hi = 4.0 * f.m(t) + 1.0;
      const double back = legendre_oracle([&](double s) { return f.conjugate(s); }, t, hi);
      CHECK(back == Approx(f.M(t)).epsilon(1e-6));
    }
  }
}

TEST_CASE("Young gap") {
  const auto p2 = NFunction::power(2.0);
  CHECK(std::abs(young_gap(p2, 1.0, 2.0)) < 1e-14);
  CHECK(young_gap(p2, 0.0, 0.0) == 0.0);
  CHECK_THROWS_AS(young_gap(p2, -1.0, 1.0), std::domain_error);
  const auto p3 = NFunction::power(3.0);
  const double direct = std::pow(1.3, 3.0) + 2.0 * std::pow(0.7 / 3.0, 1.5) - 1.3 * 0.7;
  CHECK(young_gap(p3, 1.3, 0.7) == Approx(direct).epsilon(1e-12));
  CHECK(direct > 0.0);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> logu(-3.0, 2.0);
  for (const auto& f : families()) {
    double worst = 0.0, worst_eq = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const double s = std::pow(10.0, logu(rng)), t = std::pow(10.0, logu(rng));
      worst = std::min(worst, young_gap(f, s, t));
      worst_eq = std::max(worst_eq, std::abs(young_gap(f, s, f.m(s))) / std::max(1.0, s * f.m(s)));
    }
    CHECK(worst >= -1e-10);
    CHECK(worst_eq <= 1e-8);
  }
}

TEST_CASE("growth indices") {
  for (double q : {2.0, 3.0, 4.0}) {
    const auto idx = estimate_indices(NFunction::power(q), 6);
    CHECK(std::abs(idx.m0 - q) < 1e-6);
    CHECK(std::abs(idx.m_sup - q) < 1e-6);
  }
  const auto i3 = estimate_indices(NFunction::power(3.0), 4);
  REQUIRE(i3.m0_star);
  CHECK(*i3.m0_star == Approx(12.0).epsilon(1e-6));
  CHECK(i3.m1);

  // dense-scan oracle for the index of a power sum
  const auto ps = NFunction::power_sum(3.0, 4.0);
  double lo = 10.0, hi = 0.0;
  for (double t : log_grid(1e-6, 1e6, 200001)) {
    const double r = t * ps.m(t) / ps.M(t);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  const auto ips = estimate_indices(ps, 6);
  CHECK(std::abs(ips.m0 - 3.0) < 1e-3);
  CHECK(std::abs(ips.m_sup - 4.0) < 1e-3);
  CHECK(ips.m0 <= lo + 1e-12);
  CHECK(ips.m_sup >= hi - 1e-12);

  CHECK_FALSE(estimate_indices(NFunction::power(3.0), 3).m1);
  CHECK_FALSE(estimate_indices(NFunction::power(3.0), 1).m0_star);
}

TEST_CASE("xi bounds and the pointwise sandwich") {
  auto [a, b] = xi_bounds(3.0, 4.0, 2.0);
  CHECK(a == 8.0);
  CHECK(b == 16.0);
  std::tie(a, b) = xi_bounds(3.0, 4.0, 1.0);
  CHECK(a == 1.0);
  CHECK(b == 1.0);
  std::tie(a, b) = xi_bounds(3.0, 4.0, 0.5);
  CHECK(a == 0.0625);
  CHECK(b == 0.125);
  CHECK_THROWS_AS(xi_bounds(3.0, 4.0, -1.0), std::domain_error);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> logu(-2.0, 2.0);
  for (const auto& f : families()) {
    const auto idx = estimate_indices(f, 2);
    for (int i = 0; i < 1000; ++i) {
      const double beta = std::pow(10.0, logu(rng)), t = std::pow(10.0, logu(rng));
      const auto [x0, x1] = xi_bounds(idx, beta);
      const double Mbt = f.M(beta * t);
      const double slack = 1e-10 * std::max(1.0, Mbt);
      CHECK(x0 * f.M(t) <= Mbt + slack);
      CHECK(Mbt <= x1 * f.M(t) + slack);
    }
  }
}

TEST_CASE("growth conditions") {
  const auto rep = check_growth(NFunction::power(3.0), 2.0, 4, 0.5);
  CHECK(rep.delta2.pass);
  CHECK(rep.delta2.value == Approx(8.0).epsilon(1e-12));
  CHECK(rep.m1.pass);
  CHECK(rep.m2.pass);
  CHECK(rep.m3.pass);
  CHECK_FALSE(rep.delta2.evidence.empty());

  // m(t) = e^t - 1 tabulated; M(2t)/M(t) at t = 10, 20 grows without bound
  const auto g = log_grid(1e-6, 50.0, 600);
  std::vector<double> m;
  for (double t : g) m.push_back(std::expm1(t));
  const auto ex = NFunction::tabulated(g, m);
  const double r10 = ex.M(20.0) / ex.M(10.0), r20 = ex.M(40.0) / ex.M(20.0);
  CHECK(r20 > 1e3 * r10);
  CHECK_FALSE(check_growth(ex, 2.0, 2, 0.5).delta2.pass);

  CHECK_FALSE(check_growth(NFunction::power(1.2), 1.1, 2, 0.5).m2.pass);
  CHECK_FALSE(check_growth(NFunction::power(3.0), 3.5, 4, 0.5).m1.pass);

  CHECK_THROWS_AS(check_growth(NFunction::power(3.0), 1.0, 4, 0.5), std::domain_error);
  CHECK_THROWS_AS(check_growth(NFunction::power(3.0), 2.0, 4, 1.5), std::domain_error);
}

TEST_CASE("M3 fails when the near-zero integral diverges") {
  // M^{-1}(tau) = tau^{1/q}; with q = 4, d = 2, s = 0.9 the exponent 1/q - s/d < 0
  const auto ev = probe_m3(NFunction::power(4.0), 2, 0.9);
  CHECK_FALSE(ev.near_zero_converges);
  CHECK_THROWS_AS(SobolevConjugate(NFunction::power(4.0), 2, 0.9), unsupported_spec);
}

TEST_CASE("Sobolev conjugate of t^2 in d = 2, s = 1/2") {
  const SobolevConjugate star(NFunction::power(2.0), 2, 0.5);
  CHECK(star.M(4.0) == Approx(1.0).epsilon(1e-6));
  CHECK(star.M(0.0) == 0.0);
  CHECK(star.inverse(0.0) == 0.0);
  // independent midpoint quadrature of int_0^1 tau^{1/2 - 5/4} after tau = v^8
  long n = 100000;
  double acc = 0.0;
  for (long i = 0; i < n; ++i) {
    const double v = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    const double tau = std::pow(v, 8.0);
    acc += std::pow(tau, -0.75) * 8.0 * std::pow(v, 7.0) / static_cast<double>(n);
  }
  CHECK(star.inverse(1.0) == Approx(acc).epsilon(1e-6));
  for (double t : log_grid(0.1, 10.0, 200)) CHECK(star.M(t) == Approx(std::pow(t, 4.0) / 256.0).epsilon(1e-6));

  struct View {
    const SobolevConjugate* c;
    double M(double t) const { return c->M(t); }
    double m(double t) const { return c->m(t); }
    std::pair<double, double> eval_range() const { return {0.01, 100.0}; }
  };
  const auto idx = estimate_indices(View{&star}, 2, 4096);
  CHECK(std::abs(idx.m0 - 4.0) < 1e-2);
  CHECK(std::abs(idx.m_sup - 4.0) < 1e-2);
  CHECK_THROWS_AS(star.M(1e300), std::range_error);
}

TEST_CASE("Sobolev conjugate is increasing and convex on its table") {
  for (const auto& f : {NFunction::power(2.0), NFunction::log_weighted(3.0)}) {
    const SobolevConjugate star(f, 3, 0.5);
    const auto& y = star.y_knots();
    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
      const double a = star.M(y[i - 1]), b = star.M(y[i]), c = star.M(y[i + 1]);
      CHECK(b > a);
      // convexity: slope non-decreasing across consecutive knots
      CHECK((c - b) / (y[i + 1] - y[i]) >= (b - a) / (y[i] - y[i - 1]) * (1.0 - 1e-9));
    }
  }
}

TEST_CASE("M-star index report") {
  const auto near = mstar_index_report(NFunction::power(2.0), 2, 0.999);
  CHECK(near.unstable);
  CHECK(near.fractional_upper > 1000.0);

  const auto frac = mstar_index_report(NFunction::power(2.0), 3, 0.5);
  REQUIRE(frac.supported);
  CHECK(frac.observed_inf == Approx(3.0).epsilon(1e-2));
  REQUIRE(frac.claimed_lower);
  CHECK(*frac.claimed_lower == Approx(6.0));
  CHECK_FALSE(frac.agrees_with_claim);

  const auto classical = mstar_index_report(NFunction::power(2.0), 3, 1.0);
  REQUIRE(classical.supported);
  CHECK(classical.observed_inf == Approx(6.0).epsilon(1e-2));
  CHECK(classical.agrees_with_claim);
}

TEST_CASE("K epsilon constant") {
  const SobolevConjugate star(NFunction::power(2.0), 2, 0.5);
  // closed form for M_* = t^4/256: sup of t^2/64 - t^3/256 is 1/27 at t = 8/3
  const double k1 = kepsilon_constant(star, 1.0);
  CHECK(k1 == Approx(1.0 / 27.0).epsilon(1e-4));
  const auto [lo, hi] = star.eval_range();
  for (double t : log_grid(lo, hi, 4096)) {
    const double Ms = star.M(t);
    CHECK(std::pow(Ms, 0.75) <= Ms + k1 * t + 1e-12 * std::max(1.0, Ms));
  }
  CHECK(kepsilon_constant(star, 1e6) == 0.0);
  CHECK(kepsilon_constant(star, 0.01) >= k1);
  CHECK_THROWS_AS(kepsilon_constant(star, 0.0), std::domain_error);
}

TEST_CASE("essential domination") {
  const auto p2 = NFunction::power(2.0), p3 = NFunction::power(3.0), lw = NFunction::log_weighted(3.0);
  CHECK(essentially_stronger(p2, p3, {1.0, 2.0, 10.0}).verdict);
  CHECK_FALSE(essentially_stronger(p3, p3, {1.0}).verdict);
  const auto rep = essentially_stronger(p3, lw, {1.0});
  CHECK(rep.verdict);
  // scan oracle: the ratio is 1/log(1+t)
  for (const auto& [t, r] : rep.ratios[0]) CHECK(r == Approx(1.0 / std::log1p(t)).epsilon(1e-12));
  CHECK_THROWS_AS(essentially_stronger(p2, p3, {}), std::invalid_argument);
}

TEST_CASE("composition dominance") {
  const auto a = composition_dominance(NFunction::power(1.5), NFunction::power(1.5), NFunction::power(3.0));
  CHECK(a.preconditions);
  REQUIRE(a.dominance);
  CHECK(a.dominance->verdict);

  const auto b = composition_dominance(NFunction::power(2.0), NFunction::power(2.0), NFunction::power(3.0));
  CHECK_FALSE(b.preconditions);
  CHECK_FALSE(b.dominance);

  const auto c = composition_dominance(NFunction::power(1.1), NFunction::power(1.1), NFunction::log_weighted(3.0));
  CHECK(c.preconditions);
  REQUIRE(c.dominance);
  CHECK(c.dominance->verdict);
}
