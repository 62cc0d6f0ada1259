#include <cmath>
#include <random>

#include "catch_amalgamated.hpp"
#include "folab/sobolev.hpp"
#include "support.hpp"

using namespace folab;
using Catch::Approx;

namespace {

// naive ordered double sum of M((u(x)-u(y))/|x-y|^s) h^2/|x-y| on n midpoints of [lo, hi]
template <class U>
double brute_modular_1d(U&& u, double lo, double hi, int n, const NFunction& M, double s) {
  const double h = (hi - lo) / n;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double x = lo + (i + 0.5) * h, y = lo + (j + 0.5) * h, r = std::abs(x - y);
      total += M.M((u(x) - u(y)) / std::pow(r, s)) * h * h / r;
    }
  }
  return total;
}

}  // namespace

TEST_CASE("Gagliardo modular") {
  const auto dom = BoxDomain::interval(0.0, 1.0, 64);
  const FractionalParams fp(0.3, 1);
  const auto p2 = NFunction::power(2.0), p3 = NFunction::power(3.0);
  CHECK(gagliardo_modular(GridFunction::sample(dom, [](double) { return 2.0; }), p2, fp) == 0.0);

  const auto x64 = GridFunction::sample(dom, [](double x) { return x; });
  const auto x128 = GridFunction::sample(BoxDomain::interval(0.0, 1.0, 128), [](double x) { return x; });
  const double a = gagliardo_modular(x64, p2, fp), b = gagliardo_modular(x128, p2, fp);
  CHECK(std::abs(a - b) <= 0.05 * b);
  CHECK(gagliardo_modular(-1.0 * x64, p2, fp) == a);

  // independent dense double sum on a 4x refined grid
  const FractionalParams half(0.5, 1);
  auto hat = [](double x) { return std::max(0.0, 1.0 - std::abs(x - 0.5) / 0.3); };
  const double coarse = gagliardo_modular(GridFunction::sample(dom, hat), p3, half);
  const double fine = brute_modular_1d(hat, 0.0, 1.0, 256, p3, 0.5);
  CHECK(std::abs(coarse - fine) <= 0.05 * fine);
  CHECK(brute_modular_1d(hat, 0.0, 1.0, 64, p3, 0.5) == Approx(coarse).epsilon(1e-12));

  CHECK_THROWS_AS(gagliardo_modular(GridFunction(BoxDomain::square(0.0, 1.0, 8)), p2, fp), shape_error);
}

TEST_CASE("Gagliardo seminorm") {
  const auto dom = BoxDomain::interval(0.0, 1.0, 64);
  const FractionalParams fp(0.5, 1);
  const auto p2 = NFunction::power(2.0);
  CHECK(gagliardo_seminorm(GridFunction::sample(dom, [](double) { return -1.0; }), p2, fp) == 0.0);
  const auto hat = testing::hat(dom, 0.5, 0.25);
  const double sn = gagliardo_seminorm(hat, p2, fp);
  CHECK(gagliardo_seminorm(2.0 * hat, p2, fp) == Approx(2.0 * sn).epsilon(1e-8));
  CHECK(std::abs(gagliardo_modular(hat, p2, fp, Exterior::Box, 1.0 / sn) - 1.0) <= 1e-8);
  // for M = t^2 the seminorm is the square root of the modular
  CHECK(sn == Approx(std::sqrt(gagliardo_modular(hat, p2, fp))).epsilon(1e-10));
}

TEST_CASE("2-D Gagliardo seminorm") {
  const auto dom = BoxDomain::square(0.0, 1.0, 16);
  const FractionalParams fp(0.5, 2);
  const auto p2 = NFunction::power(2.0);
  const auto u = testing::hat(dom, 0.5, 0.3);
  const double rho = gagliardo_modular(u, p2, fp);
  // naive O(N^2) reference
  double ref = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j < u.size(); ++j) {
      if (i == j) continue;
      const auto x = dom.point(i), y = dom.point(j);
      const double r = std::hypot(x[0] - y[0], x[1] - y[1]);
      const double w = dom.cell_volume();
      ref += std::pow((u[i] - u[j]) / std::sqrt(r), 2.0) * w * w / (r * r);
    }
  CHECK(rho == Approx(ref).epsilon(1e-12));
  CHECK(gagliardo_seminorm(u, p2, fp) == Approx(std::sqrt(rho)).epsilon(1e-10));
  CHECK_THROWS_AS(gagliardo_modular(u, p2, fp, Exterior::ZeroExtension), unsupported_spec);
}

TEST_CASE("norm bundle") {
  const auto dom = BoxDomain::interval(0.0, 1.0, 64);
  const FractionalParams fp(0.5, 1);
  const auto z = norm_bundle(GridFunction(dom), NFunction::power(3.0), fp);
  CHECK(z.rho == 0.0);
  CHECK(z.snorm == 0.0);
  CHECK(z.tilde_norm == 0.0);

  std::mt19937_64 rng(21);
  const auto V = GridFunction::sample(dom, [](double x) { return 1.0 + x; });
  for (const auto& f : {NFunction::power(3.0), NFunction::power_sum(3.0, 4.0), NFunction::log_weighted(2.5)}) {
    for (int i = 0; i < 20; ++i) {
      const auto u = testing::random_smooth(dom, rng, 3.0);
      const auto b = norm_bundle(u, f, fp, &V);
      CHECK(b.snorm == b.lux + b.semi);
      CHECK(b.rho_tilde == b.rho + b.rho_bar);
      CHECK(0.5 * b.snorm <= b.tilde_norm * (1.0 + 1e-8));
      CHECK(b.tilde_norm <= 2.0 * b.snorm * (1.0 + 1e-8));
      const double at_norm = modular(u, f, 1.0 / b.tilde_norm) + gagliardo_modular(u, f, fp, Exterior::Box, 1.0 / b.tilde_norm);
      CHECK(at_norm <= 1.0 + 1e-8);
      REQUIRE(b.e_norm);
      CHECK(*b.e_norm == b.semi + *b.weighted);
    }
  }
}

TEST_CASE("tilde modular sandwich and triangle inequality") {
  const auto dom = BoxDomain::interval(0.0, 1.0, 32);
  const FractionalParams fp(0.4, 1);
  std::mt19937_64 rng(23);
  for (const auto& f : {NFunction::power_sum(2.5, 3.5), NFunction::log_weighted(3.0)}) {
    const auto idx = estimate_indices(f, 2);
    const auto u = testing::random_smooth(dom, rng);
    const double base = norm_bundle(u, f, fp).tilde_norm;
    for (double target : {0.1, 0.5, 0.9, 1.1, 2.0, 5.0}) {
      const auto v = (target / base) * u;
      const double n = norm_bundle(v, f, fp).tilde_norm;
      CHECK(n == Approx(target).epsilon(1e-8));
      const double rt = modular(v, f) + gagliardo_modular(v, f, fp);
      const double lo = n > 1.0 ? std::pow(n, idx.m0) : std::pow(n, idx.m_sup);
      const double hi = n > 1.0 ? std::pow(n, idx.m_sup) : std::pow(n, idx.m0);
      CHECK(lo <= rt * (1.0 + 1e-8));
      CHECK(rt <= hi * (1.0 + 1e-8));
    }
    for (int i = 0; i < 10; ++i) {
      const auto a = testing::random_smooth(dom, rng), b = testing::random_rough(dom, rng);
      CHECK(norm_bundle(a + b, f, fp).tilde_norm <= norm_bundle(a, f, fp).tilde_norm + norm_bundle(b, f, fp).tilde_norm + 1e-8);
    }
  }
}

TEST_CASE("seminorm vanishes only on constants") {
  const auto dom = BoxDomain::interval(0.0, 1.0, 16);
  const FractionalParams fp(0.5, 1);
  auto u = GridFunction::sample(dom, [](double) { return 0.7; });
  CHECK(gagliardo_seminorm(u, NFunction::power(2.0), fp) == 0.0);
  u[5] += 1e-9;
  CHECK(gagliardo_seminorm(u, NFunction::power(2.0), fp) > 0.0);
}

TEST_CASE("Lipschitz composition and truncation") {
  const auto dom = BoxDomain::interval(0.0, 1.0, 64);
  const FractionalParams fp(0.5, 1);
  const auto p3 = NFunction::power(3.0);
  std::mt19937_64 rng(29);
  const auto u = testing::random_smooth(dom, rng);
  const auto id = compose_lipschitz(u, [](double t) { return t; }, 1.0, p3, fp);
  const auto b = norm_bundle(u, p3, fp);
  CHECK(id.bundle.snorm == b.snorm);
  CHECK(id.bundle.tilde_norm == b.tilde_norm);
  CHECK(id.pass);

  for (int i = 0; i < 20; ++i) {
    const auto v = testing::random_smooth(dom, rng);
    const auto bv = norm_bundle(v, p3, fp);
    for (double frac : {0.25, 0.5, 1.0}) {
      const auto r = compose_lipschitz(v, truncation(frac * v.max_abs()), 1.0, p3, fp);
      CHECK(r.pass);
      CHECK(r.bundle.semi <= bv.semi * (1.0 + 1e-10));
      CHECK(r.bundle.lux <= bv.lux * (1.0 + 1e-10));
      CHECK(r.bundle.snorm <= bv.snorm * (1.0 + 1e-10));
    }
    CHECK(compose_lipschitz(v, [](double t) { return std::sin(t); }, 1.0, p3, fp).pass);
    CHECK(compose_lipschitz(v, [](double t) { return 3.0 * std::atan(t); }, 3.0, p3, fp).pass);
  }
  CHECK_THROWS_AS(compose_lipschitz(u, [](double t) { return 1.0 + t; }, 1.0, p3, fp), precondition_error);
  CHECK_THROWS_AS(compose_lipschitz(u, [](double t) { return 2.0 * t; }, 1.0, p3, fp), precondition_error);
}

TEST_CASE("W^{s',1} comparison") {
  const auto dom = BoxDomain::interval(0.0, 1.0, 64);
  const FractionalParams fp(0.6, 1, 0.3);
  const auto p2 = NFunction::power(2.0);
  const auto c = w_s1_comparison(GridFunction::sample(dom, [](double) { return 1.0; }), p2, fp);
  CHECK(c.lhs == 0.0);
  CHECK(c.pass);
  const auto hat = testing::hat(dom, 0.5, 0.3);
  const auto r = w_s1_comparison(hat, p2, fp);
  CHECK(r.pass);
  CHECK(r.lhs > 0.0);
  CHECK(r.omega == 2.0);
  const auto r10 = w_s1_comparison(10.0 * hat, p2, fp);
  CHECK(r10.lhs / r10.rhs == Approx(r.lhs / r.rhs).epsilon(1e-8));
  const auto r3 = w_s1_comparison(hat, NFunction::power(3.0).scaled(5.0), fp);
  CHECK(r3.normalization == Approx(0.2));
  CHECK(r3.pass);
}

TEST_CASE("embedding ratio") {
  const FractionalParams fp(0.3, 1);
  const auto p2 = NFunction::power(2.0);
  const SobolevConjugate star(p2, 1, 0.3);
  std::mt19937_64 rng(31);
  const auto dom = BoxDomain::interval(0.0, 1.0, 64);
  const auto u = testing::random_smooth(dom, rng);
  const auto e1 = embedding_ratio(u, p2, fp, star), e3 = embedding_ratio(3.0 * u, p2, fp, star);
  CHECK(e1.ratio == Approx(e3.ratio).epsilon(1e-8));
  CHECK(std::abs(e1.normalization - 1.0) <= 1e-8);
  CHECK_THROWS_AS(embedding_ratio(GridFunction(dom), p2, fp, star), std::domain_error);

  double c64 = 0.0, c128 = 0.0;
  std::mt19937_64 r1(37), r2(37);
  for (int i = 0; i < 30; ++i) {
    c64 = std::max(c64, embedding_ratio(testing::random_smooth(dom, r1), p2, fp, star).ratio);
    c128 = std::max(c128, embedding_ratio(testing::random_smooth(BoxDomain::interval(0.0, 1.0, 128), r2), p2, fp, star).ratio);
  }
  CHECK(std::isfinite(c64));
  CHECK(c128 < 2.0 * c64);
  CHECK(c64 < 2.0 * c128);
}

TEST_CASE("zero extension matches a larger box") {
  const FractionalParams fp(0.5, 1);
  const auto p3 = NFunction::power(3.0);
  auto bump = [](double x) { return std::abs(x) < 0.5 ? std::pow(std::cos(3.14159265358979 * x), 2.0) : 0.0; };
  const auto small = GridFunction::sample(BoxDomain::interval(-1.0, 1.0, 32), bump);
  const auto large = GridFunction::sample(BoxDomain::interval(-4.0, 4.0, 128), bump);
  const double a = gagliardo_modular(small, p3, fp, Exterior::ZeroExtension);
  const double b = gagliardo_modular(large, p3, fp, Exterior::ZeroExtension);
  CHECK(a == Approx(b).epsilon(1e-9));
  // the box-only value misses the exterior interaction
  CHECK(gagliardo_modular(small, p3, fp) < a);
}

TEST_CASE("whole-space embedding probe") {
  const FractionalParams fp(0.3, 1);
  const auto p2 = NFunction::power(2.0);
  std::vector<std::function<double(double)>> probes = {
      [](double x) { return std::abs(x) < 0.5 ? std::pow(std::cos(3.14159265358979 * x), 2.0) : 0.0; },
      [](double x) { return std::abs(x) < 0.5 ? std::sin(6.28318530717959 * x) * std::cos(3.14159265358979 * x) : 0.0; },
      [](double x) { return std::max(0.0, 0.5 - std::abs(x)); }};
  const auto rep = wholespace_embedding_probe(p2, fp, {1.0, 2.0, 4.0}, 1.0 / 32.0, probes);
  REQUIRE(rep.rows.size() == 3);
  CHECK(rep.bounded);
  for (const auto& row : rep.rows) {
    CHECK(row.max_ratio == Approx(rep.rows[0].max_ratio).epsilon(0.1));
    CHECK(row.lux == Approx(rep.rows[0].lux).epsilon(0.05));
    CHECK(row.semi == Approx(rep.rows[0].semi).epsilon(0.05));
  }
  // homogeneity of the ratio for a scaled probe
  std::vector<std::function<double(double)>> scaled = {[&](double x) { return 7.0 * probes[0](x); }};
  const auto rs = wholespace_embedding_probe(p2, fp, {1.0}, 1.0 / 32.0, scaled);
  const auto r0 = wholespace_embedding_probe(p2, fp, {1.0}, 1.0 / 32.0, {probes[0]});
  CHECK(rs.rows[0].max_ratio == Approx(r0.rows[0].max_ratio).epsilon(1e-8));
}
