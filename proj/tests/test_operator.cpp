#include <cmath>
#include <random>

#include "catch_amalgamated.hpp"
#include "folab/operator.hpp"
#include "support.hpp"

using namespace folab;
using Catch::Approx;

namespace {

GridFunction gaussian(const BoxDomain& dom, double sigma, double cut) {
  return GridFunction::sample(dom, [&](double x) { return std::abs(x) <= cut ? std::exp(-x * x / (2.0 * sigma * sigma)) : 0.0; });
}

}  // namespace

TEST_CASE("constants are annihilated") {
  const auto dom = BoxDomain::interval(-1.0, 1.0, 64);
  KernelQuadrature kq(dom);
  kq.check_margin = false;
  const FractionalParams fp(0.5, 1);
  const auto c = GridFunction::sample(dom, [](double) { return 3.0; });
  const auto Lu = apply_mlap(c, NFunction::power(3.0), fp, kq);
  for (std::size_t i = 1; i + 1 < Lu.size(); ++i) CHECK(Lu[i] == 0.0);
  const auto u = gaussian(dom, 0.1, 0.5);
  CHECK(weak_pairing(u, c, NFunction::power(3.0), fp, kq) == Approx(0.0).margin(1e-12));
}

TEST_CASE("oddness and positivity") {
  const auto dom = BoxDomain::interval(-1.0, 1.0, 64);
  const KernelQuadrature kq(dom);
  const FractionalParams fp(0.5, 1);
  std::mt19937_64 rng(41);
  for (const auto& f : {NFunction::power(2.0), NFunction::power_sum(3.0, 4.0), NFunction::log_weighted(2.5)}) {
    for (int i = 0; i < 5; ++i) {
      const auto u = testing::hat(dom, 0.1 * (std::uniform_real_distribution<double>(-1, 1)(rng)), 0.1 + 0.05 * i, 1.0 + i);
      const auto a = apply_mlap(u, f, fp, kq), b = apply_mlap(-u, f, fp, kq);
      for (std::size_t k = 0; k < u.size(); ++k) CHECK(b[k] == -a[k]);
      CHECK(weak_pairing(u, u, f, fp, kq) >= 0.0);
      CHECK(weak_pairing(-u, -u, f, fp, kq) == weak_pairing(u, u, f, fp, kq));
    }
  }
}

TEST_CASE("linear density gives a symmetric bilinear form") {
  const auto dom = BoxDomain::interval(-1.0, 1.0, 128);
  const KernelQuadrature kq(dom);
  const FractionalParams fp(0.5, 1);
  const auto p2 = NFunction::power(2.0);
  const auto u = gaussian(dom, 0.1, 0.5), v = testing::hat(dom, 0.1, 0.3);
  const double uv = weak_pairing(u, v, p2, fp, kq), vu = weak_pairing(v, u, p2, fp, kq);
  CHECK(std::abs(uv - vu) <= 1e-10 * std::abs(uv));
  // twice the s-fractional quadratic form (1/2) sum (u_x-u_y)(v_x-v_y) w^2 / r^{1+2s}
  KernelQuadrature plain = kq;
  plain.diagonal_correction = false;
  double form = 0.0;
  const double h = dom.h(0);
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j < u.size(); ++j)
      if (i != j) {
        const double r = h * std::abs(static_cast<double>(i) - static_cast<double>(j));
        form += 0.5 * (u[i] - u[j]) * (v[i] - v[j]) * h * h / (r * r);
      }
  CHECK(weak_pairing(u, v, p2, fp, plain) == Approx(2.0 * form).epsilon(1e-12));
  // bilinear in v
  const auto w = testing::hat(dom, -0.2, 0.2);
  CHECK(weak_pairing(u, v + 2.0 * w, p2, fp, kq) ==
        Approx(weak_pairing(u, v, p2, fp, kq) + 2.0 * weak_pairing(u, w, p2, fp, kq)).epsilon(1e-12));
}

TEST_CASE("dropping the diagonal in both forms gives an exact discrete identity") {
  const auto dom = BoxDomain::interval(-1.0, 1.0, 64);
  KernelQuadrature kq(dom);
  kq.diagonal_correction = false;
  const FractionalParams fp(0.3, 1);
  const auto r = consistency_check(gaussian(dom, 0.1, 0.5), testing::hat(dom, 0.0, 0.4), NFunction::power_sum(3.0, 4.0), fp, kq);
  CHECK(r.rel_error < 1e-12);
}

TEST_CASE("pointwise and weak forms agree under refinement") {
  const FractionalParams fp(0.5, 1);
  for (const auto& [f, tol] : {std::pair{NFunction::power(2.0), 1e-2}, std::pair{NFunction::power_sum(3.0, 4.0), 3e-2}}) {
    double prev = HUGE_VAL;
    for (int n : {64, 128}) {
      const auto dom = BoxDomain::interval(-1.0, 1.0, n);
      const KernelQuadrature kq(dom);
      const auto r = consistency_check(gaussian(dom, 0.1, 0.5), testing::hat(dom, 0.0, 0.4), f, fp, kq);
      CHECK(r.rel_error < prev);
      prev = r.rel_error;
      if (n == 128) CHECK(r.rel_error <= tol);
    }
  }
  const auto dom = BoxDomain::interval(-1.0, 1.0, 64);
  const KernelQuadrature kq(dom);
  const auto z = consistency_check(GridFunction(dom), testing::hat(dom, 0.0, 0.4), NFunction::power(2.0), fp, kq);
  CHECK(z.weak == 0.0);
  CHECK(z.pointwise == 0.0);
  CHECK(z.rel_error == 0.0);
}

TEST_CASE("pointwise operator converges under refinement") {
  const FractionalParams fp(0.5, 1);
  std::vector<double> at0;
  for (int n : {64, 128, 256}) {
    const auto dom = BoxDomain::interval(-1.0, 1.0, n);
    KernelQuadrature kq(dom);
    kq.exterior = Exterior::ZeroExtension;
    const auto Lu = apply_mlap(gaussian(dom, 0.1, 0.5), NFunction::power(2.0), fp, kq);
    at0.push_back(0.5 * (Lu[n / 2 - 1] + Lu[n / 2]));
  }
  CHECK(std::abs(at0[2] - at0[1]) < 0.5 * std::abs(at0[1] - at0[0]));
}

TEST_CASE("translation equivariance with zero extension") {
  const auto dom = BoxDomain::interval(-2.0, 2.0, 128);
  KernelQuadrature kq(dom);
  kq.exterior = Exterior::ZeroExtension;
  const FractionalParams fp(0.5, 1);
  const auto f = NFunction::power_sum(3.0, 4.0);
  auto bump = [](double x) { return std::abs(x) < 0.6 ? std::pow(std::cos(3.14159265358979 * x / 1.2), 3.0) : 0.0; };
  const double h = dom.h(0);
  const auto u = GridFunction::sample(dom, bump);
  const auto us = GridFunction::sample(dom, [&](double x) { return bump(x - h); });
  const auto a = apply_mlap(u, f, fp, kq), b = apply_mlap(us, f, fp, kq);
  double scale = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) scale = std::max(scale, std::abs(a[i]));
  for (std::size_t i = 1; i + 1 < a.size(); ++i) CHECK(std::abs(b[i + 1] - a[i]) <= 1e-10 * scale);
}

TEST_CASE("support margin precondition") {
  const auto dom = BoxDomain::interval(-1.0, 1.0, 64);
  const KernelQuadrature kq(dom);
  const FractionalParams fp(0.5, 1);
  const auto inside = testing::hat(dom, 0.0, 0.4), outside = testing::hat(dom, 0.8, 0.3);
  CHECK_THROWS_AS(apply_mlap(outside, NFunction::power(2.0), fp, kq), precondition_error);
  CHECK_THROWS_AS(weak_pairing(inside, outside, NFunction::power(2.0), fp, kq), precondition_error);
  CHECK_THROWS_AS(consistency_check(inside, GridFunction(BoxDomain::interval(-1.0, 1.0, 32)), NFunction::power(2.0), fp, kq),
                  shape_error);
}

TEST_CASE("2-D operator") {
  const auto dom = BoxDomain::square(-1.0, 1.0, 16);
  const KernelQuadrature kq(dom);
  const FractionalParams fp(0.5, 2);
  const auto u = testing::hat(dom, 0.0, 0.28);
  const auto f = NFunction::power(3.0);
  const auto Lu = apply_mlap(u, f, fp, kq);
  CHECK(inner(Lu, u) == Approx(weak_pairing(u, u, f, fp, kq)).epsilon(1e-12));
  const auto Lneg = apply_mlap(-u, f, fp, kq);
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(Lneg[i] == -Lu[i]);
}
