#pragma once

// Random grid functions shared by the unit tests and the acceptance run.

#include <cmath>
#include <random>

#include "folab/grid.hpp"

namespace folab::testing {

/// Smooth random function: a few random bumps and sine modes with a random
/// overall amplitude spread over `decades` orders of magnitude.
inline GridFunction random_smooth(const BoxDomain& dom, std::mt19937_64& rng, double decades = 2.0) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::normal_distribution<double> N(0.0, 1.0);
  const double amp = std::pow(10.0, decades * (U(rng) - 0.5));
  const int bumps = 1 + static_cast<int>(U(rng) * 3.0);
  struct Bump { double c0, c1, w, a; };
  std::vector<Bump> bs;
  for (int b = 0; b < bumps; ++b) {
    const double len = dom.hi(0) - dom.lo(0);
    bs.push_back({dom.lo(0) + len * (0.2 + 0.6 * U(rng)),
                  dom.d() == 2 ? dom.lo(1) + (dom.hi(1) - dom.lo(1)) * (0.2 + 0.6 * U(rng)) : 0.0,
                  len * (0.05 + 0.2 * U(rng)), N(rng)});
  }
  const double k = 1.0 + std::floor(U(rng) * 4.0), phase = U(rng) * 6.28, sa = 0.3 * N(rng);
  return GridFunction::sample(dom, [&](double x, double y) {
    double v = 0.0;
    for (const auto& b : bs) {
      const double r2 = (x - b.c0) * (x - b.c0) + (y - b.c1) * (y - b.c1);
      v += b.a * std::exp(-r2 / (2.0 * b.w * b.w));
    }
    const double t = (x - dom.lo(0)) / (dom.hi(0) - dom.lo(0));
    v += sa * std::sin(k * 3.14159265358979 * t + phase);
    return amp * v;
  });
}

/// Rough random function: independent normal samples.
inline GridFunction random_rough(const BoxDomain& dom, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> N(0.0, scale);
  GridFunction g(dom);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = N(rng);
  return g;
}

/// Hat function of half-width r centred at c (1-D) or radial hat (2-D).
inline GridFunction hat(const BoxDomain& dom, double c, double r, double height = 1.0) {
  return GridFunction::sample(dom, [&](double x, double y) {
    const double dist = dom.d() == 1 ? std::abs(x - c) : std::hypot(x - c, y - c);
    return height * std::max(0.0, 1.0 - dist / r);
  });
}

}  // namespace folab::testing
