#pragma once

#include <complex>
#include <random>
#include <vector>

#include "qdl/polynomial.hpp"
#include "qdl/qdmodel.hpp"

namespace qdl::testing {

inline Polynomial quartic() { return Polynomial{4.0, 0.0, -5.0, 0.0, 1.0}; }     // (z^2-1)(z^2-4)
inline Polynomial z2_minus_1() { return Polynomial{-1.0, 0.0, 1.0}; }
inline Polynomial z3_minus_3z() { return Polynomial{0.0, -3.0, 0.0, 1.0}; }
inline Polynomial z2_plus(double a) { return Polynomial{a, 0.0, 1.0}; }

inline RationalMap fig1_connected() { return RationalMap(z2_minus_1(), z2_plus(1.0)); }
inline RationalMap fig1_disconnected() { return RationalMap(z2_plus(-4.0), z2_plus(1.0)); }

inline std::vector<cplx> random_points(std::mt19937_64& rng, int n, double radius) {
  std::uniform_real_distribution<double> u(-radius, radius);
  std::vector<cplx> z;
  while (static_cast<int>(z.size()) < n) {
    const cplx c(u(rng), u(rng));
    if (std::abs(c) <= radius) z.push_back(c);
  }
  return z;
}

inline Polynomial random_box_polynomial(std::mt19937_64& rng, int degree) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<cplx> c(static_cast<std::size_t>(degree) + 1);
  for (cplx& a : c) a = cplx(u(rng), u(rng));
  c.back() = 1.0;
  return Polynomial(c);
}

// Roots at least min_gap apart, so that the model sees simple zeros.
inline Polynomial random_rooted_polynomial(std::mt19937_64& rng, int degree, double radius,
                                           double min_gap = 0.15) {
  std::vector<cplx> r;
  while (static_cast<int>(r.size()) < degree) {
    const cplx c = random_points(rng, 1, radius).front();
    bool ok = true;
    for (cplx s : r) ok = ok && std::abs(s - c) >= min_gap;
    if (ok) r.push_back(c);
  }
  return Polynomial::from_roots(r);
}

}  // namespace qdl::testing
