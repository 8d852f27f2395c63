#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "qdl/polynomial.hpp"
#include "support.hpp"

using namespace qdl;
using qdl::testing::quartic;

namespace {

constexpr double kSqrt5Over2 = 1.58113883008418966599944677222;

void expect_coeffs(const Polynomial& p, const std::vector<cplx>& want, double tol = 0.0) {
  ASSERT_EQ(p.coeffs().size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_LE(std::abs(p[i] - want[i]), tol) << "coefficient " << i;
}

}  // namespace

TEST(Polynomial, EvaluatesQuartic) {
  const Polynomial p = quartic();
  EXPECT_EQ(p(1.0), cplx(0.0));
  EXPECT_EQ(p(0.0), cplx(4.0));
  EXPECT_EQ(p(cplx(0.0, 1.0)), cplx(10.0));
}

TEST(Polynomial, Derivative) {
  expect_coeffs(derivative(quartic()), {0.0, -10.0, 0.0, 4.0});
  EXPECT_TRUE(derivative(Polynomial::constant(3.0)).is_zero());
  EXPECT_EQ(derivative(Polynomial::constant(3.0)).degree(), kZeroDegree);
  expect_coeffs(derivative(Polynomial{1.0, 0.0, 1.0}), {0.0, 2.0});
}

TEST(Polynomial, EvalWithDerivativeMatchesSeparateEvaluation) {
  const Polynomial p{cplx(1, 2), cplx(-3, 0.5), cplx(0, 1), 2.0};
  const cplx z(0.3, -0.7);
  const auto [v, d] = p.eval_with_derivative(z);
  EXPECT_LT(std::abs(v - p(z)), 1e-14);
  EXPECT_LT(std::abs(d - p.derivative()(z)), 1e-14);
}

TEST(Polynomial, DerivativeMatchesCentralDifference) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Polynomial p = qdl::testing::random_box_polynomial(rng, 1 + trial % 8);
    const cplx z = qdl::testing::random_points(rng, 1, 1.5).front();
    const double h = 1e-6;
    const cplx fd = (p(z + h) - p(z - h)) / (2.0 * h);
    const cplx d = derivative(p)(z);
    EXPECT_LE(std::abs(fd - d), 1e-5 * std::max(1.0, std::abs(d))) << "trial " << trial;
  }
}

TEST(Polynomial, WronskianExamples) {
  expect_coeffs(wronskian_numerator(Polynomial{-1.0, 0.0, 1.0}, Polynomial{1.0, 0.0, 1.0}), {0.0, 4.0});
  expect_coeffs(wronskian_numerator(Polynomial{-4.0, 0.0, 1.0}, Polynomial{1.0, 0.0, 1.0}), {0.0, 10.0});
  expect_coeffs(wronskian_numerator(Polynomial{-1.0, 0.0, 1.0}, Polynomial{1.0, 1.0, 1.0}), {1.0, 4.0, 1.0});
  EXPECT_EQ(wronskian_numerator(quartic(), Polynomial::constant(1.0)), derivative(quartic()));
}

TEST(Polynomial, WronskianIsAntisymmetricBitForBit) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const Polynomial p = qdl::testing::random_box_polynomial(rng, 1 + trial % 6);
    const Polynomial q = qdl::testing::random_box_polynomial(rng, trial % 5);
    const Polynomial a = wronskian_numerator(p, q);
    const Polynomial b = wronskian_numerator(q, p);
    ASSERT_EQ(a.degree(), b.degree());
    for (std::size_t i = 0; i < a.coeffs().size(); ++i) EXPECT_EQ(a[i], -b[i]);
  }
}

TEST(Polynomial, WronskianRejectsTwoZeros) {
  EXPECT_THROW(wronskian_numerator(Polynomial{}, Polynomial{}), PreconditionError);
}

TEST(Roots, ConjugatePair) {
  const RootSet rs = roots(Polynomial{1.0, 0.0, 1.0});
  ASSERT_EQ(rs.roots.size(), 2u);
  const cplx a = rs.roots[0].location, b = rs.roots[1].location;
  EXPECT_LT(std::abs(a * b - 1.0), 1e-14);
  EXPECT_LT(std::abs(a + b), 1e-14);
  EXPECT_NEAR(std::abs(a.imag()), 1.0, 1e-14);
}

TEST(Roots, CriticalPointsOfQuartic) {
  const RootSet rs = roots(derivative(quartic()));
  ASSERT_EQ(rs.roots.size(), 3u);
  EXPECT_NEAR(rs.roots[0].location.real(), -kSqrt5Over2, 1e-14);
  EXPECT_EQ(rs.roots[1].location, cplx(0.0));
  EXPECT_NEAR(rs.roots[2].location.real(), kSqrt5Over2, 1e-14);
  for (const Root& r : rs.roots) EXPECT_EQ(r.multiplicity, 1);
}

TEST(Roots, DoubleRootIsClustered) {
  const RootSet rs = roots(Polynomial{1.0, -2.0, 1.0});
  ASSERT_EQ(rs.roots.size(), 1u);
  EXPECT_EQ(rs.roots[0].multiplicity, 2);
  EXPECT_LT(std::abs(rs.roots[0].location - 1.0), 1e-7);
}

TEST(Roots, ExactZeroRoots) {
  const RootSet rs = roots(Polynomial{0.0, 0.0, 0.0, 1.0});
  ASSERT_EQ(rs.roots.size(), 1u);
  EXPECT_EQ(rs.roots[0].location, cplx(0.0));
  EXPECT_EQ(rs.roots[0].multiplicity, 3);
}

TEST(Roots, RejectsConstants) { EXPECT_THROW(roots(Polynomial::constant(2.0)), PreconditionError); }

TEST(Roots, ReconstructsMonicRandomPolynomials) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const Polynomial p = qdl::testing::random_box_polynomial(rng, 1 + trial % 8);
    const RootSet rs = roots(p);
    ASSERT_EQ(rs.total_multiplicity(), p.degree());
    const std::vector<cplx> all = rs.expanded();
    const Polynomial back = Polynomial::from_roots(all);
    const double scale = p.max_abs_coeff();
    for (int i = 0; i <= p.degree(); ++i)
      EXPECT_LE(std::abs(back[static_cast<std::size_t>(i)] - p[static_cast<std::size_t>(i)]), 1e-8 * scale)
          << "trial " << trial << " coefficient " << i;
  }
}

TEST(Roots, ResidualsAreSmall) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const Polynomial p = qdl::testing::random_box_polynomial(rng, 2 + trial % 7);
    for (const Root& r : roots(p).roots)
      EXPECT_LE(std::abs(p(r.location)), 1e-12 * p.abs_eval(std::abs(r.location)) * 10.0);
  }
}

TEST(Coprime, Examples) {
  EXPECT_TRUE(coprime(Polynomial{-1.0, 0.0, 1.0}, Polynomial{1.0, 0.0, 1.0}, 1e-6));
  EXPECT_FALSE(coprime(Polynomial{-1.0, 0.0, 1.0}, Polynomial{0.0, 1.0, 1.0}, 1e-6));
  EXPECT_TRUE(coprime(Polynomial{0.0, 1.0}, Polynomial::constant(1.0), 1e-6));
  EXPECT_THROW(coprime(Polynomial{}, Polynomial::constant(1.0), 1e-6), PreconditionError);
}

TEST(Polynomial, FromRootsAndArithmetic) {
  const std::vector<cplx> r{1.0, -1.0, 2.0, -2.0};
  EXPECT_EQ(Polynomial::from_roots(r), quartic());
  const Polynomial a{-1.0, 0.0, 1.0}, b{-4.0, 0.0, 1.0};
  EXPECT_EQ(a * b, quartic());
  EXPECT_EQ((a + b) - b, a);
  EXPECT_EQ((Polynomial{1.0, 2.0, 0.0}.degree()), 1);
  expect_coeffs(Polynomial{1.0, 2.0}.reversed(3), {0.0, 0.0, 2.0, 1.0});
}
