#include <gtest/gtest.h>

#include <random>

#include "qdl/blaschke.hpp"
#include "qdl/disk_map.hpp"
#include "qdl/fingerprint.hpp"
#include "support.hpp"

using namespace qdl;
namespace t = qdl::testing;

namespace {

// The component of |p| = 1 containing z, traced from a seed found along a ray.
Trajectory unit_level_loop(const Polynomial& p, cplx around) {
  const QuadraticDifferential qd = build(RationalMap(p));
  const Tracer tracer(qd);
  for (const Trajectory& tr : tracer.level_set(1.0, default_window(qd)))
    if (winding_number(tr.points, around) != 0) return tr;
  throw std::runtime_error("no level-one component around the given point");
}

struct Interior {
  SmoothCurve curve;
  DiskMap dm;
};

Interior interior(const Polynomial& p, cplx around, cplx z0) {
  const SmoothCurve c = SmoothCurve::level_curve(RationalMap(p), 1.0, unit_level_loop(p, around), 1024);
  DiskMap dm = riemann_map_disk(c, z0);
  return {dm.curve(), dm};
}

}  // namespace

TEST(Blaschke, Examples) {
  const BlaschkeProduct single{0.7, {{0.0, 1}}};
  const cplx z(0.3, -0.4);
  EXPECT_LT(std::abs(blaschke_eval(single, z) - std::polar(1.0, 0.7) * z), 1e-15);
  const BlaschkeProduct two{0.0, {{0.3, 1}, {cplx(0, -0.5), 1}}};
  EXPECT_LT(std::abs(blaschke_eval(two, 1.0) - cplx(0.6, 0.8)), 1e-15);
  EXPECT_THROW(blaschke_eval(BlaschkeProduct{0.0, {{0.5, 1}}}, 2.0), PreconditionError);
  EXPECT_EQ((BlaschkeProduct{0.0, {{0.1, 2}, {0.2, 3}}}.degree()), 5);
}

TEST(Blaschke, UnimodularOnTheCircle) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    BlaschkeProduct b;
    b.theta = 0.1 * trial;
    for (cplx a : t::random_points(rng, 1 + trial % 5, 0.95)) b.factors.push_back({a, 1 + trial % 2});
    for (int j = 0; j < 1024; ++j)
      EXPECT_LE(std::abs(std::abs(blaschke_eval(b, std::polar(1.0, kTwoPi * j / 1024))) - 1.0), 1e-12);
  }
}

TEST(DiskMap, UnitCircleIsIdentity) {
  const DiskMap dm = riemann_map_disk(SmoothCurve::circle(0.0, 1.0, 256), 0.0);
  for (cplx w : {cplx(0.3, 0.2), cplx(-0.5, 0.1), cplx(0.0, -0.8)}) {
    EXPECT_LT(std::abs(dm.from_disk(w) - w), 1e-10);
    EXPECT_LT(std::abs(dm.to_disk(w) - w), 1e-10);
  }
  EXPECT_NEAR(dm.derivative_at_center(), 1.0, 1e-10);
}

TEST(DiskMap, ShiftedCircleIsAffine) {
  const DiskMap dm = riemann_map_disk(SmoothCurve::circle(1.0, 2.0, 256), 1.0);
  for (cplx w : {cplx(0.3, 0.2), cplx(-0.5, 0.1), cplx(0.7, -0.6)}) EXPECT_LT(std::abs(dm.from_disk(w) - (1.0 + 2.0 * w)), 1e-9);
  EXPECT_LT(std::abs(dm.to_disk(2.0)), 0.5 + 1e-9);
  EXPECT_NEAR(dm.derivative_at_center(), 2.0, 1e-9);
}

TEST(DiskMap, LemniscateRoundTrip) {
  const Polynomial p = t::z2_plus(-0.25);
  const Interior s = interior(p, 0.5, 0.0);
  EXPECT_LE(s.dm.achieved_accuracy(), 1e-6 * s.curve.diameter());
  EXPECT_LT(std::abs(s.dm.to_disk(0.0)), 1e-12);
  for (double th = 0.0; th < kTwoPi; th += 0.37) {
    const cplx w = std::polar(0.9, th);
    EXPECT_LT(std::abs(s.dm.to_disk(s.dm.from_disk(w)) - w), 1e-6);
  }
  // Boundary samples sit on the curve and the boundary angles advance by one turn.
  const std::vector<double> eta = s.dm.boundary_angles();
  EXPECT_NEAR(eta.back() - eta.front() + wrap_angle(eta.front() - eta.back()), kTwoPi, 1e-9);
  for (std::size_t j = 0; j < s.curve.size(); j += 64)
    EXPECT_LT(std::abs(s.dm.from_disk(std::polar(1.0, eta[j])) - s.curve.z[j]), 1e-6 * s.curve.diameter());
}

TEST(DiskMap, AgreesWithExplicitCircleDomainMap) {
  const Polynomial p{0.0, -4.0, 1.0};
  const Interior s = interior(p, 0.0, 0.0);
  const CircleDomainMap psi = circle_domain_map(p, cplx(0.0));
  EXPECT_EQ(psi.alpha(), 1);
  EXPECT_DOUBLE_EQ(psi.exponent(), 1.0);
  for (cplx z : {cplx(0.1, 0.0), cplx(0.0, 0.2), cplx(-0.15, 0.05)})
    EXPECT_LT(std::abs(psi(z) - s.dm.to_disk(z)), 1e-6 * s.curve.diameter());
}

TEST(CircleDomainMap, Examples) {
  const CircleDomainMap at_inf = circle_domain_map(Polynomial{0.0, 0.0, 1.0}, std::nullopt);
  EXPECT_TRUE(at_inf.at_infinity());
  EXPECT_DOUBLE_EQ(at_inf.exponent(), 0.5);
  EXPECT_LT(std::abs(at_inf(cplx(1.5, 0.5)) - cplx(1.5, 0.5)), 1e-14);
  const CircleDomainMap quartic = circle_domain_map(t::quartic(), cplx(1.0));
  EXPECT_EQ(quartic.alpha(), 1);
  // |psi| is constant on the level curve through 1.1 inside the circle face of 1.
  const double level = std::abs(t::quartic()(1.1));
  const Trajectory loop = trace_level(RationalMap(t::quartic()), level, 1.1);
  for (std::size_t i = 0; i < loop.points.size(); i += 7)
    EXPECT_NEAR(std::abs(quartic(loop.points[i])), std::abs(quartic(1.1)), 1e-9);
  EXPECT_THROW(circle_domain_map(t::quartic(), cplx(0.5)), PreconditionError);
}

TEST(ExteriorParam, Examples) {
  const Trajectory circle = trace_level(RationalMap(Polynomial{0.0, 0.0, 0.0, 1.0}), 1.0, 1.0);
  const std::vector<cplx> e = exterior_param(Polynomial{0.0, 0.0, 0.0, 1.0}, circle);
  for (std::size_t i = 0; i < e.size(); ++i) {
    EXPECT_NEAR(std::abs(e[i]), 1.0, 1e-9);
    EXPECT_NEAR(wrap_angle(std::arg(e[i]) - std::arg(circle.points[i]) - std::arg(e[0] / circle.points[0])), 0.0, 1e-9);
  }
  const Polynomial p = t::z2_plus(-0.25);
  const std::vector<cplx> f = exterior_param(p, unit_level_loop(p, 0.5));
  EXPECT_EQ(winding_number(f, 0.0), 1);
  for (cplx z : f) EXPECT_NEAR(std::abs(z), 1.0, 1e-3);
  const Tracer fig8(build(RationalMap(t::z2_minus_1())));
  EXPECT_THROW(exterior_param(t::z2_minus_1(), fig8.trace_critical({0, 0})), PreconditionError);
}

TEST(Fingerprint, PowerMapIsARotation) {
  const Polynomial p{0.0, 0.0, 0.0, 1.0};
  const Interior s = interior(p, 0.0, 0.0);
  const Fingerprint fp = fingerprint(p, s.curve, s.dm);
  EXPECT_TRUE(fp.monotone());
  EXPECT_NEAR(fp.total_increase(), kTwoPi, 1e-9);
  for (std::size_t j = 0; j < fp.eta_minus.size(); ++j)
    EXPECT_NEAR(wrap_angle(fp.eta_plus[j] - fp.eta_minus[j] - (fp.eta_plus[0] - fp.eta_minus[0])), 0.0, 1e-9);
  const TheoremReport rep = verify_eks(p, fp, s.dm);
  EXPECT_LT(rep.residual, 1e-12);
  ASSERT_EQ(rep.interior.factors.size(), 1u);
  EXPECT_EQ(rep.interior.factors[0].multiplicity, 3);
}

TEST(Fingerprint, RejectsReversedOrientationAndWrongLevel) {
  const Polynomial p = t::z2_plus(-0.25);
  const Interior s = interior(p, 0.5, 0.0);
  EXPECT_THROW(fingerprint(p, s.curve.reversed(), s.dm), PreconditionError);
  EXPECT_THROW(fingerprint(2.0 * p, s.curve, s.dm), PreconditionError);
}

TEST(Theorems, EksOnProperLemniscate) {
  const Polynomial p = t::z2_plus(-0.25);
  const Interior s = interior(p, 0.5, 0.0);
  const Fingerprint fp = fingerprint(p, s.curve, s.dm);
  EXPECT_TRUE(fp.monotone());
  EXPECT_NEAR(fp.total_increase(), kTwoPi, 1e-9);
  const TheoremReport rep = verify_eks(p, fp, s.dm);
  EXPECT_LE(rep.residual, 1e-3);
  ASSERT_EQ(rep.interior.factors.size(), 2u);
  for (const BlaschkeFactor& f : rep.interior.factors) {
    EXPECT_LT(std::abs(f.a), 1.0);
    EXPECT_LT(std::abs(f.a.imag()), 1e-9);
  }
  // The preimages are symmetric: the curve is invariant under z -> -z.
  EXPECT_NEAR(rep.interior.factors[0].a.real(), -rep.interior.factors[1].a.real(), 1e-9);
}

TEST(Theorems, EksRejectsOutsideRoot) {
  const Polynomial p{0.0, -4.0, 1.0};
  const Interior s = interior(p, 0.0, 0.0);
  Fingerprint fp;
  EXPECT_THROW(verify_eks(p, fp, s.dm), PreconditionError);
}

TEST(Theorems, Theorem2ForOneInteriorRoot) {
  const Polynomial p{0.0, -4.0, 1.0};
  for (cplx a : {cplx(0.0), cplx(4.0)}) {
    const Interior s = interior(p, a, a);
    const ExteriorMap ext(s.curve, a);
    Fingerprint fp = fingerprint(s.curve, s.dm, ext);
    EXPECT_TRUE(fp.monotone());
    const TheoremReport rep = verify_thm2(p, a, 1, fp, s.dm, ext);
    EXPECT_LE(rep.residual, 1e-3) << a;
    ASSERT_EQ(rep.exterior.factors.size(), 1u);
    EXPECT_GT(std::abs(rep.exterior.factors[0].a), 1.0);
    EXPECT_THROW(verify_thm2(p, a, 2, fp, s.dm, ext), PreconditionError);
  }
}

TEST(Theorems, Theorem2PowerMap) {
  const Polynomial p{0.0, 0.0, 1.0};
  const Interior s = interior(p, 0.0, 0.0);
  const ExteriorMap ext(s.curve, 0.0);
  const Fingerprint fp = fingerprint(s.curve, s.dm, ext);
  const TheoremReport rep = verify_thm2(p, 0.0, 2, fp, s.dm, ext);
  EXPECT_LT(rep.residual, 1e-12);
  EXPECT_TRUE(rep.exterior.factors.empty());
}

TEST(Theorems, Theorem3RingDomainLemniscate) {
  const Polynomial p = t::quartic() / cplx(3.0);
  const Interior s = interior(p, 1.5, 1.0);
  const ExteriorMap ext(s.curve, 1.0);
  const Fingerprint fp = fingerprint(s.curve, s.dm, ext);
  EXPECT_TRUE(fp.monotone());
  const TheoremReport rep = verify_thm3(p, 1.0, 2.0, 1, 1, fp, s.dm, ext);
  EXPECT_LE(rep.residual, 1e-3);
  EXPECT_EQ(rep.interior.factors.size(), 2u);
  EXPECT_EQ(rep.exterior.factors.size(), 2u);
  ASSERT_TRUE(rep.literal_residual.has_value());
  EXPECT_THROW(verify_thm3(p, 1.0, 1.0, 1, 1, fp, s.dm, ext), PreconditionError);
  EXPECT_THROW(verify_thm3(p, 1.0, -1.0, 1, 1, fp, s.dm, ext), PreconditionError);
}

TEST(Theorems, Theorem3AgreesWithEksWhenAllRootsAreInside) {
  const Polynomial p{0.0, -0.5, 1.0};
  const Interior s = interior(p, 0.25, 0.0);
  const TheoremReport eks = verify_eks(p, fingerprint(p, s.curve, s.dm), s.dm);
  const ExteriorMap ext(s.curve, 0.0);
  const TheoremReport thm3 = verify_thm3(p, 0.0, 0.5, 1, 1, fingerprint(s.curve, s.dm, ext), s.dm, ext);
  EXPECT_LE(eks.residual, 1e-3);
  EXPECT_LE(thm3.residual, 1e-3);
  EXPECT_TRUE(thm3.exterior.factors.empty());
  EXPECT_NEAR(eks.residual, thm3.residual, 1e-6);
}

TEST(Theorems, Theorem3RejectsPowerMap) {
  const Polynomial p{0.0, 0.0, 1.0};
  const Interior s = interior(p, 0.0, 0.0);
  const ExteriorMap ext(s.curve, 0.0);
  EXPECT_THROW(verify_thm3(p, 0.0, 0.0, 1, 1, fingerprint(s.curve, s.dm, ext), s.dm, ext), PreconditionError);
}

TEST(Theorems, EksResidualIsRotationInvariant) {
  const Polynomial p = t::z2_plus(-0.25);
  const Interior s = interior(p, 0.5, 0.0);
  const double base = verify_eks(p, fingerprint(p, s.curve, s.dm), s.dm).residual;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  for (int k = 0; k < 5; ++k) {
    const double alpha = u(rng);
    const DiskMap rot = s.dm.rotated(alpha);
    const Fingerprint fp = fingerprint(p, s.curve, rot);
    const TheoremReport rep = verify_eks(p, fp, rot);
    EXPECT_NEAR(rep.residual, base, 1e-9);
    EXPECT_NEAR(wrap_angle(fp.eta_minus[0] - fingerprint(p, s.curve, s.dm).eta_minus[0] + alpha), 0.0, 1e-9);
  }
}

TEST(Theorems, ComponentDispatch) {
  const Polynomial quartic = t::quartic() / cplx(3.0);
  const ComponentFingerprint ring = fingerprint_component(quartic, unit_level_loop(quartic, 1.5));
  ASSERT_TRUE(ring.report.has_value());
  EXPECT_EQ(ring.report->theorem, "thm3");
  EXPECT_TRUE(ring.report->passed(1e-3));
  const Polynomial cubic{0.0, 0.0, 0.0, 1.0};
  const ComponentFingerprint power = fingerprint_component(cubic, unit_level_loop(cubic, 0.0));
  ASSERT_TRUE(power.report.has_value());
  EXPECT_EQ(power.report->theorem, "eks");
  EXPECT_LT(power.report->residual, 1e-12);
}
