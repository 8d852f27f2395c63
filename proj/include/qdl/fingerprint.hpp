#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qdl/blaschke.hpp"
#include "qdl/common.hpp"
#include "qdl/disk_map.hpp"
#include "qdl/geometry.hpp"
#include "qdl/polynomial.hpp"
#include "qdl/tracer.hpp"

namespace qdl {

// Continuous branch of p^{1/n} along a closed level loop of p.
inline std::vector<cplx> exterior_param(const Polynomial& p, const Trajectory& curve) {
  if (!curve.closed() || curve.start.kind == EndpointKind::CriticalPoint)
    throw PreconditionError("exterior_param: curve passes through a critical point");
  const int n = p.degree();
  std::vector<double> arg;
  for (cplx z : curve.points) arg.push_back(std::arg(p(z)));
  arg = unwrap(arg);
  const double total = arg.back() - arg.front();
  if (std::abs(total - kTwoPi * n) > 1e-6) {
    std::ostringstream os;
    os << "exterior_param: p winds " << total / kTwoPi << " times along the curve, expected " << n;
    throw PreconditionError(os.str());
  }
  std::vector<cplx> out;
  for (std::size_t i = 0; i < curve.points.size(); ++i)
    out.push_back(std::polar(std::pow(std::abs(p(curve.points[i])), 1.0 / n), arg[i] / n));
  return out;
}

// psi(z) = beta p(z)^c on the circle domain of a, with c = 1/n at oo and 1/alpha
// at a zero of multiplicity alpha. beta makes psi'(a) > 0, or psi(z)/z -> positive
// at oo. The branch is the principal one of the unit part, based at a.
class CircleDomainMap {
 public:
  CircleDomainMap(const Polynomial& p, std::optional<cplx> a, double cluster = 1e-6) : p_(p) {
    if (p.degree() < 1) throw PreconditionError("circle_domain_map: p must be nonconstant");
    if (!a) {
      exponent_ = 1.0 / p.degree();
      alpha_ = p.degree();
      return;
    }
    cplx c0 = *a;
    const RootSet rs = roots(p);
    for (const Root& z : rs.roots)
      if (std::abs(z.location - *a) <= cluster * std::max(1.0, std::abs(*a))) {
        alpha_ = z.multiplicity;
        c0 = z.location;
      }
    if (alpha_ == 0) throw PreconditionError("circle_domain_map: center is not a double pole of the differential");
    exponent_ = 1.0 / alpha_;
    center_ = c0;
    // h = p / (z - a)^alpha by synthetic division.
    h_ = p;
    for (int k = 0; k < alpha_; ++k) {
      const auto& c = h_.coeffs();
      std::vector<cplx> q(c.size() - 1);
      cplx carry{};
      for (std::size_t i = c.size() - 1; i >= 1; --i) {
        carry = c[i] + carry * c0;
        q[i - 1] = carry;
      }
      h_ = Polynomial(std::move(q));
    }
    h0_ = h_(c0);
  }

  bool at_infinity() const { return !center_; }
  cplx center() const { return center_.value_or(cplx{}); }
  double exponent() const { return exponent_; }
  int alpha() const { return alpha_; }

  cplx operator()(cplx z) const {
    if (!center_) {
      const int n = p_.degree();
      const cplx unit = p_(z) / (p_.leading() * std::pow(z, n));
      return z * std::pow(std::abs(p_.leading()), exponent_) * std::pow(unit, exponent_);
    }
    const cplx ratio = h_(z) / h0_;
    return (z - *center_) * std::pow(std::abs(h0_), exponent_) * std::pow(ratio, exponent_);
  }

 private:
  Polynomial p_, h_;
  std::optional<cplx> center_;
  cplx h0_;
  double exponent_ = 1.0;
  int alpha_ = 0;
};

inline CircleDomainMap circle_domain_map(const Polynomial& p, std::optional<cplx> a) { return CircleDomainMap(p, a); }

// Samples of k = phi_+^{-1} o phi_- at the curve nodes: node j sits at angle
// eta_minus[j] under phi_- and at eta_plus[j] under phi_+. Both are lifted.
struct Fingerprint {
  std::vector<double> eta_minus, eta_plus;
  int n = 0, alpha = 0, beta = 0;

  bool monotone() const {
    for (std::size_t j = 0; j + 1 < eta_minus.size(); ++j)
      if (!(eta_minus[j + 1] > eta_minus[j]) || !(eta_plus[j + 1] > eta_plus[j])) return false;
    return true;
  }
  // Lifted increase of k over one turn.
  double total_increase() const {
    if (eta_plus.empty()) return 0.0;
    const double step = eta_plus.back() - eta_plus.front();
    return step + wrap_angle(eta_plus.front() + kTwoPi - eta_plus.back());
  }
};

namespace detail {

inline void require_level_one(const Polynomial& p, const SmoothCurve& curve) {
  for (cplx z : curve.z)
    if (std::abs(std::abs(p(z)) - 1.0) > 1e-8)
      throw PreconditionError("fingerprint: curve is not on |p| = 1; normalize p by the level first");
}

inline void require_positive(const SmoothCurve& curve) {
  if (curve.area() <= 0.0) throw PreconditionError("fingerprint: curve must be positively oriented");
}

}  // namespace detail

// Interior side numeric, exterior side from the explicit branch of p^{1/n}.
inline Fingerprint fingerprint(const Polynomial& p, const SmoothCurve& curve, const DiskMap& dm) {
  detail::require_positive(curve);
  detail::require_level_one(p, curve);
  Fingerprint fp;
  fp.n = p.degree();
  std::vector<double> arg;
  for (cplx z : curve.z) arg.push_back(std::arg(p(z)));
  arg = unwrap(arg);
  const double total = arg.back() - arg.front() + wrap_angle(arg.front() - arg.back());
  if (std::abs(total - kTwoPi * fp.n) > 1e-6) {
    std::ostringstream os;
    os << "fingerprint: p winds " << total / kTwoPi << " times along the curve, expected " << fp.n;
    throw PreconditionError(os.str());
  }
  for (double& a : arg) a /= fp.n;
  fp.eta_plus = std::move(arg);
  fp.eta_minus = dm.boundary_angles();
  return fp;
}

// Both sides numeric.
inline Fingerprint fingerprint(const SmoothCurve& curve, const DiskMap& dm, const ExteriorMap& ext) {
  detail::require_positive(curve);
  Fingerprint fp;
  fp.eta_minus = dm.boundary_angles();
  fp.eta_plus = ext.boundary_angles();
  return fp;
}

struct RootCensus {
  std::vector<Root> inside, outside;
};

inline RootCensus root_census(const Polynomial& p, const SmoothCurve& curve) {
  RootCensus c;
  for (const Root& r : roots(p).roots) (winding_number(curve.z, r.location) != 0 ? c.inside : c.outside).push_back(r);
  return c;
}

struct TheoremReport {
  std::string theorem;
  double residual = 0.0;
  double theta = 0.0;  // fitted rotation
  BlaschkeProduct interior;  // factors in the disk
  BlaschkeProduct exterior;  // factors outside the disk
  std::optional<double> literal_residual;
  std::vector<std::string> notes;
  bool passed(double tol) const { return residual <= tol; }
};

namespace detail {

// Least-squares rotation: minimizes sum |lhs - e^{i theta} rhs|^2.
inline void fit_rotation(const std::vector<cplx>& lhs, const std::vector<cplx>& rhs, TheoremReport& rep) {
  cplx s{};
  for (std::size_t j = 0; j < lhs.size(); ++j) s += lhs[j] * std::conj(rhs[j]);
  rep.theta = std::arg(s);
  const cplx rot = std::polar(1.0, rep.theta);
  rep.residual = 0.0;
  for (std::size_t j = 0; j < lhs.size(); ++j) rep.residual = std::max(rep.residual, std::abs(lhs[j] - rot * rhs[j]));
}

}  // namespace detail

// k(eta)^n = B(eta) with B built from the disk preimages of the roots.
inline TheoremReport verify_eks(const Polynomial& p, const Fingerprint& fp, const DiskMap& dm) {
  const SmoothCurve& curve = dm.curve();
  const RootCensus census = root_census(p, curve);
  if (!census.outside.empty()) throw PreconditionError("verify_eks: some root of p lies outside the curve");
  TheoremReport rep;
  rep.theorem = "eks";
  rep.notes.push_back("factors are preimages of the roots under the interior map");
  for (const Root& r : census.inside) rep.interior.factors.push_back({dm.to_disk(r.location), r.multiplicity});
  std::vector<cplx> lhs, rhs;
  for (std::size_t j = 0; j < fp.eta_minus.size(); ++j) {
    lhs.push_back(std::polar(1.0, fp.n * fp.eta_plus[j]));
    rhs.push_back(blaschke_eval(rep.interior, std::polar(1.0, fp.eta_minus[j])));
  }
  detail::fit_rotation(lhs, rhs, rep);
  rep.interior.theta = rep.theta;
  return rep;
}

// k^{-1}(eta)^alpha = eta^n B1(eta), with B1 built from the exterior images of
// the roots outside the curve. The interior map must be centred at a.
inline TheoremReport verify_thm2(const Polynomial& p, cplx a, int alpha, const Fingerprint& fp, const DiskMap& dm,
                                 const ExteriorMap& ext) {
  const SmoothCurve& curve = dm.curve();
  const RootCensus census = root_census(p, curve);
  if (census.inside.size() != 1) throw PreconditionError("verify_thm2: need exactly one distinct root inside the curve");
  const Root& in = census.inside.front();
  const double scale = std::max(1.0, std::abs(a));
  if (std::abs(in.location - a) > 1e-6 * scale || in.multiplicity != alpha)
    throw PreconditionError("verify_thm2: the root inside the curve is not a with multiplicity alpha");
  if (std::abs(dm.center() - a) > 1e-9 * scale) throw PreconditionError("verify_thm2: interior map must be centred at a");
  TheoremReport rep;
  rep.theorem = "thm2";
  rep.notes.push_back("component reading: the curve is one component of the lemniscate");
  for (const Root& r : census.outside) rep.exterior.factors.push_back({ext.to_disk(r.location), r.multiplicity});
  const int n = p.degree();
  std::vector<cplx> lhs, rhs;
  for (std::size_t j = 0; j < fp.eta_minus.size(); ++j) {
    const cplx eta = std::polar(1.0, fp.eta_plus[j]);
    lhs.push_back(std::polar(1.0, alpha * fp.eta_minus[j]));
    rhs.push_back(std::pow(eta, n) * blaschke_eval(rep.exterior, eta));
  }
  detail::fit_rotation(lhs, rhs, rep);
  rep.exterior.theta = rep.theta;
  return rep;
}

// B(k^{-1}(eta)) = A(eta), A(eta) = eta^n B2(eta): B from the interior roots a
// and b, B2 from the exterior images of the remaining roots. The residual of
// the composition order B o k is reported alongside.
inline TheoremReport verify_thm3(const Polynomial& p, cplx a, cplx b, int alpha, int beta, const Fingerprint& fp,
                                 const DiskMap& dm, const ExteriorMap& ext) {
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  if (std::abs(a - b) <= 1e-6 * scale) throw PreconditionError("verify_thm3: a and b must be distinct");
  const SmoothCurve& curve = dm.curve();
  const RootCensus census = root_census(p, curve);
  if (census.inside.size() != 2) throw PreconditionError("verify_thm3: need exactly two distinct roots inside the curve");
  auto has = [&](cplx z, int mult) {
    for (const Root& r : census.inside)
      if (std::abs(r.location - z) <= 1e-6 * scale && r.multiplicity == mult) return true;
    return false;
  };
  if (!has(a, alpha) || !has(b, beta)) throw PreconditionError("verify_thm3: root census does not match a, b");
  TheoremReport rep;
  rep.theorem = "thm3";
  rep.interior.factors.push_back({dm.to_disk(a), alpha});
  rep.interior.factors.push_back({dm.to_disk(b), beta});
  for (const Root& r : census.outside) rep.exterior.factors.push_back({ext.to_disk(r.location), r.multiplicity});
  const int n = p.degree();
  auto big_a = [&](cplx eta) { return std::pow(eta, n) * blaschke_eval(rep.exterior, eta); };
  std::vector<cplx> lhs, rhs, lit_l, lit_r;
  for (std::size_t j = 0; j < fp.eta_minus.size(); ++j) {
    const cplx em = std::polar(1.0, fp.eta_minus[j]);
    const cplx ep = std::polar(1.0, fp.eta_plus[j]);
    lhs.push_back(blaschke_eval(rep.interior, em));
    rhs.push_back(big_a(ep));
    lit_l.push_back(blaschke_eval(rep.interior, ep));
    lit_r.push_back(big_a(em));
  }
  TheoremReport literal;
  detail::fit_rotation(lit_l, lit_r, literal);
  rep.literal_residual = literal.residual;
  rep.notes.push_back("checked as B(k^-1(eta)) = A(eta); literal_residual is B(k(eta)) against A(eta)");
  detail::fit_rotation(lhs, rhs, rep);
  rep.exterior.theta = rep.theta;
  return rep;
}

// Fingerprint of one smooth component of |p| = 1 and the theorem selected by
// the root census: all roots inside, one distinct root inside, or two.
struct ComponentFingerprint {
  Fingerprint fp;
  RootCensus census;
  std::optional<TheoremReport> report;  // empty when out of theorem scope
  double map_accuracy = 0.0;
};

inline ComponentFingerprint fingerprint_component(const Polynomial& p, const Trajectory& loop,
                                                  const Tolerances& tol = {}) {
  const RationalMap r(p);
  SmoothCurve curve = SmoothCurve::level_curve(r, 1.0, loop, tol.samples);
  ComponentFingerprint out;
  out.census = root_census(p, curve);
  const auto& in = out.census.inside;
  if (in.empty()) throw PreconditionError("fingerprint: curve encloses no root");
  const cplx z0 = in.front().location;
  const DiskMap dm = riemann_map_disk(curve, z0, tol);
  out.map_accuracy = dm.achieved_accuracy();
  if (out.census.outside.empty()) {
    out.fp = fingerprint(p, dm.curve(), dm);
    out.report = verify_eks(p, out.fp, dm);
    return out;
  }
  const ExteriorMap ext(dm.curve(), z0, tol);
  out.fp = fingerprint(dm.curve(), dm, ext);
  out.fp.n = p.degree();
  if (in.size() == 1) {
    out.fp.alpha = in[0].multiplicity;
    out.report = verify_thm2(p, in[0].location, in[0].multiplicity, out.fp, dm, ext);
  } else if (in.size() == 2) {
    out.fp.alpha = in[0].multiplicity;
    out.fp.beta = in[1].multiplicity;
    out.report = verify_thm3(p, in[0].location, in[1].location, in[0].multiplicity, in[1].multiplicity, out.fp, dm, ext);
  }
  return out;
}

}  // namespace qdl
