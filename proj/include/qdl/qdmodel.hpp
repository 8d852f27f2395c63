#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qdl/common.hpp"
#include "qdl/polynomial.hpp"

namespace qdl {

// r = p / q with p, q coprime and n = max(deg p, deg q) >= 1.
class RationalMap {
 public:
  explicit RationalMap(Polynomial p, Polynomial q = Polynomial::constant(1.0),
                       double cluster_rel = 1e-6)
      : p_(std::move(p)), q_(std::move(q)) {
    if (p_.is_zero()) throw PreconditionError("rational map: numerator is the zero polynomial");
    if (q_.is_zero()) throw PreconditionError("rational map: denominator is the zero polynomial");
    if (degree() < 1) throw PreconditionError("rational map: degree n = max(deg p, deg q) must be >= 1");
    double scale = 1.0;
    if (p_.degree() >= 1)
      for (const Root& a : roots(p_).roots) scale = std::max(scale, std::abs(a.location));
    if (q_.degree() >= 1)
      for (const Root& a : roots(q_).roots) scale = std::max(scale, std::abs(a.location));
    if (!coprime(p_, q_, cluster_rel * scale))
      throw PreconditionError("rational map: p and q share a root");
  }

  const Polynomial& p() const { return p_; }
  const Polynomial& q() const { return q_; }
  int degree() const { return std::max(p_.degree(), q_.degree()); }
  bool is_polynomial() const { return q_.degree() == 0; }

  cplx operator()(cplx z) const { return p_(z) / q_(z); }

  // lim r(z) as z -> oo when it is finite and nonzero.
  std::optional<cplx> value_at_infinity() const {
    if (p_.degree() != q_.degree()) return std::nullopt;
    return p_.leading() / q_.leading();
  }

 private:
  Polynomial p_, q_;
};

enum class InfinityKind { DoublePole, Zero, Regular };

inline const char* to_string(InfinityKind k) {
  switch (k) {
    case InfinityKind::DoublePole: return "double_pole";
    case InfinityKind::Zero: return "zero";
    case InfinityKind::Regular: return "regular";
  }
  return "?";
}

struct InfinityPoint {
  InfinityKind kind = InfinityKind::Regular;
  int order = 0;         // order of the differential at oo: -2, 0, or the zero multiplicity
  double residue = 0.0;  // -(deg p - deg q)^2 for a double pole
};

// A zero of the differential. multiplicity is the order of the zero of the
// differential, twice the root multiplicity of N = p'q - pq'.
struct CriticalPoint {
  cplx location;             // meaningless when at_infinity
  bool at_infinity = false;
  int numerator_order = 1;   // k: root multiplicity of N (or of N in the 1/z chart)
  int multiplicity = 2;      // m = 2k
  cplx value;                // critical value r(z_k), or lim r at oo
};

// A finite double pole of the differential: a root a of pq.
struct DoublePole {
  cplx location;
  int signed_multiplicity = 1;  // m_a: positive for zeros of p, negative for zeros of q
  double residue = -1.0;        // -m_a^2
};

struct QuadraticDifferential {
  RationalMap source;
  Polynomial numerator;  // N = p'q - pq'
  Polynomial pq;
  std::vector<CriticalPoint> zeros;  // finite zeros first, then oo when it is a zero
  std::vector<DoublePole> poles;     // finite double poles
  InfinityPoint infinity;
  double root_scale = 1.0;           // max(1, |finite zeros and poles|)

  std::size_t finite_zero_count() const {
    return zeros.size() - ((!zeros.empty() && zeros.back().at_infinity) ? 1 : 0);
  }
  bool infinity_is_zero() const { return infinity.kind == InfinityKind::Zero; }
  bool infinity_is_pole() const { return infinity.kind == InfinityKind::DoublePole; }
  int double_pole_count() const {
    return static_cast<int>(poles.size()) + (infinity_is_pole() ? 1 : 0);
  }

  // Sum of orders over the sphere: zero multiplicities minus 2 per double pole.
  int divisor_degree() const {
    int s = 0;
    for (const CriticalPoint& z : zeros) s += z.multiplicity;
    s -= 2 * static_cast<int>(poles.size());
    if (infinity_is_pole()) s -= 2;
    return s;
  }
};

// Builds the structural model of -(r'/r)^2 dz^2.
inline QuadraticDifferential build(const RationalMap& r, const Tolerances& tol = {}) {
  const Polynomial& p = r.p();
  const Polynomial& q = r.q();
  QuadraticDifferential qd{r, wronskian_numerator(p, q), p * q, {}, {}, {}, 1.0};
  const RootOptions ropt{tol.root_residual, tol.cluster, 1000};

  // Double poles: roots of p (m_a > 0) and of q (m_a < 0).
  if (p.degree() >= 1)
    for (const Root& a : roots(p, ropt).roots)
      qd.poles.push_back({a.location, a.multiplicity, -static_cast<double>(a.multiplicity * a.multiplicity)});
  if (q.degree() >= 1)
    for (const Root& a : roots(q, ropt).roots)
      qd.poles.push_back({a.location, -a.multiplicity, -static_cast<double>(a.multiplicity * a.multiplicity)});
  for (const DoublePole& a : qd.poles) qd.root_scale = std::max(qd.root_scale, std::abs(a.location));

  // Finite zeros: roots of N away from roots of pq. A root a of pq with |m_a| > 1
  // is a root of N of order |m_a| - 1 and is not a zero of the differential.
  if (qd.numerator.degree() >= 1) {
    const RootSet rn = roots(qd.numerator, ropt);
    double scale = qd.root_scale;
    for (const Root& z : rn.roots) scale = std::max(scale, std::abs(z.location));
    const double guard = tol.cluster * scale;
    for (const Root& z : rn.roots) {
      bool at_pole = false;
      for (const DoublePole& a : qd.poles)
        if (std::abs(z.location - a.location) <= guard) at_pole = true;
      if (at_pole) continue;
      qd.zeros.push_back({z.location, false, z.multiplicity, 2 * z.multiplicity, r(z.location)});
    }
    for (const CriticalPoint& z : qd.zeros) qd.root_scale = std::max(qd.root_scale, std::abs(z.location));
  }

  const int gap = qd.pq.degree() - qd.numerator.degree();
  if (gap == 1) {
    const double d = static_cast<double>(p.degree() - q.degree());
    qd.infinity = {InfinityKind::DoublePole, -2, -d * d};
  } else if (gap == 2) {
    qd.infinity = {InfinityKind::Regular, 0, 0.0};
  } else {
    const int m = 2 * gap - 4;
    qd.infinity = {InfinityKind::Zero, m, 0.0};
    qd.zeros.push_back({cplx{}, true, gap - 2, m, *r.value_at_infinity()});
  }
  return qd;
}

struct CriticalValue {
  int zero_index = 0;  // index into QuadraticDifferential::zeros
  cplx location;
  bool at_infinity = false;
  cplx value;
  double modulus = 0.0;
};

using CriticalValueTable = std::vector<CriticalValue>;

inline CriticalValueTable critical_values(const QuadraticDifferential& qd) {
  CriticalValueTable t;
  for (std::size_t i = 0; i < qd.zeros.size(); ++i) {
    const CriticalPoint& z = qd.zeros[i];
    t.push_back({static_cast<int>(i), z.location, z.at_infinity, z.value, std::abs(z.value)});
  }
  return t;
}

inline bool same_modulus(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

// |w_i| = |w_j|: the real part of the integral of r'/r along any arc joining the
// two critical points vanishes.
inline bool necessary_condition(const CriticalValueTable& t, std::size_t i, std::size_t j,
                                double rel = 1e-9) {
  if (i == j || i >= t.size() || j >= t.size())
    throw PreconditionError("necessary_condition: need two distinct valid indices");
  return same_modulus(t[i].modulus, t[j].modulus, rel);
}

inline bool connectivity_predicate(const CriticalValueTable& t, double rel = 1e-9) {
  if (t.empty()) throw PreconditionError("connectivity_predicate: no critical points");
  for (const CriticalValue& v : t)
    if (!same_modulus(v.modulus, t.front().modulus, rel)) return false;
  return true;
}

inline double max_modulus(const CriticalValueTable& t) {
  double m = 0.0;
  for (const CriticalValue& v : t) m = std::max(m, v.modulus);
  return m;
}

inline double min_modulus(const CriticalValueTable& t) {
  double m = std::numeric_limits<double>::infinity();
  for (const CriticalValue& v : t) m = std::min(m, v.modulus);
  return m;
}

// Pairs of finite critical points whose values both attain the maximal modulus.
inline std::vector<std::pair<int, int>> max_modulus_pairs(const CriticalValueTable& t,
                                                          double rel = 1e-9) {
  std::vector<std::pair<int, int>> out;
  std::vector<const CriticalValue*> finite;
  for (const CriticalValue& v : t)
    if (!v.at_infinity) finite.push_back(&v);
  if (finite.size() < 2) return out;
  const double top = max_modulus(t);
  for (std::size_t i = 0; i < finite.size(); ++i)
    for (std::size_t j = i + 1; j < finite.size(); ++j)
      if (same_modulus(finite[i]->modulus, top, rel) && same_modulus(finite[j]->modulus, top, rel))
        out.emplace_back(finite[i]->zero_index, finite[j]->zero_index);
  return out;
}

enum class Properness { Proper, NotSmooth, NotConnected };

inline const char* to_string(Properness p) {
  switch (p) {
    case Properness::Proper: return "proper";
    case Properness::NotSmooth: return "not_smooth";
    case Properness::NotConnected: return "not_connected";
  }
  return "?";
}

// Classifies the polynomial lemniscate |p| = level by its critical values.
inline Properness properness_test(const QuadraticDifferential& qd, double level = 1.0,
                                  double rel = 1e-9) {
  if (!qd.source.is_polynomial()) throw PreconditionError("properness_test: source must be a polynomial");
  bool all_below = true;
  for (const CriticalPoint& z : qd.zeros) {
    if (z.at_infinity) continue;
    const double w = std::abs(z.value);
    if (same_modulus(w, level, rel)) return Properness::NotSmooth;
    if (w > level) all_below = false;
  }
  return all_below ? Properness::Proper : Properness::NotConnected;
}

// Number of distinct zeros and poles of r on the sphere.
inline int zero_count_on_sphere(const QuadraticDifferential& qd) {
  int n = 0;
  for (const DoublePole& a : qd.poles)
    if (a.signed_multiplicity > 0) ++n;
  if (qd.source.q().degree() > qd.source.p().degree()) ++n;
  return n;
}

inline int pole_count_on_sphere(const QuadraticDifferential& qd) {
  int n = 0;
  for (const DoublePole& a : qd.poles)
    if (a.signed_multiplicity < 0) ++n;
  if (qd.source.p().degree() > qd.source.q().degree()) ++n;
  return n;
}

}  // namespace qdl
