#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qdl/common.hpp"

namespace qdl {

// Degree reported for the zero polynomial.
inline constexpr int kZeroDegree = -1;

// Dense complex polynomial, coefficients in ascending degree. The highest
// stored coefficient is nonzero unless the polynomial is zero (empty storage).
class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(std::initializer_list<cplx> coeffs) : c_(coeffs) { trim_exact(); }
  explicit Polynomial(std::vector<cplx> coeffs) : c_(std::move(coeffs)) { trim_exact(); }

  static Polynomial constant(cplx a) { return Polynomial(std::vector<cplx>{a}); }

  static Polynomial from_roots(std::span<const cplx> roots, cplx leading = 1.0) {
    std::vector<cplx> c{leading};
    for (cplx r : roots) {
      c.push_back(0.0);
      for (std::size_t i = c.size() - 1; i > 0; --i) c[i] = c[i - 1] - r * c[i];
      c[0] = -r * c[0];
    }
    return Polynomial(std::move(c));
  }

  int degree() const { return c_.empty() ? kZeroDegree : static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<cplx>& coeffs() const { return c_; }
  cplx operator[](std::size_t i) const { return i < c_.size() ? c_[i] : cplx{}; }
  cplx leading() const { return c_.empty() ? cplx{} : c_.back(); }

  // Horner evaluation.
  cplx operator()(cplx z) const {
    cplx acc{};
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + *it;
    return acc;
  }

  // Value of p and p' together.
  std::pair<cplx, cplx> eval_with_derivative(cplx z) const {
    cplx v{}, d{};
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
      d = d * z + v;
      v = v * z + *it;
    }
    return {v, d};
  }

  // Sum of |a_i| |z|^i: the scale of rounding errors in Horner's rule.
  double abs_eval(double r) const {
    double acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * r + std::abs(*it);
    return acc;
  }

  Polynomial derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<cplx> d(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<double>(i);
    return Polynomial(std::move(d));
  }

  // z^n p(1/z) for n >= degree.
  Polynomial reversed(int n) const {
    std::vector<cplx> r(static_cast<std::size_t>(n) + 1);
    for (std::size_t i = 0; i < c_.size(); ++i) r[static_cast<std::size_t>(n) - i] = c_[i];
    return Polynomial(std::move(r));
  }

  // p(z) * z^k
  Polynomial shifted(int k) const {
    if (is_zero() || k == 0) return *this;
    std::vector<cplx> r(static_cast<std::size_t>(k), cplx{});
    r.insert(r.end(), c_.begin(), c_.end());
    return Polynomial(std::move(r));
  }

  double max_abs_coeff() const {
    double m = 0.0;
    for (cplx a : c_) m = std::max(m, std::abs(a));
    return m;
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<cplx> r(std::max(a.c_.size(), b.c_.size()));
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = a[i] + b[i];
    return Polynomial(std::move(r));
  }
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) {
    std::vector<cplx> r(std::max(a.c_.size(), b.c_.size()));
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = a[i] - b[i];
    return Polynomial(std::move(r));
  }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<cplx> r(a.c_.size() + b.c_.size() - 1);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
    return Polynomial(std::move(r));
  }
  friend Polynomial operator*(cplx s, const Polynomial& a) {
    std::vector<cplx> r(a.c_);
    for (cplx& x : r) x *= s;
    return Polynomial(std::move(r));
  }
  friend Polynomial operator/(const Polynomial& a, cplx s) { return (1.0 / s) * a; }
  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  void trim_exact() {
    while (!c_.empty() && c_.back() == cplx{}) c_.pop_back();
  }

  std::vector<cplx> c_;
};

inline cplx eval(const Polynomial& p, cplx z) { return p(z); }
inline Polynomial derivative(const Polynomial& p) { return p.derivative(); }

// N = p'q - pq'. Coefficients are formed pairwise as (i - j)(p_i q_j - p_j q_i)
// so that swapping p and q negates every coefficient bit for bit; leading
// coefficients that cancel to rounding level are dropped.
inline Polynomial wronskian_numerator(const Polynomial& p, const Polynomial& q) {
  const int dp = p.degree(), dq = q.degree();
  if (dp < 0 && dq < 0) throw PreconditionError("wronskian_numerator: both polynomials are zero");
  const int top = std::max(dp, dq);
  if (top <= 0) return {};
  std::vector<cplx> n(static_cast<std::size_t>(2 * top));
  std::vector<double> mag(n.size(), 0.0);
  for (int i = 0; i <= top; ++i) {
    for (int j = i + 1; j <= top; ++j) {
      const cplx t = static_cast<double>(i - j) *
                     (p[static_cast<std::size_t>(i)] * q[static_cast<std::size_t>(j)] -
                      p[static_cast<std::size_t>(j)] * q[static_cast<std::size_t>(i)]);
      const double m = std::abs(static_cast<double>(i - j)) *
                       (std::abs(p[static_cast<std::size_t>(i)] * q[static_cast<std::size_t>(j)]) +
                        std::abs(p[static_cast<std::size_t>(j)] * q[static_cast<std::size_t>(i)]));
      const std::size_t k = static_cast<std::size_t>(i + j - 1);
      n[k] += t;
      mag[k] += m;
    }
  }
  const double eps = std::numeric_limits<double>::epsilon();
  while (!n.empty() && std::abs(n.back()) <= 64.0 * eps * mag[n.size() - 1]) {
    n.pop_back();
  }
  return Polynomial(std::move(n));
}

struct Root {
  cplx location;
  int multiplicity = 1;
};

struct RootSet {
  std::vector<Root> roots;
  double cluster_tolerance = 0.0;

  int total_multiplicity() const {
    int s = 0;
    for (const Root& r : roots) s += r.multiplicity;
    return s;
  }
  // Root locations repeated according to multiplicity.
  std::vector<cplx> expanded() const {
    std::vector<cplx> out;
    for (const Root& r : roots)
      for (int k = 0; k < r.multiplicity; ++k) out.push_back(r.location);
    return out;
  }
};

class RootFindingError : public NumericError {
 public:
  RootFindingError(const std::string& what, std::vector<cplx> best)
      : NumericError(what), best_iterate(std::move(best)) {}
  std::vector<cplx> best_iterate;
};

struct RootOptions {
  double residual = 1e-12;  // relative residual accepted as converged
  double cluster = 1e-6;    // cluster tolerance, relative to root scale
  int max_iterations = 1000;
};

namespace detail {

// Aberth-Ehrlich simultaneous iteration on a polynomial with nonzero constant term.
inline std::vector<cplx> aberth(const Polynomial& p, const RootOptions& opt) {
  const int n = p.degree();
  const double eps = std::numeric_limits<double>::epsilon();
  if (n == 1) return {-p[0] / p[1]};

  // Initial circle: radius from the geometric mean of the root moduli, centred on
  // the root centroid.
  const cplx centre = -p[static_cast<std::size_t>(n - 1)] / (static_cast<double>(n) * p.leading());
  const Polynomial shifted = [&] {
    // Taylor shift about the centroid keeps the circle well placed.
    std::vector<cplx> c(p.coeffs());
    for (int k = 0; k < n; ++k)
      for (int j = n - 1; j >= k; --j) c[static_cast<std::size_t>(j)] += centre * c[static_cast<std::size_t>(j + 1)];
    return Polynomial(std::move(c));
  }();
  double radius = std::pow(std::abs(shifted[0] / shifted.leading()), 1.0 / n);
  if (!(radius > 0.0) || !std::isfinite(radius)) radius = 1.0;

  std::vector<cplx> z(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k)
    z[static_cast<std::size_t>(k)] = centre + std::polar(radius, kTwoPi * k / n + 0.4);

  const Polynomial dp = p.derivative();
  std::vector<bool> done(z.size(), false);
  for (int it = 0; it < opt.max_iterations; ++it) {
    bool all = true;
    for (std::size_t k = 0; k < z.size(); ++k) {
      if (done[k]) continue;
      const cplx v = p(z[k]);
      const double bound = eps * p.abs_eval(std::abs(z[k]));
      if (std::abs(v) <= std::max(bound, 0.0)) {
        done[k] = true;
        continue;
      }
      const cplx d = dp(z[k]);
      cplx sum{};
      for (std::size_t j = 0; j < z.size(); ++j)
        if (j != k) sum += 1.0 / (z[k] - z[j]);
      const cplx ratio = v / d;
      cplx step = ratio / (1.0 - ratio * sum);
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) step = ratio;
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) step = cplx(radius * 1e-3, 0.0);
      z[k] -= step;
      if (std::abs(step) <= 4.0 * eps * std::abs(z[k])) done[k] = true;
      else all = false;
    }
    if (all) return z;
  }
  // Accept if every residual is within the relative tolerance.
  for (cplx r : z)
    if (std::abs(p(r)) > opt.residual * p.abs_eval(std::abs(r)))
      throw RootFindingError("roots: Aberth iteration did not converge", z);
  return z;
}

}  // namespace detail

// All complex roots of poly, with near-coincident roots merged into one root
// carrying the cluster size as multiplicity.
inline RootSet roots(const Polynomial& poly, const RootOptions& opt = {}) {
  if (poly.degree() < 1) throw PreconditionError("roots: degree must be at least 1");

  std::size_t zeros = 0;
  while (poly[zeros] == cplx{}) ++zeros;
  std::vector<cplx> raw(zeros, cplx{});
  if (static_cast<int>(zeros) < poly.degree()) {
    const std::vector<cplx>& c = poly.coeffs();
    Polynomial rest(std::vector<cplx>(c.begin() + static_cast<std::ptrdiff_t>(zeros), c.end()));
    std::vector<cplx> r = detail::aberth(rest, opt);
    raw.insert(raw.end(), r.begin(), r.end());
  }

  double scale = 1.0;
  for (cplx r : raw) scale = std::max(scale, std::abs(r));
  const double tol = opt.cluster * scale;

  // Single-linkage clustering; a cluster is represented by its mean, which is far
  // better conditioned than any individual member of a perturbed multiple root.
  std::vector<int> label(raw.size(), -1);
  int next = 0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (label[i] >= 0) continue;
    label[i] = next;
    std::vector<std::size_t> stack{i};
    while (!stack.empty()) {
      const std::size_t a = stack.back();
      stack.pop_back();
      for (std::size_t b = 0; b < raw.size(); ++b)
        if (label[b] < 0 && std::abs(raw[a] - raw[b]) <= tol) {
          label[b] = next;
          stack.push_back(b);
        }
    }
    ++next;
  }
  RootSet out;
  out.cluster_tolerance = tol;
  out.roots.resize(static_cast<std::size_t>(next));
  for (auto& r : out.roots) r.multiplicity = 0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    Root& r = out.roots[static_cast<std::size_t>(label[i])];
    r.location += raw[i];
    r.multiplicity += 1;
  }
  for (Root& r : out.roots) r.location /= static_cast<double>(r.multiplicity);
  // An exact zero root stays exactly zero.
  if (zeros > 0)
    for (Root& r : out.roots)
      if (std::abs(r.location) <= tol && r.multiplicity == static_cast<int>(zeros)) r.location = 0.0;
  std::sort(out.roots.begin(), out.roots.end(), [](const Root& a, const Root& b) {
    if (a.location.real() != b.location.real()) return a.location.real() < b.location.real();
    return a.location.imag() < b.location.imag();
  });
  return out;
}

// True iff no root of p lies within tol of a root of q.
inline bool coprime(const Polynomial& p, const Polynomial& q, double tol) {
  if (p.is_zero() || q.is_zero()) throw PreconditionError("coprime: polynomials must be nonzero");
  if (p.degree() < 1 || q.degree() < 1) return true;
  const RootSet rp = roots(p), rq = roots(q);
  for (const Root& a : rp.roots)
    for (const Root& b : rq.roots)
      if (std::abs(a.location - b.location) <= tol) return false;
  return true;
}

}  // namespace qdl
