#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <vector>

#include "qdl/chart.hpp"
#include "qdl/common.hpp"
#include "qdl/geometry.hpp"
#include "qdl/qdmodel.hpp"
#include "qdl/tracer.hpp"

namespace qdl {

namespace detail {

// Derivative of order k of periodic samples on t_j = 2 pi j / M.
inline std::vector<cplx> spectral_derivative(const std::vector<cplx>& v, int order = 1) {
  const std::size_t m = v.size();
  Eigen::FFT<double> fft;
  std::vector<cplx> spec;
  fft.fwd(spec, v);
  for (std::size_t k = 0; k < m; ++k) {
    if (2 * k == m) {
      spec[k] = 0.0;
      continue;
    }
    const double kappa = 2 * k < m ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(m);
    cplx factor = 1.0;
    for (int o = 0; o < order; ++o) factor *= cplx(0.0, kappa);
    spec[k] *= factor;
  }
  std::vector<cplx> out;
  fft.inv(out, spec);
  return out;
}

inline std::vector<double> spectral_derivative(const std::vector<double>& v) {
  std::vector<cplx> c(v.begin(), v.end());
  const std::vector<cplx> d = spectral_derivative(c, 1);
  std::vector<double> out(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) out[i] = d[i].real();
  return out;
}

}  // namespace detail

// Closed curve sampled at t_j = 2 pi j / M with first and second derivatives.
struct SmoothCurve {
  std::vector<cplx> z, dz, d2z;
  std::function<SmoothCurve(int)> resample;  // same curve at another resolution, if known

  std::size_t size() const { return z.size(); }

  double area() const { return signed_area(z); }

  double diameter() const {
    double lo_x = z[0].real(), hi_x = lo_x, lo_y = z[0].imag(), hi_y = lo_y;
    for (cplx p : z) {
      lo_x = std::min(lo_x, p.real());
      hi_x = std::max(hi_x, p.real());
      lo_y = std::min(lo_y, p.imag());
      hi_y = std::max(hi_y, p.imag());
    }
    return std::hypot(hi_x - lo_x, hi_y - lo_y);
  }

  // t -> -t, keeping node 0.
  SmoothCurve reversed() const {
    SmoothCurve c;
    const std::size_t m = size();
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t k = (m - j) % m;
      c.z.push_back(z[k]);
      c.dz.push_back(-dz[k]);
      c.d2z.push_back(d2z[k]);
    }
    return c;
  }

  SmoothCurve every_other() const {
    SmoothCurve c;
    for (std::size_t j = 0; j < size(); j += 2) {
      c.z.push_back(z[j]);
      c.dz.push_back(dz[j]);
      c.d2z.push_back(d2z[j]);
    }
    return c;
  }

  // Image under zeta = 1 / (z - z0).
  SmoothCurve inverted(cplx z0) const {
    SmoothCurve c;
    for (std::size_t j = 0; j < size(); ++j) {
      const cplx d = z[j] - z0;
      c.z.push_back(1.0 / d);
      c.dz.push_back(-dz[j] / (d * d));
      c.d2z.push_back(-d2z[j] / (d * d) + 2.0 * dz[j] * dz[j] / (d * d * d));
    }
    return c;
  }

  static SmoothCurve circle(cplx center, double radius, int m) {
    SmoothCurve c;
    for (int j = 0; j < m; ++j) {
      const cplx e = std::polar(1.0, kTwoPi * j / m);
      c.z.push_back(center + radius * e);
      c.dz.push_back(cplx(0.0, radius) * e);
      c.d2z.push_back(-radius * e);
    }
    c.resample = [center, radius](int k) { return circle(center, radius, k); };
    return c;
  }

  // Equispaced samples of a smooth periodic parametrization.
  static SmoothCurve from_samples(std::vector<cplx> pts) {
    if (pts.size() < 8) throw PreconditionError("SmoothCurve: need at least 8 samples");
    SmoothCurve c;
    c.dz = detail::spectral_derivative(pts, 1);
    c.d2z = detail::spectral_derivative(pts, 2);
    c.z = std::move(pts);
    return c;
  }

  // The closed level curve |r| = c through a traced loop, parametrized so that
  // arg r = theta0 + W t, with W the winding of r along the loop.
  static SmoothCurve level_curve(const RationalMap& r, double level, const Trajectory& loop, int m) {
    if (!loop.closed()) throw PreconditionError("level_curve: trajectory is not a closed loop");
    if (loop.points.size() < 4) throw PreconditionError("level_curve: trajectory has too few samples");
    const ChartMap map(r, Chart::Plane);
    std::vector<double> arg;
    for (cplx z : loop.points) arg.push_back(std::arg(r(z)));
    arg = unwrap(arg);
    const double total = arg.back() - arg.front();
    const long w = std::lround(total / kTwoPi);
    if (w < 1 || std::abs(total - kTwoPi * w) > 1e-6)
      throw PreconditionError("level_curve: loop is not traversed with increasing argument");
    SmoothCurve c;
    std::size_t seg = 0;
    for (int j = 0; j < m; ++j) {
      const double target = arg.front() + total * j / m;
      while (seg + 2 < arg.size() && arg[seg + 1] < target) ++seg;
      const double s = (target - arg[seg]) / (arg[seg + 1] - arg[seg]);
      cplx z = loop.points[seg] + std::clamp(s, 0.0, 1.0) * (loop.points[seg + 1] - loop.points[seg]);
      const cplx goal = std::polar(level, target);
      for (int it = 0; it < 60; ++it) {
        const cplx res = map.log_ratio(z, goal);
        z -= res / map.log_derivative(z);
        if (std::abs(res) < 1e-15) break;
      }
      if (std::abs(map.log_ratio(z, goal)) > 1e-12) throw NumericError("level_curve: node refinement failed");
      const auto [g, gp] = map.log_derivative2(z);
      const double wd = static_cast<double>(w);
      c.z.push_back(z);
      c.dz.push_back(cplx(0.0, wd) / g);
      c.d2z.push_back(wd * wd * gp / (g * g * g));
    }
    c.resample = [r, level, loop](int k) { return level_curve(r, level, loop, k); };
    return c;
  }
};

// Conformal map phi of the unit disk onto the interior of a smooth Jordan curve
// with phi(0) = z0 and phi'(0) > 0, together with its inverse.
//
// The inverse is f(z) = (z - z0) exp(F(z) - i Im F(z0)) where F is analytic
// inside with Re F = -log|z - z0| on the curve. F is the Cauchy integral of a
// real density mu solving a second-kind integral equation, discretized with
// the trapezoidal rule (Nystrom) in the curve parameter.
class DiskMap {
 public:
  DiskMap(const SmoothCurve& curve, cplx z0) : z0_(z0), original_(curve) {
    if (curve.size() < 8) throw PreconditionError("DiskMap: need at least 8 boundary samples");
    flipped_ = curve.area() < 0.0;
    c_ = flipped_ ? curve.reversed() : curve;
    const int w = winding_number(c_.z, z0);
    if (w != 1) throw PreconditionError("DiskMap: center is not inside the curve");
    solve(c_, mu_, eta_, imf0_, ref0_);
    deta_ = detail::spectral_derivative(periodic_part(eta_));
    for (double& d : deta_) d += 1.0;

    if (c_.size() % 2 == 0 && c_.size() >= 16) {
      const SmoothCurve half = c_.every_other();
      std::vector<double> mu_h, eta_h;
      double imf0_h = 0.0, ref0_h = 0.0;
      solve(half, mu_h, eta_h, imf0_h, ref0_h);
      for (std::size_t j = 0; j < half.size(); ++j) {
        const std::size_t k = 2 * j;
        const double de = std::abs(wrap_angle(eta_[k] - eta_h[j]));
        accuracy_ = std::max(accuracy_, de * std::abs(c_.dz[k]) / deta_[k]);
      }
    }
  }

  cplx center() const { return z0_; }
  double rotation() const { return rotation_; }
  const SmoothCurve& curve() const { return original_; }
  double achieved_accuracy() const { return accuracy_; }
  // phi'(0)
  double derivative_at_center() const { return std::exp(-ref0_); }

  // Angles of the boundary nodes on the unit circle, in the curve's node order.
  std::vector<double> boundary_angles() const {
    const std::size_t m = eta_.size();
    std::vector<double> out(m);
    for (std::size_t j = 0; j < m; ++j) out[j] = eta_[flipped_ ? (m - j) % m : j] - rotation_;
    return unwrap(out);
  }

  // phi^{-1}(z) for z inside or on the curve.
  cplx to_disk(cplx z) const {
    cplx num{}, den{};
    for (std::size_t j = 0; j < c_.size(); ++j) {
      const cplx d = c_.z[j] - z;
      if (std::abs(d) <= 1e-14 * (1.0 + std::abs(z))) return std::polar(1.0, eta_[j] - rotation_);
      const cplx wj = c_.dz[j] / d;
      num += mu_[j] * wj;
      den += wj;
    }
    const cplx f = num / den;
    return (z - z0_) * std::exp(f - cplx(0.0, imf0_)) * std::polar(1.0, -rotation_);
  }

  // phi(w) for |w| <= 1.
  cplx from_disk(cplx w) const {
    const cplx wr = w * std::polar(1.0, rotation_);
    cplx num{}, den{};
    for (std::size_t j = 0; j < c_.size(); ++j) {
      const cplx s = std::polar(1.0, eta_[j]);
      const cplx d = s - wr;
      if (std::abs(d) <= 1e-14) return c_.z[j];
      const cplx wj = cplx(0.0, deta_[j]) * s / d;
      num += c_.z[j] * wj;
      den += wj;
    }
    return num / den;
  }

  // phi composed with the rotation w -> e^{i alpha} w.
  DiskMap rotated(double alpha) const {
    DiskMap d = *this;
    d.rotation_ += alpha;
    return d;
  }

 private:
  static std::vector<double> periodic_part(const std::vector<double>& eta) {
    std::vector<double> p(eta.size());
    for (std::size_t j = 0; j < eta.size(); ++j) p[j] = eta[j] - kTwoPi * static_cast<double>(j) / eta.size();
    return p;
  }

  void solve(const SmoothCurve& c, std::vector<double>& mu, std::vector<double>& eta, double& imf0,
             double& ref0) const {
    const std::size_t m = c.size();
    const double h = kTwoPi / static_cast<double>(m);
    Eigen::MatrixXd a(m, m);
    Eigen::VectorXd rhs(m);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        const double k = i == j ? (c.d2z[i] / (2.0 * c.dz[i])).imag() : (c.dz[j] / (c.z[j] - c.z[i])).imag();
        a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = h * k / kTwoPi + (i == j ? 0.5 : 0.0);
      }
      rhs(static_cast<Eigen::Index>(i)) = -std::log(std::abs(c.z[i] - z0_));
    }
    const Eigen::VectorXd sol = a.partialPivLu().solve(rhs);
    mu.assign(sol.data(), sol.data() + m);
    const std::vector<double> dmu = detail::spectral_derivative(mu);

    cplx num{}, den{};
    for (std::size_t j = 0; j < m; ++j) {
      const cplx wj = c.dz[j] / (c.z[j] - z0_);
      num += mu[j] * wj;
      den += wj;
    }
    const cplx f0 = num / den;
    imf0 = f0.imag();
    ref0 = f0.real();

    eta.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      double s = h * dmu[i];
      for (std::size_t j = 0; j < m; ++j)
        if (j != i) s += h * (mu[j] - mu[i]) * (c.dz[j] / (c.z[j] - c.z[i])).real();
      eta[i] = std::arg(c.z[i] - z0_) - s / kTwoPi - imf0;
    }
    eta = unwrap(eta);
  }

  cplx z0_;
  SmoothCurve original_;
  SmoothCurve c_;
  bool flipped_ = false;
  std::vector<double> mu_, eta_, deta_;
  double imf0_ = 0.0, ref0_ = 0.0;
  double rotation_ = 0.0;
  double accuracy_ = 0.0;
};

// Builds the interior map, doubling the resolution while the estimated
// boundary error exceeds map_accuracy * diameter.
inline DiskMap riemann_map_disk(const SmoothCurve& curve, cplx z0, const Tolerances& tol = {}) {
  const double target = tol.map_accuracy * curve.diameter();
  DiskMap dm(curve, z0);
  std::size_t m = curve.size();
  while (dm.achieved_accuracy() > target && curve.resample && m < 4096) {
    m *= 2;
    dm = DiskMap(curve.resample(static_cast<int>(m)), z0);
  }
  if (dm.achieved_accuracy() > target) {
    std::ostringstream os;
    os << "riemann_map_disk: achieved accuracy " << dm.achieved_accuracy() << " exceeds " << target;
    throw NumericError(os.str());
  }
  return dm;
}

// Conformal map of the exterior of a smooth Jordan curve onto |w| > 1 with oo
// fixed and positive derivative there, via the disk map of the curve inverted
// about an interior point.
class ExteriorMap {
 public:
  ExteriorMap(const SmoothCurve& curve, cplx z0, const Tolerances& tol = {})
      : z0_(z0), inner_(make_inner(curve, z0, tol)) {}

  cplx center() const { return z0_; }
  const DiskMap& inverted_map() const { return inner_; }

  // phi_+^{-1}(z) for z outside or on the curve.
  cplx to_disk(cplx z) const { return 1.0 / inner_.to_disk(1.0 / (z - z0_)); }
  // phi_+(w) for |w| >= 1.
  cplx from_disk(cplx w) const { return z0_ + 1.0 / inner_.from_disk(1.0 / w); }

  std::vector<double> boundary_angles() const {
    std::vector<double> a = inner_.boundary_angles();
    for (double& x : a) x = -x;
    return a;
  }

 private:
  static DiskMap make_inner(const SmoothCurve& curve, cplx z0, const Tolerances& tol) {
    if (winding_number(curve.z, z0) == 0) throw PreconditionError("ExteriorMap: center is not inside the curve");
    SmoothCurve inv = curve.inverted(z0);
    if (curve.resample) {
      auto base = curve.resample;
      inv.resample = [base, z0](int k) { return base(k).inverted(z0); };
    }
    return riemann_map_disk(inv, cplx{}, tol);
  }

  cplx z0_;
  DiskMap inner_;
};

}  // namespace qdl
