#pragma once

#include <algorithm>
#include <cmath>
#include <complex>

#include "qdl/common.hpp"
#include "qdl/polynomial.hpp"
#include "qdl/qdmodel.hpp"

namespace qdl {

enum class Chart { Plane, Inverted };

// r written in one of the two sphere charts: x = z, or x = u = 1/z. In either
// chart r is P(x)/Q(x), and the log-derivative g = r'/r = N/(PQ) drives tracing.
class ChartMap {
 public:
  ChartMap(const RationalMap& r, Chart chart) : chart_(chart) {
    if (chart == Chart::Plane) {
      p_ = r.p();
      q_ = r.q();
    } else {
      const int dp = r.p().degree(), dq = r.q().degree();
      p_ = r.p().reversed(dp).shifted(std::max(dq - dp, 0));
      q_ = r.q().reversed(dq).shifted(std::max(dp - dq, 0));
    }
    n_ = wronskian_numerator(p_, q_);
    pq_ = p_ * q_;
    dn_ = n_.derivative();
    dpq_ = pq_.derivative();
  }

  Chart chart() const { return chart_; }
  const Polynomial& numerator() const { return n_; }
  const Polynomial& p() const { return p_; }
  const Polynomial& q() const { return q_; }

  cplx value(cplx x) const { return p_(x) / q_(x); }

  // g = r'/r
  cplx log_derivative(cplx x) const { return n_(x) / pq_(x); }

  // g and g' together.
  std::pair<cplx, cplx> log_derivative2(cplx x) const {
    const cplx n = n_(x), dn = dn_(x), pq = pq_(x), dpq = dpq_(x);
    return {n / pq, (dn * pq - n * dpq) / (pq * pq)};
  }

  // log(r(x) / target) on the principal branch.
  cplx log_ratio(cplx x, cplx target) const { return std::log(p_(x) / (q_(x) * target)); }

  // Point in this chart for a plane point z (z != 0 for the inverted chart).
  cplx from_plane(cplx z) const { return chart_ == Chart::Plane ? z : 1.0 / z; }
  cplx to_plane(cplx x) const { return chart_ == Chart::Plane ? x : 1.0 / x; }

 private:
  Chart chart_;
  Polynomial p_, q_, n_, pq_, dn_, dpq_;
};

}  // namespace qdl
