#pragma once

#include <cmath>
#include <complex>
#include <sstream>
#include <vector>

#include "qdl/common.hpp"

namespace qdl {

struct BlaschkeFactor {
  cplx a;
  int multiplicity = 1;
};

// e^{i theta} prod ((z - a) / (1 - conj(a) z))^mult. Factors with |a| > 1 are
// allowed: they are unimodular on the circle as well and describe maps of the
// exterior disk.
struct BlaschkeProduct {
  double theta = 0.0;
  std::vector<BlaschkeFactor> factors;

  int degree() const {
    int d = 0;
    for (const BlaschkeFactor& f : factors) d += f.multiplicity;
    return d;
  }
};

inline cplx blaschke_eval(const BlaschkeProduct& b, cplx z) {
  cplx v = std::polar(1.0, b.theta);
  for (const BlaschkeFactor& f : b.factors) {
    const cplx den = 1.0 - std::conj(f.a) * z;
    if (std::abs(den) <= 1e-15 * (1.0 + std::abs(f.a) * std::abs(z))) {
      std::ostringstream os;
      os << "blaschke_eval: " << z << " is a pole of the factor at " << f.a;
      throw PreconditionError(os.str());
    }
    const cplx ratio = (z - f.a) / den;
    for (int k = 0; k < f.multiplicity; ++k) v *= ratio;
  }
  return v;
}

}  // namespace qdl
