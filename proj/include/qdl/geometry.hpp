#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "qdl/common.hpp"

namespace qdl {

// Axis-aligned rectangle in the plane.
struct Window {
  double xmin = -1.0, xmax = 1.0, ymin = -1.0, ymax = 1.0;

  static Window centered(cplx c, double half) {
    return {c.real() - half, c.real() + half, c.imag() - half, c.imag() + half};
  }
  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  bool contains(cplx z) const {
    return z.real() >= xmin && z.real() <= xmax && z.imag() >= ymin && z.imag() <= ymax;
  }
};

// Winding of a closed polyline around p as a real number (sum of turning angles / 2pi).
// The closing segment back to the first vertex is implied.
inline double winding_real(std::span<const cplx> loop, cplx p) {
  if (loop.size() < 2) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const cplx a = loop[i] - p;
    const cplx b = loop[(i + 1) % loop.size()] - p;
    if (a == cplx{} || b == cplx{}) return std::numeric_limits<double>::quiet_NaN();
    const double turn = std::arg(b / a);
    if (std::abs(turn) >= kPi * (1.0 - 1e-12)) return std::numeric_limits<double>::quiet_NaN();  // p on segment
    total += turn;
  }
  return total / kTwoPi;
}

// Signed winding number, rounded. Throws when the fractional part exceeds 0.25,
// which only happens when p sits on or extremely near the polyline.
inline int winding_number(std::span<const cplx> loop, cplx p) {
  const double w = winding_real(loop, p);
  const double r = std::round(w);
  if (!std::isfinite(w) || std::abs(w - r) >= 0.25)
    throw NumericError("winding_number: point is too close to the curve");
  return static_cast<int>(r);
}

inline double signed_area(std::span<const cplx> loop) {
  double a = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const cplx u = loop[i], v = loop[(i + 1) % loop.size()];
    a += u.real() * v.imag() - v.real() * u.imag();
  }
  return 0.5 * a;
}

inline double point_segment_distance(cplx p, cplx a, cplx b) {
  const cplx d = b - a;
  const double len2 = std::norm(d);
  if (len2 == 0.0) return std::abs(p - a);
  const double t = std::clamp(((p - a) * std::conj(d)).real() / len2, 0.0, 1.0);
  return std::abs(p - (a + t * d));
}

// Distance from p to a set of polylines (each an open chain of segments).
inline double distance_to_polylines(cplx p, const std::vector<std::vector<cplx>>& lines) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& line : lines) {
    if (line.size() == 1) best = std::min(best, std::abs(p - line[0]));
    for (std::size_t i = 0; i + 1 < line.size(); ++i)
      best = std::min(best, point_segment_distance(p, line[i], line[i + 1]));
  }
  return best;
}

namespace detail {

// Uniform bucket grid over segments for nearest-segment queries.
class SegmentIndex {
 public:
  explicit SegmentIndex(const std::vector<std::vector<cplx>>& lines) {
    for (const auto& line : lines)
      for (std::size_t i = 0; i + 1 < line.size(); ++i) segs_.push_back({line[i], line[i + 1]});
    for (const auto& line : lines)
      if (line.size() == 1) segs_.push_back({line[0], line[0]});
    if (segs_.empty()) return;
    lo_ = hi_ = segs_[0][0];
    double total = 0.0;
    for (const auto& s : segs_)
      for (cplx p : s) {
        lo_ = {std::min(lo_.real(), p.real()), std::min(lo_.imag(), p.imag())};
        hi_ = {std::max(hi_.real(), p.real()), std::max(hi_.imag(), p.imag())};
      }
    for (const auto& s : segs_) total += std::abs(s[1] - s[0]);
    cell_ = std::max({total / static_cast<double>(segs_.size()) * 4.0,
                      std::max(hi_.real() - lo_.real(), hi_.imag() - lo_.imag()) / 512.0, 1e-12});
    nx_ = static_cast<int>((hi_.real() - lo_.real()) / cell_) + 1;
    ny_ = static_cast<int>((hi_.imag() - lo_.imag()) / cell_) + 1;
    buckets_.resize(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_));
    for (std::size_t k = 0; k < segs_.size(); ++k) {
      const auto& s = segs_[k];
      const int x0 = ix(std::min(s[0].real(), s[1].real())), x1 = ix(std::max(s[0].real(), s[1].real()));
      const int y0 = iy(std::min(s[0].imag(), s[1].imag())), y1 = iy(std::max(s[0].imag(), s[1].imag()));
      for (int x = x0; x <= x1; ++x)
        for (int y = y0; y <= y1; ++y) buckets_[index(x, y)].push_back(k);
    }
  }

  double distance(cplx p) const {
    if (segs_.empty()) return std::numeric_limits<double>::infinity();
    const int px = static_cast<int>(std::floor((p.real() - lo_.real()) / cell_));
    const int py = static_cast<int>(std::floor((p.imag() - lo_.imag()) / cell_));
    const int limit = std::max({std::abs(px), std::abs(py), std::abs(px - nx_), std::abs(py - ny_)}) + 1;
    double best = std::numeric_limits<double>::infinity();
    for (int ring = 0;; ++ring) {
      for (int x = px - ring; x <= px + ring; ++x)
        for (int y = py - ring; y <= py + ring; ++y) {
          if (x < 0 || y < 0 || x >= nx_ || y >= ny_) continue;
          if (std::max(std::abs(x - px), std::abs(y - py)) != ring) continue;
          for (std::size_t k : buckets_[index(x, y)])
            best = std::min(best, point_segment_distance(p, segs_[k][0], segs_[k][1]));
        }
      // Every segment within ring * cell of p has been visited.
      if (best <= ring * cell_) return best;
      if (ring > limit) return best;
    }
  }

 private:
  int ix(double x) const { return std::clamp(static_cast<int>((x - lo_.real()) / cell_), 0, nx_ - 1); }
  int iy(double y) const { return std::clamp(static_cast<int>((y - lo_.imag()) / cell_), 0, ny_ - 1); }
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(x) * static_cast<std::size_t>(ny_) + static_cast<std::size_t>(y);
  }

  std::vector<std::array<cplx, 2>> segs_;
  cplx lo_, hi_;
  double cell_ = 1.0;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<std::size_t>> buckets_;
};

}  // namespace detail

// Symmetric Hausdorff distance between two polyline sets, measured from the
// vertices of each set to the segments of the other.
inline double hausdorff(const std::vector<std::vector<cplx>>& a, const std::vector<std::vector<cplx>>& b) {
  const detail::SegmentIndex ia(a), ib(b);
  double h = 0.0;
  for (const auto& line : a)
    for (cplx p : line) h = std::max(h, ib.distance(p));
  for (const auto& line : b)
    for (cplx p : line) h = std::max(h, ia.distance(p));
  return h;
}

}  // namespace qdl
