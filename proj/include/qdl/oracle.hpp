#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <unordered_map>
#include <vector>

#include "qdl/common.hpp"
#include "qdl/geometry.hpp"
#include "qdl/qdmodel.hpp"

namespace qdl {

struct GridLevelSet {
  Window window;
  double pitch = 0.0;
  double level = 0.0;
  std::vector<std::vector<cplx>> polylines;  // closed ones repeat their first point
  std::vector<bool> closed;
  int component_count = 0;
};

namespace detail {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n = 0) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t add() {
    parent_.push_back(parent_.size());
    return parent_.size() - 1;
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }
  std::size_t size() const { return parent_.size(); }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace detail

// Marching squares on f = log|r| - log c. Crossings are keyed by grid edge;
// saddle cells are split by the sign at the cell center.
inline GridLevelSet grid_level(const RationalMap& r, double c, const Window& w, double pitch) {
  if (!(pitch > 0.0)) throw PreconditionError("grid_level: pitch must be positive");
  if (!(c > 0.0)) throw PreconditionError("grid_level: level must be positive");
  GridLevelSet out;
  out.window = w;
  out.pitch = pitch;
  out.level = c;
  const int nx = std::max(1, static_cast<int>(std::ceil(w.width() / pitch)));
  const int ny = std::max(1, static_cast<int>(std::ceil(w.height() / pitch)));
  const double logc = std::log(c);
  auto node = [&](int i, int j) { return cplx(w.xmin + i * pitch, w.ymin + j * pitch); };
  auto f = [&](cplx z) {
    const double v = std::log(std::abs(r(z))) - logc;
    if (std::isnan(v)) return 0.0;
    return v;
  };
  auto sgn = [](double v) { return v > 0.0; };

  // Edge keys: horizontal edge from (i,j) is 2*(j*(nx+1)+i), vertical is that + 1.
  auto hkey = [&](int i, int j) { return 2 * (static_cast<std::int64_t>(j) * (nx + 1) + i); };
  auto vkey = [&](int i, int j) { return 2 * (static_cast<std::int64_t>(j) * (nx + 1) + i) + 1; };

  std::unordered_map<std::int64_t, std::size_t> id;
  std::vector<cplx> pts;
  std::vector<std::vector<std::size_t>> adj;
  detail::UnionFind uf;

  auto crossing = [&](std::int64_t key, cplx a, cplx b, double fa, double fb) {
    auto it = id.find(key);
    if (it != id.end()) return it->second;
    const double t = fa / (fa - fb);
    pts.push_back(a + t * (b - a));
    adj.emplace_back();
    const std::size_t k = uf.add();
    id.emplace(key, k);
    return k;
  };
  auto link = [&](std::size_t a, std::size_t b) {
    adj[a].push_back(b);
    adj[b].push_back(a);
    uf.unite(a, b);
  };

  std::vector<double> row0(static_cast<std::size_t>(nx + 1)), row1(static_cast<std::size_t>(nx + 1));
  for (int i = 0; i <= nx; ++i) row0[static_cast<std::size_t>(i)] = f(node(i, 0));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i <= nx; ++i) row1[static_cast<std::size_t>(i)] = f(node(i, j + 1));
    for (int i = 0; i < nx; ++i) {
      const double f00 = row0[static_cast<std::size_t>(i)], f10 = row0[static_cast<std::size_t>(i + 1)];
      const double f01 = row1[static_cast<std::size_t>(i)], f11 = row1[static_cast<std::size_t>(i + 1)];
      const bool s00 = sgn(f00), s10 = sgn(f10), s01 = sgn(f01), s11 = sgn(f11);
      const int mask = s00 | (s10 << 1) | (s11 << 2) | (s01 << 3);
      if (mask == 0 || mask == 15) continue;
      const cplx z00 = node(i, j), z10 = node(i + 1, j), z01 = node(i, j + 1), z11 = node(i + 1, j + 1);
      // Edges: 0 bottom, 1 right, 2 top, 3 left.
      auto edge = [&](int e) -> std::size_t {
        switch (e) {
          case 0: return crossing(hkey(i, j), z00, z10, f00, f10);
          case 1: return crossing(vkey(i + 1, j), z10, z11, f10, f11);
          case 2: return crossing(hkey(i, j + 1), z01, z11, f01, f11);
          default: return crossing(vkey(i, j), z00, z01, f00, f01);
        }
      };
      std::vector<int> es;
      if (s00 != s10) es.push_back(0);
      if (s10 != s11) es.push_back(1);
      if (s01 != s11) es.push_back(2);
      if (s00 != s01) es.push_back(3);
      if (es.size() == 2) {
        link(edge(es[0]), edge(es[1]));
      } else {
        // Saddle: corners 00 and 11 agree. If the center agrees with them, they are
        // joined through the center and the segments cut off the other corners.
        const bool sc = sgn(f(0.25 * (z00 + z10 + z01 + z11)));
        if (sc == s00) {
          link(edge(0), edge(1));  // cuts corner 10
          link(edge(2), edge(3));  // cuts corner 01
        } else {
          link(edge(3), edge(0));  // cuts corner 00
          link(edge(1), edge(2));  // cuts corner 11
        }
      }
    }
    std::swap(row0, row1);
  }

  // Stitch chains. Ends have degree 1 (window boundary); loops have all degree 2.
  std::vector<bool> used(pts.size(), false);
  auto walk = [&](std::size_t start) {
    std::vector<cplx> line{pts[start]};
    used[start] = true;
    std::size_t cur = start;
    bool closed = false;
    for (;;) {
      std::size_t next = SIZE_MAX;
      for (std::size_t nb : adj[cur])
        if (!used[nb]) {
          next = nb;
          break;
        }
      if (next == SIZE_MAX) {
        if (line.size() >= 3)
          for (std::size_t nb : adj[cur])
            if (nb == start) closed = true;
        break;
      }
      used[next] = true;
      line.push_back(pts[next]);
      cur = next;
    }
    if (closed) line.push_back(pts[start]);
    out.polylines.push_back(std::move(line));
    out.closed.push_back(closed);
  };
  for (std::size_t k = 0; k < pts.size(); ++k)
    if (!used[k] && adj[k].size() == 1) walk(k);
  for (std::size_t k = 0; k < pts.size(); ++k)
    if (!used[k]) walk(k);

  std::vector<bool> root_seen(pts.size(), false);
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const std::size_t rt = uf.find(k);
    if (!root_seen[rt]) {
      root_seen[rt] = true;
      ++out.component_count;
    }
  }
  return out;
}

// Default oracle pitch: window width / 1024.
inline GridLevelSet grid_level(const RationalMap& r, double c, const Window& w) {
  return grid_level(r, c, w, w.width() / 1024.0);
}

}  // namespace qdl
