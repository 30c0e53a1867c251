// SPDX-License-Identifier: Apache-2.0
#include "kseq/morphology.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <set>
#include <tuple>

#include "kseq/error.hpp"

namespace kseq {
namespace {

// Clockwise from north: P2..P9 in the usual thinning notation.
constexpr std::array<Offset, 8> kRing{{{-1, 0}, {-1, 1}, {0, 1}, {1, 1}, {1, 0}, {1, -1}, {0, -1}, {-1, -1}}};

std::array<std::uint8_t, 8> ring_values(const Mask& m, int r, int c) {
  std::array<std::uint8_t, 8> v{};
  for (std::size_t i = 0; i < 8; ++i) v[i] = m.at_or(r + kRing[i].dy, c + kRing[i].dx, 0);
  return v;
}

int neighbour_count(const Mask& m, int r, int c) {
  int n = 0;
  for (const auto& o : kRing) n += m.at_or(r + o.dy, c + o.dx, 0) != 0;
  return n;
}

// Connected components among the foreground ring neighbours, where two ring
// positions touch when they are 8-adjacent to each other.
int ring_components(const std::array<std::uint8_t, 8>& v) {
  std::array<int, 8> comp{};
  comp.fill(-1);
  int count = 0;
  for (std::size_t i = 0; i < 8; ++i) {
    if (!v[i] || comp[i] >= 0) continue;
    std::array<std::size_t, 8> stack{};
    std::size_t top = 0;
    stack[top++] = i;
    comp[i] = count;
    while (top > 0) {
      const std::size_t a = stack[--top];
      for (std::size_t j = 0; j < 8; ++j) {
        if (!v[j] || comp[j] >= 0) continue;
        if (std::abs(kRing[a].dy - kRing[j].dy) <= 1 && std::abs(kRing[a].dx - kRing[j].dx) <= 1) {
          comp[j] = count;
          stack[top++] = j;
        }
      }
    }
    ++count;
  }
  return count;
}

bool zhang_suen_pass(Mask& m, bool first) {
  const Mask boundary = [&] {
    Mask inner = erode(m, StructuringElement::cross());
    Mask b(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.size(); ++i) b.data()[i] = m.data()[i] && !inner.data()[i];
    return b;
  }();
  std::vector<PixelPos> remove;
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      if (!boundary(r, c)) continue;
      const auto p = ring_values(m, r, c);
      int b = 0;
      for (auto x : p) b += x;
      if (b < 2 || b > 6) continue;
      int a = 0;
      for (std::size_t i = 0; i < 8; ++i) a += (!p[i] && p[(i + 1) % 8]);
      if (a != 1) continue;
      // p[0]=N, p[2]=E, p[4]=S, p[6]=W
      if (first) {
        if (p[0] && p[2] && p[4]) continue;
        if (p[2] && p[4] && p[6]) continue;
      } else {
        if (p[0] && p[2] && p[6]) continue;
        if (p[0] && p[4] && p[6]) continue;
      }
      remove.push_back({r, c});
    }
  }
  for (const auto& q : remove) m(q.row, q.col) = 0;
  return !remove.empty();
}

bool remove_staircase(Mask& m) {
  bool changed = false;
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      if (!m(r, c)) continue;
      const auto v = ring_values(m, r, c);
      int n = 0;
      for (auto x : v) n += x;
      if (n >= 2 && ring_components(v) == 1) {
        m(r, c) = 0;
        changed = true;
      }
    }
  }
  return changed;
}

std::vector<PixelPos> endpoints_of(const Mask& m) {
  std::vector<PixelPos> out;
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c)
      if (m(r, c) && neighbour_count(m, r, c) == 1) out.push_back({r, c});
  return out;
}

struct Branch {
  std::vector<PixelPos> pixels;  // endpoint first, junction excluded
  bool reaches_junction = false;
};

Branch trace_branch(const Mask& m, PixelPos start) {
  Branch br;
  PixelPos prev{-1, -1};
  PixelPos cur = start;
  while (true) {
    if (neighbour_count(m, cur.row, cur.col) >= 3) {
      br.reaches_junction = true;
      return br;
    }
    br.pixels.push_back(cur);
    PixelPos next{-1, -1};
    for (const auto& o : kRing) {
      PixelPos q{cur.row + o.dy, cur.col + o.dx};
      if (q == prev || !m.at_or(q.row, q.col, 0)) continue;
      next = q;
      break;
    }
    if (next.row < 0) return br;  // reached the other end of a plain line
    prev = cur;
    cur = next;
  }
}

std::vector<PixelPos> shortest_path(const Mask& m, PixelPos from, PixelPos to) {
  Grid<int> parent(m.rows(), m.cols(), -1);
  std::deque<PixelPos> queue{from};
  parent(from.row, from.col) = from.row * m.cols() + from.col;
  while (!queue.empty()) {
    const PixelPos cur = queue.front();
    queue.pop_front();
    if (cur == to) break;
    for (const auto& o : kRing) {
      PixelPos q{cur.row + o.dy, cur.col + o.dx};
      if (!m.at_or(q.row, q.col, 0) || parent(q.row, q.col) >= 0) continue;
      parent(q.row, q.col) = cur.row * m.cols() + cur.col;
      queue.push_back(q);
    }
  }
  if (parent(to.row, to.col) < 0) throw Error("morphology.disconnected", "skeleton endpoints are not connected");
  std::vector<PixelPos> path{to};
  while (!(path.back() == from)) {
    const int p = parent(path.back().row, path.back().col);
    path.push_back({p / m.cols(), p % m.cols()});
  }
  std::reverse(path.begin(), path.end());
  return path;
}

// Grows the path past its first point along the direction of its first few
// pixels, stopping at the mask boundary.
void extend_front(std::vector<PixelPos>& path, const Mask& mask) {
  if (path.size() < 2) return;
  const std::size_t k = std::min<std::size_t>(8, path.size() - 1);
  const double dr = path[0].row - path[k].row;
  const double dc = path[0].col - path[k].col;
  const double norm = std::hypot(dr, dc);
  if (norm == 0.0) return;
  std::set<PixelPos> on_path(path.begin(), path.end());
  std::vector<PixelPos> grown;
  PixelPos last = path[0];
  for (int t = 1;; ++t) {
    PixelPos q{static_cast<int>(std::lround(path[0].row + t * dr / norm)),
               static_cast<int>(std::lround(path[0].col + t * dc / norm))};
    if (q == last) continue;
    if (!mask.at_or(q.row, q.col, 0) || on_path.count(q)) break;
    grown.push_back(q);
    on_path.insert(q);
    last = q;
  }
  path.insert(path.begin(), grown.rbegin(), grown.rend());
}

}  // namespace

StructuringElement::StructuringElement(std::vector<Offset> offsets) : offsets_(std::move(offsets)) {
  std::sort(offsets_.begin(), offsets_.end());
  offsets_.erase(std::unique(offsets_.begin(), offsets_.end()), offsets_.end());
  if (!std::binary_search(offsets_.begin(), offsets_.end(), Offset{0, 0})) {
    throw Error("morphology.bad_element", "structuring element must contain the origin");
  }
}

StructuringElement StructuringElement::box(int radius) {
  std::vector<Offset> o;
  for (int dy = -radius; dy <= radius; ++dy)
    for (int dx = -radius; dx <= radius; ++dx) o.push_back({dy, dx});
  return StructuringElement(std::move(o));
}

StructuringElement StructuringElement::cross() {
  return StructuringElement({{0, 0}, {-1, 0}, {1, 0}, {0, -1}, {0, 1}});
}

Mask erode(const Mask& mask, const StructuringElement& se) {
  Mask out(mask.rows(), mask.cols());
  for (int r = 0; r < mask.rows(); ++r) {
    for (int c = 0; c < mask.cols(); ++c) {
      if (!mask(r, c)) continue;
      bool keep = true;
      for (const auto& o : se.offsets()) {
        if (!mask.at_or(r + o.dy, c + o.dx, 0)) {
          keep = false;
          break;
        }
      }
      out(r, c) = keep ? 1 : 0;
    }
  }
  return out;
}

int count_components(const Mask& mask) {
  Grid<std::uint8_t> seen(mask.rows(), mask.cols());
  int count = 0;
  std::vector<PixelPos> stack;
  for (int r = 0; r < mask.rows(); ++r) {
    for (int c = 0; c < mask.cols(); ++c) {
      if (!mask(r, c) || seen(r, c)) continue;
      ++count;
      seen(r, c) = 1;
      stack.push_back({r, c});
      while (!stack.empty()) {
        auto p = stack.back();
        stack.pop_back();
        for (const auto& o : kRing) {
          int rr = p.row + o.dy, cc = p.col + o.dx;
          if (mask.at_or(rr, cc, 0) && !seen(rr, cc)) {
            seen(rr, cc) = 1;
            stack.push_back({rr, cc});
          }
        }
      }
    }
  }
  return count;
}

Mask thin(const Mask& mask) {
  Mask m = mask;
  for (auto& v : m.data()) v = v ? 1 : 0;
  bool changed = true;
  while (changed) {
    changed = zhang_suen_pass(m, true);
    changed = zhang_suen_pass(m, false) || changed;
  }
  while (remove_staircase(m)) {
  }
  return m;
}

AxisPolyline make_axis(std::vector<PixelPos> points) {
  AxisPolyline axis;
  axis.arclengths.reserve(points.size());
  double s = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i > 0) {
      const int dr = std::abs(points[i].row - points[i - 1].row);
      const int dc = std::abs(points[i].col - points[i - 1].col);
      if (dr > 1 || dc > 1 || (dr == 0 && dc == 0)) {
        throw Error("morphology.bad_axis", "axis points must be distinct and 8-adjacent");
      }
      s += (dr + dc == 2) ? std::sqrt(2.0) : 1.0;
    }
    axis.arclengths.push_back(s);
  }
  std::vector<PixelPos> sorted = points;
  std::sort(sorted.begin(), sorted.end(),
            [](const PixelPos& a, const PixelPos& b) { return std::tie(a.row, a.col) < std::tie(b.row, b.col); });
  const auto same = [](const PixelPos& a, const PixelPos& b) { return a.row == b.row && a.col == b.col; };
  if (std::adjacent_find(sorted.begin(), sorted.end(), same) != sorted.end()) {
    throw Error("morphology.bad_axis", "axis path revisits a pixel");
  }
  axis.points = std::move(points);
  return axis;
}

AxisPolyline reverse_axis(const AxisPolyline& axis) {
  std::vector<PixelPos> pts(axis.points.rbegin(), axis.points.rend());
  return make_axis(std::move(pts));
}

AxisPolyline longitudinal_axis(const Mask& mask, const AxisOptions& options) {
  const std::size_t area = count_foreground(mask);
  if (area < 3) throw Error("morphology.too_small", "mask needs at least 3 foreground pixels");
  if (count_components(mask) != 1) {
    throw Error("morphology.multiple_components", "mask must be a single 8-connected component");
  }
  Mask skel = thin(mask);
  if (count_foreground(skel) < 2) {
    // Compact blobs (e.g. a square) thin to one pixel: run the axis through
    // it along the mask's longer spread, horizontal on ties.
    PixelPos centre{};
    double sr = 0, sc = 0, srr = 0, scc = 0, n = 0;
    for (int r = 0; r < mask.rows(); ++r) {
      for (int c = 0; c < mask.cols(); ++c) {
        if (skel(r, c)) centre = {r, c};
        if (!mask(r, c)) continue;
        sr += r;
        sc += c;
        srr += double(r) * r;
        scc += double(c) * c;
        n += 1;
      }
    }
    const bool vertical = srr / n - (sr / n) * (sr / n) > scc / n - (sc / n) * (sc / n);
    const int dr = vertical ? 1 : 0, dc = vertical ? 0 : 1;
    std::vector<PixelPos> path{centre};
    for (PixelPos q{centre.row - dr, centre.col - dc}; mask.at_or(q.row, q.col, 0); q = {q.row - dr, q.col - dc}) {
      path.insert(path.begin(), q);
    }
    for (PixelPos q{centre.row + dr, centre.col + dc}; mask.at_or(q.row, q.col, 0); q = {q.row + dr, q.col + dc}) {
      path.push_back(q);
    }
    if (path.size() < 2) throw Error("morphology.too_small", "mask thins to a single pixel");
    return make_axis(std::move(path));
  }

  std::vector<PixelPos> ends = endpoints_of(skel);
  for (int iter = 0; ends.size() != 2; ++iter) {
    if (ends.size() < 2) throw Error("morphology.no_endpoints", "skeleton has fewer than two endpoints");
    if (iter >= options.max_prune_iters) {
      throw Error("morphology.prune_failed", "pruning did not reach two endpoints");
    }
    std::vector<Branch> candidates;
    for (const auto& e : ends) {
      Branch b = trace_branch(skel, e);
      if (b.reaches_junction && static_cast<int>(b.pixels.size()) < options.prune_len) {
        candidates.push_back(std::move(b));
      }
    }
    if (candidates.empty()) {
      throw Error("morphology.prune_failed", "skeleton has more than two long branches");
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Branch& a, const Branch& b) { return a.pixels.size() < b.pixels.size(); });
    std::size_t remaining = ends.size();
    for (const auto& b : candidates) {
      if (remaining <= 2) break;
      for (const auto& p : b.pixels) skel(p.row, p.col) = 0;
      --remaining;
    }
    while (remove_staircase(skel)) {
    }
    ends = endpoints_of(skel);
  }

  std::vector<PixelPos> path = shortest_path(skel, ends[0], ends[1]);
  extend_front(path, mask);
  std::reverse(path.begin(), path.end());
  extend_front(path, mask);
  if (path.back() < path.front()) std::reverse(path.begin(), path.end());
  return make_axis(std::move(path));
}

double project_to_axis(Point2 point, const AxisPolyline& axis) {
  double best = std::numeric_limits<double>::infinity();
  double s = 0.0;
  for (std::size_t i = 0; i < axis.points.size(); ++i) {
    const double dr = axis.points[i].row - point.row;
    const double dc = axis.points[i].col - point.col;
    const double d = dr * dr + dc * dc;
    if (d < best) {
      best = d;
      s = axis.arclengths[i];
    }
  }
  return s;
}

}  // namespace kseq
