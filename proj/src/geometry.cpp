// Copyright 2026 The scenex Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "scenex/geometry.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace scenex
{

double circumscribed_curvature(Vec2 a, Vec2 b, Vec2 c)
{
  const double ab = distance(a, b);
  const double bc = distance(b, c);
  const double ca = distance(c, a);
  const double denom = ab * bc * ca;
  if (denom <= 0.0) {
    return 0.0;
  }
  // kappa = 1/R = 4 * area / (|ab| |bc| |ca|)
  const double twice_area = std::abs(cross(b - a, c - a));
  return 2.0 * twice_area / denom;
}

Path::Path(std::vector<Vec2> points) : points_(std::move(points))
{
  if (points_.size() < 2) {
    throw std::invalid_argument("path needs at least two points");
  }
  s_.resize(points_.size());
  s_[0] = 0.0;
  for (std::size_t i = 1; i < points_.size(); ++i) {
    const double d = distance(points_[i - 1], points_[i]);
    if (!(d > 0.0)) {
      throw std::invalid_argument(
        "path has repeated consecutive points at vertex " + std::to_string(i));
    }
    s_[i] = s_[i - 1] + d;
  }

  const std::size_t n = points_.size();
  kappa_.assign(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    kappa_[i] = circumscribed_curvature(points_[i - 1], points_[i], points_[i + 1]);
  }
  if (n >= 3) {
    kappa_[0] = kappa_[1];
    kappa_[n - 1] = kappa_[n - 2];
  }
}

std::size_t Path::segment_index(double s) const
{
  // index i such that s_[i] <= s <= s_[i+1]
  auto it = std::upper_bound(s_.begin(), s_.end(), s);
  std::size_t i = it == s_.begin() ? 0 : static_cast<std::size_t>(it - s_.begin()) - 1;
  return std::min(i, s_.size() - 2);
}

PathState Path::state_at(double s) const
{
  if (!(s >= 0.0 && s <= length())) {
    throw std::out_of_range(
      "arc coordinate " + std::to_string(s) + " outside [0, " + std::to_string(length()) + "]");
  }
  return state_at_clamped(s);
}

PathState Path::state_at_clamped(double s) const
{
  s = std::clamp(s, 0.0, length());
  const std::size_t i = segment_index(s);
  const double seg = s_[i + 1] - s_[i];
  const double t = std::clamp((s - s_[i]) / seg, 0.0, 1.0);
  const Vec2 d = points_[i + 1] - points_[i];

  PathState st;
  st.point = t >= 1.0 ? points_[i + 1] : points_[i] + t * d;
  st.heading = std::atan2(d.y, d.x);
  st.curvature = (1.0 - t) * kappa_[i] + t * kappa_[i + 1];
  return st;
}

Projection Path::project(Vec2 p) const
{
  Projection best;
  best.lateral = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
    const Vec2 a = points_[i];
    const Vec2 d = points_[i + 1] - a;
    const double seg = s_[i + 1] - s_[i];
    const double t = std::clamp(dot(p - a, d) / (seg * seg), 0.0, 1.0);
    const Vec2 q = a + t * d;
    const double dist = distance(p, q);
    if (dist < best.lateral) {
      best.lateral = dist;
      best.s = s_[i] + t * seg;
      best.point = q;
      best.tangent = (1.0 / seg) * d;
    }
  }
  return best;
}

std::vector<Vec2> sample_line(Vec2 from, Vec2 to, double spacing)
{
  const double len = distance(from, to);
  const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / spacing)));
  std::vector<Vec2> out;
  out.reserve(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(n);
    out.push_back(from + t * (to - from));
  }
  return out;
}

std::vector<Vec2> sample_arc(
  Vec2 center, double radius, double start_rad, double sweep_rad, double spacing)
{
  const double len = std::abs(sweep_rad) * radius;
  const auto n = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(len / spacing)));
  std::vector<Vec2> out;
  out.reserve(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const double a = start_rad + sweep_rad * static_cast<double>(k) / static_cast<double>(n);
    out.push_back({center.x + radius * std::cos(a), center.y + radius * std::sin(a)});
  }
  return out;
}

std::vector<Vec2> join_pieces(const std::vector<std::vector<Vec2>> & pieces)
{
  std::vector<Vec2> out;
  for (const auto & piece : pieces) {
    for (const auto & p : piece) {
      if (!out.empty() && distance(out.back(), p) < 1e-9) {
        continue;
      }
      out.push_back(p);
    }
  }
  return out;
}

std::vector<Vec2> convex_hull(std::vector<Vec2> pts)
{
  std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) {
    return pts;
  }
  std::vector<Vec2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto & p : pts) {
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0.0) {
      --k;
    }
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    const Vec2 p = pts[i];
    while (k >= lower && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0.0) {
      --k;
    }
    hull[k++] = p;
  }
  hull.resize(k - 1);
  return hull;
}

double polygon_area(std::span<const Vec2> polygon)
{
  double a = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    a += cross(polygon[i], polygon[(i + 1) % polygon.size()]);
  }
  return 0.5 * a;
}

namespace
{

constexpr double kScanStep = 0.1;
constexpr int kBisectIterations = 48;

struct Span
{
  double entry;
  double exit;
};

// First and last arc coordinate of `path` lying within `threshold` of `other`.
std::optional<Span> overlap_span(const Path & path, const Path & other, double threshold)
{
  auto inside = [&](double s) { return other.distance_to(path.point_at(s)) <= threshold; };

  const double len = path.length();
  const auto n = static_cast<std::size_t>(std::ceil(len / kScanStep));
  auto sample = [&](std::size_t k) { return std::min(len, static_cast<double>(k) * len / n); };

  std::optional<std::size_t> first;
  std::optional<std::size_t> last;
  for (std::size_t k = 0; k <= n; ++k) {
    if (inside(sample(k))) {
      if (!first) {
        first = k;
      }
      last = k;
    }
  }
  if (!first) {
    return std::nullopt;
  }

  // boundary between an outside sample `out` and an inside sample `in`
  auto refine = [&](double out, double in) {
    for (int it = 0; it < kBisectIterations; ++it) {
      const double mid = 0.5 * (out + in);
      (inside(mid) ? in : out) = mid;
    }
    return in;
  };

  Span span{sample(*first), sample(*last)};
  if (*first > 0) {
    span.entry = refine(sample(*first - 1), span.entry);
  }
  if (*last < n) {
    span.exit = refine(sample(*last + 1), span.exit);
  }
  return span;
}

void append_corridor_edges(
  std::vector<Vec2> & out, const Path & path, Span span, double half_width)
{
  const auto n = std::max<std::size_t>(
    1, static_cast<std::size_t>(std::ceil((span.exit - span.entry) / kScanStep)));
  for (std::size_t k = 0; k <= n; ++k) {
    const double s = span.entry + (span.exit - span.entry) * static_cast<double>(k) / n;
    const PathState st = path.state_at_clamped(s);
    const Vec2 normal{-std::sin(st.heading), std::cos(st.heading)};
    out.push_back(st.point + half_width * normal);
    out.push_back(st.point - half_width * normal);
  }
}

}  // namespace

std::optional<ConflictRegion> conflict_region(
  const Path & path_a, const Path & path_b, double width_a, double width_b)
{
  const double threshold = 0.5 * (width_a + width_b);
  const auto span_a = overlap_span(path_a, path_b, threshold);
  if (!span_a) {
    return std::nullopt;
  }
  const auto span_b = overlap_span(path_b, path_a, threshold);
  if (!span_b) {
    return std::nullopt;
  }

  ConflictRegion region;
  region.entry_a = span_a->entry;
  region.exit_a = span_a->exit;
  region.entry_b = span_b->entry;
  region.exit_b = span_b->exit;

  std::vector<Vec2> edges;
  append_corridor_edges(edges, path_a, *span_a, 0.5 * width_a);
  append_corridor_edges(edges, path_b, *span_b, 0.5 * width_b);
  region.footprint = convex_hull(std::move(edges));

  region.degenerate = span_a->entry <= 0.0 && span_a->exit >= path_a.length() &&
                      span_b->entry <= 0.0 && span_b->exit >= path_b.length();
  return region;
}

}  // namespace scenex
