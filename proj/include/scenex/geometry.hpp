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

#ifndef SCENEX__GEOMETRY_HPP_
#define SCENEX__GEOMETRY_HPP_

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace scenex
{

struct Vec2
{
  double x{0.0};
  double y{0.0};

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double k, Vec2 a) { return {k * a.x, k * a.y}; }
  friend bool operator==(Vec2 a, Vec2 b) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// Point, unit tangent heading and unsigned curvature at an arc coordinate.
struct PathState
{
  Vec2 point;
  double heading{0.0};  // rad, atan2 of the segment direction
  double curvature{0.0};  // 1/m, >= 0
};

/// Closest point on a path to a query point.
struct Projection
{
  double s{0.0};
  double lateral{0.0};  // unsigned distance to the path
  Vec2 point;
  Vec2 tangent;  // unit
};

/**
 * Arc-length parameterized planar polyline.
 *
 * Vertex curvature comes from the circle through each vertex and its two
 * neighbours; the end vertices replicate the curvature of their neighbour.
 * Curvature between vertices is linearly interpolated.
 */
class Path
{
public:
  /// Throws std::invalid_argument on fewer than two points or repeated consecutive points.
  explicit Path(std::vector<Vec2> points);

  const std::vector<Vec2> & points() const { return points_; }
  const std::vector<double> & arc_lengths() const { return s_; }
  const std::vector<double> & vertex_curvatures() const { return kappa_; }
  double length() const { return s_.back(); }

  /// Throws std::out_of_range when s lies outside [0, length()].
  PathState state_at(double s) const;
  /// Like state_at() but clamps s into the valid range.
  PathState state_at_clamped(double s) const;
  Vec2 point_at(double s) const { return state_at_clamped(s).point; }

  Projection project(Vec2 p) const;
  /// Distance from p to the polyline.
  double distance_to(Vec2 p) const { return project(p).lateral; }

private:
  std::size_t segment_index(double s) const;

  std::vector<Vec2> points_;
  std::vector<double> s_;
  std::vector<double> kappa_;
};

/// Curvature of the circle through three points; 0 for collinear or coincident input.
double circumscribed_curvature(Vec2 a, Vec2 b, Vec2 c);

/// Builders used by the scenario library.
std::vector<Vec2> sample_line(Vec2 from, Vec2 to, double spacing);
std::vector<Vec2> sample_arc(
  Vec2 center, double radius, double start_rad, double sweep_rad, double spacing);
/// Concatenates pieces, dropping a leading vertex that duplicates the previous piece's end.
std::vector<Vec2> join_pieces(const std::vector<std::vector<Vec2>> & pieces);

/// Area where two inflated paths overlap, in each path's own arc coordinate.
struct ConflictRegion
{
  std::string actor_a;
  std::string actor_b;
  double entry_a{0.0};
  double exit_a{0.0};
  double entry_b{0.0};
  double exit_b{0.0};
  std::vector<Vec2> footprint;  // convex polygon, counter-clockwise
  bool degenerate{false};  // paths coincide along the whole common extent

  double entry_for(const std::string & id) const { return id == actor_a ? entry_a : entry_b; }
  double exit_for(const std::string & id) const { return id == actor_a ? exit_a : exit_b; }
  bool involves(const std::string & a, const std::string & b) const
  {
    return (a == actor_a && b == actor_b) || (a == actor_b && b == actor_a);
  }
};

/**
 * Overlap of the corridors of half-width width/2 around two paths.
 *
 * A point at s on path a belongs to the region when its distance to path b is
 * at most (width_a + width_b) / 2; symmetrically for path b. Entry and exit are
 * the first and last such coordinates. Returns nullopt when the corridors are
 * disjoint.
 */
std::optional<ConflictRegion> conflict_region(
  const Path & path_a, const Path & path_b, double width_a, double width_b);

/// Andrew's monotone chain; returns a counter-clockwise hull without repeats.
std::vector<Vec2> convex_hull(std::vector<Vec2> pts);
double polygon_area(std::span<const Vec2> polygon);

}  // namespace scenex

#endif  // SCENEX__GEOMETRY_HPP_
