#pragma once

#include <span>
#include <vector>

namespace verdant {

// Planar coordinates in meters, single projected CRS.
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

using Polyline = std::vector<Point>;

// Closed ring; the closing vertex may or may not be repeated.
using Ring = std::vector<Point>;

enum class Location { Outside, Boundary, Inside };

double distance(Point a, Point b) noexcept;
double point_segment_distance(Point p, Point a, Point b) noexcept;
double point_polyline_distance(Point p, std::span<const Point> line) noexcept;
double polyline_length(std::span<const Point> line) noexcept;

// Point at half the polyline's arc length.
Point polyline_midpoint(std::span<const Point> line) noexcept;

struct Box {
  double min_x, min_y, max_x, max_y;
};

Box bounding_box(std::span<const Point> pts) noexcept;

// Ring with a repeated closing vertex removed.
Ring open_ring(std::span<const Point> ring);

double signed_area(std::span<const Point> ring) noexcept;

// Ray casting; points within eps of an edge are reported as Boundary.
Location locate(Point p, std::span<const Point> ring, double eps = 1e-9) noexcept;

// Inclusive membership: Boundary counts as inside.
inline bool point_in_polygon(Point p, std::span<const Point> ring) noexcept {
  return locate(p, ring) != Location::Outside;
}

// True when no two non-adjacent edges intersect.
bool is_simple(std::span<const Point> ring) noexcept;

}  // namespace verdant
