#ifndef SEMCLIQUE_GEOMETRY_H_
#define SEMCLIQUE_GEOMETRY_H_

#include <cmath>

namespace semclique {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  friend bool operator==(const Vec2&, const Vec2&) = default;

  double Norm() const { return std::hypot(x, y); }
  double SquaredNorm() const { return x * x + y * y; }
};

inline double Dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double Cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double Distance(Vec2 a, Vec2 b) { return (a - b).Norm(); }

// Counterclockwise rotation by `angle` radians.
inline Vec2 Rotate(Vec2 v, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

inline Vec2 UnitFromAngle(double angle) {
  return {std::cos(angle), std::sin(angle)};
}

struct Segment {
  Vec2 start;
  Vec2 end;
};

// Closest point on the closed segment to `p`, as the clamped parameter in
// [0, 1] along start->end.
inline double ProjectParam(const Segment& seg, Vec2 p) {
  const Vec2 d = seg.end - seg.start;
  const double len2 = d.SquaredNorm();
  if (len2 == 0.0) return 0.0;
  double u = Dot(p - seg.start, d) / len2;
  if (u < 0.0) u = 0.0;
  if (u > 1.0) u = 1.0;
  return u;
}

inline double PointSegmentDistance(Vec2 p, const Segment& seg) {
  const double u = ProjectParam(seg, p);
  return Distance(p, seg.start + u * (seg.end - seg.start));
}

}  // namespace semclique

#endif  // SEMCLIQUE_GEOMETRY_H_
