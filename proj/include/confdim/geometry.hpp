#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "confdim/rational.hpp"

namespace confdim {

enum class Norm { euclidean, sup };

// Metric d(x,y) = ||x-y||^theta. theta = 1 is the base metric.
struct MetricSpec {
  Norm norm = Norm::euclidean;
  Rat snowflake_theta = 1;

  void validate() const;
};

struct Point {
  std::vector<Rat> coords;

  Point() = default;
  explicit Point(std::vector<Rat> c) : coords(std::move(c)) {}
  Point(Rat x, Rat y) : coords{std::move(x), std::move(y)} {}
  Point(Rat x, Rat y, Rat z) : coords{std::move(x), std::move(y), std::move(z)} {}

  std::size_t dim() const { return coords.size(); }
  bool operator==(const Point& o) const { return coords == o.coords; }
  bool operator!=(const Point& o) const { return !(*this == o); }
  // lexicographic; used for deterministic tie-breaks
  bool operator<(const Point& o) const;
};

// Exact base-metric quantities.
Rat dist2(const Point& a, const Point& b);     // squared euclidean
Rat sup_dist(const Point& a, const Point& b);  // exact sup-norm

// d(a,b) = ||a-b||^theta, as a double.
double distance(const Point& a, const Point& b, const MetricSpec& m);

// Exact comparisons of the base-metric distance against a rational bound.
bool dist_lt(const Point& a, const Point& b, const Rat& bound, Norm n);  // d <  bound
bool dist_le(const Point& a, const Point& b, const Rat& bound, Norm n);  // d <= bound
bool dist_ge(const Point& a, const Point& b, const Rat& bound, Norm n);  // d >= bound

// Open ball in the metric d^theta. The point set is always {x : ||x-c|| < base_radius}
// in the base norm; the nominal radius in d^theta is base_radius^theta.
struct Ball {
  Point center;
  Rat base_radius;   // exact; set membership is decided with this
  Rat metric_exponent = 1;

  Ball() = default;
  Ball(Point c, Rat r) : center(std::move(c)), base_radius(std::move(r)) { check(); }
  Ball(Point c, Rat r, Rat theta)
      : center(std::move(c)), base_radius(std::move(r)), metric_exponent(std::move(theta)) {
    check();
  }

  void check() const;

  // Radius in the ball's own metric: base_radius^theta.
  double radius() const;
  std::optional<Rat> radius_exact() const;

  // Inflation CB in the ball's metric: multiplies the nominal radius by c.
  // Exact whenever c^(1/theta) is rational (always for theta = 1); throws otherwise.
  Ball inflate(const Rat& c) const;
  // Multiplies the base radius; always exact.
  Ball inflate_base(const Rat& c) const;
};

// Exact predicates; valid for any common metric_exponent since the point sets
// are base-norm balls.
bool ball_contains_point(const Ball& b, const Point& p, Norm n);
bool closed_ball_contains_point(const Ball& b, const Point& p, Norm n);
bool balls_intersect(const Ball& a, const Ball& b, Norm n);      // open ∩ open ≠ ∅
bool balls_disjoint(const Ball& a, const Ball& b, Norm n);
bool ball_contained(const Ball& inner, const Ball& outer, Norm n);

// Piecewise-linear curve. Consecutive vertices distinct, at least two vertices.
struct PolyCurve {
  std::vector<Point> vertices;

  PolyCurve() = default;
  explicit PolyCurve(std::vector<Point> v);

  std::size_t segments() const { return vertices.empty() ? 0 : vertices.size() - 1; }
  double diameter(const MetricSpec& m) const;
};

// Distances between segment sets, closed form, tolerance ~1e-12.
double segment_point_dist(const Point& a, const Point& b, const Point& p, Norm n);
double segment_segment_dist(const Point& a, const Point& b, const Point& c, const Point& d,
                            Norm n);
bool segments_intersect_exact_2d(const Point& a, const Point& b, const Point& c, const Point& d);

double curve_dist(const PolyCurve& e, const PolyCurve& f, const MetricSpec& m);
bool curves_intersect(const PolyCurve& e, const PolyCurve& f);

// Whether the open ball meets some segment of the curve (closed-form
// segment-ball distance, tolerance 1e-12 in the base norm).
bool ball_meets_curve(const Ball& b, const PolyCurve& c, Norm n);

// d(E,F) / min(diam E, diam F). Intersecting continua give 0; degenerate input throws.
double relative_distance(const PolyCurve& e, const PolyCurve& f, const MetricSpec& m);

// Size of a greedy r-net of A under closed r-balls: an upper bound for the
// covering number N(A,r). Points are scanned in lexicographic order.
int covering_number(std::vector<Point> pts, const Rat& r, const MetricSpec& m);

// Same point set viewed in d^theta: nominal radius becomes radius^theta.
Ball snowflake(const Ball& b, const Rat& theta);

}  // namespace confdim
