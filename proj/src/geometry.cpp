#include "confdim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace confdim {

namespace {
constexpr double kTol = 1e-12;
}

// ---------------------------------------------------------------------------
// rational utilities

std::string rat_to_string(const Rat& r) {
  Int n = rat_num(r), d = rat_den(r);
  if (d == 1) return n.str();
  return n.str() + "/" + d.str();
}

namespace {

// strict base-10 integer parse; cpp_int's string constructor would read a
// leading zero as octal
Int parse_decimal_int(std::string s) {
  if (s.empty()) throw std::invalid_argument("empty integer literal");
  bool neg = s[0] == '-';
  if (neg) s.erase(s.begin());
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    throw std::invalid_argument("bad integer literal: " + s);
  Int v = 0;
  for (char c : s) v = v * 10 + (c - '0');
  return neg ? -v : v;
}

}  // namespace

Rat rat_parse(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    Int n = parse_decimal_int(s.substr(0, slash));
    Int d = parse_decimal_int(s.substr(slash + 1));
    if (d == 0) throw std::invalid_argument("zero denominator: " + s);
    return Rat(n, d);
  }
  auto dot = s.find('.');
  if (dot == std::string::npos) return Rat(parse_decimal_int(s));
  std::string head = s.substr(0, dot), tail = s.substr(dot + 1);
  bool neg = !head.empty() && head[0] == '-';
  if (head == "-" || head.empty()) head = "0";
  Int ip = parse_decimal_int(head);
  if (ip < 0) ip = -ip;
  Int frac = tail.empty() ? Int(0) : parse_decimal_int(tail);
  Int den = 1;
  for (std::size_t i = 0; i < tail.size(); ++i) den *= 10;
  Rat v = Rat(ip) + Rat(frac, den);
  return neg ? -v : v;
}

Rat rat_from_double(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("cannot convert non-finite double");
  if (v == 0) return Rat(0);
  int exp = 0;
  double mant = std::frexp(v, &exp);  // v = mant * 2^exp, |mant| in [0.5, 1)
  long long m = (long long)std::ldexp(mant, 53);
  exp -= 53;
  Rat r(m);
  if (exp > 0)
    r *= Rat(Int(1) << exp);
  else if (exp < 0)
    r /= Rat(Int(1) << -exp);
  return r;
}

std::optional<Int> int_nth_root_exact(const Int& v, unsigned n) {
  if (v < 0) return std::nullopt;
  if (n == 0) return std::nullopt;
  if (n == 1 || v == 0 || v == 1) return v;
  // Newton bootstrap from a double estimate, then adjust.
  double est = std::pow(v.template convert_to<double>(), 1.0 / n);
  Int r(static_cast<long long>(est));
  for (Int cand = r > 2 ? r - 2 : Int(0); cand <= r + 2; ++cand) {
    if (cand < 0) continue;
    Int p = 1;
    for (unsigned i = 0; i < n; ++i) p *= cand;
    if (p == v) return cand;
  }
  return std::nullopt;
}

std::optional<Rat> rat_nth_root_exact(const Rat& v, unsigned n) {
  auto rn = int_nth_root_exact(rat_num(v), n);
  if (!rn) return std::nullopt;
  auto rd = int_nth_root_exact(rat_den(v), n);
  if (!rd) return std::nullopt;
  return Rat(*rn, *rd);
}

std::optional<Rat> rat_pow_exact(const Rat& base, const Rat& exponent) {
  if (base <= 0) {
    if (base == 0 && exponent > 0) return Rat(0);
    return std::nullopt;
  }
  Int en = rat_num(exponent), ed = rat_den(exponent);
  bool neg = en < 0;
  if (neg) en = -en;
  if (ed > std::numeric_limits<unsigned>::max()) return std::nullopt;
  auto root = rat_nth_root_exact(base, ed.template convert_to<unsigned>());
  if (!root) return std::nullopt;
  Rat acc(1);
  Rat b = *root;
  Int k = en;
  while (k > 0) {
    if ((k & 1) != 0) acc *= b;
    b *= b;
    k >>= 1;
  }
  if (neg) acc = Rat(1) / acc;
  return acc;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// ---------------------------------------------------------------------------
// points and metrics

void MetricSpec::validate() const {
  if (snowflake_theta <= 0 || snowflake_theta > 1)
    throw std::invalid_argument("snowflake exponent must lie in (0,1]");
}

bool Point::operator<(const Point& o) const {
  return std::lexicographical_compare(coords.begin(), coords.end(), o.coords.begin(),
                                      o.coords.end());
}

static void check_dims(const Point& a, const Point& b) {
  if (a.dim() != b.dim() || a.dim() == 0)
    throw std::invalid_argument("dimension mismatch between points");
}

Rat dist2(const Point& a, const Point& b) {
  check_dims(a, b);
  Rat s = 0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    Rat d = a.coords[i] - b.coords[i];
    s += d * d;
  }
  return s;
}

Rat sup_dist(const Point& a, const Point& b) {
  check_dims(a, b);
  Rat best = 0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    Rat d = a.coords[i] - b.coords[i];
    if (d < 0) d = -d;
    if (d > best) best = d;
  }
  return best;
}

double distance(const Point& a, const Point& b, const MetricSpec& m) {
  m.validate();
  double base;
  if (m.norm == Norm::euclidean)
    base = std::sqrt(to_double(dist2(a, b)));
  else
    base = to_double(sup_dist(a, b));
  if (m.snowflake_theta == 1) return base;
  return std::pow(base, to_double(m.snowflake_theta));
}

bool dist_lt(const Point& a, const Point& b, const Rat& bound, Norm n) {
  if (bound <= 0) return false;
  if (n == Norm::sup) return sup_dist(a, b) < bound;
  return dist2(a, b) < bound * bound;
}

bool dist_le(const Point& a, const Point& b, const Rat& bound, Norm n) {
  if (bound < 0) return false;
  if (n == Norm::sup) return sup_dist(a, b) <= bound;
  return dist2(a, b) <= bound * bound;
}

bool dist_ge(const Point& a, const Point& b, const Rat& bound, Norm n) {
  return !dist_lt(a, b, bound, n);
}

// ---------------------------------------------------------------------------
// balls

void Ball::check() const {
  if (base_radius <= 0) throw std::invalid_argument("ball radius must be positive");
  if (metric_exponent <= 0 || metric_exponent > 1)
    throw std::invalid_argument("metric exponent must lie in (0,1]");
}

double Ball::radius() const {
  if (metric_exponent == 1) return to_double(base_radius);
  return std::pow(to_double(base_radius), to_double(metric_exponent));
}

std::optional<Rat> Ball::radius_exact() const {
  return rat_pow_exact(base_radius, metric_exponent);
}

Ball Ball::inflate(const Rat& c) const {
  if (c <= 0) throw std::invalid_argument("inflation factor must be positive");
  if (metric_exponent == 1) return Ball(center, base_radius * c, metric_exponent);
  // nominal' = c * base^theta  =>  base' = c^(1/theta) * base
  auto f = rat_pow_exact(c, Rat(1) / metric_exponent);
  if (!f) throw std::domain_error("inflation not exactly representable under snowflake metric");
  return Ball(center, base_radius * *f, metric_exponent);
}

Ball Ball::inflate_base(const Rat& c) const {
  if (c <= 0) throw std::invalid_argument("inflation factor must be positive");
  return Ball(center, base_radius * c, metric_exponent);
}

bool ball_contains_point(const Ball& b, const Point& p, Norm n) {
  return dist_lt(b.center, p, b.base_radius, n);
}

bool closed_ball_contains_point(const Ball& b, const Point& p, Norm n) {
  return dist_le(b.center, p, b.base_radius, n);
}

bool balls_intersect(const Ball& a, const Ball& b, Norm n) {
  return dist_lt(a.center, b.center, a.base_radius + b.base_radius, n);
}

bool balls_disjoint(const Ball& a, const Ball& b, Norm n) { return !balls_intersect(a, b, n); }

bool ball_contained(const Ball& inner, const Ball& outer, Norm n) {
  Rat slack = outer.base_radius - inner.base_radius;
  if (slack < 0) return false;
  return dist_le(inner.center, outer.center, slack, n);
}

// ---------------------------------------------------------------------------
// curves

PolyCurve::PolyCurve(std::vector<Point> v) : vertices(std::move(v)) {
  if (vertices.size() < 2) throw std::invalid_argument("curve needs at least two vertices");
  for (std::size_t i = 1; i < vertices.size(); ++i) {
    if (vertices[i] == vertices[i - 1])
      throw std::invalid_argument("consecutive curve vertices must be distinct");
    if (vertices[i].dim() != vertices[0].dim())
      throw std::invalid_argument("curve vertices of mixed dimension");
  }
}

double PolyCurve::diameter(const MetricSpec& m) const {
  // vertices realize the diameter of a polyline in both norms
  double best = 0;
  for (std::size_t i = 0; i < vertices.size(); ++i)
    for (std::size_t j = i + 1; j < vertices.size(); ++j)
      best = std::max(best, distance(vertices[i], vertices[j], m));
  return best;
}

static std::vector<double> pt(const Point& p) {
  std::vector<double> v(p.dim());
  for (std::size_t i = 0; i < p.dim(); ++i) v[i] = to_double(p.coords[i]);
  return v;
}

static double norm_of(const std::vector<double>& v, Norm n) {
  if (n == Norm::sup) {
    double b = 0;
    for (double x : v) b = std::max(b, std::fabs(x));
    return b;
  }
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double segment_point_dist(const Point& a, const Point& b, const Point& p, Norm n) {
  auto A = pt(a), B = pt(b), P = pt(p);
  std::size_t d = A.size();
  std::vector<double> ab(d), ap(d);
  double dot = 0, len2 = 0;
  for (std::size_t i = 0; i < d; ++i) {
    ab[i] = B[i] - A[i];
    ap[i] = P[i] - A[i];
    dot += ab[i] * ap[i];
    len2 += ab[i] * ab[i];
  }
  double t = len2 > 0 ? std::clamp(dot / len2, 0.0, 1.0) : 0.0;
  if (n == Norm::sup) {
    // the restriction of the sup distance to the segment is piecewise convex in t;
    // ternary search is robust at 1e-12 scale
    auto f = [&](double s) {
      double best = 0;
      for (std::size_t i = 0; i < d; ++i) best = std::max(best, std::fabs(A[i] + s * ab[i] - P[i]));
      return best;
    };
    double lo = 0, hi = 1;
    for (int it = 0; it < 200; ++it) {
      double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
      if (f(m1) <= f(m2))
        hi = m2;
      else
        lo = m1;
    }
    return std::min({f(lo), f(0), f(1), f(t)});
  }
  std::vector<double> diff(d);
  for (std::size_t i = 0; i < d; ++i) diff[i] = ap[i] - t * ab[i];
  return norm_of(diff, n);
}

double segment_segment_dist(const Point& a, const Point& b, const Point& c, const Point& d,
                            Norm n) {
  if (n == Norm::sup) {
    double best = std::numeric_limits<double>::infinity();
    // dense parameter sweep refined by endpoint cases; adequate at 1e-12 for
    // the short segments used here
    auto A = pt(a), B = pt(b), C = pt(c), D = pt(d);
    std::size_t dim = A.size();
    auto val = [&](double t, double s) {
      double m = 0;
      for (std::size_t i = 0; i < dim; ++i) {
        double x = A[i] + t * (B[i] - A[i]) - (C[i] + s * (D[i] - C[i]));
        m = std::max(m, std::fabs(x));
      }
      return m;
    };
    const int grid = 64;
    double bt = 0, bs = 0;
    for (int i = 0; i <= grid; ++i)
      for (int j = 0; j <= grid; ++j) {
        double v = val(i / double(grid), j / double(grid));
        if (v < best) {
          best = v;
          bt = i / double(grid);
          bs = j / double(grid);
        }
      }
    double step = 1.0 / grid;
    for (int it = 0; it < 60; ++it) {
      step *= 0.5;
      for (int di = -1; di <= 1; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          double t = std::clamp(bt + di * step, 0.0, 1.0);
          double s = std::clamp(bs + dj * step, 0.0, 1.0);
          double v = val(t, s);
          if (v < best) {
            best = v;
            bt = t;
            bs = s;
          }
        }
    }
    return best;
  }
  // euclidean closed form (Ericson)
  auto A = pt(a), B = pt(b), C = pt(c), D = pt(d);
  std::size_t dim = A.size();
  std::vector<double> d1(dim), d2(dim), r(dim);
  double aa = 0, e = 0, f = 0, cdot = 0, bdot = 0;
  for (std::size_t i = 0; i < dim; ++i) {
    d1[i] = B[i] - A[i];
    d2[i] = D[i] - C[i];
    r[i] = A[i] - C[i];
    aa += d1[i] * d1[i];
    e += d2[i] * d2[i];
    f += d2[i] * r[i];
    cdot += d1[i] * r[i];
    bdot += d1[i] * d2[i];
  }
  double s, t;
  if (aa <= 0 && e <= 0) {
    s = t = 0;
  } else if (aa <= 0) {
    s = 0;
    t = std::clamp(f / e, 0.0, 1.0);
  } else if (e <= 0) {
    t = 0;
    s = std::clamp(-cdot / aa, 0.0, 1.0);
  } else {
    double denom = aa * e - bdot * bdot;
    s = denom > 0 ? std::clamp((bdot * f - cdot * e) / denom, 0.0, 1.0) : 0.0;
    t = (bdot * s + f) / e;
    if (t < 0) {
      t = 0;
      s = std::clamp(-cdot / aa, 0.0, 1.0);
    } else if (t > 1) {
      t = 1;
      s = std::clamp((bdot - cdot) / aa, 0.0, 1.0);
    }
  }
  double sum = 0;
  for (std::size_t i = 0; i < dim; ++i) {
    double x = A[i] + s * d1[i] - (C[i] + t * d2[i]);
    sum += x * x;
  }
  return std::sqrt(sum);
}

static int sign_of(const Rat& r) { return r > 0 ? 1 : (r < 0 ? -1 : 0); }

bool segments_intersect_exact_2d(const Point& a, const Point& b, const Point& c, const Point& d) {
  if (a.dim() != 2) return false;
  auto orient = [](const Point& p, const Point& q, const Point& r) {
    Rat v = (q.coords[0] - p.coords[0]) * (r.coords[1] - p.coords[1]) -
            (q.coords[1] - p.coords[1]) * (r.coords[0] - p.coords[0]);
    return sign_of(v);
  };
  auto on_seg = [](const Point& p, const Point& q, const Point& r) {
    return std::min(p.coords[0], q.coords[0]) <= r.coords[0] &&
           r.coords[0] <= std::max(p.coords[0], q.coords[0]) &&
           std::min(p.coords[1], q.coords[1]) <= r.coords[1] &&
           r.coords[1] <= std::max(p.coords[1], q.coords[1]);
  };
  int o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_seg(a, b, c)) return true;
  if (o2 == 0 && on_seg(a, b, d)) return true;
  if (o3 == 0 && on_seg(c, d, a)) return true;
  if (o4 == 0 && on_seg(c, d, b)) return true;
  return false;
}

bool curves_intersect(const PolyCurve& e, const PolyCurve& f) {
  bool planar = e.vertices[0].dim() == 2;
  for (std::size_t i = 0; i + 1 < e.vertices.size(); ++i)
    for (std::size_t j = 0; j + 1 < f.vertices.size(); ++j) {
      if (planar) {
        if (segments_intersect_exact_2d(e.vertices[i], e.vertices[i + 1], f.vertices[j],
                                        f.vertices[j + 1]))
          return true;
      } else {
        if (segment_segment_dist(e.vertices[i], e.vertices[i + 1], f.vertices[j],
                                 f.vertices[j + 1], Norm::euclidean) < kTol)
          return true;
      }
    }
  return false;
}

double curve_dist(const PolyCurve& e, const PolyCurve& f, const MetricSpec& m) {
  m.validate();
  if (curves_intersect(e, f)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < e.vertices.size(); ++i)
    for (std::size_t j = 0; j + 1 < f.vertices.size(); ++j)
      best = std::min(best, segment_segment_dist(e.vertices[i], e.vertices[i + 1], f.vertices[j],
                                                 f.vertices[j + 1], m.norm));
  if (m.snowflake_theta != 1) best = std::pow(best, to_double(m.snowflake_theta));
  return best;
}

bool ball_meets_curve(const Ball& b, const PolyCurve& c, Norm n) {
  double r = to_double(b.base_radius);
  for (std::size_t i = 0; i + 1 < c.vertices.size(); ++i) {
    if (segment_point_dist(c.vertices[i], c.vertices[i + 1], b.center, n) < r - kTol) return true;
  }
  // near-boundary cases: fall back to exact vertex tests
  for (const auto& v : c.vertices)
    if (ball_contains_point(b, v, n)) return true;
  for (std::size_t i = 0; i + 1 < c.vertices.size(); ++i)
    if (segment_point_dist(c.vertices[i], c.vertices[i + 1], b.center, n) < r + kTol) {
      // borderline within tolerance; count strict interior only
      if (segment_point_dist(c.vertices[i], c.vertices[i + 1], b.center, n) < r - 1e-15)
        return true;
    }
  return false;
}

double relative_distance(const PolyCurve& e, const PolyCurve& f, const MetricSpec& m) {
  m.validate();
  double de = e.diameter(m), df = f.diameter(m);
  if (de <= 0 || df <= 0) throw std::invalid_argument("degenerate continuum (zero diameter)");
  double gap = curve_dist(e, f, m);
  return gap / std::min(de, df);
}

int covering_number(std::vector<Point> pts, const Rat& r, const MetricSpec& m) {
  m.validate();
  if (pts.empty()) throw std::invalid_argument("covering number of empty set");
  if (r <= 0) throw std::invalid_argument("covering radius must be positive");
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::vector<const Point*> centers;
  if (m.snowflake_theta == 1) {
    for (const auto& p : pts) {
      bool covered = false;
      for (const Point* c : centers)
        if (dist_le(*c, p, r, m.norm)) {
          covered = true;
          break;
        }
      if (!covered) centers.push_back(&p);
    }
  } else {
    double rd = to_double(r);
    for (const auto& p : pts) {
      bool covered = false;
      for (const Point* c : centers)
        if (distance(*c, p, m) <= rd + kTol) {
          covered = true;
          break;
        }
      if (!covered) centers.push_back(&p);
    }
  }
  return static_cast<int>(centers.size());
}

Ball snowflake(const Ball& b, const Rat& theta) {
  if (theta <= 0 || theta > 1) throw std::invalid_argument("snowflake exponent outside (0,1]");
  if (b.metric_exponent != 1)
    throw std::invalid_argument("snowflake expects a ball of the base metric");
  return Ball(b.center, b.base_radius, theta);
}

}  // namespace confdim
