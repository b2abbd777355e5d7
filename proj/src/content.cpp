#include "confdim/content.hpp"

#include <cmath>
#include <stdexcept>

namespace confdim {

namespace {

struct Seg {
  Point a, b;  // may coincide after clipping to a cell corner
};

// exact parametric clip of [a,b] to the box [lo,hi]^n (rational corners)
bool clip_segment(const Point& a, const Point& b, const std::vector<Rat>& lo,
                  const std::vector<Rat>& hi, Seg& out) {
  Rat t0 = 0, t1 = 1;
  std::size_t n = a.dim();
  for (std::size_t i = 0; i < n; ++i) {
    Rat d = b.coords[i] - a.coords[i];
    Rat p0 = a.coords[i];
    if (d == 0) {
      if (p0 < lo[i] || p0 > hi[i]) return false;
      continue;
    }
    Rat ta = (lo[i] - p0) / d, tb = (hi[i] - p0) / d;
    if (ta > tb) std::swap(ta, tb);
    if (ta > t0) t0 = ta;
    if (tb < t1) t1 = tb;
    if (t0 > t1) return false;
  }
  auto at = [&](const Rat& t) {
    Point p;
    p.coords.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      p.coords[i] = a.coords[i] + t * (b.coords[i] - a.coords[i]);
    return p;
  };
  out.a = at(t0);
  out.b = at(t1);
  return true;
}

// smallest rational >= sqrt(v), derived from the double upper estimate
Rat rat_sqrt_upper(const Rat& v) {
  if (v == 0) return Rat(0);
  auto exact = rat_nth_root_exact(v, 2);
  if (exact) return *exact;
  Rat r = rat_from_double(std::sqrt(to_double(v)));
  if (r <= 0) r = Rat(1, Int(1) << 120);
  // nudge upward until r*r >= v
  while (r * r < v) r += r / 1048576;
  return r;
}

struct Builder {
  const MetricSpec* m;
  double s = 0;
  Rat delta_base;  // refine until enclosing-ball diameter (base norm) <= this
  int max_depth = 48;
  std::vector<Ball> out;

  void emit(const std::vector<Seg>& pieces) {
    std::size_t n = pieces[0].a.dim();
    std::vector<Rat> lo(n), hi(n);
    for (std::size_t i = 0; i < n; ++i) {
      lo[i] = pieces[0].a.coords[i];
      hi[i] = pieces[0].a.coords[i];
    }
    for (const auto& sg : pieces)
      for (const Point* p : {&sg.a, &sg.b})
        for (std::size_t i = 0; i < n; ++i) {
          if (p->coords[i] < lo[i]) lo[i] = p->coords[i];
          if (p->coords[i] > hi[i]) hi[i] = p->coords[i];
        }
    Point c;
    c.coords.resize(n);
    Rat diag2 = 0, maxside = 0;
    for (std::size_t i = 0; i < n; ++i) {
      c.coords[i] = (lo[i] + hi[i]) / 2;
      Rat side = hi[i] - lo[i];
      diag2 += side * side;
      if (side > maxside) maxside = side;
    }
    Rat radius = m->norm == Norm::sup ? maxside / 2 : rat_sqrt_upper(diag2) / 2;
    if (radius == 0) radius = delta_base / 1000000;  // vanishing piece, keep a tiny ball
    out.emplace_back(c, radius, m->snowflake_theta);
  }

  Rat ball_diam_base(const std::vector<Seg>& pieces) {
    std::size_t n = pieces[0].a.dim();
    std::vector<Rat> lo(n), hi(n);
    for (std::size_t i = 0; i < n; ++i) lo[i] = hi[i] = pieces[0].a.coords[i];
    for (const auto& sg : pieces)
      for (const Point* p : {&sg.a, &sg.b})
        for (std::size_t i = 0; i < n; ++i) {
          if (p->coords[i] < lo[i]) lo[i] = p->coords[i];
          if (p->coords[i] > hi[i]) hi[i] = p->coords[i];
        }
    Rat diag2 = 0, maxside = 0;
    for (std::size_t i = 0; i < n; ++i) {
      Rat side = hi[i] - lo[i];
      diag2 += side * side;
      if (side > maxside) maxside = side;
    }
    return m->norm == Norm::sup ? maxside : rat_sqrt_upper(diag2);
  }

  void refine(const std::vector<Rat>& lo, const std::vector<Rat>& hi,
              const std::vector<Seg>& pieces, int depth) {
    if (pieces.empty()) return;
    if (ball_diam_base(pieces) <= delta_base || depth >= max_depth) {
      emit(pieces);
      return;
    }
    std::size_t n = lo.size();
    std::size_t children = std::size_t(1) << n;
    for (std::size_t mask = 0; mask < children; ++mask) {
      std::vector<Rat> clo(n), chi(n);
      for (std::size_t i = 0; i < n; ++i) {
        Rat mid = (lo[i] + hi[i]) / 2;
        if (mask & (std::size_t(1) << i)) {
          clo[i] = mid;
          chi[i] = hi[i];
        } else {
          clo[i] = lo[i];
          chi[i] = mid;
        }
      }
      std::vector<Seg> sub;
      for (const auto& sg : pieces) {
        Seg piece;
        if (clip_segment(sg.a, sg.b, clo, chi, piece)) sub.push_back(piece);
      }
      refine(clo, chi, sub, depth + 1);
    }
  }
};

}  // namespace

void ContentEstimate::check() const {
  double sum = 0;
  for (const auto& b : cover) {
    double diam = std::pow(2 * to_double(b.base_radius), to_double(b.metric_exponent));
    if (diam > scale * (1 + 1e-9)) throw std::logic_error("cover ball exceeds content scale");
    sum += std::pow(diam, exponent);
  }
  if (std::fabs(sum - value) > 1e-9 * std::max(1.0, value))
    throw std::logic_error("content value does not match stored cover");
}

ContentEstimate hausdorff_content_upper(const std::vector<PolyCurve>& curves, double s,
                                        double delta, const MetricSpec& m) {
  m.validate();
  if (curves.empty()) throw std::invalid_argument("content of empty curve set");
  if (s <= 0) throw std::invalid_argument("content exponent must be positive");
  std::size_t n = curves[0].vertices[0].dim();
  double domain_diam = m.norm == Norm::sup ? 1.0 : std::sqrt(double(n));
  domain_diam = std::pow(domain_diam, to_double(m.snowflake_theta));
  if (delta <= 0 || delta > domain_diam / 2 + 1e-15)
    throw std::invalid_argument("content scale outside (0, diam/2]");

  Builder b;
  b.m = &m;
  b.s = s;
  // delta is a diameter bound in d^theta; pull back to the base norm
  double theta = to_double(m.snowflake_theta);
  double delta_base_d = theta == 1.0 ? delta : std::pow(delta, 1.0 / theta);
  b.delta_base = rat_from_double(delta_base_d);
  std::vector<Rat> lo(n, Rat(0)), hi(n, Rat(1));
  std::vector<Seg> pieces;
  for (const auto& c : curves)
    for (std::size_t i = 0; i + 1 < c.vertices.size(); ++i) {
      Seg sg;
      if (clip_segment(c.vertices[i], c.vertices[i + 1], lo, hi, sg)) pieces.push_back(sg);
    }
  if (pieces.empty()) throw std::invalid_argument("curves lie outside the unit cube");
  b.refine(lo, hi, pieces, 0);

  ContentEstimate est;
  est.exponent = s;
  est.scale = delta;
  est.cover = std::move(b.out);
  double sum = 0;
  for (const auto& ball : est.cover)
    sum += std::pow(std::pow(2 * to_double(ball.base_radius), theta), s);
  est.value = sum;
  return est;
}

}  // namespace confdim
