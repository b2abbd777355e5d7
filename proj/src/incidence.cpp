#include "confdim/incidence.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <set>
#include <sstream>

#include "confdim/grid.hpp"

namespace confdim {

namespace {

// Integer view of a cover whose coordinates and radii share a modest common
// denominator; lets intersection tests run in 128-bit integers.
struct ExactLattice {
  bool ok = false;
  long long den = 1;
  std::vector<std::array<long long, 3>> num;
  std::vector<long long> rad;
  int dim = 2;

  bool intersect(std::size_t i, std::size_t j) const {
    unsigned __int128 s = 0;
    for (int d = 0; d < dim; ++d) {
      long long diff = num[i][d] - num[j][d];
      s += (unsigned __int128)(__int128)diff * (__int128)diff;
    }
    long long rsum = rad[i] + rad[j];
    return s < (unsigned __int128)(__int128)rsum * (__int128)rsum;
  }
};

ExactLattice build_lattice(const CoverApproximation& c) {
  ExactLattice lat;
  if (c.balls.empty()) return lat;
  lat.dim = int(c.balls[0].center.dim());
  Int D = 1;
  auto fold = [&](const Rat& r) {
    Int d = rat_den(r);
    D = boost::multiprecision::lcm(D, d);
    return D <= Int(1) << 31;
  };
  for (const auto& b : c.balls) {
    for (int d = 0; d < lat.dim; ++d)
      if (!fold(b.center.coords[d])) return lat;
    if (!fold(b.base_radius)) return lat;
  }
  lat.den = D.template convert_to<long long>();
  lat.num.resize(c.balls.size());
  lat.rad.resize(c.balls.size());
  for (std::size_t i = 0; i < c.balls.size(); ++i) {
    for (int d = 0; d < lat.dim; ++d) {
      Rat scaled = c.balls[i].center.coords[d] * lat.den;
      lat.num[i][d] = rat_num(scaled).template convert_to<long long>();
    }
    Rat scaled = c.balls[i].base_radius * lat.den;
    lat.rad[i] = rat_num(scaled).template convert_to<long long>();
  }
  lat.ok = true;
  return lat;
}

}  // namespace

std::size_t IncidenceGraph::edge_count() const {
  std::size_t s = 0;
  for (const auto& a : adj) s += a.size();
  return s / 2;
}

bool IncidenceGraph::connected() const {
  if (adj.empty()) return true;
  std::vector<char> seen(adj.size(), 0);
  std::deque<int> q{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!q.empty()) {
    int u = q.front();
    q.pop_front();
    for (int v : adj[u])
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        q.push_back(v);
      }
  }
  return reached == adj.size();
}

IncidenceGraph build_incidence(const CoverApproximation& c) {
  if (c.balls.empty()) throw std::invalid_argument("incidence graph of an empty cover");
  IncidenceGraph g;
  g.adj.resize(c.balls.size());
  double maxr = to_double(c.max_radius());
  CenterGrid grid;
  grid.build(c.balls, std::max(maxr, 1e-9));
  ExactLattice lat = build_lattice(c);
  for (std::size_t i = 0; i < c.balls.size(); ++i) {
    const Ball& a = c.balls[i];
    double ra = to_double(a.base_radius);
    grid.for_near_point(a.center, ra + maxr + 1e-12, [&](int j) {
      if (std::size_t(j) <= i) return;
      bool hit;
      if (lat.ok) {
        hit = lat.intersect(i, j);
      } else {
        hit = balls_intersect(a, c.balls[j], Norm::euclidean);
      }
      if (hit) {
        g.adj[i].push_back(int(j));
        g.adj[j].push_back(int(i));
      }
    });
  }
  for (auto& list : g.adj) std::sort(list.begin(), list.end());
  return g;
}

bool ConnectionProblem::feasible_path_exists() const {
  if (trivially_infeasible || source.empty() || target.empty()) return false;
  std::vector<char> is_target(graph->adj.size(), 0);
  for (int t : target) is_target[t] = 1;
  std::vector<char> seen(graph->adj.size(), 0);
  std::deque<int> q;
  for (int s : source) {
    seen[s] = 1;
    q.push_back(s);
  }
  while (!q.empty()) {
    int u = q.front();
    q.pop_front();
    if (is_target[u]) return true;
    for (int v : graph->adj[u])
      if (!seen[v]) {
        seen[v] = 1;
        q.push_back(v);
      }
  }
  return false;
}

ConnectionProblem kl_problem(std::shared_ptr<const CoverApproximation> cover, const Ball& b,
                             const Rat& L) {
  auto graph = std::make_shared<IncidenceGraph>(build_incidence(*cover));
  return kl_problem(std::move(cover), std::move(graph), b, L);
}

ConnectionProblem kl_problem(std::shared_ptr<const CoverApproximation> cover,
                             std::shared_ptr<const IncidenceGraph> graph, const Ball& b,
                             const Rat& L) {
  if (L <= 1) throw std::invalid_argument("annulus inflation must satisfy L > 1");
  ConnectionProblem p;
  p.cover = std::move(cover);
  p.graph = std::move(graph);
  p.b = b;
  p.L = L;
  const CoverApproximation& c = *p.cover;
  Ball lb = b.inflate(L);

  double zb[3] = {0, 0, 0};
  for (std::size_t d = 0; d < b.center.dim(); ++d) zb[d] = to_double(b.center.coords[d]);
  double rb = to_double(b.base_radius);
  double rlb = to_double(lb.base_radius);
  const double margin = 1e-9;

  for (std::size_t i = 0; i < c.balls.size(); ++i) {
    const Ball& u = c.balls[i];
    double du = 0;
    for (std::size_t d = 0; d < u.center.dim(); ++d) {
      double x = to_double(u.center.coords[d]) - zb[d];
      du += x * x;
    }
    du = std::sqrt(du);
    double ru = to_double(u.base_radius);

    // source: the closure of U meets the closure of B (touching counts)
    bool src;
    if (du < rb + ru - margin)
      src = true;
    else if (du > rb + ru + margin)
      src = false;
    else
      src = dist_le(u.center, b.center, u.base_radius + b.base_radius, Norm::euclidean);
    if (src) p.source.push_back(int(i));

    // target: the closure of U meets the attractor proxy outside the open LB
    // net-cover balls are centered at cell centers with radius >= cell side,
    // so they always contain proxy points: fully-outside ones need no descent
    bool net_ball = c.level >= 0 && c.lambda >= 1;
    bool tgt;
    if (du + ru < rlb - margin) {
      tgt = false;  // U inside LB
    } else if (du - ru > rlb + margin) {
      tgt = net_ball || !c.ifs ? true : proxy_point_in_diff(c, u, lb, true).has_value();
    } else {
      tgt = c.ifs ? proxy_point_in_diff(c, u, lb, true).has_value()
                  : !ball_contained(u, lb, Norm::euclidean);
    }
    if (tgt) p.target.push_back(int(i));
  }

  p.trivially_infeasible = p.source.empty() || p.target.empty();
  std::vector<int> inter;
  std::set_intersection(p.source.begin(), p.source.end(), p.target.begin(), p.target.end(),
                        std::back_inserter(inter));
  p.ill_posed = !inter.empty();
  return p;
}

bool ConstraintSet::has_empty() const {
  for (const auto& s : sets)
    if (s.empty()) return true;
  return false;
}

std::vector<int> trace_curve(const PolyCurve& curve, const CoverApproximation& c) {
  std::vector<int> out;
  if (c.balls.empty()) return out;
  double maxr = to_double(c.max_radius());
  CenterGrid grid;
  grid.build(c.balls, std::max(maxr, 1e-9));
  std::set<int> hit;
  for (std::size_t s = 0; s + 1 < curve.vertices.size(); ++s) {
    const Point& a = curve.vertices[s];
    const Point& b = curve.vertices[s + 1];
    double ax[3] = {0, 0, 0}, bx[3] = {0, 0, 0};
    for (std::size_t d = 0; d < a.dim(); ++d) {
      ax[d] = to_double(a.coords[d]);
      bx[d] = to_double(b.coords[d]);
    }
    double len = 0;
    for (std::size_t d = 0; d < a.dim(); ++d) len += (bx[d] - ax[d]) * (bx[d] - ax[d]);
    len = std::sqrt(len);
    int steps = std::max(1, int(std::ceil(len / std::max(maxr, 1e-9))) * 2);
    std::set<int> cand;
    for (int t = 0; t <= steps; ++t) {
      double x[3];
      for (std::size_t d = 0; d < a.dim(); ++d)
        x[d] = ax[d] + (bx[d] - ax[d]) * (double(t) / steps);
      grid.for_near(x, 1.5 * maxr, [&](int j) { cand.insert(j); });
    }
    for (int j : cand) {
      if (hit.count(j)) continue;
      const Ball& ball = c.balls[j];
      double dist = segment_point_dist(a, b, ball.center, Norm::euclidean);
      if (dist < to_double(ball.base_radius) - 1e-12) hit.insert(j);
    }
  }
  out.assign(hit.begin(), hit.end());
  return out;
}

ConstraintSet trace_constraints(const std::vector<PolyCurve>& curves,
                                const CoverApproximation& c) {
  ConstraintSet cs;
  cs.provenance = ConstraintSet::Provenance::curve_traces;
  cs.vertex_count = c.balls.size();
  for (const auto& curve : curves) cs.sets.push_back(trace_curve(curve, c));
  return cs;
}

namespace {

// rational point on the center segment, guaranteed inside both open balls
Point lens_fallback_point(const Ball& u, const Ball& v) {
  Point p;
  std::size_t n = u.center.dim();
  p.coords.resize(n);
  Rat t = u.base_radius / (u.base_radius + v.base_radius);
  for (std::size_t i = 0; i < n; ++i)
    p.coords[i] = u.center.coords[i] + t * (v.center.coords[i] - u.center.coords[i]);
  return p;
}

std::optional<Point> lens_witness(const CoverApproximation& c, const Ball& u, const Ball& v) {
  if (!c.ifs || c.proxy_level < 0) return std::nullopt;
  const IfsSystem& ifs = *c.ifs;
  std::optional<Point> best;
  std::function<void(const Cell&)> walk = [&](const Cell& cell) {
    // prune cells whose box misses either ball
    Int den = 1;
    for (int i = 0; i < cell.level; ++i) den *= ifs.base;
    Rat closest_u = 0, closest_v = 0;
    for (int i = 0; i < ifs.dimension; ++i) {
      Rat lo(cell.corner[i], den), hi(cell.corner[i] + 1, den);
      for (const Ball* b : {&u, &v}) {
        Rat x = b->center.coords[i];
        Rat d = x < lo ? lo - x : (x > hi ? x - hi : Rat(0));
        (b == &u ? closest_u : closest_v) += d * d;
      }
    }
    if (closest_u >= u.base_radius * u.base_radius) return;
    if (closest_v >= v.base_radius * v.base_radius) return;
    if (cell.level >= c.proxy_level) {
      Point p = cell.center(ifs);
      if (ball_contains_point(u, p, Norm::euclidean) &&
          ball_contains_point(v, p, Norm::euclidean)) {
        if (!best || p < *best) best = std::move(p);
      }
      return;
    }
    Cell child;
    child.level = cell.level + 1;
    for (const auto& off : ifs.kept) {
      for (int i = 0; i < 3; ++i) child.corner[i] = cell.corner[i] * ifs.base + off[i];
      walk(child);
    }
  };
  Cell root{0, {0, 0, 0}};
  walk(root);
  return best;
}

Point overlap_point(const CoverApproximation& c, int ui, int vi) {
  auto w = lens_witness(c, c.balls[ui], c.balls[vi]);
  if (w) return *w;
  return lens_fallback_point(c.balls[ui], c.balls[vi]);
}

void push_vertex(std::vector<Point>& pts, Point p) {
  if (pts.empty() || !(pts.back() == p)) pts.push_back(std::move(p));
}

}  // namespace

PolyCurve chain_to_curve(const std::vector<int>& chain, const CoverApproximation& c) {
  if (chain.empty()) throw std::invalid_argument("empty chain");
  if (chain.size() == 1) {
    const Ball& b = c.balls[chain[0]];
    Point other = b.center;
    other.coords[0] += b.base_radius / 2;
    return PolyCurve({b.center, other});
  }
  std::vector<Point> pts;
  push_vertex(pts, c.balls[chain[0]].center);
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    if (chain[i] == chain[i + 1] ||
        !balls_intersect(c.balls[chain[i]], c.balls[chain[i + 1]], Norm::euclidean))
      throw std::invalid_argument("chain vertices " + std::to_string(chain[i]) + "," +
                                  std::to_string(chain[i + 1]) + " are not adjacent");
    push_vertex(pts, overlap_point(c, chain[i], chain[i + 1]));
    push_vertex(pts, c.balls[chain[i + 1]].center);
  }
  if (pts.size() < 2) pts.push_back(lens_fallback_point(c.balls[chain[0]], c.balls[chain[1]]));
  return PolyCurve(std::move(pts));
}

CurveFamilySpec witness_family(const ConnectionProblem& problem, int count) {
  CurveFamilySpec fam;
  {
    std::ostringstream os;
    os << "annulus(L=" << rat_to_string(problem.L) << ")";
    fam.generator = os.str();
  }
  if (problem.trivially_infeasible || count <= 0) return fam;
  const CoverApproximation& c = *problem.cover;
  const IncidenceGraph& g = *problem.graph;
  Ball lb = problem.b.inflate(problem.L);

  std::vector<char> is_source(g.adj.size(), 0), is_target(g.adj.size(), 0);
  for (int s : problem.source) is_source[s] = 1;
  for (int t : problem.target) is_target[t] = 1;
  std::vector<char> blocked(g.adj.size(), 0);

  for (int iter = 0; iter < count; ++iter) {
    // BFS shortest chain avoiding interior vertices of previous chains
    std::vector<int> prev(g.adj.size(), -2);
    std::deque<int> q;
    for (int s : problem.source)
      if (!blocked[s]) {
        prev[s] = -1;
        q.push_back(s);
      }
    int reached = -1;
    while (!q.empty() && reached < 0) {
      int u = q.front();
      q.pop_front();
      if (is_target[u]) {
        reached = u;
        break;
      }
      for (int v : g.adj[u])
        if (prev[v] == -2 && !blocked[v]) {
          prev[v] = u;
          q.push_back(v);
        }
    }
    if (reached < 0) break;
    std::vector<int> chain;
    for (int v = reached; v != -1; v = prev[v]) chain.push_back(v);
    std::reverse(chain.begin(), chain.end());
    for (int v : chain) blocked[v] = 1;

    PolyCurve body = chain_to_curve(chain, c);
    std::vector<Point> pts;
    // enter through B: witness point in U_1 ∩ B
    {
      auto w = lens_witness(c, c.balls[chain.front()], problem.b);
      Point entry = w ? *w : lens_fallback_point(c.balls[chain.front()], problem.b);
      push_vertex(pts, entry);
    }
    for (auto& p : body.vertices) push_vertex(pts, std::move(p));
    // leave through the proxy outside LB
    {
      auto w = proxy_point_in_diff(c, c.balls[chain.back()], lb, true);
      if (w) push_vertex(pts, *w);
    }
    if (pts.size() < 2) continue;
    fam.curves.emplace_back(std::move(pts));
  }
  return fam;
}

std::string serialize_curves(const CurveFamilySpec& fam) {
  std::ostringstream os;
  os << "confdim-curves v1\n";
  os << "generator " << (fam.generator.empty() ? "-" : fam.generator) << "\n";
  os << "min_diameter " << fam.min_diameter << "\n";
  os << "curves " << fam.curves.size() << "\n";
  for (const auto& c : fam.curves) {
    os << c.vertices.size();
    for (const auto& v : c.vertices)
      for (std::size_t i = 0; i < v.dim(); ++i) os << " " << rat_to_string(v.coords[i]);
    os << " dim " << c.vertices[0].dim() << "\n";
  }
  return os.str();
}

CurveFamilySpec deserialize_curves(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line != "confdim-curves v1")
    throw std::runtime_error("curve file: bad header");
  CurveFamilySpec fam;
  std::getline(is, line);
  if (line.rfind("generator ", 0) != 0) throw std::runtime_error("curve file: expected generator");
  fam.generator = line.substr(10);
  if (fam.generator == "-") fam.generator.clear();
  std::getline(is, line);
  fam.min_diameter = std::stod(line.substr(line.find(' ') + 1));
  std::getline(is, line);
  std::size_t n = std::stoul(line.substr(line.find(' ') + 1));
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::getline(is, line)) throw std::runtime_error("curve file truncated");
    std::istringstream ls(line);
    std::size_t verts;
    ls >> verts;
    std::vector<std::string> toks;
    std::string tok;
    while (ls >> tok) toks.push_back(tok);
    if (toks.size() < 3 || toks[toks.size() - 2] != "dim")
      throw std::runtime_error("curve file: bad curve line");
    int dim = std::stoi(toks.back());
    toks.resize(toks.size() - 2);
    if (toks.size() != verts * dim) throw std::runtime_error("curve file: wrong vertex count");
    std::vector<Point> pts(verts);
    for (std::size_t v = 0; v < verts; ++v) {
      pts[v].coords.resize(dim);
      for (int d = 0; d < dim; ++d) pts[v].coords[d] = rat_parse(toks[v * dim + d]);
    }
    fam.curves.emplace_back(std::move(pts));
  }
  return fam;
}

}  // namespace confdim
