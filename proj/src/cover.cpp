#include "confdim/cover.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "confdim/grid.hpp"

namespace confdim {

namespace {

Int ipow(int b, int e) {
  Int r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

// exact box/ball predicates on [lo,hi] boxes with rational corners
struct RatBox {
  std::vector<Rat> lo, hi;
};

RatBox cell_box(const Cell& c, const IfsSystem& ifs) {
  RatBox box;
  Int den = ipow(ifs.base, c.level);
  box.lo.resize(ifs.dimension);
  box.hi.resize(ifs.dimension);
  for (int i = 0; i < ifs.dimension; ++i) {
    box.lo[i] = Rat(c.corner[i], den);
    box.hi[i] = Rat(c.corner[i] + 1, den);
  }
  return box;
}

Rat box_center_dist2(const RatBox& box, const Ball& b) {
  // squared distance from the center to the closest point of the box
  Rat d2 = 0;
  for (std::size_t i = 0; i < box.lo.size(); ++i) {
    Rat x = b.center.coords[i];
    if (x < box.lo[i])
      d2 += (box.lo[i] - x) * (box.lo[i] - x);
    else if (x > box.hi[i])
      d2 += (x - box.hi[i]) * (x - box.hi[i]);
  }
  return d2;
}

bool box_meets_open_ball(const RatBox& box, const Ball& b) {
  return box_center_dist2(box, b) < b.base_radius * b.base_radius;
}

bool box_meets_closed_ball(const RatBox& box, const Ball& b) {
  return box_center_dist2(box, b) <= b.base_radius * b.base_radius;
}

template <typename Pred>
bool all_corners(const RatBox& box, Pred&& pred) {
  std::size_t n = box.lo.size();
  for (std::size_t mask = 0; mask < (std::size_t(1) << n); ++mask) {
    Point corner;
    corner.coords.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      corner.coords[i] = (mask >> i) & 1 ? box.hi[i] : box.lo[i];
    if (!pred(corner)) return false;
  }
  return true;
}

bool box_inside_open_ball(const RatBox& box, const Ball& b) {
  return all_corners(box, [&](const Point& p) {
    return dist2(b.center, p) < b.base_radius * b.base_radius;
  });
}

}  // namespace

Rat CoverApproximation::max_radius() const {
  Rat r = 0;
  for (const auto& b : balls)
    if (b.base_radius > r) r = b.base_radius;
  return r;
}

Rat CoverApproximation::min_radius() const {
  if (balls.empty()) return 0;
  Rat r = balls[0].base_radius;
  for (const auto& b : balls)
    if (b.base_radius < r) r = b.base_radius;
  return r;
}

CoverApproximation net_cover(const IfsSystem& ifs, int k, const Rat& lambda) {
  ifs.validate();
  if (k < 1) throw std::invalid_argument("net cover needs level k >= 1");
  if (lambda < 1) throw std::invalid_argument("net inflation must satisfy lambda >= 1");
  CoverApproximation c;
  Rat r = lambda / ipow(ifs.base, k);
  c.balls.reserve(ifs.cells_at(k));
  for_each_cell(ifs, k, [&](const Cell& cell) { c.balls.emplace_back(cell.center(ifs), r); });
  c.kappa = 2 * lambda;
  c.level_r = r;
  for (int L : {1, 2, 4, 8}) c.locally_bounded_table[L] = 4;
  c.covers_space = true;
  c.ifs = ifs;
  c.level = k;
  c.proxy_level = k + 4;
  c.lambda = lambda;
  return c;
}

bool VerifyReport::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

std::string VerifyReport::summary() const {
  std::ostringstream os;
  for (const auto& c : checks) {
    os << (c.pass ? "pass" : "FAIL") << " " << c.property;
    if (!c.pass) os << " | " << c.witness;
    os << "\n";
  }
  return os.str();
}

VerifyReport verify_approximation(const CoverApproximation& c) {
  VerifyReport rep;

  // roundness: elements are the stored balls, so the inclusion
  // B(z, kappa^-1 r) <= U <= B(z, r) reduces to kappa >= 1 and r > 0
  {
    CheckResult r{"roundness", true, ""};
    if (c.kappa < 1) {
      r.pass = false;
      r.witness = "kappa < 1";
    }
    for (std::size_t i = 0; i < c.balls.size() && r.pass; ++i)
      if (c.balls[i].base_radius <= 0) {
        r.pass = false;
        r.witness = "ball " + std::to_string(i) + " has nonpositive radius";
      }
    if (c.level_r)
      for (std::size_t i = 0; i < c.balls.size() && r.pass; ++i)
        if (c.balls[i].base_radius != *c.level_r) {
          r.pass = false;
          r.witness = "ball " + std::to_string(i) + " deviates from the declared level radius";
        }
    rep.checks.push_back(std::move(r));
  }

  // core disjointness of B(z, kappa^-1 r), required when the cover claims to cover
  if (c.covers_space && !c.balls.empty()) {
    CheckResult r{"core-disjointness", true, ""};
    CenterGrid grid;
    double maxr = to_double(c.max_radius());
    grid.build(c.balls, std::max(maxr, 1e-9));
    for (std::size_t i = 0; i < c.balls.size() && r.pass; ++i) {
      const Ball& a = c.balls[i];
      grid.for_near_point(a.center, 2.1 * maxr, [&](int j) {
        if (!r.pass || std::size_t(j) <= i) return;
        const Ball& b = c.balls[j];
        Rat bound = (a.base_radius + b.base_radius) / c.kappa;
        if (dist_lt(a.center, b.center, bound, Norm::euclidean)) {
          r.pass = false;
          r.witness = "cores of balls " + std::to_string(i) + " and " + std::to_string(j) +
                      " intersect";
        }
      });
    }
    rep.checks.push_back(std::move(r));
  }

  // coverage of all proxy-level cell centers
  if (c.covers_space && c.ifs && c.proxy_level >= 0) {
    CheckResult r{"coverage", true, ""};
    CenterGrid grid;
    double maxr = to_double(c.max_radius());
    grid.build(c.balls, std::max(maxr, 1e-9));
    const IfsSystem& ifs = *c.ifs;

    // descend the cell tree; prune subtrees lying inside one ball
    std::function<void(const Cell&)> walk = [&](const Cell& cell) {
      if (!r.pass) return;
      RatBox box = cell_box(cell, ifs);
      Point mid;
      mid.coords.resize(ifs.dimension);
      for (int i = 0; i < ifs.dimension; ++i) mid.coords[i] = (box.lo[i] + box.hi[i]) / 2;
      double diag = to_double(box.hi[0] - box.lo[0]) * 2;
      bool pruned = false;
      grid.for_near_point(mid, maxr + diag, [&](int j) {
        if (pruned) return;
        if (box_inside_open_ball(box, c.balls[j])) pruned = true;
      });
      if (pruned) return;
      if (cell.level >= c.proxy_level) {
        Point center = cell.center(ifs);
        bool covered = false;
        grid.for_near_point(center, maxr * 1.01 + 1e-12, [&](int j) {
          if (covered) return;
          if (ball_contains_point(c.balls[j], center, Norm::euclidean)) covered = true;
        });
        if (!covered) {
          r.pass = false;
          std::ostringstream os;
          os << "uncovered proxy center at level " << cell.level << ": (";
          for (int i = 0; i < ifs.dimension; ++i)
            os << (i ? "," : "") << rat_to_string(center.coords[i]);
          os << ")";
          r.witness = os.str();
        }
        return;
      }
      Cell child;
      child.level = cell.level + 1;
      for (const auto& v : ifs.kept) {
        for (int i = 0; i < 3; ++i) child.corner[i] = cell.corner[i] * ifs.base + v[i];
        walk(child);
        if (!r.pass) return;
      }
    };
    Cell root{0, {0, 0, 0}};
    walk(root);
    rep.checks.push_back(std::move(r));
  }

  // local boundedness: intersecting L-inflations force r_U <= kappa_L r_V
  {
    CheckResult r{"locally-bounded-table", true, ""};
    for (const auto& [L, kL] : c.locally_bounded_table) {
      if (!r.pass) break;
      if (kL < 1) {
        r.pass = false;
        r.witness = "kappa_" + std::to_string(L) + " < 1";
        break;
      }
      if (c.level_r) continue;  // equal radii: every ratio is 1 <= kappa_L
      CenterGrid grid;
      double maxr = to_double(c.max_radius());
      grid.build(c.balls, std::max(maxr, 1e-9));
      for (std::size_t i = 0; i < c.balls.size() && r.pass; ++i) {
        const Ball& a = c.balls[i];
        grid.for_near_point(a.center, 2.0 * L * maxr + 1e-12, [&](int j) {
          if (!r.pass || std::size_t(j) == i) return;
          const Ball& b = c.balls[j];
          Rat bound = Rat(L) * (a.base_radius + b.base_radius);
          if (dist_lt(a.center, b.center, bound, Norm::euclidean) &&
              a.base_radius > kL * b.base_radius) {
            r.pass = false;
            r.witness = "balls " + std::to_string(i) + "," + std::to_string(j) +
                        " violate kappa_" + std::to_string(L);
          }
        });
      }
    }
    rep.checks.push_back(std::move(r));
  }

  return rep;
}

CoverApproximation subcover_in_ball(const CoverApproximation& c, const Ball& b,
                                    SubcoverMode mode) {
  CoverApproximation out;
  out.kappa = c.kappa;
  out.locally_bounded_table = c.locally_bounded_table;  // inherited: still valid on a subset
  out.ifs = c.ifs;
  out.level = c.level;
  out.proxy_level = c.proxy_level;
  out.lambda = c.lambda;
  for (const auto& ball : c.balls) {
    // closures: touching counts for the filter
    bool keep = mode == SubcoverMode::intersects
                    ? dist_le(ball.center, b.center, ball.base_radius + b.base_radius,
                              Norm::euclidean)
                    : ball_contained(ball, b, Norm::euclidean);
    if (keep) out.balls.push_back(ball);
  }
  out.covers_space = c.covers_space && out.balls.size() == c.balls.size();
  if (!out.balls.empty()) {
    Rat r0 = out.balls[0].base_radius;
    bool uniform = true;
    for (const auto& ball : out.balls)
      if (ball.base_radius != r0) {
        uniform = false;
        break;
      }
    if (uniform) out.level_r = r0;
  }
  return out;
}

std::vector<Point> proxy_points_in_ball(const CoverApproximation& c, const Ball& b,
                                        std::size_t max_points) {
  std::vector<Point> out;
  if (!c.ifs || c.proxy_level < 0) return out;
  const IfsSystem& ifs = *c.ifs;
  std::function<void(const Cell&)> walk = [&](const Cell& cell) {
    if (out.size() >= max_points) return;
    RatBox box = cell_box(cell, ifs);
    if (!box_meets_open_ball(box, b)) return;
    if (cell.level >= c.proxy_level) {
      Point p = cell.center(ifs);
      if (ball_contains_point(b, p, Norm::euclidean)) out.push_back(std::move(p));
      return;
    }
    Cell child;
    child.level = cell.level + 1;
    for (const auto& v : ifs.kept) {
      for (int i = 0; i < 3; ++i) child.corner[i] = cell.corner[i] * ifs.base + v[i];
      walk(child);
    }
  };
  Cell root{0, {0, 0, 0}};
  walk(root);
  return out;
}

std::optional<Point> proxy_point_in_diff(const CoverApproximation& c, const Ball& inside,
                                         const Ball& outside, bool closed_inside) {
  if (!c.ifs || c.proxy_level < 0) return std::nullopt;
  const IfsSystem& ifs = *c.ifs;
  std::optional<Point> found;
  std::function<void(const Cell&)> walk = [&](const Cell& cell) {
    if (found) return;
    RatBox box = cell_box(cell, ifs);
    if (closed_inside ? !box_meets_closed_ball(box, inside) : !box_meets_open_ball(box, inside))
      return;
    if (box_inside_open_ball(box, outside)) return;  // nothing here can leave `outside`
    if (cell.level >= c.proxy_level) {
      Point p = cell.center(ifs);
      bool in = closed_inside ? closed_ball_contains_point(inside, p, Norm::euclidean)
                              : ball_contains_point(inside, p, Norm::euclidean);
      if (in && !ball_contains_point(outside, p, Norm::euclidean)) found = std::move(p);
      return;
    }
    Cell child;
    child.level = cell.level + 1;
    for (const auto& v : ifs.kept) {
      for (int i = 0; i < 3; ++i) child.corner[i] = cell.corner[i] * ifs.base + v[i];
      walk(child);
      if (found) return;
    }
  };
  Cell root{0, {0, 0, 0}};
  walk(root);
  return found;
}

// --- serialization ----------------------------------------------------------

std::string serialize_cover(const CoverApproximation& c) {
  std::ostringstream os;
  os << "confdim-cover v1\n";
  os << "ifs_hash " << (c.ifs ? c.ifs->content_hash() : 0) << "\n";
  os << "has_ifs " << (c.ifs ? 1 : 0) << "\n";
  if (c.ifs) os << c.ifs->canonical_text();
  os << "level " << c.level << "\n";
  os << "proxy_level " << c.proxy_level << "\n";
  os << "lambda " << rat_to_string(c.lambda) << "\n";
  os << "kappa " << rat_to_string(c.kappa) << "\n";
  os << "covers_space " << (c.covers_space ? 1 : 0) << "\n";
  os << "level_r " << (c.level_r ? rat_to_string(*c.level_r) : "-") << "\n";
  os << "kl_table";
  if (c.locally_bounded_table.empty())
    os << " -";
  else
    for (const auto& [L, kL] : c.locally_bounded_table) os << " " << L << ":" << rat_to_string(kL);
  os << "\n";
  os << "balls " << c.balls.size() << "\n";
  for (const auto& b : c.balls) {
    for (std::size_t i = 0; i < b.center.dim(); ++i)
      os << (i ? " " : "") << rat_to_string(b.center.coords[i]);
    os << " " << rat_to_string(b.base_radius) << "\n";
  }
  return os.str();
}

CoverApproximation deserialize_cover(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  auto next = [&](const std::string& key) {
    if (!std::getline(is, line)) throw std::runtime_error("cover cache truncated at " + key);
    if (line.rfind(key, 0) != 0) throw std::runtime_error("cover cache: expected " + key);
    return line.size() > key.size() ? line.substr(key.size() + 1) : std::string();
  };
  if (!std::getline(is, line) || line != "confdim-cover v1")
    throw std::runtime_error("cover cache: bad header");
  CoverApproximation c;
  std::string hash_text = next("ifs_hash");
  bool has_ifs = next("has_ifs") == "1";
  if (has_ifs) {
    std::string ifs_text;
    for (int i = 0; i < 4; ++i) {
      if (!std::getline(is, line)) throw std::runtime_error("cover cache: ifs block truncated");
      ifs_text += line + "\n";
    }
    c.ifs = IfsSystem::parse(ifs_text);
    if (std::to_string(c.ifs->content_hash()) != hash_text)
      throw std::runtime_error("cover cache: ifs hash mismatch (corrupted cache)");
  }
  c.level = std::stoi(next("level"));
  c.proxy_level = std::stoi(next("proxy_level"));
  c.lambda = rat_parse(next("lambda"));
  c.kappa = rat_parse(next("kappa"));
  c.covers_space = next("covers_space") == "1";
  std::string lr = next("level_r");
  if (lr != "-") c.level_r = rat_parse(lr);
  std::string table = next("kl_table");
  if (table != "-") {
    std::istringstream ts(table);
    std::string tok;
    while (ts >> tok) {
      auto colon = tok.find(':');
      c.locally_bounded_table[std::stoi(tok.substr(0, colon))] = rat_parse(tok.substr(colon + 1));
    }
  }
  std::size_t n = std::stoul(next("balls"));
  int dim = c.ifs ? c.ifs->dimension : 2;
  c.balls.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::getline(is, line)) throw std::runtime_error("cover cache: ball list truncated");
    std::istringstream ls(line);
    std::vector<std::string> toks;
    std::string tok;
    while (ls >> tok) toks.push_back(tok);
    if (int(toks.size()) != dim + 1) throw std::runtime_error("cover cache: bad ball line");
    Point p;
    p.coords.resize(dim);
    for (int d = 0; d < dim; ++d) p.coords[d] = rat_parse(toks[d]);
    c.balls.emplace_back(std::move(p), rat_parse(toks.back()));
  }
  return c;
}

std::string cover_cache_key(const IfsSystem& ifs, int k, const Rat& lambda) {
  std::ostringstream os;
  os << "cover-" << std::hex << ifs.content_hash() << std::dec << "-k" << k << "-l"
     << rat_num(lambda) << "_" << rat_den(lambda);
  return os.str();
}

std::string cover_cache_path(const std::string& cache_dir, const IfsSystem& ifs, int k,
                             const Rat& lambda) {
  return (std::filesystem::path(cache_dir) / (cover_cache_key(ifs, k, lambda) + ".txt")).string();
}

CoverApproximation cached_net_cover(const std::string& cache_dir, const IfsSystem& ifs, int k,
                                    const Rat& lambda) {
  std::string path = cover_cache_path(cache_dir, ifs, k, lambda);
  if (std::filesystem::exists(path)) {
    std::ifstream f(path, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    CoverApproximation c = deserialize_cover(ss.str());
    if (!c.ifs || c.ifs->content_hash() != ifs.content_hash() || c.level != k ||
        c.lambda != lambda)
      throw std::runtime_error("cover cache: key mismatch in " + path);
    return c;
  }
  CoverApproximation c = net_cover(ifs, k, lambda);
  std::filesystem::create_directories(cache_dir);
  std::ofstream f(path, std::ios::binary);
  f << serialize_cover(c);
  return c;
}

}  // namespace confdim
