#include "confdim/ifs.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace confdim {

namespace {

Int ipow(int b, int e) {
  Int r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

std::int64_t ipow64(int b, int e) {
  std::int64_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

}  // namespace

void IfsSystem::validate() const {
  if (base < 2) throw std::invalid_argument("subdivision base must be at least 2");
  if (dimension != 2 && dimension != 3)
    throw std::invalid_argument("dimension must be 2 or 3");
  if (kept.empty()) throw std::invalid_argument("kept cell set is empty");
  std::set<Offset> seen;
  for (const auto& v : kept) {
    for (int i = 0; i < dimension; ++i)
      if (v[i] < 0 || v[i] >= base) throw std::invalid_argument("kept cell offset out of range");
    for (int i = dimension; i < 3; ++i)
      if (v[i] != 0) throw std::invalid_argument("kept cell offset has excess coordinates");
    if (!seen.insert(v).second) throw std::invalid_argument("duplicate kept cell");
  }
  if (!std::is_sorted(kept.begin(), kept.end()))
    throw std::invalid_argument("kept cells must be sorted");
  // level-1 face-adjacency graph must be connected
  std::vector<int> comp(kept.size(), -1);
  std::vector<std::size_t> stack{0};
  comp[0] = 0;
  auto face_adjacent = [&](const Offset& a, const Offset& b) {
    int diff = 0, axis = -1;
    for (int i = 0; i < dimension; ++i)
      if (a[i] != b[i]) {
        ++diff;
        axis = i;
      }
    return diff == 1 && std::abs(a[axis] - b[axis]) == 1;
  };
  while (!stack.empty()) {
    std::size_t u = stack.back();
    stack.pop_back();
    for (std::size_t v = 0; v < kept.size(); ++v)
      if (comp[v] < 0 && face_adjacent(kept[u], kept[v])) {
        comp[v] = 0;
        stack.push_back(v);
      }
  }
  for (int c : comp)
    if (c < 0)
      throw std::invalid_argument(
          "kept cells are not face-to-face connected at level 1; system rejected");
}

std::string IfsSystem::canonical_text() const {
  std::ostringstream os;
  os << "name " << name << "\n";
  os << "base " << base << "\n";
  os << "dimension " << dimension << "\n";
  os << "kept_cells";
  for (const auto& v : kept) {
    os << " " << v[0] << "," << v[1];
    if (dimension == 3) os << "," << v[2];
  }
  os << "\n";
  return os.str();
}

std::uint64_t IfsSystem::content_hash() const { return fnv1a(canonical_text()); }

IfsSystem IfsSystem::parse(const std::string& text) {
  IfsSystem out;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "name") {
      std::string rest;
      std::getline(ls, rest);
      auto pos = rest.find_first_not_of(" \t");
      out.name = pos == std::string::npos ? "" : rest.substr(pos);
    } else if (key == "base") {
      ls >> out.base;
    } else if (key == "dimension") {
      ls >> out.dimension;
    } else if (key == "kept_cells") {
      std::string tok;
      while (ls >> tok) {
        Offset v{0, 0, 0};
        std::replace(tok.begin(), tok.end(), ',', ' ');
        std::istringstream ts(tok);
        int i = 0;
        int x;
        while (ts >> x && i < 3) v[i++] = x;
        out.kept.push_back(v);
      }
    } else {
      throw std::invalid_argument("unknown key in ifs spec: " + key);
    }
  }
  std::sort(out.kept.begin(), out.kept.end());
  out.validate();
  return out;
}

IfsSystem IfsSystem::load_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open ifs spec: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

void IfsSystem::save_file(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write ifs spec: " + path);
  f << canonical_text();
}

IfsSystem IfsSystem::square() {
  IfsSystem s;
  s.base = 2;
  s.dimension = 2;
  s.name = "square";
  s.kept = {{0, 0, 0}, {0, 1, 0}, {1, 0, 0}, {1, 1, 0}};
  s.validate();
  return s;
}

IfsSystem IfsSystem::carpet() {
  IfsSystem s;
  s.base = 3;
  s.dimension = 2;
  s.name = "carpet";
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y)
      if (!(x == 1 && y == 1)) s.kept.push_back({x, y, 0});
  std::sort(s.kept.begin(), s.kept.end());
  s.validate();
  return s;
}

IfsSystem IfsSystem::sponge() {
  IfsSystem s;
  s.base = 3;
  s.dimension = 3;
  s.name = "sponge";
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y)
      for (int z = 0; z < 3; ++z) {
        int ones = (x == 1) + (y == 1) + (z == 1);
        if (ones < 2) s.kept.push_back({x, y, z});
      }
  std::sort(s.kept.begin(), s.kept.end());
  s.validate();
  return s;
}

IfsSystem IfsSystem::segment() {
  IfsSystem s;
  s.base = 3;
  s.dimension = 2;
  s.name = "segment";
  s.kept = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
  s.validate();
  return s;
}

double IfsSystem::moran_exponent() const {
  return std::log(double(kept.size())) / std::log(double(base));
}

std::size_t IfsSystem::cells_at(int k) const {
  if (k < 0) throw std::invalid_argument("negative level");
  Int n = 1;
  for (int i = 0; i < k; ++i) {
    n *= Int(kept.size());
    if (n > 10000000) throw std::runtime_error("cell budget exceeded (more than 1e7 cells)");
  }
  return n.template convert_to<std::size_t>();
}

Point Cell::center(const IfsSystem& ifs) const {
  Int den = 2 * ipow(ifs.base, level);
  Point p;
  p.coords.resize(ifs.dimension);
  for (int i = 0; i < ifs.dimension; ++i) p.coords[i] = Rat(2 * corner[i] + 1, den);
  return p;
}

Rat Cell::side(const IfsSystem& ifs) const { return Rat(1, ipow(ifs.base, level)); }

Point Cell::lower(const IfsSystem& ifs) const {
  Int den = ipow(ifs.base, level);
  Point p;
  p.coords.resize(ifs.dimension);
  for (int i = 0; i < ifs.dimension; ++i) p.coords[i] = Rat(corner[i], den);
  return p;
}

std::vector<int> Cell::digits(const IfsSystem& ifs, int axis) const {
  std::vector<int> d(level);
  std::int64_t c = corner[axis];
  for (int i = level - 1; i >= 0; --i) {
    d[i] = int(c % ifs.base);
    c /= ifs.base;
  }
  return d;
}

void for_each_cell(const IfsSystem& ifs, int k, const std::function<void(const Cell&)>& fn) {
  ifs.validate();
  ifs.cells_at(k);
  Cell root{0, {0, 0, 0}};
  for_each_descendant(ifs, root, k, fn);
}

void for_each_descendant(const IfsSystem& ifs, const Cell& cell, int depth,
                         const std::function<void(const Cell&)>& fn) {
  if (depth == 0) {
    fn(cell);
    return;
  }
  Cell child;
  child.level = cell.level + 1;
  for (const auto& v : ifs.kept) {
    for (int i = 0; i < 3; ++i) child.corner[i] = cell.corner[i] * ifs.base + v[i];
    for_each_descendant(ifs, child, depth - 1, fn);
  }
}

std::vector<Cell> generate_cells(const IfsSystem& ifs, int k) {
  std::vector<Cell> out;
  out.reserve(ifs.cells_at(k));
  for_each_cell(ifs, k, [&](const Cell& c) { out.push_back(c); });
  return out;
}

Offset CubeSymmetry::apply(const Offset& v, int base, int dimension) const {
  Offset w{0, 0, 0};
  for (int i = 0; i < dimension; ++i) {
    int x = v[perm[i]];
    w[i] = flip[i] ? base - 1 - x : x;
  }
  return w;
}

std::array<std::int64_t, 3> CubeSymmetry::apply_corner(const std::array<std::int64_t, 3>& c,
                                                       std::int64_t side_count,
                                                       int dimension) const {
  std::array<std::int64_t, 3> w{0, 0, 0};
  for (int i = 0; i < dimension; ++i) {
    std::int64_t x = c[perm[i]];
    w[i] = flip[i] ? side_count - 1 - x : x;
  }
  return w;
}

std::vector<CubeSymmetry> symmetry_group(const IfsSystem& ifs) {
  std::vector<CubeSymmetry> out;
  std::array<int, 3> perm{0, 1, 2};
  std::vector<std::array<int, 3>> perms;
  if (ifs.dimension == 2) {
    perms = {{0, 1, 2}, {1, 0, 2}};
  } else {
    std::array<int, 3> p{0, 1, 2};
    do {
      perms.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
  }
  (void)perm;
  std::set<Offset> kept_set(ifs.kept.begin(), ifs.kept.end());
  int flips = 1 << ifs.dimension;
  for (const auto& p : perms)
    for (int fm = 0; fm < flips; ++fm) {
      CubeSymmetry g;
      g.perm = p;
      for (int i = 0; i < ifs.dimension; ++i) g.flip[i] = (fm >> i) & 1;
      bool ok = true;
      for (const auto& v : ifs.kept)
        if (!kept_set.count(g.apply(v, ifs.base, ifs.dimension))) {
          ok = false;
          break;
        }
      if (ok) out.push_back(g);
    }
  return out;
}

std::vector<std::size_t> orbit_representatives(const IfsSystem& ifs,
                                               const std::vector<Cell>& cells) {
  auto group = symmetry_group(ifs);
  std::vector<std::size_t> reps;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    std::int64_t side = ipow64(ifs.base, cells[i].level);
    auto best = cells[i].corner;
    for (const auto& g : group) {
      auto w = g.apply_corner(cells[i].corner, side, ifs.dimension);
      if (w < best) best = w;
    }
    if (best == cells[i].corner) reps.push_back(i);
  }
  return reps;
}

}  // namespace confdim
