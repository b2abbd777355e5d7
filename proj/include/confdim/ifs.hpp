#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "confdim/geometry.hpp"

namespace confdim {

using Offset = std::array<int, 3>;  // entries beyond the dimension stay 0

// Subdivision system: split [0,1]^n into b^n cells, keep a subset, iterate.
// Attractor of the maps x -> (x+v)/b over kept offsets v.
struct IfsSystem {
  int base = 0;
  int dimension = 0;
  std::vector<Offset> kept;  // sorted lexicographically
  std::string name;

  void validate() const;  // in-range offsets, face-adjacency graph connected

  std::string canonical_text() const;
  std::uint64_t content_hash() const;

  static IfsSystem parse(const std::string& text);
  static IfsSystem load_file(const std::string& path);
  void save_file(const std::string& path) const;

  static IfsSystem square();   // b=2, all 4 cells
  static IfsSystem carpet();   // b=3, center removed
  static IfsSystem sponge();   // b=3, n=3, centers of faces and body removed
  static IfsSystem segment();  // b=3, bottom row of the square: a line segment

  // log(|kept|) / log(base)
  double moran_exponent() const;

  std::size_t cells_at(int k) const;  // |kept|^k, throws past the 1e7 budget
};

// A level-k cell: the box [corner, corner+1] / base^k.
struct Cell {
  int level = 0;
  std::array<std::int64_t, 3> corner{0, 0, 0};

  Point center(const IfsSystem& ifs) const;   // (2*corner+1) / (2 b^k)
  Rat side(const IfsSystem& ifs) const;       // b^-k
  Point lower(const IfsSystem& ifs) const;
  std::vector<int> digits(const IfsSystem& ifs, int axis) const;  // base-b digit string
};

// All cells of level k in deterministic lexicographic (digit-path) order.
std::vector<Cell> generate_cells(const IfsSystem& ifs, int k);

// Streaming variant; does not materialize the list.
void for_each_cell(const IfsSystem& ifs, int k, const std::function<void(const Cell&)>& fn);

// Descendants of one cell, depth levels further down.
void for_each_descendant(const IfsSystem& ifs, const Cell& cell, int depth,
                         const std::function<void(const Cell&)>& fn);

// Symmetries of the unit cube (axis permutation + flips) preserving the kept set.
struct CubeSymmetry {
  std::array<int, 3> perm{0, 1, 2};
  std::array<bool, 3> flip{false, false, false};

  Offset apply(const Offset& v, int base, int dimension) const;
  std::array<std::int64_t, 3> apply_corner(const std::array<std::int64_t, 3>& c,
                                           std::int64_t side_count, int dimension) const;
};

std::vector<CubeSymmetry> symmetry_group(const IfsSystem& ifs);

// Indices of cells that are lexicographically minimal in their symmetry orbit.
std::vector<std::size_t> orbit_representatives(const IfsSystem& ifs,
                                               const std::vector<Cell>& cells);

}  // namespace confdim
