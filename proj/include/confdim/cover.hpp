#pragma once

#include <map>
#include <optional>

#include "confdim/ifs.hpp"

namespace confdim {

// A finite collection of round sets (realized as open balls) with the
// bookkeeping of a kappa-approximation: designated centers z_U and radii r_U,
// core disjointness and the local-boundedness table L -> kappa_L.
struct CoverApproximation {
  std::vector<Ball> balls;
  Rat kappa = 1;                      // roundness constant, >= 1
  std::optional<Rat> level_r;         // common radius when the cover sits at one level
  std::map<int, Rat> locally_bounded_table;  // L -> kappa_L for L in {1,2,4,8}
  bool covers_space = false;

  // provenance for attractor-proxy decisions (level-(k+4) cell centers)
  std::optional<IfsSystem> ifs;
  int level = -1;        // generation level k for net covers, else -1
  int proxy_level = -1;  // depth of the cell-center proxy of the attractor
  Rat lambda = 1;        // net-cover inflation

  std::size_t size() const { return balls.size(); }
  bool empty() const { return balls.empty(); }
  Norm norm() const { return Norm::euclidean; }

  Rat max_radius() const;
  Rat min_radius() const;
};

// Net cover at level k: one ball of radius lambda * b^-k around every level-k
// cell center. kappa = 2*lambda, kappa_L = 4 for L in {1,2,4,8}.
CoverApproximation net_cover(const IfsSystem& ifs, int k, const Rat& lambda);

struct CheckResult {
  std::string property;
  bool pass = true;
  std::string witness;  // first counterexample, empty when passing
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool all_pass() const;
  std::string summary() const;
};

// Exhaustive audit of Definition-style invariants: roundness, core
// disjointness, coverage of proxy cell centers, and the kappa_L table.
VerifyReport verify_approximation(const CoverApproximation& c);

enum class SubcoverMode { intersects, contained };

// Elements meeting / contained in the ball, exact tests; metadata recomputed.
CoverApproximation subcover_in_ball(const CoverApproximation& c, const Ball& b, SubcoverMode mode);

// Witness points of the attractor proxy: level-proxy cell centers lying in the
// given ball (open). Streams descendants of nearby cells only.
std::vector<Point> proxy_points_in_ball(const CoverApproximation& c, const Ball& b,
                                        std::size_t max_points);

// One proxy point in ball `inside` (its closure when closed_inside) but not in
// the open ball `outside`, if any.
std::optional<Point> proxy_point_in_diff(const CoverApproximation& c, const Ball& inside,
                                         const Ball& outside, bool closed_inside = false);

// --- cover cache -----------------------------------------------------------
// Text format; a cache hit must be byte-identical to regeneration.

std::string serialize_cover(const CoverApproximation& c);
CoverApproximation deserialize_cover(const std::string& text);

std::string cover_cache_key(const IfsSystem& ifs, int k, const Rat& lambda);
std::string cover_cache_path(const std::string& cache_dir, const IfsSystem& ifs, int k,
                             const Rat& lambda);
// Loads from cache when present, else generates and writes.
CoverApproximation cached_net_cover(const std::string& cache_dir, const IfsSystem& ifs, int k,
                                    const Rat& lambda);

}  // namespace confdim
