#pragma once

#include <memory>

#include "confdim/cover.hpp"

namespace confdim {

// Overlap graph of a cover: vertices are ball indices, edges are pairs with
// nonempty open intersection (exact test).
struct IncidenceGraph {
  std::vector<std::vector<int>> adj;  // sorted neighbor lists

  std::size_t vertex_count() const { return adj.size(); }
  std::size_t edge_count() const;
  bool connected() const;
};

IncidenceGraph build_incidence(const CoverApproximation& c);

// Source/target pair for the annulus path family: elements meeting B versus
// elements meeting the attractor proxy outside LB.
struct ConnectionProblem {
  std::shared_ptr<const CoverApproximation> cover;
  std::shared_ptr<const IncidenceGraph> graph;
  Ball b;
  Rat L = 2;
  std::vector<int> source, target;  // sorted
  bool trivially_infeasible = false;  // empty source or target: modulus 0 by convention
  bool ill_posed = false;             // source and target share a vertex

  bool feasible_path_exists() const;
};

ConnectionProblem kl_problem(std::shared_ptr<const CoverApproximation> cover, const Ball& b,
                             const Rat& L);
ConnectionProblem kl_problem(std::shared_ptr<const CoverApproximation> cover,
                             std::shared_ptr<const IncidenceGraph> graph, const Ball& b,
                             const Rat& L);

// Explicit admissibility constraints: each subset P demands sum of rho over P >= 1.
struct ConstraintSet {
  enum class Provenance { kl_paths, curve_traces, explicit_list };
  std::vector<std::vector<int>> sets;  // sorted subsets
  Provenance provenance = Provenance::explicit_list;
  std::size_t vertex_count = 0;

  bool has_empty() const;
};

// Vertices whose ball meets some segment of the curve.
std::vector<int> trace_curve(const PolyCurve& curve, const CoverApproximation& c);

ConstraintSet trace_constraints(const std::vector<PolyCurve>& curves,
                                const CoverApproximation& c);

// Polyline through the pairwise overlaps of a chain of adjacent cover elements.
// The witness point of a lens U∩V is the center of the deepest proxy cell whose
// center lies in the lens (lexicographic tie-break); when no proxy cell center
// is available, the rational point dividing the center segment r_U : r_V.
PolyCurve chain_to_curve(const std::vector<int>& chain, const CoverApproximation& c);

// Finite curve families; either explicit or described by a generator tag.
struct CurveFamilySpec {
  std::vector<PolyCurve> curves;
  std::string generator;       // e.g. "annulus(...)" or "condenser(...)"
  double min_diameter = 0;

  std::size_t size() const { return curves.size(); }
};

// Up to `count` vertex-disjoint-preferring shortest source->target chains,
// realized as curves from B̄ into the complement of LB. A subfamily of the full
// annulus family, so its modulus lower-bounds nothing and upper-bounds the
// family modulus only through monotonicity of constraints.
CurveFamilySpec witness_family(const ConnectionProblem& problem, int count);

// Curve-family file: one polyline per line, vertices as rational pairs.
std::string serialize_curves(const CurveFamilySpec& fam);
CurveFamilySpec deserialize_curves(const std::string& text);

}  // namespace confdim
