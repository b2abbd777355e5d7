#pragma once

#include <cstdint>

#include "confdim/incidence.hpp"

namespace confdim {

// Nonnegative weight per cover element.
struct Density {
  std::vector<double> weights;

  double energy(double p) const;
  double max_weight() const;
};

enum class SolveStatus { optimal, iteration_cap, infeasible_empty_constraint, trivial_no_path };

std::string to_string(SolveStatus s);

struct ModulusResult {
  double value = 0;  // +infinity when some constraint is empty
  Density optimal_density;
  std::vector<std::vector<int>> active_constraints;  // slack <= 1e-7 among generated sets
  double p = 2;
  int iterations = 0;        // inner gradient iterations
  int separation_calls = 0;  // shortest-path oracle invocations
  SolveStatus status = SolveStatus::optimal;
  double bracket_low = 0;    // dual lower bound for the restricted program
  double bracket_high = 0;   // energy of the rescaled admissible density

  bool is_infinite() const;
};

struct SolveOptions {
  double rel_tol = 1e-6;
  double inner_tol = 1e-9;
  double separation_slack = 1e-9;  // a path is violated when its weight < 1 - this
  int max_separation_rounds = 10000;
  long max_inner_iterations = 2000000;
};

// Explicit constraint family: straight restricted convex solve.
ModulusResult solve_modulus(const ConstraintSet& cs, double p, const SolveOptions& opt = {});

// Keith-Laakso family: constraints generated lazily by a minimum-vertex-weight
// path separation oracle on the incidence graph.
ModulusResult solve_modulus(const ConnectionProblem& problem, double p,
                            const SolveOptions& opt = {});

// Independent oracle: dense projected gradient (Dykstra projection onto the
// constraint polyhedron), multi-start. Test-scale sizes only.
double brute_force_modulus(const ConstraintSet& cs, double p, std::uint64_t seed = 1,
                           long max_iterations = 1000000);

// Modulus of the family with requirement `c` instead of 1 (oracle use only).
double brute_force_modulus_requirement(const ConstraintSet& cs, double p, double requirement,
                                       std::uint64_t seed = 1);

struct LawReport {
  int instances = 0;
  int violations = 0;
  std::vector<std::string> notes;  // one line per violation
  bool ok() const { return violations == 0; }
};

// Monotonicity / subadditivity / majorization on random small instances.
LawReport check_laws(std::uint64_t seed, int instances = 100, double slack = 1e-7);

struct ExponentTransferReport {
  double base_value = 0;
  double max_density = 0;
  double bound = 0;   // (max rho*)^eps * value, upper bound for Mod_{p+eps}
  double direct = 0;  // freshly solved Mod_{p+eps}
  bool holds = false;
};

ExponentTransferReport exponent_transfer(const ConstraintSet& cs, const ModulusResult& base,
                                         double eps);
ExponentTransferReport exponent_transfer(const ConnectionProblem& problem,
                                         const ModulusResult& base, double eps);

struct KlBkReport {
  double mod_kl = 0;
  double mod_bk = 0;
  double ratio = 0;  // empirical comparability constant mod_bk / mod_kl
  bool holds = false;
  int witnesses_found = 0;
};

// Solves the Keith-Laakso problem and the Bourdon-Kleiner modulus of a traced
// witness family; checks mod_bk <= mod_kl + 1e-7.
KlBkReport compare_kl_bk(const ConnectionProblem& problem, int witness_count, double p);

}  // namespace confdim
