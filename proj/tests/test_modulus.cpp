#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "confdim/modulus.hpp"

using namespace confdim;

namespace {

ConstraintSet explicit_sets(std::vector<std::vector<int>> sets, int n) {
  ConstraintSet cs;
  cs.sets = std::move(sets);
  cs.vertex_count = n;
  for (auto& s : cs.sets) std::sort(s.begin(), s.end());
  return cs;
}

// n disjoint chains of length L: vertex block i*L .. i*L+L-1
ConstraintSet chains(int n, int L) {
  std::vector<std::vector<int>> sets;
  for (int i = 0; i < n; ++i) {
    std::vector<int> s(L);
    for (int j = 0; j < L; ++j) s[j] = i * L + j;
    sets.push_back(std::move(s));
  }
  return explicit_sets(std::move(sets), n * L);
}

ConstraintSet random_instance(std::mt19937_64& rng, int max_n, int max_m) {
  int n = 2 + int(rng() % (max_n - 1));
  int m = 1 + int(rng() % max_m);
  std::vector<std::vector<int>> sets;
  for (int j = 0; j < m; ++j) {
    int size = 1 + int(rng() % n);
    std::vector<int> s;
    for (int t = 0; t < size; ++t) s.push_back(int(rng() % n));
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    sets.push_back(std::move(s));
  }
  return explicit_sets(std::move(sets), n);
}

}  // namespace

TEST_CASE("single constraint and sentinels") {
  auto one = explicit_sets({{0}}, 1);
  auto r = solve_modulus(one, 2.0);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.optimal_density.weights[0] == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(r.status == SolveStatus::optimal);

  auto inf = solve_modulus(explicit_sets({{0}, {}}, 1), 2.0);
  CHECK(inf.is_infinite());
  CHECK(inf.status == SolveStatus::infeasible_empty_constraint);

  ConstraintSet nothing;
  nothing.vertex_count = 3;
  auto zero = solve_modulus(nothing, 2.0);
  CHECK(zero.value == 0.0);
  CHECK(zero.status == SolveStatus::trivial_no_path);

  CHECK_THROWS_AS(solve_modulus(one, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(solve_modulus(one, 9.0), std::invalid_argument);
}

TEST_CASE("disjoint chain closed form") {
  // Mod_p = n * L^(1-p), symmetric optimum rho = 1/L on every chain vertex
  for (int n : {1, 3})
    for (int L : {2, 4, 5})
      for (double p : {1.5, 2.0, 3.0}) {
        auto r = solve_modulus(chains(n, L), p);
        CHECK(r.value == doctest::Approx(n * std::pow(L, 1.0 - p)).epsilon(1e-7));
      }
  auto r = solve_modulus(chains(3, 4), 2.0);
  CHECK(r.value == doctest::Approx(0.75).epsilon(1e-9));
  auto single = solve_modulus(chains(1, 5), 2.0);
  CHECK(single.value == doctest::Approx(0.2).epsilon(1e-9));
}

TEST_CASE("brute force oracle agrees on pinned examples") {
  CHECK(brute_force_modulus(chains(3, 4), 2.0) == doctest::Approx(0.75).epsilon(1e-8));
  CHECK(brute_force_modulus(explicit_sets({{0}}, 1), 2.0) == doctest::Approx(1.0).epsilon(1e-9));
  // nested constraints: the smaller one dominates
  CHECK(brute_force_modulus(explicit_sets({{0}, {0, 1}}, 2), 2.0) ==
        doctest::Approx(1.0).epsilon(1e-8));
  CHECK(brute_force_modulus(explicit_sets({{}}, 1), 2.0) ==
        std::numeric_limits<double>::infinity());
}

TEST_CASE("solver matches the oracle on random instances") {
  std::mt19937_64 rng(42);
  const double ps[3] = {1.5, 2.0, 3.0};
  for (int it = 0; it < 12; ++it) {
    auto cs = random_instance(rng, 10, 12);
    double p = ps[it % 3];
    double a = solve_modulus(cs, p).value;
    double b = brute_force_modulus(cs, p, 17 + it);
    CHECK(std::fabs(a - b) / std::max(b, 1e-9) <= 1e-6);
  }
}

TEST_CASE("law suite on random instances") {
  auto rep = check_laws(2024, 30);
  for (const auto& n : rep.notes) MESSAGE(n);
  CHECK(rep.ok());
}

TEST_CASE("scale-up law") {
  // requirement c rescales the modulus by c^p
  std::mt19937_64 rng(7);
  for (int it = 0; it < 6; ++it) {
    auto cs = random_instance(rng, 8, 6);
    for (double p : {1.5, 2.0}) {
      double base = brute_force_modulus_requirement(cs, p, 1.0, 3);
      double scaled = brute_force_modulus_requirement(cs, p, 2.0, 3);
      CHECK(scaled == doctest::Approx(std::pow(2.0, p) * base).epsilon(1e-6));
    }
  }
}

TEST_CASE("disjoint union additivity") {
  std::mt19937_64 rng(11);
  auto a = random_instance(rng, 6, 5);
  auto b = random_instance(rng, 6, 5);
  ConstraintSet shifted;
  shifted.vertex_count = a.vertex_count + b.vertex_count;
  shifted.sets = a.sets;
  for (auto s : b.sets) {
    for (auto& v : s) v += int(a.vertex_count);
    shifted.sets.push_back(std::move(s));
  }
  for (double p : {1.5, 2.0, 3.0}) {
    double lhs = solve_modulus(shifted, p).value;
    double rhs = solve_modulus(a, p).value + solve_modulus(b, p).value;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
  }
}

TEST_CASE("exponent transfer") {
  auto cs = chains(2, 3);
  auto base = solve_modulus(cs, 2.0);
  auto tr = exponent_transfer(cs, base, 0.5);
  CHECK(tr.holds);
  CHECK(tr.bound == doctest::Approx(std::pow(base.optimal_density.max_weight(), 0.5) *
                                    base.value));

  auto zero = exponent_transfer(cs, base, 0.0);
  CHECK(zero.bound == doctest::Approx(base.value));
  CHECK(zero.direct == doctest::Approx(base.value));

  // rho* identically 1: bound equals value for every eps
  auto singles = explicit_sets({{0}, {1}}, 2);
  auto b2 = solve_modulus(singles, 2.0);
  CHECK(b2.optimal_density.max_weight() == doctest::Approx(1.0).epsilon(1e-9));
  auto t2 = exponent_transfer(singles, b2, 1.0);
  CHECK(t2.bound == doctest::Approx(b2.value).epsilon(1e-9));
  CHECK(t2.holds);

  // monotone in p whenever the optimal density stays at most 1
  auto t3 = exponent_transfer(cs, base, 1.0);
  CHECK(base.optimal_density.max_weight() <= 1.0 + 1e-9);
  CHECK(t3.direct <= base.value + 1e-7);
}

TEST_CASE("lazy solve on covers matches explicit families") {
  // 3-ball chain cover: only one source->target chain
  CoverApproximation c;
  c.balls = {Ball(Point(0, 0), Rat(2, 3)), Ball(Point(1, 0), Rat(2, 3)),
             Ball(Point(2, 0), Rat(2, 3))};
  c.kappa = 2;
  auto cover = std::make_shared<CoverApproximation>(std::move(c));
  auto graph = std::make_shared<IncidenceGraph>(build_incidence(*cover));
  REQUIRE(graph->edge_count() == 2);
  ConnectionProblem p;
  p.cover = cover;
  p.graph = graph;
  p.b = Ball(Point(0, 0), Rat(1, 10));
  p.L = 2;
  p.source = {0};
  p.target = {2};
  for (double q : {1.5, 2.0, 3.0}) {
    auto lazy = solve_modulus(p, q);
    auto direct = solve_modulus(explicit_sets({{0, 1, 2}}, 3), q);
    CHECK(lazy.value == doctest::Approx(direct.value).epsilon(1e-7));
    CHECK(lazy.status == SolveStatus::optimal);
  }

  ConnectionProblem infeasible = p;
  infeasible.target = {};
  infeasible.trivially_infeasible = true;
  auto r = solve_modulus(infeasible, 2.0);
  CHECK(r.value == 0.0);
  CHECK(r.status == SolveStatus::trivial_no_path);
}

TEST_CASE("kl versus bk comparison") {
  auto cover = std::make_shared<CoverApproximation>(net_cover(IfsSystem::carpet(), 2, 1));
  Ball b(Point(Rat(1, 6), Rat(1, 6)), Rat(1, 9));
  auto p = kl_problem(cover, b, 2);
  REQUIRE(!p.trivially_infeasible);
  auto rep = compare_kl_bk(p, 6, 2.0);
  CHECK(rep.holds);
  CHECK(rep.mod_kl > 0);
  CHECK(rep.ratio > 0);
  CHECK(rep.ratio <= 1.0 + 1e-7);
}

TEST_CASE("kl equals bk when witnesses realize every chain") {
  // tiny instance: single chain cover, the witness curve traces exactly the chain
  CoverApproximation raw;
  raw.balls = {Ball(Point(0, 0), Rat(2, 3)), Ball(Point(1, 0), Rat(2, 3)),
               Ball(Point(2, 0), Rat(2, 3))};
  raw.kappa = 2;
  auto cover = std::make_shared<CoverApproximation>(std::move(raw));
  auto graph = std::make_shared<IncidenceGraph>(build_incidence(*cover));
  ConnectionProblem p;
  p.cover = cover;
  p.graph = graph;
  p.b = Ball(Point(0, 0), Rat(1, 2));
  p.L = 3;
  p.source = {0};
  p.target = {2};
  auto rep = compare_kl_bk(p, 4, 2.0);
  CHECK(rep.witnesses_found >= 1);
  CHECK(rep.ratio == doctest::Approx(1.0).epsilon(1e-7));
}
