#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "confdim/incidence.hpp"

using namespace confdim;

namespace {

std::shared_ptr<CoverApproximation> shared_net(const IfsSystem& ifs, int k, const Rat& lambda) {
  return std::make_shared<CoverApproximation>(net_cover(ifs, k, lambda));
}

CoverApproximation manual_cover(std::vector<Ball> balls) {
  CoverApproximation c;
  c.balls = std::move(balls);
  c.kappa = 2;
  return c;
}

}  // namespace

TEST_CASE("incidence graph on the level-1 square cover") {
  auto cover = net_cover(IfsSystem::square(), 1, 1);
  auto g = build_incidence(cover);
  CHECK(g.vertex_count() == 4);
  CHECK(g.edge_count() == 6);  // complete graph: every center pair closer than 1
  CHECK(g.connected());
}

TEST_CASE("incidence graph basics") {
  auto disjoint = manual_cover({Ball(Point(0, 0), Rat(1, 4)), Ball(Point(1, 1), Rat(1, 4))});
  CHECK(build_incidence(disjoint).edge_count() == 0);

  auto carpet = net_cover(IfsSystem::carpet(), 1, 1);
  auto g = build_incidence(carpet);
  CHECK(g.connected());
  // exhaustive cross-check of the edge set
  std::size_t brute = 0;
  for (std::size_t i = 0; i < carpet.balls.size(); ++i)
    for (std::size_t j = i + 1; j < carpet.balls.size(); ++j)
      if (balls_intersect(carpet.balls[i], carpet.balls[j], Norm::euclidean)) ++brute;
  CHECK(g.edge_count() == brute);
}

TEST_CASE("incidence connectivity of net covers") {
  for (auto ifs : {IfsSystem::carpet(), IfsSystem::square(), IfsSystem::segment()})
    for (int k : {1, 2, 3, 4}) {
      if (ifs.kept.size() == 8 && k > 3) continue;
      CHECK(build_incidence(net_cover(ifs, k, 1)).connected());
    }
}

TEST_CASE("touching balls do not count as incident") {
  // open balls at distance exactly r1 + r2
  auto touch = manual_cover({Ball(Point(0, 0), Rat(1, 3)), Ball(Point(Rat(2, 3), Rat(0)), Rat(1, 3))});
  CHECK(build_incidence(touch).edge_count() == 0);
}

TEST_CASE("kl problem source and target") {
  auto cover = shared_net(IfsSystem::carpet(), 2, 1);
  Ball b(Point(Rat(1, 2), Rat(1, 2)), Rat(1, 9));
  auto p = kl_problem(cover, b, 2);
  CHECK(!p.source.empty());
  CHECK(!p.target.empty());
  CHECK(!p.trivially_infeasible);
  CHECK(p.feasible_path_exists());

  // LB swallows the space: empty target
  auto p2 = kl_problem(cover, b, 100);
  CHECK(p2.target.empty());
  CHECK(p2.trivially_infeasible);

  // ball inside the removed center: empty source
  Ball hole(Point(Rat(1, 2), Rat(1, 2)), Rat(1, 100));
  auto p3 = kl_problem(cover, hole, 2);
  CHECK(p3.source.empty());
  CHECK(p3.trivially_infeasible);
}

TEST_CASE("trace curve") {
  auto cover = net_cover(IfsSystem::square(), 1, 1);
  PolyCurve midline({Point(Rat(0), Rat(1, 2)), Point(Rat(1), Rat(1, 2))});
  auto tr = trace_curve(midline, cover);
  CHECK(tr.size() == 4);

  PolyCurve away({Point(Rat(0), Rat(5)), Point(Rat(1), Rat(5))});
  CHECK(trace_curve(away, cover).empty());

  // tiny curve inside one core ball
  PolyCurve speck({Point(Rat(1, 4), Rat(1, 4)), Point(Rat(26, 100), Rat(1, 4))});
  auto tr2 = trace_curve(speck, cover);
  CHECK(!tr2.empty());
  bool has_owner = false;
  for (int v : tr2)
    if (cover.balls[v].center == Point(Rat(1, 4), Rat(1, 4))) has_owner = true;
  CHECK(has_owner);
}

TEST_CASE("chain to curve") {
  auto cover = net_cover(IfsSystem::square(), 1, 1);
  auto g = build_incidence(cover);

  PolyCurve single = chain_to_curve({2}, cover);
  CHECK(single.vertices.size() == 2);
  for (const auto& v : single.vertices)
    CHECK(ball_contains_point(cover.balls[2], v, Norm::euclidean));

  // chain across the square: left ball to right ball
  std::vector<int> chain = {0, 3};  // centers (1/4,1/4) and (3/4,3/4)
  REQUIRE(balls_intersect(cover.balls[0], cover.balls[3], Norm::euclidean));
  PolyCurve curve = chain_to_curve(chain, cover);
  MetricSpec m;
  CHECK(curve.diameter(m) >= 0.5);

  auto tr = trace_curve(curve, cover);
  for (int v : chain) CHECK(std::find(tr.begin(), tr.end(), v) != tr.end());

  CHECK_THROWS_AS(chain_to_curve({0, 0}, cover), std::invalid_argument);
}

TEST_CASE("trace of synthesized chains covers the chain") {
  auto cover = net_cover(IfsSystem::carpet(), 2, 1);
  auto g = build_incidence(cover);
  std::mt19937_64 rng(5);
  for (int it = 0; it < 25; ++it) {
    // random walk chain of length up to 6
    int v = int(rng() % cover.balls.size());
    std::vector<int> chain{v};
    for (int s = 0; s < 5; ++s) {
      const auto& nb = g.adj[chain.back()];
      if (nb.empty()) break;
      chain.push_back(nb[rng() % nb.size()]);
    }
    // consecutive duplicates are not allowed in a chain
    chain.erase(std::unique(chain.begin(), chain.end()), chain.end());
    if (chain.size() < 2) continue;
    auto curve = chain_to_curve(chain, cover);
    auto tr = trace_curve(curve, cover);
    for (int u : chain) CHECK(std::find(tr.begin(), tr.end(), u) != tr.end());
  }
}

TEST_CASE("witness families") {
  auto cover = shared_net(IfsSystem::square(), 2, 1);
  Ball b(Point(Rat(1, 2), Rat(1, 2)), Rat(1, 4));
  auto p = kl_problem(cover, b, 2);
  REQUIRE(!p.trivially_infeasible);
  auto fam = witness_family(p, 4);
  CHECK(fam.curves.size() >= 1);
  MetricSpec m;
  Ball lb = b.inflate(2);
  for (const auto& c : fam.curves) {
    CHECK(c.diameter(m) >= (2.0 - 1.0) * 0.25 - 1e-9);
    // starts in the closed ball, ends outside LB
    CHECK(dist_le(c.vertices.front(), b.center, b.base_radius, Norm::euclidean));
    CHECK(!ball_contains_point(lb, c.vertices.back(), Norm::euclidean));
  }

  auto infeasible = kl_problem(cover, Ball(Point(Rat(1, 2), Rat(1, 2)), Rat(1, 4)), 100);
  CHECK(witness_family(infeasible, 3).curves.empty());
}

TEST_CASE("curve family file round trip") {
  auto cover = shared_net(IfsSystem::square(), 2, 1);
  auto p = kl_problem(cover, Ball(Point(Rat(1, 2), Rat(1, 2)), Rat(1, 4)), 2);
  auto fam = witness_family(p, 3);
  REQUIRE(!fam.curves.empty());
  std::string text = serialize_curves(fam);
  auto back = deserialize_curves(text);
  CHECK(serialize_curves(back) == text);  // bit-exact for rational coordinates
  CHECK(back.curves.size() == fam.curves.size());
  CHECK(back.curves[0].vertices == fam.curves[0].vertices);
}
