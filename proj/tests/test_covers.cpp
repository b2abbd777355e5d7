#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "confdim/cover.hpp"
#include "confdim/report.hpp"

using namespace confdim;

TEST_CASE("cell generation counts and order") {
  auto carpet = IfsSystem::carpet();
  CHECK(generate_cells(carpet, 1).size() == 8);
  CHECK(generate_cells(carpet, 3).size() == 512);
  auto square = IfsSystem::square();
  CHECK(generate_cells(square, 0).size() == 1);

  auto cells = generate_cells(carpet, 2);
  // deterministic lexicographic digit order
  auto again = generate_cells(carpet, 2);
  REQUIRE(cells.size() == again.size());
  for (std::size_t i = 0; i < cells.size(); ++i) CHECK(cells[i].corner == again[i].corner);
}

TEST_CASE("moran exponent normalizes the side sum") {
  auto carpet = IfsSystem::carpet();
  double s = carpet.moran_exponent();
  CHECK(s == doctest::Approx(std::log(8.0) / std::log(3.0)));
  for (int k : {1, 2, 3}) {
    double sum = double(generate_cells(carpet, k).size()) * std::pow(std::pow(3.0, -k), s);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("ifs validation rejects broken systems") {
  IfsSystem bad;
  bad.base = 2;
  bad.dimension = 2;
  bad.name = "diagonal";
  bad.kept = {{0, 0, 0}, {1, 1, 0}};  // corner contact only
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  IfsSystem empty;
  empty.base = 3;
  empty.dimension = 2;
  CHECK_THROWS_AS(empty.validate(), std::invalid_argument);
}

TEST_CASE("ifs spec files round-trip") {
  auto carpet = IfsSystem::carpet();
  auto parsed = IfsSystem::parse(carpet.canonical_text());
  CHECK(parsed.content_hash() == carpet.content_hash());
  CHECK(parsed.kept == carpet.kept);
}

TEST_CASE("net cover shapes") {
  auto carpet = IfsSystem::carpet();
  auto c = net_cover(carpet, 2, 1);
  CHECK(c.balls.size() == 64);
  for (const auto& b : c.balls) CHECK(b.base_radius == Rat(1, 9));
  CHECK(c.kappa == Rat(2));
  CHECK(c.locally_bounded_table.at(4) == Rat(4));

  auto sq = net_cover(IfsSystem::square(), 1, 1);
  CHECK(sq.balls.size() == 4);
  CHECK(sq.balls[0].base_radius == Rat(1, 2));

  auto inflated = net_cover(carpet, 1, 2);
  CHECK(inflated.balls.size() == 8);
  CHECK(inflated.balls[0].base_radius == Rat(2, 3));
  // pairwise overlapping at lambda = 2, by exhaustive check
  for (std::size_t i = 0; i < inflated.balls.size(); ++i)
    for (std::size_t j = i + 1; j < inflated.balls.size(); ++j)
      CHECK(balls_intersect(inflated.balls[i], inflated.balls[j], Norm::euclidean));

  CHECK_THROWS_AS(net_cover(carpet, 1, Rat(1, 2)), std::invalid_argument);
}

TEST_CASE("verify_approximation accepts net covers") {
  for (auto ifs : {IfsSystem::carpet(), IfsSystem::square(), IfsSystem::segment()})
    for (int k : {1, 2, 3})
      for (int lambda : {1, 2}) {
        auto rep = verify_approximation(net_cover(ifs, k, lambda));
        INFO(ifs.name, " k=", k, " lambda=", lambda, "\n", rep.summary());
        CHECK(rep.all_pass());
      }
}

TEST_CASE("verify_approximation deeper levels") {
  for (int k : {4, 5}) {
    CHECK(verify_approximation(net_cover(IfsSystem::square(), k, 1)).all_pass());
    CHECK(verify_approximation(net_cover(IfsSystem::segment(), k, 2)).all_pass());
  }
  CHECK(verify_approximation(net_cover(IfsSystem::carpet(), 4, 1)).all_pass());
}

TEST_CASE("verify_approximation catches tampering") {
  auto carpet = IfsSystem::carpet();
  auto c = net_cover(carpet, 2, 1);
  auto broken = c;
  broken.balls.erase(broken.balls.begin() + 17);
  auto rep = verify_approximation(broken);
  bool coverage_failed = false;
  for (const auto& chk : rep.checks)
    if (chk.property == "coverage" && !chk.pass && !chk.witness.empty()) coverage_failed = true;
  CHECK(coverage_failed);

  auto dup = c;
  dup.balls.push_back(dup.balls[5]);
  auto rep2 = verify_approximation(dup);
  bool cores_failed = false;
  for (const auto& chk : rep2.checks)
    if (chk.property == "core-disjointness" && !chk.pass) cores_failed = true;
  CHECK(cores_failed);
}

TEST_CASE("subcover filters") {
  auto carpet = IfsSystem::carpet();
  auto c = net_cover(carpet, 2, 1);
  Ball central(Point(Rat(1, 2), Rat(1, 2)), Rat(1, 9));
  auto sub = subcover_in_ball(c, central, SubcoverMode::intersects);
  CHECK(!sub.empty());
  CHECK(sub.balls.size() < c.balls.size());

  Ball everything(Point(Rat(1, 2), Rat(1, 2)), Rat(10));
  auto all = subcover_in_ball(c, everything, SubcoverMode::intersects);
  CHECK(all.balls.size() == c.balls.size());
  CHECK(all.covers_space);

  Ball hole(Point(Rat(1, 2), Rat(1, 2)), Rat(1, 100));
  auto none = subcover_in_ball(c, hole, SubcoverMode::contained);
  CHECK(none.empty());
}

TEST_CASE("cover serialization and cache round trip") {
  auto carpet = IfsSystem::carpet();
  auto c = net_cover(carpet, 2, 1);
  std::string text = serialize_cover(c);
  auto back = deserialize_cover(text);
  CHECK(serialize_cover(back) == text);
  CHECK(back.balls.size() == c.balls.size());
  CHECK(back.balls[20].center == c.balls[20].center);

  auto dir = std::filesystem::temp_directory_path() / "confdim-test-cache";
  std::filesystem::remove_all(dir);
  auto c1 = cached_net_cover(dir.string(), carpet, 2, 1);
  std::string bytes1 = read_text_file(cover_cache_path(dir.string(), carpet, 2, 1));
  auto c2 = cached_net_cover(dir.string(), carpet, 2, 1);  // hit
  CHECK(serialize_cover(c1) == serialize_cover(c2));
  CHECK(bytes1 == serialize_cover(net_cover(carpet, 2, 1)));

  // tamper: flip one ball line
  std::string tampered = bytes1;
  auto pos = tampered.rfind("1/9");
  tampered.replace(pos, 3, "1/7");
  write_text_file(cover_cache_path(dir.string(), carpet, 2, 1), tampered);
  auto reloaded = deserialize_cover(tampered);
  auto rep = verify_approximation(reloaded);
  CHECK(!rep.all_pass());
  std::filesystem::remove_all(dir);
}

TEST_CASE("symmetry group and orbit reduction") {
  auto carpet = IfsSystem::carpet();
  CHECK(symmetry_group(carpet).size() == 8);
  auto cells = generate_cells(carpet, 1);
  auto reps = orbit_representatives(carpet, cells);
  CHECK(reps.size() == 2);  // corner cell and edge cell

  auto segment = IfsSystem::segment();
  auto reps_seg = orbit_representatives(segment, generate_cells(segment, 1));
  CHECK(reps_seg.size() == 2);  // end cell and middle cell

  auto sponge = IfsSystem::sponge();
  CHECK(sponge.kept.size() == 20);
  CHECK(symmetry_group(sponge).size() == 48);
}

TEST_CASE("proxy point queries") {
  auto carpet = IfsSystem::carpet();
  auto c = net_cover(carpet, 2, 1);
  // central hole holds no attractor proxy points
  Ball hole(Point(Rat(1, 2), Rat(1, 2)), Rat(1, 10));
  CHECK(proxy_points_in_ball(c, hole, 4).empty());
  Ball corner(Point(Rat(1, 18), Rat(1, 18)), Rat(1, 9));
  CHECK(!proxy_points_in_ball(c, corner, 4).empty());

  Ball inside(Point(Rat(1, 18), Rat(1, 18)), Rat(1, 9));
  Ball outside(Point(Rat(1, 18), Rat(1, 18)), Rat(1, 18));
  auto w = proxy_point_in_diff(c, inside, outside);
  REQUIRE(w.has_value());
  CHECK(ball_contains_point(inside, *w, Norm::euclidean));
  CHECK(!ball_contains_point(outside, *w, Norm::euclidean));
}
