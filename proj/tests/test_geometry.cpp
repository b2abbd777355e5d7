#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "confdim/content.hpp"
#include "confdim/geometry.hpp"
#include "confdim/quasisymmetry.hpp"

using namespace confdim;

namespace {
MetricSpec euclid() { return MetricSpec{}; }
MetricSpec euclid_theta(const Rat& t) { return MetricSpec{Norm::euclidean, t}; }
MetricSpec supnorm() { return MetricSpec{Norm::sup, 1}; }

Point rand_point(std::mt19937_64& rng, int dim) {
  Point p;
  p.coords.resize(dim);
  for (int i = 0; i < dim; ++i) p.coords[i] = Rat(long(rng() % 1024), 1024);
  return p;
}
}  // namespace

TEST_CASE("distance basics") {
  CHECK(distance(Point(0, 0), Point(3, 4), euclid()) == doctest::Approx(5.0));
  CHECK(distance(Point(0, 0), Point(4, 0), euclid_theta(Rat(1, 2))) == doctest::Approx(2.0));
  CHECK(distance(Point(0, 0), Point(1, 1), supnorm()) == doctest::Approx(1.0));
  CHECK_THROWS_AS(distance(Point(0, 0), Point(Rat(1), Rat(1), Rat(1)), euclid()),
                  std::invalid_argument);
}

TEST_CASE("distance is a metric on random triples") {
  std::mt19937_64 rng(7);
  for (int it = 0; it < 200; ++it) {
    Point a = rand_point(rng, 2), b = rand_point(rng, 2), c = rand_point(rng, 2);
    double ab = distance(a, b, euclid()), ba = distance(b, a, euclid());
    CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
    CHECK(ab >= 0);
    CHECK((ab == 0) == (a == b));
    double ac = distance(a, c, euclid()), bc = distance(b, c, euclid());
    CHECK(ac <= ab + bc + 1e-12);
    // snowflake triangle inequality
    auto m = euclid_theta(Rat(1, 2));
    CHECK(distance(a, c, m) <= distance(a, b, m) + distance(b, c, m) + 1e-12);
  }
}

TEST_CASE("snowflake identity realizes the power profile exactly") {
  std::mt19937_64 rng(11);
  auto prof = QuasisymmetryProfile::snowflake_profile(Rat(1, 2));
  for (int it = 0; it < 100; ++it) {
    Point x = rand_point(rng, 2), y = rand_point(rng, 2), z = rand_point(rng, 2);
    if (x == z || x == y) continue;
    auto m0 = euclid();
    auto m1 = euclid_theta(Rat(1, 2));
    double lhs = distance(x, y, m1) / distance(x, z, m1);
    double rhs = prof.eval(distance(x, y, m0) / distance(x, z, m0));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
  }
}

TEST_CASE("relative distance") {
  PolyCurve e({Point(0, 0), Point(0, 1)});
  PolyCurve f({Point(3, 0), Point(3, 1)});
  CHECK(relative_distance(e, f, euclid()) == doctest::Approx(3.0).epsilon(1e-9));

  PolyCurve e2({Point(0, 0), Point(0, 2)});
  PolyCurve f2({Point(1, 0), Point(1, 1)});
  CHECK(relative_distance(e2, f2, euclid()) == doctest::Approx(1.0).epsilon(1e-9));

  // touching at one endpoint
  PolyCurve e3({Point(0, 0), Point(1, 1)});
  PolyCurve f3({Point(1, 1), Point(2, 0)});
  CHECK(relative_distance(e3, f3, euclid()) == doctest::Approx(0.0));

  CHECK(relative_distance(e, f, euclid()) ==
        doctest::Approx(relative_distance(f, e, euclid())));
}

TEST_CASE("relative distance distortion under snowflake maps") {
  // Lemma-style harness: the identity (X,d) -> (X,d^theta) is an
  // eta-quasisymmetry with eta(t) = t^theta; relative distances obey
  // 1/(2 eta(1/D)) <= D' <= eta(2 D).
  std::mt19937_64 rng(13);
  Rat theta(1, 2);
  auto prof = QuasisymmetryProfile::snowflake_profile(theta);
  for (int it = 0; it < 60; ++it) {
    Point a = rand_point(rng, 2), b = rand_point(rng, 2);
    Point c = rand_point(rng, 2), d = rand_point(rng, 2);
    if (a == b || c == d) continue;
    PolyCurve e({a, b}), f({c, d});
    if (curves_intersect(e, f)) continue;
    double D = relative_distance(e, f, euclid());
    if (D <= 0) continue;
    double Dp = relative_distance(e, f, euclid_theta(theta));
    CHECK(Dp <= prof.eval(2 * D) + 1e-9);
    CHECK(Dp >= 1.0 / (2 * prof.eval(1.0 / D)) - 1e-9);
  }
}

TEST_CASE("ball image bound under the snowflake map") {
  // f(B(x, Lr)) sits inside B(f(x), eta(2L) d(f(x), f(y))) for y with
  // d(x,y) >= r/2; checked on sampled points
  std::mt19937_64 rng(17);
  Rat theta(1, 2);
  auto prof = QuasisymmetryProfile::snowflake_profile(theta);
  auto m0 = euclid();
  auto m1 = euclid_theta(theta);
  for (int it = 0; it < 40; ++it) {
    Point x = rand_point(rng, 2);
    double r = 0.05 + 0.1 * double(rng() % 100) / 100.0;
    Point y = x;
    y.coords[0] += rat_from_double(0.6 * r);  // d(x,y) in [r/2, r)
    double L = 1.0 + double(rng() % 300) / 100.0;
    for (int s = 0; s < 25; ++s) {
      Point z = rand_point(rng, 2);
      if (distance(x, z, m0) >= L * r) continue;  // z in B(x, Lr)
      double lhs = distance(x, z, m1);
      double rhs = prof.eval(2 * L) * distance(x, y, m1);
      CHECK(lhs <= rhs + 1e-9);
    }
  }
}

TEST_CASE("inverse profile per the inversion formula") {
  QuasisymmetryProfile eta{Rat(2), Rat(1, 2)};  // 2 sqrt(t)
  auto inv = eta.inverse_profile();
  CHECK(to_double(inv.coefficient) == doctest::Approx(4.0));
  CHECK(to_double(inv.exponent) == doctest::Approx(2.0));
  // eta~(t) = (eta^{-1}(t^{-1}))^{-1}
  for (double t : {0.25, 1.0, 3.0}) {
    double etainv = std::pow(1.0 / t / 2.0, 2.0);  // eta^{-1}(1/t)
    CHECK(inv.eval(t) == doctest::Approx(1.0 / etainv).epsilon(1e-12));
  }
  CHECK(eta.eval(0) == 0.0);
}

TEST_CASE("covering number greedy and oracle values") {
  std::vector<Point> two = {Point(0, 0), Point(1, 0)};
  CHECK(covering_number(two, Rat(2), euclid()) == 1);

  std::vector<Point> eleven;
  for (int i = 0; i <= 10; ++i) eleven.emplace_back(Rat(i, 10), Rat(0));
  int greedy = covering_number(eleven, Rat(1, 20), euclid());
  CHECK(greedy >= 6);
  CHECK(greedy <= 11);

  CHECK(covering_number({Point(Rat(1, 3), Rat(2, 3))}, Rat(1, 100), euclid()) == 1);
}

TEST_CASE("1d exact covering oracle pins the equispaced example") {
  // minimum number of closed r-balls covering 11 equispaced points: interval
  // sweep is exact in one dimension
  std::vector<double> xs;
  for (int i = 0; i <= 10; ++i) xs.push_back(i / 10.0);
  double r = 0.05;
  int count = 0;
  std::size_t i = 0;
  while (i < xs.size()) {
    double right = xs[i] + 2 * r;
    ++count;
    while (i < xs.size() && xs[i] <= right + 1e-12) ++i;
  }
  CHECK(count == 6);
}

TEST_CASE("snowflake of balls") {
  Ball b(Point(Rat(1, 2), Rat(1, 2)), Rat(4));
  Ball s = snowflake(b, Rat(1, 2));
  CHECK(s.radius() == doctest::Approx(2.0));
  CHECK(*s.radius_exact() == Rat(2));
  Ball id = snowflake(b, Rat(1));
  CHECK(id.base_radius == Rat(4));
  Ball tiny = snowflake(Ball(Point(0, 0), Rat(1, 100)), Rat(1, 2));
  CHECK(*tiny.radius_exact() == Rat(1, 10));
  CHECK_THROWS_AS(snowflake(b, Rat(2)), std::invalid_argument);
}

TEST_CASE("hausdorff content of the unit segment") {
  PolyCurve seg({Point(0, 0), Point(1, 0)});
  auto est1 = hausdorff_content_upper({seg}, 1.0, 0.5, euclid());
  CHECK(est1.value == doctest::Approx(1.0));
  CHECK(est1.cover.size() == 2);
  CHECK(2 * to_double(est1.cover[0].base_radius) == doctest::Approx(0.5));

  auto est2 = hausdorff_content_upper({seg}, 2.0, 0.5, euclid());
  CHECK(est2.value == doctest::Approx(0.5));
  est2.check();

  // vanishing piece: value <= delta^s
  PolyCurve micro({Point(Rat(1, 2), Rat(1, 2)), Point(Rat(1, 2) + Rat(1, 1000000), Rat(1, 2))});
  auto est3 = hausdorff_content_upper({micro}, 1.0, 0.25, euclid());
  CHECK(est3.value <= 0.25);
}

TEST_CASE("content monotone in delta for exponents at most one") {
  PolyCurve seg({Point(0, 0), Point(Rat(3, 4), Rat(1, 2))});
  for (double s : {0.5, 0.8, 1.0}) {
    double prev = -1;
    for (double delta : {0.5, 0.25, 0.125}) {
      auto est = hausdorff_content_upper({seg}, s, delta, euclid());
      if (prev >= 0) CHECK(est.value >= prev - 1e-9);
      prev = est.value;
    }
  }
}

TEST_CASE("ball predicates are exact at touching configurations") {
  Ball a(Point(0, 0), Rat(1, 2));
  Ball b(Point(1, 0), Rat(1, 2));  // open balls touch: disjoint
  CHECK(balls_disjoint(a, b, Norm::euclidean));
  Ball c(Point(Rat(99, 100), Rat(0)), Rat(1, 2));
  CHECK(balls_intersect(a, c, Norm::euclidean));
  CHECK(ball_contained(Ball(Point(Rat(1, 4), Rat(0)), Rat(1, 4)), Ball(Point(0, 0), Rat(1, 2)),
                       Norm::euclidean));
}
