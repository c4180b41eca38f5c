#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "support/pwl_properties.hpp"
#include "tail/pwl.hpp"

using namespace tail;
using tail::testing::close;

namespace {

PwlFunction paper_delay_cost() {
  const double kinks[] = {0.0, 15.0};
  const double slopes[] = {1.0, 3.0};
  return PwlFunction::delay_cost(kinks, slopes);
}

PwlFunction ramp(double kink) { return PwlFunction({{kink, 0.0}}, 0.0, 1.0); }

}  // namespace

TEST_CASE("evaluate the delay cost shape") {
  auto c = paper_delay_cost();
  CHECK(c(-5.0) == 0.0);
  CHECK(c(0.0) == 0.0);
  CHECK(c(10.0) == doctest::Approx(10.0));
  CHECK(c(20.0) == doctest::Approx(30.0));
  CHECK(c.is_convex());
  CHECK(c.is_nondecreasing());
  CHECK(c.debug_string() == "slopes=[0,1,3] breaks=[(0,0),(15,15)]");
}

TEST_CASE("construction normalizes breakpoints") {
  SUBCASE("collinear interior points are dropped") {
    PwlFunction f({{0, 0}, {1, 1}, {2, 2}, {3, 5}}, 0.0, 3.0);
    CHECK(f.size() == 2);  // (3,5) lies on the right tail of slope 3
    CHECK(f(2.0) == doctest::Approx(2.0));
  }
  SUBCASE("boundary points absorbed by tails") {
    PwlFunction f({{-1, -1}, {0, 0}, {1, 1}}, 1.0, 1.0);
    CHECK(f.size() == 1);
    CHECK(f(7.0) == doctest::Approx(7.0));
  }
  SUBCASE("unsorted input is sorted") {
    PwlFunction f({{2, 4}, {0, 0}}, 0.0, 0.0);
    CHECK(f.breakpoints()[0].x == 0.0);
    CHECK(f(1.0) == doctest::Approx(2.0));
  }
  SUBCASE("discontinuity rejected") {
    CHECK_THROWS_AS(PwlFunction({{0, 0}, {1e-12, 5}}, 0.0, 0.0), std::invalid_argument);
  }
  SUBCASE("empty rejected") {
    CHECK_THROWS_AS(PwlFunction({}, 0.0, 0.0), std::invalid_argument);
  }
}

TEST_CASE("add") {
  std::mt19937_64 rng(7);
  auto f = tail::testing::random_pwl(rng);
  SUBCASE("zero is the identity") {
    auto h = add(f, PwlFunction());
    for (double x = -60; x <= 60; x += 0.37) CHECK(close(h(x), f(x)));
  }
  SUBCASE("f + f doubles") {
    auto h = add(f, f);
    std::uniform_real_distribution<double> u(-60, 60);
    for (int i = 0; i < 100; ++i) {
      double x = u(rng);
      CHECK(close(h(x), 2.0 * f(x)));
    }
  }
  SUBCASE("two ramps") {
    auto h = add(ramp(0.0), ramp(5.0));
    REQUIRE(h.size() == 2);
    CHECK(h.breakpoints()[0].x == 0.0);
    CHECK(h.breakpoints()[1].x == 5.0);
    CHECK(h.right_slope() == 2.0);
    for (double x = -10; x <= 20; x += 0.5)
      CHECK(close(h(x), std::max(x, 0.0) + std::max(x - 5.0, 0.0)));
  }
}

TEST_CASE("compose_affine") {
  auto r = ramp(0.0);
  CHECK(compose_affine(r, 0.0) == r);
  auto shifted = compose_affine(r, 7.0);
  REQUIRE(shifted.size() == 1);
  CHECK(shifted.breakpoints()[0].x == -7.0);
  CHECK(shifted(0.0) == doctest::Approx(7.0));
}

TEST_CASE("compose_prop") {
  auto z = compose_prop(PwlFunction(), 3.0, 4.0);
  for (double x = -20; x <= 20; x += 1) CHECK(z(x) == 0.0);

  auto h = compose_prop(ramp(0.0), 0.0, 10.0);
  for (double x = -20; x <= 40; x += 0.5) CHECK(close(h(x), std::max(x - 10.0, 0.0)));

  SUBCASE("infinite slack gives a constant") {
    auto c = compose_prop(paper_delay_cost(), 20.0, std::numeric_limits<double>::infinity());
    CHECK(c(-100.0) == doctest::Approx(30.0));
    CHECK(c(100.0) == doctest::Approx(30.0));
  }
  SUBCASE("negative slopes rejected") {
    CHECK_THROWS_AS(compose_prop(PwlFunction::affine(-1.0, 0.0), 0.0, 0.0),
                    std::invalid_argument);
  }
  SUBCASE("negative slack is literal") {
    auto c = compose_prop(ramp(0.0), 0.0, -5.0);
    CHECK(c(-5.0) == doctest::Approx(0.0));
    CHECK(c(0.0) == doctest::Approx(5.0));
  }
}

TEST_CASE("pointwise_min") {
  std::mt19937_64 rng(11);
  auto f = tail::testing::random_pwl(rng);
  auto m = pointwise_min(f, f);
  for (double x = -60; x <= 60; x += 0.41) CHECK(close(m(x), f(x)));

  auto crossing = pointwise_min(PwlFunction::affine(1.0, 0.0), PwlFunction::affine(-1.0, 4.0));
  REQUIRE(crossing.size() == 1);
  CHECK(crossing.breakpoints()[0].x == doctest::Approx(2.0));
  CHECK(crossing.breakpoints()[0].y == doctest::Approx(2.0));
  CHECK(crossing.left_slope() == 1.0);
  CHECK(crossing.right_slope() == -1.0);
}

TEST_CASE("convex_meet") {
  std::mt19937_64 rng(13);
  auto f = tail::testing::random_convex(rng);
  SUBCASE("idempotent") {
    auto h = convex_meet(f, f);
    for (double x = -60; x <= 60; x += 0.43) CHECK(close(h(x), f(x)));
  }
  SUBCASE("absorption when f <= g") {
    auto g = add(f, PwlFunction::constant(3.0));
    auto h = convex_meet(f, g);
    for (double x = -60; x <= 60; x += 0.43) CHECK(close(h(x), f(x)));
    CHECK(h.size() <= f.size());
  }
  SUBCASE("two ramps: envelope is the lower one") {
    auto h = convex_meet(ramp(0.0), ramp(5.0));
    for (double x = -10; x <= 20; x += 0.5) CHECK(close(h(x), std::max(x - 5.0, 0.0)));
  }
  SUBCASE("bridge between two V shapes") {
    auto a = PwlFunction({{0, 0}}, -1.0, 1.0);
    auto b = PwlFunction({{10, 0}}, -1.0, 1.0);
    auto h = convex_meet(a, b);
    CHECK(h(5.0) == doctest::Approx(0.0));
    CHECK(h(-3.0) == doctest::Approx(3.0));
    CHECK(h(13.0) == doctest::Approx(3.0));
  }
  SUBCASE("rejects non-convex") {
    CHECK_THROWS_AS(convex_meet(PwlFunction({{0, 0}}, 1.0, -1.0), f), std::invalid_argument);
  }
  SUBCASE("unbounded envelope reported") {
    CHECK_THROWS_AS(convex_meet(PwlFunction::affine(5.0, 0.0), PwlFunction::affine(1.0, 0.0)),
                    std::domain_error);
  }
}

TEST_CASE("randomized properties") {
  std::mt19937_64 rng(20240601);
  for (int i = 0; i < 300; ++i) {
    CHECK_MESSAGE(tail::testing::case_add(rng).empty(), i);
    CHECK_MESSAGE(tail::testing::case_compose_affine(rng).empty(), i);
    CHECK_MESSAGE(tail::testing::case_compose_prop(rng).empty(), i);
    CHECK_MESSAGE(tail::testing::case_pointwise_min(rng).empty(), i);
    auto meet = tail::testing::case_convex_meet(rng);
    CHECK_MESSAGE(meet.empty(), meet);
    CHECK(tail::testing::case_meet_associative(rng).empty());
  }
}
