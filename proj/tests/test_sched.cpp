#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "td3fg/errors.hpp"
#include "td3fg/sched.hpp"

using namespace td3fg;

TEST_CASE("linear_decay boundary values") {
  CHECK(linear_decay(0, 100) == 1.0);
  CHECK(linear_decay(100, 100) == 0.0);
  CHECK(linear_decay(150, 100) == 0.0);
  CHECK(linear_decay(50, 100) == 0.5);
}

TEST_CASE("linear_decay rejects bad arguments") {
  CHECK_THROWS_AS(linear_decay(0, 0), ScheduleError);
  CHECK_THROWS_AS(linear_decay(0, -5), ScheduleError);
  CHECK_THROWS_AS(linear_decay(-1, 10), ScheduleError);
}

TEST_CASE("rl_weight matches the closed form") {
  ScheduleSet s{100, 100, 100, 0.2};
  CHECK(rl_weight(0, s) == doctest::Approx(0.2));
  CHECK(rl_weight(50, s) == doctest::Approx(0.7));
  CHECK(rl_weight(100, s) == 1.0);
  CHECK(rl_weight(1000, s) == 1.0);
}

TEST_CASE("schedule family properties over an exhaustive sweep") {
  const std::int64_t T = 1000;
  ScheduleSet s{T, T / 2, T / 2, 0.2};
  double prev_a = 2.0, prev_b = 2.0, prev_g = 2.0, prev_d = -1.0;
  for (std::int64_t t = 0; t <= 2 * T; ++t) {
    const double a = s.alpha(t);
    const double b = s.beta(t);
    const double g = s.gamma_w(t);
    const double d = s.delta_w(t);

    CHECK(a >= 0.0); CHECK(a <= 1.0);
    CHECK(b >= 0.0); CHECK(b <= 1.0);
    CHECK(g >= 0.0); CHECK(g <= 1.0);
    CHECK(d >= s.theta_offset); CHECK(d <= 1.0);

    CHECK(a <= prev_a);
    CHECK(b <= prev_b);
    CHECK(g <= prev_g);
    CHECK(d >= prev_d);

    if (t >= s.t1) CHECK(a == 0.0);
    if (t >= s.t2) CHECK(b == 0.0);
    if (t >= s.t3) { CHECK(g == 0.0); CHECK(d == 1.0); }

    // gamma + delta constant before delta saturates
    const double pre_saturation =
        static_cast<double>(s.t3) * (1.0 - s.theta_offset);
    if (static_cast<double>(t) <= pre_saturation)
      CHECK(g + d == doctest::Approx(1.0 + s.theta_offset).epsilon(1e-12));

    prev_a = a; prev_b = b; prev_g = g; prev_d = d;
  }
}

TEST_CASE("generator noise horizon closes before OU with stock presets") {
  ScheduleSet s{1000, 500, 500, 0.2};
  CHECK(s.beta(500) == 0.0);
  CHECK(s.alpha(500) > 0.0);
}

TEST_CASE("zero horizon disables a schedule") {
  ScheduleSet s{0, 0, 0, 0.2};
  CHECK(s.alpha(0) == 0.0);
  CHECK(s.beta(123) == 0.0);
  CHECK(s.gamma_w(0) == 0.0);
  CHECK(s.delta_w(0) == 1.0);
}

TEST_CASE("validate rejects bad schedule sets") {
  CHECK_THROWS_AS((ScheduleSet{-1, 5, 5, 0.2}).validate(), ScheduleError);
  CHECK_THROWS_AS((ScheduleSet{5, 5, 5, 1.5}).validate(), ScheduleError);
  CHECK_NOTHROW((ScheduleSet{5, 5, 5, 0.0}).validate());
}
