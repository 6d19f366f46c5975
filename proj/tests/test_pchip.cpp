#include <doctest.h>

#include <cmath>
#include <vector>

#include "battmpc/pchip.hpp"

using battmpc::Pchip;

TEST_CASE("pchip reproduces knot values") {
  Pchip f({0.0, 0.2, 0.5, 1.0}, {1.0, 0.8, 0.3, 0.0});
  CHECK(f(0.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(f(0.2) == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(f(0.5) == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(f(1.0) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("pchip preserves monotone data between knots") {
  // steep-then-flat data, the classic overshoot trap for cubic splines
  Pchip f({0.0, 0.1, 0.2, 0.5, 1.0}, {4.0, 0.5, 0.45, 0.44, 0.1});
  double prev = f(0.0);
  for (int i = 1; i <= 1000; ++i) {
    const double v = f(i / 1000.0);
    CHECK(v <= prev + 1e-12);
    prev = v;
  }
}

TEST_CASE("pchip derivative matches finite differences") {
  Pchip f({0.0, 0.3, 0.6, 1.0}, {0.0, 0.5, 0.7, 2.0});
  const double h = 1e-7;
  for (double x : {0.05, 0.25, 0.45, 0.77, 0.95}) {
    const double fd = (f(x + h) - f(x - h)) / (2 * h);
    CHECK(f.deriv(x) == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("pchip second derivative matches finite differences inside segments") {
  Pchip f({0.0, 0.3, 0.6, 1.0}, {0.0, 0.5, 0.7, 2.0});
  const double h = 1e-5;
  for (double x : {0.1, 0.45, 0.8}) {
    const double fd = (f(x + h) - 2 * f(x) + f(x - h)) / (h * h);
    CHECK(f.deriv2(x) == doctest::Approx(fd).epsilon(1e-4));
  }
}

TEST_CASE("pchip clamps outside the table") {
  Pchip f({0.0, 1.0}, {2.0, 3.0});
  CHECK(f(-1.0) == doctest::Approx(2.0));
  CHECK(f(2.0) == doctest::Approx(3.0));
}

TEST_CASE("pchip rejects bad knots") {
  CHECK_THROWS(Pchip({0.0, 0.0, 1.0}, {1.0, 2.0, 3.0}));
  CHECK_THROWS(Pchip({0.0}, {1.0}));
}
