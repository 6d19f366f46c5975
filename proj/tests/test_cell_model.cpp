#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "battmpc/cell_model.hpp"

using namespace battmpc;

namespace {

CellParameters params() {
  static CellParameters p = load_cell_parameters(std::string(BATTMPC_DATA_DIR) + "/lfp_graphite_1mwh.json");
  return p;
}

CellParameters params_no_side() {
  CellParameters p = params();
  p.side.i0 = 0.0;
  return p;
}

}  // namespace

TEST_CASE("exchange current density vanishes at the stoichiometry rails") {
  const auto p = params();
  CHECK(exchange_current_density(0.0, p.neg.c_max, p.c_electrolyte, p.neg.rate_constant) == 0.0);
  CHECK(exchange_current_density(p.neg.c_max, p.neg.c_max, p.c_electrolyte, p.neg.rate_constant) == 0.0);
}

TEST_CASE("exchange current density peaks at half stoichiometry") {
  const auto p = params();
  double best = -1.0;
  double best_cs = -1.0;
  for (int i = 1; i <= 9; ++i) {
    const double cs = 0.1 * i * p.neg.c_max;
    const double v = exchange_current_density(cs, p.neg.c_max, p.c_electrolyte, p.neg.rate_constant);
    if (v > best) {
      best = v;
      best_cs = cs;
    }
  }
  CHECK(best_cs == doctest::Approx(0.5 * p.neg.c_max));
}

TEST_CASE("exchange current density rejects out-of-range surface concentration") {
  const auto p = params();
  CHECK_THROWS_AS(exchange_current_density(-1.0, p.neg.c_max, p.c_electrolyte, p.neg.rate_constant), DomainViolation);
  CHECK_THROWS_AS(exchange_current_density(p.neg.c_max * 1.001, p.neg.c_max, p.c_electrolyte, p.neg.rate_constant),
                  DomainViolation);
}

TEST_CASE("butler-volmer basics") {
  CHECK(bv_current(5.0, 0.0, 298.15) == 0.0);
  for (double eta : {0.01, 0.05, 0.3}) CHECK(bv_current(3.0, -eta, 298.15) == doctest::Approx(-bv_current(3.0, eta, 298.15)));
  // high-precision scalar reference: 2*10*sinh(0.5*96487*0.05/(8.314*298.15))
  CHECK(bv_current(10.0, 0.05, 298.15) == doctest::Approx(22.682691571017114).epsilon(1e-12));
}

TEST_CASE("side reaction current sign and monotonicity") {
  const auto p = params();
  CHECK(side_reaction_current(0.1, 1e5, 0.0, params_no_side()) == 0.0);
  double prev = -std::numeric_limits<double>::infinity();
  for (double phi_n = -0.2; phi_n <= 0.4; phi_n += 0.05) {
    const double j = side_reaction_current(phi_n, 0.0, 0.0, p);
    CHECK(j < 0.0);
    CHECK(j > prev);  // increasing toward zero as eta_sd grows
    prev = j;
  }
}

TEST_CASE("open-circuit rest point has zero residual when side reaction is off") {
  const auto p = params_no_side();
  const CellState x = fresh_state(0.5, p);
  AlgebraicState a;
  a.c_s_n = x.c_avg_n;
  a.c_s_p = x.c_avg_p;
  a.phi_n = p.neg.ocv(0.5);
  a.phi_p = p.pos.ocv(0.5);
  a.voltage = a.phi_p - a.phi_n;
  const auto r = algebraic_residual(x, a, 0.0, p);
  CHECK(r.lpNorm<Eigen::Infinity>() == doctest::Approx(0.0).epsilon(1e-15));

  SUBCASE("perturbing phi_p breaks consistency") {
    AlgebraicState b = a;
    b.phi_p += 0.01;
    CHECK(algebraic_residual(x, b, 0.0, p).lpNorm<Eigen::Infinity>() > 1e-6);
  }
}

TEST_CASE("implicit step at rest leaves the state unchanged (side reaction off)") {
  const auto p = params_no_side();
  const CellState x = fresh_state(0.5, p);
  const auto r = step(x, 0.0, 2.0, p, initial_guess(x, 0.0, p));
  CHECK(r.state.c_avg_n == x.c_avg_n);
  CHECK(r.state.c_avg_p == x.c_avg_p);
  CHECK(r.state.film_thickness == x.film_thickness);
  CHECK(r.state.capacity_fade == x.capacity_fade);
}

TEST_CASE("post-step point satisfies the algebraic relations to 1e-9") {
  const auto p = params();
  CellState x = fresh_state(0.5, p);
  AlgebraicState warm = initial_guess(x, 2.0, p);
  for (double power : {2.0, -3.0, 0.7, -0.2, 9.5}) {
    const auto r = step(x, power, 2.0, p, warm);
    const auto res = algebraic_residual(r.state, r.alg, power, p);
    CHECK(res.lpNorm<Eigen::Infinity>() <= 1e-9);
    x = r.state;
    warm = r.alg;
  }
}

TEST_CASE("lithium is conserved without the side reaction") {
  const auto p = params_no_side();
  CellState x = fresh_state(0.25, p);
  const double li0 = total_lithium(x, p);
  AlgebraicState warm = initial_guess(x, 0.9, p);
  for (int s = 0; s < 1000; ++s) {
    const auto r = step(x, 0.9, 2.0, p, warm);
    x = r.state;
    warm = r.alg;
  }
  CHECK(std::abs(total_lithium(x, p) / li0 - 1.0) <= 1e-10);
  CHECK(x.c_avg_n > 0.25 * p.neg.c_max);  // charged up
}

TEST_CASE("one coarse step matches 100 fine sub-steps") {
  const auto p = params();
  const CellState x0 = fresh_state(0.4, p);
  for (double power : {3.0, -3.0}) {
    const auto coarse = step(x0, power, 2.0, p, initial_guess(x0, power, p));
    CellState x = x0;
    AlgebraicState warm = initial_guess(x0, power, p);
    for (int i = 0; i < 100; ++i) {
      const auto r = step(x, power, 0.02, p, warm);
      x = r.state;
      warm = r.alg;
    }
    CHECK(coarse.state.c_avg_n == doctest::Approx(x.c_avg_n).epsilon(1e-3));
    CHECK(coarse.state.c_avg_p == doctest::Approx(x.c_avg_p).epsilon(1e-3));
  }
}

TEST_CASE("step is deterministic bit-for-bit") {
  const auto p = params();
  const CellState x = fresh_state(0.55, p);
  const AlgebraicState g = initial_guess(x, 4.2, p);
  const auto a = step(x, 4.2, 2.0, p, g);
  const auto b = step(x, 4.2, 2.0, p, g);
  CHECK(std::memcmp(&a.state, &b.state, sizeof(CellState)) == 0);
  CHECK(std::memcmp(&a.alg, &b.alg, sizeof(AlgebraicState)) == 0);
}

TEST_CASE("film and fade are nondecreasing and charging aggravates the fade rate") {
  const auto p = params();
  const CellState x = fresh_state(0.5, p);
  double prev_rate = -1.0;
  for (int i = 0; i <= 10; ++i) {
    const double power = static_cast<double>(i);
    const auto r = step(x, power, 2.0, p, initial_guess(x, power, p));
    CHECK(r.state.film_thickness > x.film_thickness);
    CHECK(r.state.capacity_fade > x.capacity_fade);
    const double rate = outputs(r.state, r.alg, p).fade_rate;
    CHECK(rate >= prev_rate);
    prev_rate = rate;
  }
}

TEST_CASE("domain violation when charging a full battery hard") {
  const auto p = params();
  const CellState x = fresh_state(0.999, p);
  CHECK_THROWS_AS(step(x, 10.0, 60.0, p, initial_guess(x, 10.0, p)), DomainViolation);
}

TEST_CASE("outputs: proportional energy, zero fade rate without side reaction") {
  const auto p = params();
  CellState x = fresh_state(0.5, p);
  AlgebraicState a;
  CHECK(outputs(x, a, p).energy_mwh == doctest::Approx(0.5 * p.e_max));
  a.j_sd = 0.0;
  CHECK(outputs(x, a, p).fade_rate == 0.0);
}

TEST_CASE("cumulative fade equals the integral of the fade rate") {
  const auto p = params();
  CellState x = fresh_state(0.5, p);
  AlgebraicState warm = initial_guess(x, 1.0, p);
  const double dt = 60.0;
  double integral = 0.0;
  for (int s = 0; s < 60; ++s) {
    const double power = (s % 2 == 0) ? 1.0 : -1.0;
    const auto r = step(x, power, dt, p, warm);
    integral += outputs(r.state, r.alg, p).fade_rate * dt;
    x = r.state;
    warm = r.alg;
  }
  CHECK(std::abs(x.capacity_fade - integral) <= 1e-12);
}
