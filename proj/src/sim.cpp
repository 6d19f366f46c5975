#include "battmpc/sim.hpp"

#include <stdexcept>

namespace battmpc {

const char* to_string(ViolationKind v) {
  switch (v) {
    case ViolationKind::None: return "none";
    case ViolationKind::OverCharge: return "over_charge";
    case ViolationKind::OverDischarge: return "over_discharge";
    case ViolationKind::SolverFailure: return "solver_failure";
  }
  return "?";
}

HourTrace simulate_hour(const CellState& x0, const HourlyCommitment& c, std::span<const double> alpha,
                        const CellParameters& p, const SimConfig& cfg) {
  if (static_cast<int>(alpha.size()) != cfg.steps_per_hour)
    throw std::invalid_argument("simulate_hour: FR slice length != steps_per_hour");
  if (!(c.fr_band_mw >= 0.0 && c.order_mw >= 0.0 && c.load_mw >= 0.0))
    throw std::invalid_argument("simulate_hour: commitments must be nonnegative");

  const int steps = cfg.steps_per_hour;
  const double dt = 3600.0 / steps;

  HourTrace t;
  t.cf_at_start = x0.capacity_fade;
  t.power_mw.reserve(steps);
  t.energy_mwh.reserve(steps);
  t.voltage.reserve(steps);
  t.fade_rate.reserve(steps);
  t.cf.reserve(steps);

  CellState x = x0;
  AlgebraicState warm = initial_guess(x0, alpha.empty() ? 0.0 : alpha[0] * c.fr_band_mw + c.order_mw - c.load_mw, p);

  for (int s = 0; s < steps; ++s) {
    const double power = alpha[s] * c.fr_band_mw + c.order_mw - c.load_mw;
    StepResult r;
    try {
      r = step(x, power, dt, p, warm, cfg.step);
    } catch (const std::runtime_error& e) {
      t.feasible = false;
      t.violation = ViolationKind::SolverFailure;
      t.violation_step = s;
      t.failure_detail = e.what();
      break;
    }
    const double cf_bound = x.capacity_fade;  // start-of-step fade
    const CellOutputs o = outputs(r.state, r.alg, p);

    t.power_mw.push_back(power);
    t.energy_mwh.push_back(o.energy_mwh);
    t.voltage.push_back(o.voltage);
    t.fade_rate.push_back(o.fade_rate);
    t.cf.push_back(r.state.capacity_fade);
    t.fr_energy_mwh += alpha[s] * c.fr_band_mw * dt / 3600.0;

    x = r.state;
    warm = r.alg;

    const double cap = (1.0 - cf_bound) * p.e_max;
    if (o.energy_mwh > cfg.tau_upper * cap) {
      t.feasible = false;
      t.violation = ViolationKind::OverCharge;
      t.violation_step = s;
      break;
    }
    if (o.energy_mwh < cfg.tau_lower * cap) {
      t.feasible = false;
      t.violation = ViolationKind::OverDischarge;
      t.violation_step = s;
      break;
    }
  }

  t.end_state = x;
  t.end_alg = warm;
  if (t.feasible) {
    t.purchased_mwh = c.order_mw;  // constant over the hour
    t.load_mwh = c.load_mw;
  } else {
    const double span_h = static_cast<double>(t.power_mw.size()) / steps;
    t.purchased_mwh = c.order_mw * span_h;
    t.load_mwh = c.load_mw * span_h;
  }
  return t;
}

Feasibility check_feasibility(const HourTrace& trace, const CellParameters& p, const SimConfig& cfg) {
  Feasibility f;
  if (trace.violation == ViolationKind::SolverFailure) {
    f.feasible = false;
    f.violation = ViolationKind::SolverFailure;
    f.step = trace.violation_step;
    return f;
  }
  double cf_prev = trace.cf_at_start;
  for (std::size_t s = 0; s < trace.energy_mwh.size(); ++s) {
    const double cap = (1.0 - cf_prev) * p.e_max;
    if (trace.energy_mwh[s] > cfg.tau_upper * cap) {
      f.feasible = false;
      f.violation = ViolationKind::OverCharge;
      f.step = static_cast<int>(s);
      return f;
    }
    if (trace.energy_mwh[s] < cfg.tau_lower * cap) {
      f.feasible = false;
      f.violation = ViolationKind::OverDischarge;
      f.step = static_cast<int>(s);
      return f;
    }
    cf_prev = trace.cf[s];
  }
  return f;
}

}  // namespace battmpc
