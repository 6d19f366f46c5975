#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "battmpc/cell_model.hpp"

namespace battmpc {

/// The three market decisions for one hour.
struct HourlyCommitment {
  double fr_band_mw = 0.0;   // F >= 0
  double order_mw = 0.0;     // O >= 0, day-ahead purchase
  double load_mw = 0.0;      // L >= 0, committed load
};

enum class ViolationKind : std::uint8_t { None, OverCharge, OverDischarge, SolverFailure };

const char* to_string(ViolationKind v);

struct SimConfig {
  int steps_per_hour = 1800;  // 2 s FR-signal resolution by default
  double tau_lower = 0.1;     // energy safety band as fractions of remaining capacity
  double tau_upper = 0.9;
  StepOptions step;
};

/// Per-step record of one simulated hour. Arrays are truncated at the first
/// violating step when infeasible; full length (steps_per_hour) when feasible.
struct HourTrace {
  double cf_at_start = 0.0;
  std::vector<double> power_mw;    // P_s = alpha_s F + O - L
  std::vector<double> energy_mwh;  // end-of-step energy
  std::vector<double> voltage;
  std::vector<double> fade_rate;   // C_r, 1/s
  std::vector<double> cf;          // end-of-step cumulative fade
  CellState end_state;
  AlgebraicState end_alg;

  bool feasible = true;
  ViolationKind violation = ViolationKind::None;
  int violation_step = -1;  // 0-based
  std::string failure_detail;

  // revenue-relevant aggregates over the simulated span
  double purchased_mwh = 0.0;  // O * 1h when feasible
  double load_mwh = 0.0;
  double fr_energy_mwh = 0.0;  // sum alpha_s F dt
};

struct Feasibility {
  bool feasible = true;
  ViolationKind violation = ViolationKind::None;
  int step = -1;
};

/// Steps the cell model through one committed hour against the FR-signal
/// slice. Never clamps: the first energy-bound breach or solver failure marks
/// the hour infeasible and stops. The energy bound uses the start-of-step
/// capacity fade.
HourTrace simulate_hour(const CellState& x0, const HourlyCommitment& c, std::span<const double> alpha,
                        const CellParameters& p, const SimConfig& cfg);

/// Re-derives the verdict from a trace's recorded energies and fades.
/// Bounds are closed: a step exactly on a bound is feasible.
Feasibility check_feasibility(const HourTrace& trace, const CellParameters& p, const SimConfig& cfg);

}  // namespace battmpc
