#pragma once

#include <stdexcept>

#include <Eigen/Dense>

#include "battmpc/cell_params.hpp"

namespace battmpc {

/// Differential states of the reduced single-particle model.
struct CellState {
  double c_avg_n = 0.0;         // mol/m^3, average concentration, negative electrode
  double c_avg_p = 0.0;         // mol/m^3, average concentration, positive electrode
  double film_thickness = 0.0;  // m, SEI film
  double capacity_fade = 0.0;   // cumulative fraction lost, in [0,1]
};

/// Algebraic variables consistent with one (state, power) pair.
/// voltage, overpotentials and r_film are derived from the eight core unknowns.
struct AlgebraicState {
  double c_s_n = 0.0, c_s_p = 0.0;  // mol/m^3, surface concentrations
  double phi_n = 0.0, phi_p = 0.0;  // V, solid-phase potentials
  double j_n = 0.0, j_p = 0.0;      // A/m^2, intercalation current densities
  double j_sd = 0.0;                // A/m^2, side-reaction current density (<= 0)
  double i_app = 0.0;               // A, pack current (positive = charging)
  double eta_n = 0.0, eta_p = 0.0, eta_sd = 0.0;  // V
  double voltage = 0.0;             // V, phi_p - phi_n
  double r_film = 0.0;              // ohm m^2
};

class DomainViolation : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class NonConvergence : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// i0 = F k (c_max - c_s)^0.5 c_s^0.5 c_e^0.5. Throws DomainViolation outside [0, c_max].
double exchange_current_density(double c_s, double c_max, double c_e, double k);

/// Butler-Volmer: J = 2 i0 sinh(0.5 F eta / (R T)).
double bv_current(double i0, double eta, double temperature);

/// Solvent-reduction side reaction: J_sd = -i0_sd exp(-F eta_sd / (R T)) with
/// eta_sd = phi_n - U_ref + R_f I_app / S_n and R_f = R_SEI + delta_f / kappa.
double side_reaction_current(double phi_n, double i_app, double film_thickness, const CellParameters& p);

/// Stacked residual of the coupled algebraic system at fixed differential state:
///   [0] surface relation (n)       [1] surface relation (p)
///   [2] Butler-Volmer (n)          [3] Butler-Volmer (p)
///   [4] side-reaction relation     [5] current balance (p)
///   [6] current balance (n)        [7] power relation P = I V / 1e6
/// Rows are scaled to O(1); zero iff `a` is consistent with (x, power_mw).
Eigen::Matrix<double, 8, 1> algebraic_residual(const CellState& x, const AlgebraicState& a, double power_mw,
                                               const CellParameters& p);

/// Crude but always-valid starting point for the Newton solve (open-circuit
/// potentials, nominal current split). simulate_hour warm-starts from the
/// previous step instead.
AlgebraicState initial_guess(const CellState& x, double power_mw, const CellParameters& p);

struct StepOptions {
  double tol = 1e-10;   // scaled residual, infinity norm
  int max_iters = 50;
};

struct StepResult {
  CellState state;
  AlgebraicState alg;
  int newton_iters = 0;
  bool used_fallback = false;
};

/// One fully implicit backward-Euler step of the index-1 DAE: all algebraic
/// relations hold at the end-of-step point, film resistance included.
/// Throws NonConvergence or DomainViolation.
StepResult step(const CellState& x, double power_mw, double dt, const CellParameters& p, const AlgebraicState& guess,
                const StepOptions& opt = {});

struct CellOutputs {
  double energy_mwh = 0.0;
  double voltage = 0.0;
  double fade_rate = 0.0;  // 1/s, reported nonnegative: |J_sd| S_n / Q_max
};

CellOutputs outputs(const CellState& x, const AlgebraicState& a, const CellParameters& p);

inline double energy_mwh(const CellState& x, const CellParameters& p) {
  return x.c_avg_n / p.neg.c_max * p.e_max;
}

/// Total solid-phase lithium (mol); invariant under stepping when i0_sd = 0.
inline double total_lithium(const CellState& x, const CellParameters& p) {
  return x.c_avg_n * p.neg.area * p.neg.particle_radius / 3.0 +
         x.c_avg_p * p.pos.area * p.pos.particle_radius / 3.0;
}

/// Half-charged fresh state: theta_n = soc, theta_p from the complementary
/// stoichiometry map, no film, no fade.
CellState fresh_state(double soc, const CellParameters& p);

}  // namespace battmpc
