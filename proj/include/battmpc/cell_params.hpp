#pragma once

#include <string>

#include "battmpc/pchip.hpp"

namespace battmpc {

struct PhysicalConstants {
  static constexpr double faraday = 96487.0;  // C/mol
  static constexpr double gas = 8.314;        // J/(mol K)
};

/// Per-electrode parameters. Electroactive area is pack-scaled at load time.
struct ElectrodeParams {
  double diffusivity = 0.0;        // m^2/s
  double particle_radius = 0.0;    // m
  double rate_constant = 0.0;      // m^2.5/(mol^0.5 s)
  double c_max = 0.0;              // mol/m^3
  double area = 0.0;               // m^2, pack total
  Pchip ocv;                       // U(theta), theta in [0,1]
};

struct SideReactionParams {
  double i0 = 0.0;              // A/m^2, exchange current density
  double u_ref = 0.0;           // V, equilibrium potential
  double molar_mass = 0.0;      // kg/mol
  double density = 0.0;         // kg/m^3
  double conductivity = 0.0;    // S/m, film ionic conductivity
  double r_sei = 0.0;           // ohm m^2, initial film resistance
};

/// Immutable after construction; shareable across threads.
struct CellParameters {
  ElectrodeParams neg, pos;
  SideReactionParams side;
  double c_electrolyte = 0.0;  // mol/m^3
  double temperature = 0.0;    // K
  double n_cells = 1.0;        // pack scale factor
  double q_max = 0.0;          // A s, pack
  double e_max = 0.0;          // MWh, pack

  // Butler-Volmer exponent factors, cached.
  double half_f_over_rt() const { return 0.5 * PhysicalConstants::faraday / (PhysicalConstants::gas * temperature); }
  double f_over_rt() const { return PhysicalConstants::faraday / (PhysicalConstants::gas * temperature); }

  /// Nominal 1C pack current (A): current draining q_max in one hour.
  double current_1c() const { return q_max / 3600.0; }

  void validate() const;  // throws std::invalid_argument on violated invariants
};

/// Parses the JSON cell-parameter file (schema documented in README) and
/// applies pack scaling: areas, q_max and e_max are per-cell values times n_cells.
CellParameters load_cell_parameters(const std::string& path);
CellParameters parse_cell_parameters(const std::string& json_text);

}  // namespace battmpc
