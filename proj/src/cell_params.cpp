#include "battmpc/cell_params.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace battmpc {

namespace {

using nlohmann::json;

double positive(const json& j, const char* key) {
  if (!j.contains(key)) throw std::invalid_argument(std::string("cell parameters: missing key '") + key + "'");
  const double v = j.at(key).get<double>();
  if (!(v > 0.0)) throw std::invalid_argument(std::string("cell parameters: '") + key + "' must be > 0");
  return v;
}

double nonnegative(const json& j, const char* key) {
  if (!j.contains(key)) throw std::invalid_argument(std::string("cell parameters: missing key '") + key + "'");
  const double v = j.at(key).get<double>();
  if (!(v >= 0.0)) throw std::invalid_argument(std::string("cell parameters: '") + key + "' must be >= 0");
  return v;
}

Pchip parse_ocv(const json& j, const char* electrode) {
  const auto& ocv = j.at("ocv");
  auto theta = ocv.at("theta").get<std::vector<double>>();
  auto u = ocv.at("potential_v").get<std::vector<double>>();
  if (theta.size() != u.size() || theta.size() < 2)
    throw std::invalid_argument(std::string("ocv table for electrode ") + electrode + ": bad sizes");
  if (theta.front() != 0.0 || theta.back() != 1.0)
    throw std::invalid_argument(std::string("ocv table for electrode ") + electrode + ": theta must cover [0,1]");
  // require a monotone table so the monotone interpolant is meaningful
  int dir = 0;
  for (std::size_t i = 1; i < u.size(); ++i) {
    if (u[i] > u[i - 1]) {
      if (dir < 0) throw std::invalid_argument(std::string("ocv table for electrode ") + electrode + ": not monotone");
      dir = 1;
    } else if (u[i] < u[i - 1]) {
      if (dir > 0) throw std::invalid_argument(std::string("ocv table for electrode ") + electrode + ": not monotone");
      dir = -1;
    }
  }
  return Pchip(std::move(theta), std::move(u));
}

ElectrodeParams parse_electrode(const json& j, const char* name, double n_cells) {
  ElectrodeParams e;
  e.diffusivity = positive(j, "diffusivity_m2_s");
  e.particle_radius = positive(j, "particle_radius_m");
  e.rate_constant = positive(j, "reaction_rate_constant");
  e.c_max = positive(j, "max_concentration_mol_m3");
  e.area = positive(j, "area_per_cell_m2") * n_cells;
  e.ocv = parse_ocv(j, name);
  return e;
}

}  // namespace

void CellParameters::validate() const {
  auto check = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("cell parameters: ") + what);
  };
  check(temperature > 0.0, "temperature must be > 0");
  check(c_electrolyte > 0.0, "electrolyte concentration must be > 0");
  check(n_cells > 0.0, "n_cells must be > 0");
  check(q_max > 0.0, "q_max must be > 0");
  check(e_max > 0.0, "e_max must be > 0");
  check(side.i0 >= 0.0, "side reaction exchange current density must be >= 0");
  check(side.density > 0.0 && side.molar_mass > 0.0 && side.conductivity > 0.0,
        "side reaction film properties must be > 0");
  check(side.r_sei >= 0.0, "initial film resistance must be >= 0");
}

CellParameters parse_cell_parameters(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("cell parameters: invalid JSON: ") + e.what());
  }

  CellParameters p;
  const auto& pack = j.at("pack");
  p.n_cells = positive(pack, "n_cells");
  p.q_max = positive(pack, "capacity_per_cell_as") * p.n_cells;
  p.e_max = positive(pack, "energy_per_cell_mwh") * p.n_cells;

  p.temperature = positive(j, "temperature_k");
  p.c_electrolyte = positive(j, "electrolyte_concentration_mol_m3");

  const auto& el = j.at("electrode");
  p.neg = parse_electrode(el.at("n"), "n", p.n_cells);
  p.pos = parse_electrode(el.at("p"), "p", p.n_cells);

  const auto& sd = j.at("side_reaction");
  p.side.i0 = nonnegative(sd, "exchange_current_density_a_m2");
  p.side.u_ref = sd.at("equilibrium_potential_v").get<double>();
  p.side.molar_mass = positive(sd, "molar_mass_kg_mol");
  p.side.density = positive(sd, "density_kg_m3");
  p.side.conductivity = positive(sd, "film_conductivity_s_m");
  p.side.r_sei = nonnegative(sd, "initial_film_resistance_ohm_m2");

  p.validate();
  return p;
}

CellParameters load_cell_parameters(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cell parameters: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_cell_parameters(ss.str());
}

}  // namespace battmpc
