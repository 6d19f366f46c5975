#include "battmpc/cell_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace battmpc {

namespace {

constexpr double kFaraday = PhysicalConstants::faraday;
constexpr double kExpClamp = 320.0;  // keeps sinh/cosh/exp finite; rejected by line search anyway

double clamped_sinh(double a) { return std::sinh(std::clamp(a, -kExpClamp, kExpClamp)); }
double clamped_cosh(double a) { return std::cosh(std::clamp(a, -kExpClamp, kExpClamp)); }
double clamped_exp(double a) { return std::exp(std::min(a, kExpClamp)); }

double i0_unchecked(double c_s, double c_max, double c_e, double k) {
  return kFaraday * k * std::sqrt((c_max - c_s) * c_s * c_e);
}

// d i0 / d c_s, evaluated slightly inside the domain to stay finite
double i0_deriv(double c_s, double c_max, double c_e, double k) {
  const double margin = 1e-9 * c_max;
  const double c = std::clamp(c_s, margin, c_max - margin);
  return kFaraday * k * std::sqrt(c_e) * (c_max - 2.0 * c) / (2.0 * std::sqrt(c * (c_max - c)));
}

// Shared evaluator for the coupled algebraic system. For the plain
// consistency residual kt_j = R_j/(5 D_j F) and film_coeff = 0; the implicit
// step folds the backward-Euler state updates into kt_j and film_coeff.
struct SystemEval {
  const CellParameters& p;
  double c_avg_n0, c_avg_p0, film0;
  double kt_n, kt_p;
  double film_coeff;  // delta_f_eff = film0 - j_sd * film_coeff
  double power_mw;

  double beta, gamma;
  double scale_cn, scale_cp, scale_jn, scale_jp, scale_jsd;

  SystemEval(const CellParameters& params, const CellState& x, double power, double dt, bool implicit_step)
      : p(params),
        c_avg_n0(x.c_avg_n),
        c_avg_p0(x.c_avg_p),
        film0(x.film_thickness),
        power_mw(power) {
    kt_n = p.neg.particle_radius / (5.0 * p.neg.diffusivity * kFaraday);
    kt_p = p.pos.particle_radius / (5.0 * p.pos.diffusivity * kFaraday);
    film_coeff = 0.0;
    if (implicit_step) {
      kt_n += 3.0 * dt / (p.neg.particle_radius * kFaraday);
      kt_p += 3.0 * dt / (p.pos.particle_radius * kFaraday);
      film_coeff = p.side.molar_mass * dt / (p.side.density * kFaraday);
    }
    beta = p.half_f_over_rt();
    gamma = p.f_over_rt();
    scale_cn = p.neg.c_max;
    scale_cp = p.pos.c_max;
    scale_jn = p.current_1c() / p.neg.area;
    scale_jp = p.current_1c() / p.pos.area;
    if (p.side.i0 > 0.0) {
      const double eta0 = p.neg.ocv(0.5) - p.side.u_ref;
      scale_jsd = p.side.i0 * clamped_exp(-gamma * eta0);
    } else {
      scale_jsd = scale_jn;
    }
  }

  // unknown vector layout: [c_s_n, c_s_p, phi_n, phi_p, j_n, j_p, j_sd, i_app]
  using Vec8 = Eigen::Matrix<double, 8, 1>;
  using Mat8 = Eigen::Matrix<double, 8, 8>;

  bool in_domain(const Vec8& u) const {
    return u[0] >= 0.0 && u[0] <= p.neg.c_max && u[1] >= 0.0 && u[1] <= p.pos.c_max;
  }

  bool residual(const Vec8& u, Vec8& r, Mat8* jac) const {
    if (!in_domain(u)) return false;
    const double csn = u[0], csp = u[1], phin = u[2], phip = u[3];
    const double jn = u[4], jp = u[5], jsd = u[6], iapp = u[7];

    const double film_eff = film0 - jsd * film_coeff;
    const double r_f = p.side.r_sei + film_eff / p.side.conductivity;
    const double drf_djsd = -film_coeff / p.side.conductivity;

    const double theta_n = csn / p.neg.c_max;
    const double theta_p = csp / p.pos.c_max;
    const double un = p.neg.ocv(theta_n);
    const double up = p.pos.ocv(theta_p);
    const double film_drop = r_f * iapp / p.neg.area;

    const double eta_n = phin - un + film_drop;
    const double eta_p = phip - up;
    const double eta_sd = phin - p.side.u_ref + film_drop;

    const double i0n = i0_unchecked(csn, p.neg.c_max, p.c_electrolyte, p.neg.rate_constant);
    const double i0p = i0_unchecked(csp, p.pos.c_max, p.c_electrolyte, p.pos.rate_constant);
    const double bvn = (i0n == 0.0) ? 0.0 : 2.0 * i0n * clamped_sinh(beta * eta_n);
    const double bvp = (i0p == 0.0) ? 0.0 : 2.0 * i0p * clamped_sinh(beta * eta_p);
    const double sd = (p.side.i0 == 0.0) ? 0.0 : p.side.i0 * clamped_exp(-gamma * eta_sd);

    r[0] = (csn - c_avg_n0 + jn * kt_n) / scale_cn;
    r[1] = (csp - c_avg_p0 + jp * kt_p) / scale_cp;
    r[2] = (jn - bvn) / scale_jn;
    r[3] = (jp - bvp) / scale_jp;
    r[4] = (jsd + sd) / scale_jsd;
    r[5] = (jp - iapp / p.pos.area) / scale_jp;
    r[6] = (jn + jsd + iapp / p.neg.area) / scale_jn;
    r[7] = iapp * (phip - phin) / 1e6 - power_mw;

    if (!r.allFinite()) return false;
    if (!jac) return true;

    Mat8& J = *jac;
    J.setZero();
    const double dun = p.neg.ocv.deriv(theta_n) / p.neg.c_max;
    const double dup = p.pos.ocv.deriv(theta_p) / p.pos.c_max;
    const double di0n = i0_deriv(csn, p.neg.c_max, p.c_electrolyte, p.neg.rate_constant);
    const double di0p = i0_deriv(csp, p.pos.c_max, p.c_electrolyte, p.pos.rate_constant);
    const double coshn = (i0n == 0.0) ? 0.0 : 2.0 * i0n * beta * clamped_cosh(beta * eta_n);
    const double coshp = (i0p == 0.0) ? 0.0 : 2.0 * i0p * beta * clamped_cosh(beta * eta_p);
    const double sinh_n = clamped_sinh(beta * eta_n);
    const double sinh_p = clamped_sinh(beta * eta_p);
    const double deta_djsd = drf_djsd * iapp / p.neg.area;
    const double deta_di = r_f / p.neg.area;

    J(0, 0) = 1.0 / scale_cn;
    J(0, 4) = kt_n / scale_cn;
    J(1, 1) = 1.0 / scale_cp;
    J(1, 5) = kt_p / scale_cp;

    J(2, 0) = (-2.0 * di0n * sinh_n - coshn * (-dun)) / scale_jn;
    J(2, 2) = -coshn / scale_jn;
    J(2, 4) = 1.0 / scale_jn;
    J(2, 6) = -coshn * deta_djsd / scale_jn;
    J(2, 7) = -coshn * deta_di / scale_jn;

    J(3, 1) = (-2.0 * di0p * sinh_p - coshp * (-dup)) / scale_jp;
    J(3, 3) = -coshp / scale_jp;
    J(3, 5) = 1.0 / scale_jp;

    const double sd_g = gamma * sd;  // -d(sd term)/d(eta_sd)
    J(4, 2) = -sd_g / scale_jsd;
    J(4, 6) = (1.0 - sd_g * deta_djsd) / scale_jsd;
    J(4, 7) = -sd_g * deta_di / scale_jsd;

    J(5, 5) = 1.0 / scale_jp;
    J(5, 7) = -1.0 / (p.pos.area * scale_jp);
    J(6, 4) = 1.0 / scale_jn;
    J(6, 6) = 1.0 / scale_jn;
    J(6, 7) = 1.0 / (p.neg.area * scale_jn);

    J(7, 2) = -iapp / 1e6;
    J(7, 3) = iapp / 1e6;
    J(7, 7) = (phip - phin) / 1e6;
    return J.allFinite();
  }

  AlgebraicState assemble(const Vec8& u) const {
    AlgebraicState a;
    a.c_s_n = u[0];
    a.c_s_p = u[1];
    a.phi_n = u[2];
    a.phi_p = u[3];
    a.j_n = u[4];
    a.j_p = u[5];
    a.j_sd = u[6];
    a.i_app = u[7];
    const double film_eff = film0 - a.j_sd * film_coeff;
    a.r_film = p.side.r_sei + film_eff / p.side.conductivity;
    const double drop = a.r_film * a.i_app / p.neg.area;
    a.eta_n = a.phi_n - p.neg.ocv(a.c_s_n / p.neg.c_max) + drop;
    a.eta_p = a.phi_p - p.pos.ocv(a.c_s_p / p.pos.c_max);
    a.eta_sd = a.phi_n - p.side.u_ref + drop;
    a.voltage = a.phi_p - a.phi_n;
    return a;
  }

  Vec8 pack(const AlgebraicState& a) const {
    Vec8 u;
    u << a.c_s_n, a.c_s_p, a.phi_n, a.phi_p, a.j_n, a.j_p, a.j_sd, a.i_app;
    return u;
  }
};

struct NewtonOutcome {
  bool converged = false;
  int iters = 0;
  double res_norm = std::numeric_limits<double>::infinity();
};

NewtonOutcome newton_solve(const SystemEval& sys, SystemEval::Vec8& u, double tol, int max_iters) {
  NewtonOutcome out;
  SystemEval::Vec8 r;
  SystemEval::Mat8 J;
  if (!sys.residual(u, r, &J)) return out;
  double norm = r.lpNorm<Eigen::Infinity>();
  int it = 0;
  for (; it < max_iters && norm > tol; ++it) {
    const SystemEval::Vec8 du = J.partialPivLu().solve(-r);
    if (!du.allFinite()) break;
    double lambda = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 30; ++ls) {
      SystemEval::Vec8 u2 = u + lambda * du;
      SystemEval::Vec8 r2;
      SystemEval::Mat8 J2;
      if (sys.residual(u2, r2, &J2)) {
        const double n2 = r2.lpNorm<Eigen::Infinity>();
        if (n2 < (1.0 - 1e-4 * lambda) * norm || n2 <= tol) {
          u = u2;
          r = r2;
          J = J2;
          norm = n2;
          accepted = true;
          break;
        }
      }
      lambda *= 0.5;
    }
    if (!accepted) break;  // stalled
  }
  if (norm <= tol && norm > 1e-13) {
    // one polishing iteration tightens the point to near machine precision,
    // which the lithium-conservation contract relies on
    const SystemEval::Vec8 du = J.partialPivLu().solve(-r);
    SystemEval::Vec8 u2 = u + du;
    SystemEval::Vec8 r2;
    if (sys.residual(u2, r2, nullptr)) {
      const double n2 = r2.lpNorm<Eigen::Infinity>();
      if (n2 < norm) {
        u = u2;
        norm = n2;
      }
    }
  }
  out.converged = norm <= tol;
  out.res_norm = norm;
  out.iters = it;
  return out;
}

// Nested scalar cascade: robust fallback and cold-start generator. Solves the
// same implicit system by eliminating everything against i_app (outer
// bisection on the power relation) and j_sd (inner bisection on the side
// reaction), following the physical V > 0 branch.
class Cascade {
public:
  Cascade(const SystemEval& sys) : s(sys) {}

  std::optional<SystemEval::Vec8> solve() const {
    double i_app = 0.0;
    if (s.power_mw != 0.0) {
      const double v0 = rest_voltage();
      double inner = 0.0;
      double outer = s.power_mw * 1e6 / std::clamp(v0, 1.0, 6.0);
      const double target_sign = (s.power_mw > 0.0) ? 1.0 : -1.0;
      bool bracketed = false;
      for (int k = 0; k < 120 && !bracketed; ++k) {
        auto pr = power_residual(outer);
        if (!pr) {
          // stepped over the concentration domain; pull back to its edge
          double good = inner, bad = outer;
          for (int j = 0; j < 80; ++j) {
            const double mid = 0.5 * (good + bad);
            if (power_residual(mid))
              good = mid;
            else
              bad = mid;
          }
          outer = good;
          pr = power_residual(outer);
          if (!pr || *pr * target_sign < 0.0) return std::nullopt;  // no root inside the domain
          bracketed = true;
          break;
        }
        if (*pr * target_sign >= 0.0) {
          bracketed = true;
          break;
        }
        inner = outer;
        outer *= 1.6;
      }
      if (!bracketed) return std::nullopt;
      // pres is increasing in i_app along the physical branch
      double lo = std::min(inner, outer), hi = std::max(inner, outer);
      for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const auto pr = power_residual(mid);
        if (!pr) return std::nullopt;
        (*pr > 0.0 ? hi : lo) = mid;
      }
      i_app = 0.5 * (lo + hi);
    }
    return assemble(i_app);
  }

private:
  const SystemEval& s;

  double rest_voltage() const {
    return s.p.pos.ocv(s.c_avg_p0 / s.p.pos.c_max) - s.p.neg.ocv(s.c_avg_n0 / s.p.neg.c_max);
  }

  struct NegSide {
    double j_n, c_s_n, phi_n, eta_sd;
  };

  std::optional<NegSide> neg_side(double i_app, double j_sd) const {
    const double film_eff = s.film0 - j_sd * s.film_coeff;
    const double r_f = s.p.side.r_sei + film_eff / s.p.side.conductivity;
    const double j_n = -i_app / s.p.neg.area - j_sd;
    const double c_s_n = s.c_avg_n0 - j_n * s.kt_n;
    if (!(c_s_n > 0.0 && c_s_n < s.p.neg.c_max)) return std::nullopt;
    const double i0n = i0_unchecked(c_s_n, s.p.neg.c_max, s.p.c_electrolyte, s.p.neg.rate_constant);
    if (i0n <= 0.0) return std::nullopt;
    const double eta_n = std::asinh(j_n / (2.0 * i0n)) / s.beta;
    const double drop = r_f * i_app / s.p.neg.area;
    const double phi_n = s.p.neg.ocv(c_s_n / s.p.neg.c_max) + eta_n - drop;
    return NegSide{j_n, c_s_n, phi_n, phi_n - s.p.side.u_ref + drop};
  }

  // g is strictly increasing in j_sd; root on [domain floor, 0]
  std::optional<double> solve_jsd(double i_app) const {
    if (s.p.side.i0 == 0.0) return 0.0;
    auto g = [&](double j_sd) -> std::optional<double> {
      const auto ns = neg_side(i_app, j_sd);
      if (!ns) return std::nullopt;
      return j_sd + s.p.side.i0 * clamped_exp(-s.gamma * ns->eta_sd);
    };
    const double floor_dom = -i_app / s.p.neg.area - (1.0 - 1e-12) * s.c_avg_n0 / s.kt_n;
    const auto g0 = g(0.0);
    if (!g0) return std::nullopt;
    if (*g0 <= 0.0) return 0.0;  // only possible in degenerate round-off cases
    double lo = -(*g0) * 1.5;
    for (int k = 0; k < 200; ++k) {
      if (lo <= floor_dom) {
        lo = floor_dom;
        break;
      }
      const auto gl = g(lo);
      if (gl && *gl < 0.0) break;
      lo *= 4.0;
    }
    {
      const auto gl = g(lo);
      if (!gl || *gl > 0.0) return std::nullopt;
    }
    double hi = 0.0;
    for (int k = 0; k < 160; ++k) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      const auto gm = g(mid);
      if (!gm) return std::nullopt;
      (*gm < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }

  std::optional<double> power_residual(double i_app) const {
    const auto u = assemble(i_app);
    if (!u) return std::nullopt;
    return (*u)[7] * ((*u)[3] - (*u)[2]) / 1e6 - s.power_mw;
  }

  std::optional<SystemEval::Vec8> assemble(double i_app) const {
    const double j_p = i_app / s.p.pos.area;
    const double c_s_p = s.c_avg_p0 - j_p * s.kt_p;
    if (!(c_s_p > 0.0 && c_s_p < s.p.pos.c_max)) return std::nullopt;
    const double i0p = i0_unchecked(c_s_p, s.p.pos.c_max, s.p.c_electrolyte, s.p.pos.rate_constant);
    if (i0p <= 0.0) return std::nullopt;
    const double eta_p = std::asinh(j_p / (2.0 * i0p)) / s.beta;
    const double phi_p = s.p.pos.ocv(c_s_p / s.p.pos.c_max) + eta_p;
    const auto j_sd = solve_jsd(i_app);
    if (!j_sd) return std::nullopt;
    const auto ns = neg_side(i_app, *j_sd);
    if (!ns) return std::nullopt;
    SystemEval::Vec8 u;
    u << ns->c_s_n, c_s_p, ns->phi_n, phi_p, ns->j_n, j_p, *j_sd, i_app;
    return u;
  }
};

}  // namespace

double exchange_current_density(double c_s, double c_max, double c_e, double k) {
  if (!(c_s >= 0.0 && c_s <= c_max))
    throw DomainViolation("exchange_current_density: surface concentration outside [0, c_max]");
  return i0_unchecked(c_s, c_max, c_e, k);
}

double bv_current(double i0, double eta, double temperature) {
  if (i0 == 0.0) return 0.0;
  return 2.0 * i0 * std::sinh(0.5 * PhysicalConstants::faraday * eta / (PhysicalConstants::gas * temperature));
}

double side_reaction_current(double phi_n, double i_app, double film_thickness, const CellParameters& p) {
  if (p.side.i0 == 0.0) return 0.0;
  const double r_f = p.side.r_sei + film_thickness / p.side.conductivity;
  const double eta_sd = phi_n - p.side.u_ref + r_f * i_app / p.neg.area;
  return -p.side.i0 * clamped_exp(-p.f_over_rt() * eta_sd);
}

Eigen::Matrix<double, 8, 1> algebraic_residual(const CellState& x, const AlgebraicState& a, double power_mw,
                                               const CellParameters& p) {
  if (!(a.c_s_n >= 0.0 && a.c_s_n <= p.neg.c_max && a.c_s_p >= 0.0 && a.c_s_p <= p.pos.c_max))
    throw DomainViolation("algebraic_residual: surface concentration outside [0, c_max]");
  SystemEval sys(p, x, power_mw, 0.0, /*implicit_step=*/false);
  SystemEval::Vec8 r;
  const SystemEval::Vec8 u = sys.pack(a);
  sys.residual(u, r, nullptr);
  return r;
}

AlgebraicState initial_guess(const CellState& x, double power_mw, const CellParameters& p) {
  AlgebraicState a;
  a.c_s_n = x.c_avg_n;
  a.c_s_p = x.c_avg_p;
  a.phi_n = p.neg.ocv(x.c_avg_n / p.neg.c_max);
  a.phi_p = p.pos.ocv(x.c_avg_p / p.pos.c_max);
  a.voltage = a.phi_p - a.phi_n;
  a.i_app = power_mw * 1e6 / std::clamp(a.voltage, 1.0, 6.0);
  a.j_p = a.i_app / p.pos.area;
  a.j_n = -a.i_app / p.neg.area;
  a.j_sd = 0.0;
  a.r_film = p.side.r_sei + x.film_thickness / p.side.conductivity;
  return a;
}

StepResult step(const CellState& x, double power_mw, double dt, const CellParameters& p, const AlgebraicState& guess,
                const StepOptions& opt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be > 0");
  SystemEval sys(p, x, power_mw, dt, /*implicit_step=*/true);

  SystemEval::Vec8 u = sys.pack(guess);
  if (!sys.in_domain(u)) u = sys.pack(initial_guess(x, power_mw, p));

  NewtonOutcome nw = newton_solve(sys, u, opt.tol, opt.max_iters);
  bool fallback = false;
  if (!nw.converged) {
    const auto cas = Cascade(sys).solve();
    if (!cas)
      throw DomainViolation("step: requested power is outside the cell's feasible envelope");
    u = *cas;
    fallback = true;
    nw = newton_solve(sys, u, opt.tol, opt.max_iters);
    if (!nw.converged)
      throw NonConvergence("step: Newton did not reach tolerance (residual " + std::to_string(nw.res_norm) + ")");
  }

  StepResult out;
  out.newton_iters = nw.iters;
  out.used_fallback = fallback;
  out.alg = sys.assemble(u);
  if (p.side.i0 == 0.0) out.alg.j_sd = 0.0;

  out.state.c_avg_n = x.c_avg_n - 3.0 * out.alg.j_n * dt / (p.neg.particle_radius * kFaraday);
  out.state.c_avg_p = x.c_avg_p - 3.0 * out.alg.j_p * dt / (p.pos.particle_radius * kFaraday);
  if (p.side.i0 == 0.0) {
    out.state.film_thickness = x.film_thickness;
    out.state.capacity_fade = x.capacity_fade;
  } else {
    out.state.film_thickness =
        x.film_thickness - out.alg.j_sd * p.side.molar_mass * dt / (p.side.density * kFaraday);
    out.state.capacity_fade = x.capacity_fade + std::abs(out.alg.j_sd) * p.neg.area * dt / p.q_max;
  }

  if (!(out.state.c_avg_n >= 0.0 && out.state.c_avg_n <= p.neg.c_max && out.state.c_avg_p >= 0.0 &&
        out.state.c_avg_p <= p.pos.c_max))
    throw DomainViolation("step: average concentration left [0, c_max]");
  return out;
}

CellOutputs outputs(const CellState& x, const AlgebraicState& a, const CellParameters& p) {
  CellOutputs o;
  o.energy_mwh = energy_mwh(x, p);
  o.voltage = a.phi_p - a.phi_n;
  o.fade_rate = std::abs(a.j_sd) * p.neg.area / p.q_max;
  return o;
}

CellState fresh_state(double soc, const CellParameters& p) {
  CellState x;
  x.c_avg_n = soc * p.neg.c_max;
  x.c_avg_p = (1.0 - soc) * p.pos.c_max;
  x.film_thickness = 0.0;
  x.capacity_fade = 0.0;
  return x;
}

}  // namespace battmpc
