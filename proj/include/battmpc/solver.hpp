#pragma once

#include <optional>
#include <string>

#include "battmpc/program.hpp"

namespace battmpc {

enum class SolveStatus { Optimal, Infeasible, IterationLimit, NumericalFailure };

const char* to_string(SolveStatus s);

struct SolveReport {
  SolveStatus status = SolveStatus::NumericalFailure;
  Eigen::VectorXd x;        // primal point
  Eigen::VectorXd y;        // constraint multipliers
  Eigen::VectorXd z_lower;  // bound multipliers (>= 0)
  Eigen::VectorXd z_upper;
  double objective = 0.0;
  double primal_feas = kInf;       // scaled infinity norms
  double dual_feas = kInf;
  double complementarity = kInf;   // max |compl residual|, scaled
  double duality_gap = kInf;       // sum of complementarity products, unscaled
  int iterations = 0;
  double wall_time_s = 0.0;
  std::string message;
};

struct WarmStart {
  Eigen::VectorXd x, y, z_lower, z_upper;
};

struct SolverOptions {
  double tol = 1e-8;       // KKT tolerance (scaled residuals)
  int max_iters = 3000;
  double mu_init = 0.1;
  double bound_push = 0.01;
  bool verbose = false;
};

/// Primal-dual interior-point method: slack reformulation of two-sided rows,
/// log barrier on finite bounds, inertia-corrected LDL^T of the augmented KKT
/// system, l1-merit backtracking line search, monotone barrier reduction.
/// One code path serves LPs and smooth NLPs; local optimality only.
SolveReport solve_program(const Program& p, const SolverOptions& opt = {},
                          const std::optional<WarmStart>& warm = std::nullopt);

/// LP front end: tight tolerances (1e-8); classifies infeasibility via an
/// elastic phase-1 solve when the main iteration cannot reach feasibility.
SolveReport solve_lp(const Program& p, const SolverOptions& opt = SolverOptions{});

/// NLP front end: KKT tolerance 1e-6, iteration budget 3000, optional warm start.
SolveReport solve_nlp(const Program& p, const std::optional<WarmStart>& warm = std::nullopt,
                      SolverOptions opt = SolverOptions{});

}  // namespace battmpc
