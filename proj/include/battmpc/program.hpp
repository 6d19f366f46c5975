#pragma once

#include <limits>
#include <ostream>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace battmpc {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// General smooth program in the form
///   min f(x)  s.t.  cl <= c(x) <= cu,  xl <= x <= xu
/// with cl_i == cu_i encoding equality rows. Sparsity patterns are fixed at
/// construction; value callbacks fill arrays aligned with the patterns.
class Program {
public:
  virtual ~Program() = default;

  virtual int num_vars() const = 0;
  virtual int num_cons() const = 0;
  virtual const Eigen::VectorXd& var_lower() const = 0;
  virtual const Eigen::VectorXd& var_upper() const = 0;
  virtual const Eigen::VectorXd& con_lower() const = 0;
  virtual const Eigen::VectorXd& con_upper() const = 0;
  virtual const Eigen::VectorXd& initial_point() const = 0;

  virtual double objective(const Eigen::VectorXd& x) const = 0;
  virtual void gradient(const Eigen::VectorXd& x, Eigen::VectorXd& grad) const = 0;
  virtual void constraints(const Eigen::VectorXd& x, Eigen::VectorXd& c) const = 0;

  virtual const std::vector<std::pair<int, int>>& jacobian_pattern() const = 0;
  virtual void jacobian_values(const Eigen::VectorXd& x, Eigen::VectorXd& vals) const = 0;

  /// Lower triangle of sigma * hess(f) + sum_i y_i hess(c_i).
  virtual const std::vector<std::pair<int, int>>& hessian_pattern() const = 0;
  virtual void hessian_values(const Eigen::VectorXd& x, double sigma, const Eigen::VectorXd& y,
                              Eigen::VectorXd& vals) const = 0;

  virtual bool is_linear() const { return false; }

  /// Plain-text sparse dump (format documented in the README): dimensions,
  /// bounds, and first-order data at the initial point. Complete for LPs.
  void dump(std::ostream& os) const;
};

/// Concrete LP: f(x) = cost . x + cost0, c(x) = A x. Carries no nonlinear
/// machinery at all; hessian pattern is empty by construction.
class LinearProgram : public Program {
public:
  LinearProgram(Eigen::VectorXd cost, double cost0, Eigen::SparseMatrix<double> a, Eigen::VectorXd con_lo,
                Eigen::VectorXd con_up, Eigen::VectorXd var_lo, Eigen::VectorXd var_up, Eigen::VectorXd x0);

  int num_vars() const override { return static_cast<int>(cost_.size()); }
  int num_cons() const override { return static_cast<int>(con_lo_.size()); }
  const Eigen::VectorXd& var_lower() const override { return var_lo_; }
  const Eigen::VectorXd& var_upper() const override { return var_up_; }
  const Eigen::VectorXd& con_lower() const override { return con_lo_; }
  const Eigen::VectorXd& con_upper() const override { return con_up_; }
  const Eigen::VectorXd& initial_point() const override { return x0_; }

  double objective(const Eigen::VectorXd& x) const override { return cost_.dot(x) + cost0_; }
  void gradient(const Eigen::VectorXd&, Eigen::VectorXd& g) const override { g = cost_; }
  void constraints(const Eigen::VectorXd& x, Eigen::VectorXd& c) const override { c = a_ * x; }

  const std::vector<std::pair<int, int>>& jacobian_pattern() const override { return jac_pattern_; }
  void jacobian_values(const Eigen::VectorXd&, Eigen::VectorXd& vals) const override { vals = jac_values_; }
  const std::vector<std::pair<int, int>>& hessian_pattern() const override { return empty_pattern_; }
  void hessian_values(const Eigen::VectorXd&, double, const Eigen::VectorXd&, Eigen::VectorXd&) const override {}

  bool is_linear() const override { return true; }

  const Eigen::VectorXd& cost() const { return cost_; }
  double cost_offset() const { return cost0_; }
  const Eigen::SparseMatrix<double>& matrix() const { return a_; }

private:
  Eigen::VectorXd cost_;
  double cost0_;
  Eigen::SparseMatrix<double> a_;
  Eigen::VectorXd con_lo_, con_up_, var_lo_, var_up_, x0_;
  std::vector<std::pair<int, int>> jac_pattern_, empty_pattern_;
  Eigen::VectorXd jac_values_;
};

}  // namespace battmpc
