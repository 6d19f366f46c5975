#include "battmpc/program.hpp"

#include <cmath>

#include "battmpc/num_format.hpp"

namespace battmpc {

namespace {
std::string bound_str(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  return format_double(v);
}
}  // namespace

void Program::dump(std::ostream& os) const {
  const int n = num_vars(), m = num_cons();
  os << "battmpc-program v1\n";
  os << "vars " << n << "\nconstraints " << m << "\nlinear " << (is_linear() ? 1 : 0) << '\n';
  const Eigen::VectorXd& x0 = initial_point();
  os << "objective_at_x0 " << format_double(objective(x0)) << '\n';
  os << "section var_bounds_and_x0\n";
  for (int i = 0; i < n; ++i)
    os << i << ' ' << bound_str(var_lower()[i]) << ' ' << bound_str(var_upper()[i]) << ' ' << format_double(x0[i])
       << '\n';
  os << "section con_bounds\n";
  for (int i = 0; i < m; ++i) os << i << ' ' << bound_str(con_lower()[i]) << ' ' << bound_str(con_upper()[i]) << '\n';

  Eigen::VectorXd g(n);
  gradient(x0, g);
  os << "section gradient_at_x0\n";
  for (int i = 0; i < n; ++i)
    if (g[i] != 0.0) os << i << ' ' << format_double(g[i]) << '\n';

  Eigen::VectorXd c(m);
  constraints(x0, c);
  os << "section constraints_at_x0\n";
  for (int i = 0; i < m; ++i) os << i << ' ' << format_double(c[i]) << '\n';

  const auto& jp = jacobian_pattern();
  Eigen::VectorXd jv(jp.size());
  jacobian_values(x0, jv);
  os << "section jacobian_at_x0\n";
  for (std::size_t k = 0; k < jp.size(); ++k)
    os << jp[k].first << ' ' << jp[k].second << ' ' << format_double(jv[k]) << '\n';
  os << "end\n";
}

LinearProgram::LinearProgram(Eigen::VectorXd cost, double cost0, Eigen::SparseMatrix<double> a,
                             Eigen::VectorXd con_lo, Eigen::VectorXd con_up, Eigen::VectorXd var_lo,
                             Eigen::VectorXd var_up, Eigen::VectorXd x0)
    : cost_(std::move(cost)),
      cost0_(cost0),
      a_(std::move(a)),
      con_lo_(std::move(con_lo)),
      con_up_(std::move(con_up)),
      var_lo_(std::move(var_lo)),
      var_up_(std::move(var_up)),
      x0_(std::move(x0)) {
  a_.makeCompressed();
  jac_pattern_.reserve(a_.nonZeros());
  jac_values_.resize(a_.nonZeros());
  int k = 0;
  for (int col = 0; col < a_.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(a_, col); it; ++it) {
      jac_pattern_.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()));
      jac_values_[k++] = it.value();
    }
}

}  // namespace battmpc
