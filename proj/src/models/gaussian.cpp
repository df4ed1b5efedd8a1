#include "mcqmc/models/gaussian.hpp"

#include <cmath>

#include "mcqmc/error.hpp"
#include "mcqmc/generators.hpp"

namespace mcqmc {

GibbsSpec bivariate_normal_gibbs(double rho) {
  if (!(rho > -1.0 && rho < 1.0)) throw Error(ErrorKind::Config, "correlation must lie in (-1,1)");
  const double c = std::sqrt(1.0 - rho * rho);
  GibbsSpec g;
  g.s = 2;
  g.blocks.push_back({0, 1, 1, [rho, c](ConstVec x, ConstVec u, MutVec out) { out[0] = rho * x[1] + c * normal_quantile(u[0]); }});
  g.blocks.push_back({1, 1, 1, [rho, c](ConstVec x, ConstVec u, MutVec out) { out[0] = rho * x[0] + c * normal_quantile(u[0]); }});
  return g;
}

MisSpec normal_mis_exact() {
  MisSpec m;
  m.s = 1;
  m.d = 2;
  m.log_target = [](ConstVec x) { return normal_log_pdf(x[0]); };
  m.propose = [](ConstVec u, MutVec y) { y[0] = normal_quantile(u[0]); };
  m.log_proposal = [](ConstVec y) { return normal_log_pdf(y[0]); };
  return m;
}

MisSpec normal_mis_student(double dof, double scale) {
  if (!(dof > 0 && scale > 0)) throw Error(ErrorKind::Config, "t proposal needs dof > 0 and scale > 0");
  MisSpec m;
  m.s = 1;
  m.d = 2;
  m.log_target = [](ConstVec x) { return normal_log_pdf(x[0]); };
  m.propose = [dof, scale](ConstVec u, MutVec y) { y[0] = student_t_quantile(dof, scale, u[0]); };
  m.log_proposal = [dof, scale](ConstVec y) { return student_t_log_pdf(dof, scale, y[0]); };
  return m;
}

RwmSpec normal_rwm(double step) {
  RwmSpec r;
  r.s = 1;
  r.d = 2;
  r.log_target = [](ConstVec x) { return normal_log_pdf(x[0]); };
  r.increment = [step](ConstVec u, MutVec out) { out[0] = step * normal_quantile(u[0]); };
  return r;
}

}  // namespace mcqmc
