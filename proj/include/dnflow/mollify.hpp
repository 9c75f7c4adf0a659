#ifndef DNFLOW_MOLLIFY_HPP
#define DNFLOW_MOLLIFY_HPP

#include "dnflow/integrand.hpp"
#include "dnflow/trajectory.hpp"

namespace dnflow {

// Exponential time mollification solving d/dt [v] = -([v] - v)/h with
// [v](0) = v_o, evaluated exactly at scheme times against the
// piecewise-constant input:
//   [v](t_i) = e^{-dt/h} [v](t_{i-1}) + (1 - e^{-dt/h}) v_i.
Trajectory landes_mollify(const Trajectory& traj, double h, const Field& v_o);

// Scalar variant used for mollifying per-cell energy densities.
std::vector<std::vector<double>> landes_mollify_scalar(
    const std::vector<std::vector<double>>& series, double dt, double h,
    const std::vector<double>& init);

struct MollifierMargin {
  double worst_margin = 0.0;  // min over the checked instances of rhs - lhs
  double lhs = 0.0, rhs = 0.0;
  bool pass = true;
};

// || [v] ||_{L^r(0,t_o;X)} <= || v ||_{L^r(0,t_o;X)}
//   + [ (h/r)(1 - e^{-t_o r / h}) ]^{1/r} || v_o ||_X
// at every scheme time t_o, X the slice L^{q+1} norm; r = infinity accepted
// as std::numeric_limits<double>::infinity().
MollifierMargin check_mollifier_bound(const Trajectory& traj, double h, const Field& v_o,
                                      double r);

// Node-and-time-wise f(x, [v], D[v]) <= [ f(x, v, Dv) ] with the scalar
// mollification seeded by f at (v_o, Dv_o).
MollifierMargin check_mollifier_convexity(const Trajectory& traj, double h,
                                          const IntegrandSpec& spec, const Field& v_o);

// (v(t + k h_ell) - v(t)) / (k h_ell), or the backward analog; defined at
// every scheme time through the trajectory's endpoint extensions.
Trajectory difference_quotient(const Trajectory& traj, int h_steps, bool backward);

struct PartsReport {
  double lhs = 0.0;
  double rhs = 0.0;  // full right-hand side including both boundary terms
  double delta1 = 0.0;
  double delta2 = 0.0;
  bool pass = true;  // lhs <= rhs
};

// Finite integration by parts over Omega_T at shift h = h_steps * h_ell:
//   intint Delta_{-h} |u|^{q-1}u . (v - u)
//     <= intint Delta_h v . (|v|^{q-1}v - |u|^{q-1}u)
//        - (1/h) intint_{(T-h,T)} b[u(t), v(t+h)]
//        + (1/h) intint_{(-h,0)} b[u(t), v(t)] + delta1 + delta2.
PartsReport check_finite_integration_by_parts(const Trajectory& u, const Trajectory& v,
                                              int h_steps);

}  // namespace dnflow

#endif
