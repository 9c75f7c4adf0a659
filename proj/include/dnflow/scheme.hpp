#ifndef DNFLOW_SCHEME_HPP
#define DNFLOW_SCHEME_HPP

#include <cstdint>
#include <memory>
#include <vector>

#include "dnflow/integrand.hpp"
#include "dnflow/minimizer.hpp"
#include "dnflow/trajectory.hpp"

namespace dnflow {

struct SchemeConfig {
  int ell = 1;
  double T = 1.0;
  double q = 1.0;
  std::shared_ptr<const DomainFamily> family;
  std::shared_ptr<const IntegrandSpec> spec;
  Field u_o;     // extended by u_star outside the initial slice during run()
  Field u_star;
  SolverSettings settings;
  int minimality_competitors = 0;  // per-step competitor count, 0 disables
  std::uint64_t seed = 12345;

  void validate() const;
};

// Per-step bookkeeping for the a-posteriori estimates.
struct StepRecord {
  double t = 0.0;
  double energy_f = 0.0;        // sum_cells f(x,u_i,Du_i) vol over Omega
  double lq1_mass = 0.0;        // sum_nodes |u_i|^{q+1} vol
  double dissipation = 0.0;     // sum_nodes |increment|^2 vol
  double achieved_tol = 0.0;
  int iterations = 0;
  bool converged = true;
  double step_margin = 0.0;       // worst minimality margin, when enabled
  double step_margin_slack = 0.0;
  // slack = achieved_tol * || competitor - u_i ||_1 for the two canonical
  // competitors used by the estimate chains
  double slack_vs_ustar = 0.0;
  double slack_vs_prev = 0.0;
};

struct EnergyLedger {
  std::vector<StepRecord> steps;  // index 0 holds the initial datum row
  double energy_ustar = 0.0;      // sum_cells f(x,u_*,Du_*) vol
  double lq1_uo = 0.0;            // sum_nodes |u_o|^{q+1} vol (extended datum)
  double lq1_ustar = 0.0;
  bool any_nonconverged = false;

  std::string to_csv() const;  // `i,t,energy_f,lq1_mass,dissipation,step_margin,converged`
};

struct SchemeRun {
  Trajectory trajectory;
  EnergyLedger ledger;
  double nu_cache = 0.0;     // coercivity constant of the integrand
  double shift_cache = 0.0;  // eps-regularization shift per unit measure-time
};

// The minimizing-movements loop: steps[0] is the extended initial datum,
// steps[i] minimizes the step functional on the slice at t_i with
// u_prev = steps[i-1]. Rejects families that fail the nondecreasing check
// and integrands that fail their self check.
SchemeRun scheme_run(const SchemeConfig& config);

struct MarginReport {
  double worst_margin = 0.0;
  double slack = 0.0;
  double lhs = 0.0, rhs = 0.0;  // values at the worst instance
  bool pass = true;
};

// Discrete energy estimates with the explicit constants:
//  (i)  q/(2(q+1)) |u(mh)|_{q+1}^{q+1} <= mh F(u_*) + 2q/(q+1) |u_o|^{q+1}
//         + (2^q+1)/(q+1) |u_*|^{q+1} + accumulated slack,  every m
//  (ii) nu int int |Du|^p <= the same right-hand side at m = ell.
MarginReport check_energy_estimates(const SchemeRun& run, char which);  // 'm' mass, 'g' gradient

// sum over t_i in (eps, T] of h int |backward increment of the (q+1)/2
// power|^2 / c(q), against the 1/(eps - 2h) energy bound. Requires
// ell > 4T/eps. c34a is the derived L3.4a chain constant.
MarginReport check_dissipation_bound(const SchemeRun& run, double epsilon, double c34a);

// The left-hand side of the dissipation bound alone (no precondition);
// used for the cross-resolution stability comparison.
double dissipation_lhs(const SchemeRun& run, double epsilon, double c34a);

}  // namespace dnflow

#endif
