#ifndef DNFLOW_VERIFY_HPP
#define DNFLOW_VERIFY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "dnflow/integrand.hpp"
#include "dnflow/scheme.hpp"
#include "dnflow/trajectory.hpp"

namespace dnflow {

enum class ComparisonKind { stationary_ustar, stationary_mollified, landes_of_solution, user };

// Admissible comparison map: equals u_star off every slice, discrete time
// derivative = forward difference quotient of the trajectory (constant end
// extension), so the stationary kinds carry derivative zero exactly.
struct ComparisonMap {
  ComparisonKind kind = ComparisonKind::user;
  Trajectory trajectory;
  Trajectory time_derivative;
  Field u_star;
};

ComparisonMap stationary_comparison(ComparisonKind kind, const Field& v, const Field& u_star,
                                    const Trajectory& like);
ComparisonMap landes_comparison(const Trajectory& u, double lambda, const Field& v_o,
                                const Field& u_star);

// Space-time test function vanishing at t = 0, t = T and outside the
// sigma-inner set of every slice.
struct TestFunction {
  Trajectory phi;
  std::string label;
};

// Default 8-element basis: eta_sigma cutoffs at two widths, each bare and
// multiplied by an interior bump, under two temporal profiles (hat,
// squared-sine), normalized to unit V^p norm.
std::vector<TestFunction> make_test_basis(const Trajectory& like, const DomainFamily& family,
                                          double sigma1, double sigma2);

struct ResidualReport {
  double margin = 0.0;  // rhs - lhs of the certified inequality
  double slack = 0.0;   // solver slack + time-discretization credit
  double lhs = 0.0, rhs = 0.0;
  bool pass = true;
  std::string note;
};

// Right minus left of the variational inequality at scheme time tau:
//   intint f(v) + intint dt_v . (|v|^{q-1}v - |u|^{q-1}u)
//   - int b[u(tau), v(tau)] + int b[u_o, v(0)] - intint f(u).
// Space integrals run over the whole box; the u_*-background contributions
// cancel between the two f terms for admissible maps.
ResidualReport variational_residual(const SchemeRun& run, const IntegrandSpec& spec,
                                    const ComparisonMap& v, double tau);

// intint f(u+phi) - intint f(u) - <|u|^{q-1}u, dt_phi>, with the pairing
//   <w, dt_phi> = sum_{i=0}^{ell-1} h int w(t_i) . (phi_{i+1} - phi_i)/h.
ResidualReport parabolic_minimizer_residual(const SchemeRun& run, const IntegrandSpec& spec,
                                            const TestFunction& phi);

double dual_pairing(const SchemeRun& run, const TestFunction& phi);

struct DualNormReport {
  double dual_norm_lower_bound = 0.0;
  double rhs_bound = 0.0;  // [ ||u||_{V^p}^p + ||G||_{L^1(Omega_T)} ]^{(p-1)/p}
  double ratio = 0.0;
};

DualNormReport dual_norm_estimate(const SchemeRun& run, const IntegrandSpec& spec,
                                  const std::vector<TestFunction>& basis);

// (1/h) sum_{0 < t_i <= h} h_ell || u(t_i) - u_o ||_{L^{q+1}(K)}^{q+1}
// for each h in h_list.
std::vector<double> initial_condition_check(const SchemeRun& run, const Field& u_o,
                                            const SpatialMask& K,
                                            const std::vector<double>& h_list);

// max over i >= 1 of || u(t_i) - u(t_{i-1}) ||_{L^{q+1}(Omega)}.
double continuity_modulus(const Trajectory& traj, double q);

struct HardyReport {
  double ratio = 0.0;
  double numerator = 0.0, denominator = 0.0;
  bool degenerate = false;  // 0/0
  bool unbounded = false;   // nonzero field with vanishing gradient mass
};

// int (|u|/dist)^p over the mask against int |Du|^p.
HardyReport hardy_check(const Field& field, const SpatialMask& mask, double p);

}  // namespace dnflow

#endif
