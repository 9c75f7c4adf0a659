#ifndef DNFLOW_EXACT_HPP
#define DNFLOW_EXACT_HPP

#include <array>
#include <vector>

#include "dnflow/trajectory.hpp"

namespace dnflow {

enum class ExactKind { heat_separable, barenblatt_pme, barenblatt_plaplace };

// Closed-form reference solutions of the prototype flow
//   d/dt (|u|^{q-1} u) = div(|Du|^{p-2} Du):
//  - heat_separable: q=1, p=2, A e^{-n pi^2 t} prod_a sin(pi x_a) on the
//    unit box;
//  - barenblatt_pme: p=2, q<1; u = v^{1/q} with v the self-similar source
//    profile of d/dt v = Lap(v^m), m = 1/q > 1;
//  - barenblatt_plaplace: q=1, p>2, the self-similar p-Laplace source
//    profile.
// Compactly supported kinds are evaluated at t0 + t to stay clear of the
// initial singular limit.
struct ExactSolution {
  ExactKind kind = ExactKind::heat_separable;
  double q = 1.0;
  double p = 2.0;
  int n = 2;
  double t0 = 0.1;
  double amplitude = 1.0;  // heat prefactor, or the profile constant C
  std::array<double, 2> center{0.0, 0.0};

  void validate() const;
  bool compactly_supported() const { return kind != ExactKind::heat_separable; }
  bool slow_diffusion() const;
};

// Value at physical coordinates and scheme time t (the profile itself is
// evaluated at t0 + t for self-similar kinds). Scalar profiles; returns the
// single component.
double exact_value(const ExactSolution& sol, double x1, double x2, double t);

// Radius of the support at scheme time t; infinity for the heat kind.
double support_radius(const ExactSolution& sol, double t);

Field sample_exact(const ExactSolution& sol, const Lattice& lat, double t, int ncomp = 1);

// Ball masks of radius support_radius(t) + margin at the given times;
// nondecreasing by construction in the slow-diffusion regime.
DomainFamily support_hull_family(const ExactSolution& sol, const Lattice& lat, double margin,
                                 const std::vector<double>& times);

struct ErrorNorms {
  double lq1_space_time = 0.0;      // L^{q+1}(Omega_T) of traj - exact
  double sup_in_time_lq1 = 0.0;     // max over scheme times of slice L^{q+1}
  double exact_lq1_space_time = 0.0;  // norms of the exact solution, for
  double exact_sup_in_time_lq1 = 0.0; // relative-error reporting
};

ErrorNorms error_norms(const Trajectory& traj, const ExactSolution& sol);

}  // namespace dnflow

#endif
