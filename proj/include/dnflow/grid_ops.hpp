#ifndef DNFLOW_GRID_OPS_HPP
#define DNFLOW_GRID_OPS_HPP

#include <vector>

#include "dnflow/field.hpp"
#include "dnflow/geometry.hpp"
#include "dnflow/trajectory.hpp"

namespace dnflow {

// Forward-difference gradient on each cell, an N x n matrix stored row-major
// per cell base node: grad[cell][c*n + a] = (u(k+e_a)[c] - u(k)[c]) / dx_a.
struct CellGradient {
  Lattice lattice;
  int ncomp = 1;
  std::vector<double> values;  // node-indexed, valid only where is_cell

  const double* at(std::size_t id) const {
    return values.data() + id * static_cast<std::size_t>(ncomp * lattice.n);
  }
  double* at(std::size_t id) {
    return values.data() + id * static_cast<std::size_t>(ncomp * lattice.n);
  }
};

CellGradient discrete_gradient(const Field& field);

// ( sum_{nodes in mask} |value|^p dx^n )^{1/p}; empty mask gives 0.
double lp_space_norm(const Field& field, const SpatialMask& mask, double p);

// Slice L^p norm over the whole lattice.
double lp_space_norm(const Field& field, double p);

// || Du ||_{L^p(Omega_T)} + || u ||_{L^p(Omega_T)} with the left-closed
// piecewise-constant time quadrature sum_i h (slice norm)^p.
double vp_norm(const Trajectory& traj);

// Space-time L^{q+1} norm of the trajectory.
double lq1_space_time_norm(const Trajectory& traj, double q);

// Space-time L^p norm of the gradient alone.
double gradient_lp_space_time(const Trajectory& traj, double p);

// Copies u_star onto every node outside the mask; the interior is untouched.
Field clamp_to_boundary(const Field& field, const SpatialMask& mask, const Field& u_star);

}  // namespace dnflow

#endif
