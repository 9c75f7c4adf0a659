#ifndef DNFLOW_MINIMIZER_HPP
#define DNFLOW_MINIMIZER_HPP

#include <cstdint>
#include <vector>

#include "dnflow/field.hpp"
#include "dnflow/geometry.hpp"
#include "dnflow/integrand.hpp"

namespace dnflow {

// One implicit step: minimize
//   F[w] = sum_cells f(x, w, D_h w) vol + (vol/h) sum_nodes b[u_prev, w]
// over fields with w = u_star outside the mask.
struct StepProblem {
  const IntegrandSpec* spec = nullptr;
  Field u_prev;
  Field u_star;
  SpatialMask mask;
  double h = 1.0;
  double q = 1.0;

  void validate() const;
};

struct SolverSettings {
  double tol_obj = 1e-10;   // relative objective decrease, also the residual target
  double tol_step = 1e-9;   // sup-norm step threshold
  int max_iters = 20000;
  double backtracking = 0.5;  // step shrink factor in (0,1)

  void validate() const;
};

struct StepResult {
  Field minimizer;
  int iterations = 0;
  double achieved_tol = 0.0;  // sup-norm of the free-node objective gradient
  bool converged = true;
  double objective = 0.0;
};

double step_objective(const StepProblem& prob, const Field& w);

// Objective and its gradient over free nodes in one pass; gradient entries
// at clamped nodes are zero. Used by the solver and by the a-posteriori
// margin computations.
double step_objective_gradient(const StepProblem& prob, const Field& w, Field& grad);

// Energy part sum_cells f vol alone (all cells of Omega).
double step_energy(const StepProblem& prob, const Field& w);

// Accelerated descent with backtracking line search; monotone in the
// objective across accepted iterations. For q < 1, steps crossing zero are
// damped componentwise to stop at 1e-14 so the power gradient stays in its
// smooth range. Warm start defaults to clamp(u_prev).
StepResult minimize_step(const StepProblem& prob, const SolverSettings& settings);
StepResult minimize_step(const StepProblem& prob, const SolverSettings& settings,
                         const Field& w_init);

struct MinimalityReport {
  double worst_margin = 0.0;       // min over competitors of rhs - lhs
  double worst_margin_slack = 0.0; // slack budget at the worst competitor
  int competitors = 0;
  bool all_passed = true;          // every margin >= -slack
};

// Discrete form of the reformulated minimality: for sampled admissible w,
//   int f(w*) <= int f(w) + (1/h) int (|w*|^{q-1}w* - |u_prev|^{q-1}u_prev).(w - w*)
// up to slack = achieved_tol * ||w - w*||_1.
MinimalityReport verify_step_minimality(const StepProblem& prob, const StepResult& result,
                                        int competitors, std::uint64_t seed);

}  // namespace dnflow

#endif
