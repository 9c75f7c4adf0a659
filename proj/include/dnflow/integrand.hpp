#ifndef DNFLOW_INTEGRAND_HPP
#define DNFLOW_INTEGRAND_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "dnflow/lattice.hpp"

namespace dnflow {

enum class IntegrandKind { p_dirichlet, p_dirichlet_lower_order, coefficient_p_dirichlet };

// Variational integrand f(x,u,xi). The gradient term is
//   a(x)/p ((|xi|^2 + eps^2)^{p/2} - eps^p),
// shifted so f(.,.,0) = 0; the lower-order variant adds the analogously
// regularized lambda/p |u|^p. Convex and p-coercive; the coercivity
// constant nu is derived from the data (min a / p), never user-declared.
struct IntegrandSpec {
  IntegrandKind kind = IntegrandKind::p_dirichlet;
  double p = 2.0;
  double lambda = 0.0;
  double eps_reg = 0.0;
  Lattice lattice;                 // for x-dependent coefficients
  std::vector<double> coeff;       // a(x) per node; empty means a == 1
  std::vector<double> growth_offset;  // G(x) per node; empty means G == 0

  double min_coeff() const;
  double max_coeff() const;
  double nu() const { return min_coeff() / p; }
  // Declared p-growth constant L and the constant part of G absorbing the
  // eps regularization.
  double growth_L() const;
  double growth_G_shift() const { return std::pow(eps_reg, p); }
  // f + coercivity_shift >= nu |xi|^p pointwise (shift vanishes at eps = 0).
  double coercivity_shift() const { return max_coeff() * std::pow(eps_reg, p) / p; }

  double coeff_at(std::size_t id) const { return coeff.empty() ? 1.0 : coeff[id]; }
  double growth_at(std::size_t id) const {
    return (growth_offset.empty() ? 0.0 : growth_offset[id]) + growth_G_shift();
  }
  void validate() const;
};

// xi is an N x n matrix, row-major (component-major), nxi = ncomp * n values.
double integrand_eval(const IntegrandSpec& spec, std::size_t node, const double* u, int ncomp,
                      const double* xi, int n);
void integrand_grad_u(const IntegrandSpec& spec, std::size_t node, const double* u, int ncomp,
                      const double* xi, int n, double* out);
void integrand_grad_xi(const IntegrandSpec& spec, std::size_t node, const double* u, int ncomp,
                       const double* xi, int n, double* out);

struct SelfCheckReport {
  bool convexity_ok = true;
  bool coercivity_ok = true;
  bool growth_ok = true;
  bool lipschitz_ok = true;
  double lipschitz_c = 0.0;  // empirically derived c(p,L), 10% headroom
  std::string witness;       // first violation, if any
  bool ok() const { return convexity_ok && coercivity_ok && growth_ok && lipschitz_ok; }
};

// Sampled verification of the structural hypotheses: midpoint convexity in
// (u,xi), coercivity against nu (with the eps shift), declared p-growth and
// the local Lipschitz inequality with an empirically derived constant.
SelfCheckReport integrand_self_check(const IntegrandSpec& spec, std::int64_t samples,
                                     std::uint64_t seed);

// Per-node envelope g(x,M) = max of f over a deterministic magnitude grid
// with max(|u|,|xi|) <= M; monotone in M.
std::vector<double> growth_envelope(const IntegrandSpec& spec, double M, int quantile_grid);

}  // namespace dnflow

#endif
