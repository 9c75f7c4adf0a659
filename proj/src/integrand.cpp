#include "dnflow/integrand.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "dnflow/algebra.hpp"
#include "dnflow/util.hpp"

namespace dnflow {

double IntegrandSpec::min_coeff() const {
  if (coeff.empty()) return 1.0;
  double m = coeff[0];
  for (double v : coeff) m = std::min(m, v);
  return m;
}

double IntegrandSpec::max_coeff() const {
  if (coeff.empty()) return 1.0;
  double m = coeff[0];
  for (double v : coeff) m = std::max(m, v);
  return m;
}

double IntegrandSpec::growth_L() const {
  const double base = (max_coeff() + lambda) / p;
  return (p >= 2.0) ? std::pow(2.0, 0.5 * p) * base : base;
}

void IntegrandSpec::validate() const {
  if (!(p > 1.0)) throw std::invalid_argument("integrand needs p > 1");
  if (lambda < 0.0) throw std::invalid_argument("lambda must be nonnegative");
  if (eps_reg < 0.0) throw std::invalid_argument("eps_reg must be nonnegative");
  if (p < 2.0 && eps_reg == 0.0)
    throw std::invalid_argument("p < 2 requires eps_reg > 0 for differentiability");
  if (kind != IntegrandKind::coefficient_p_dirichlet && !coeff.empty())
    throw std::invalid_argument("coefficient field only valid for the coefficient kind");
  if (!coeff.empty() && coeff.size() != lattice.node_count())
    throw std::invalid_argument("coefficient field size mismatch");
  if (!growth_offset.empty() && growth_offset.size() != lattice.node_count())
    throw std::invalid_argument("growth field size mismatch");
  for (double v : coeff)
    if (!(v > 0.0)) throw std::invalid_argument("coefficient must stay positive");
  for (double v : growth_offset)
    if (v < 0.0) throw std::invalid_argument("growth offset must be nonnegative");
  const bool wants_u = (kind == IntegrandKind::p_dirichlet_lower_order);
  if (!wants_u && lambda != 0.0)
    throw std::invalid_argument("lambda requires the lower-order kind");
}

namespace {

// (|z|^2 + eps^2)^{p/2} - eps^p, and its radial derivative factor
// (|z|^2 + eps^2)^{(p-2)/2} for the chain rule.
double shifted_power(double norm2, double p, double eps) {
  if (p == 2.0) return norm2;
  return std::pow(norm2 + eps * eps, 0.5 * p) - std::pow(eps, p);
}
double radial_factor(double norm2, double p, double eps) {
  if (p == 2.0) return 1.0;
  return std::pow(norm2 + eps * eps, 0.5 * (p - 2.0));
}

}  // namespace

double integrand_eval(const IntegrandSpec& spec, std::size_t node, const double* u, int ncomp,
                      const double* xi, int n) {
  const int nxi = ncomp * n;
  double xi2 = 0.0;
  for (int k = 0; k < nxi; ++k) xi2 += xi[k] * xi[k];
  double val = spec.coeff_at(node) / spec.p * shifted_power(xi2, spec.p, spec.eps_reg);
  if (spec.kind == IntegrandKind::p_dirichlet_lower_order && spec.lambda > 0.0) {
    double u2 = 0.0;
    for (int c = 0; c < ncomp; ++c) u2 += u[c] * u[c];
    val += spec.lambda / spec.p * shifted_power(u2, spec.p, spec.eps_reg);
  }
  return val;
}

void integrand_grad_u(const IntegrandSpec& spec, std::size_t, const double* u, int ncomp,
                      const double* xi, int n, double* out) {
  (void)xi;
  (void)n;
  for (int c = 0; c < ncomp; ++c) out[c] = 0.0;
  if (spec.kind != IntegrandKind::p_dirichlet_lower_order || spec.lambda == 0.0) return;
  double u2 = 0.0;
  for (int c = 0; c < ncomp; ++c) u2 += u[c] * u[c];
  if (spec.p < 2.0 && spec.eps_reg == 0.0 && u2 == 0.0)
    throw std::domain_error("nondifferentiable point: u = 0 with p < 2 and no regularization");
  const double fac = spec.lambda * radial_factor(u2, spec.p, spec.eps_reg);
  for (int c = 0; c < ncomp; ++c) out[c] = fac * u[c];
}

void integrand_grad_xi(const IntegrandSpec& spec, std::size_t node, const double*, int ncomp,
                       const double* xi, int n, double* out) {
  const int nxi = ncomp * n;
  double xi2 = 0.0;
  for (int k = 0; k < nxi; ++k) xi2 += xi[k] * xi[k];
  if (spec.p < 2.0 && spec.eps_reg == 0.0 && xi2 == 0.0)
    throw std::domain_error("nondifferentiable point: xi = 0 with p < 2 and no regularization");
  const double fac = spec.coeff_at(node) * radial_factor(xi2, spec.p, spec.eps_reg);
  for (int k = 0; k < nxi; ++k) out[k] = fac * xi[k];
}

SelfCheckReport integrand_self_check(const IntegrandSpec& spec, std::int64_t samples,
                                     std::uint64_t seed) {
  if (samples < 1000) throw std::invalid_argument("self check needs >= 1e3 samples");
  spec.validate();
  SelfCheckReport rep;
  Rng rng(seed);
  const int ncomp = 2, n = spec.lattice.n;
  const int nxi = ncomp * n;
  const std::size_t nodes = spec.lattice.node_count();
  std::vector<double> u1(ncomp), u2(ncomp), um(ncomp);
  std::vector<double> x1(nxi), x2(nxi), xm(nxi);
  auto draw = [&](std::vector<double>& u, std::vector<double>& x) {
    const double ru = rng.log_uniform(1e-3, 1e3);
    const double rx = rng.log_uniform(1e-3, 1e3);
    for (auto& v : u) v = ru * rng.normal();
    for (auto& v : x) v = rx * rng.normal();
  };
  auto fail = [&](const char* what, double lhs, double rhs) {
    std::ostringstream os;
    os << what << ": lhs=" << lhs << " rhs=" << rhs;
    if (rep.witness.empty()) rep.witness = os.str();
  };

  // pass 1: convexity, coercivity, growth; derive the Lipschitz ratio sup
  double lip_sup = 0.0;
  for (std::int64_t k = 0; k < samples; ++k) {
    const std::size_t node = static_cast<std::size_t>(rng.uniform01() * nodes) % nodes;
    draw(u1, x1);
    draw(u2, x2);
    const double f1 = integrand_eval(spec, node, u1.data(), ncomp, x1.data(), n);
    const double f2 = integrand_eval(spec, node, u2.data(), ncomp, x2.data(), n);
    for (int c = 0; c < ncomp; ++c) um[c] = 0.5 * (u1[c] + u2[c]);
    for (int j = 0; j < nxi; ++j) xm[j] = 0.5 * (x1[j] + x2[j]);
    const double fm = integrand_eval(spec, node, um.data(), ncomp, xm.data(), n);
    const double scale = 1.0 + std::abs(f1) + std::abs(f2);
    if (fm > 0.5 * (f1 + f2) + 1e-10 * scale) {
      rep.convexity_ok = false;
      fail("midpoint convexity", fm, 0.5 * (f1 + f2));
    }
    const double xi_nrm = vec_norm(x1.data(), nxi);
    const double u_nrm = vec_norm(u1.data(), ncomp);
    if (spec.nu() * std::pow(xi_nrm, spec.p) >
        f1 + spec.coercivity_shift() + 1e-10 * (1.0 + f1)) {
      rep.coercivity_ok = false;
      fail("coercivity", spec.nu() * std::pow(xi_nrm, spec.p), f1);
    }
    const double gbound =
        spec.growth_L() *
        (std::pow(xi_nrm, spec.p) + std::pow(u_nrm, spec.p) + spec.growth_at(node));
    if (f1 > gbound * (1.0 + 1e-10)) {
      rep.growth_ok = false;
      fail("p-growth", f1, gbound);
    }
    // Lipschitz ratio
    double du = 0.0, dxi = 0.0;
    for (int c = 0; c < ncomp; ++c) du += (u1[c] - u2[c]) * (u1[c] - u2[c]);
    for (int j = 0; j < nxi; ++j) dxi += (x1[j] - x2[j]) * (x1[j] - x2[j]);
    const double bracket =
        std::pow(vec_norm(x1.data(), nxi) + vec_norm(x2.data(), nxi) + vec_norm(u1.data(), ncomp) +
                     vec_norm(u2.data(), ncomp),
                 spec.p - 1.0) +
        std::pow(spec.growth_at(node), (spec.p - 1.0) / spec.p);
    const double rhs = bracket * (std::sqrt(du) + std::sqrt(dxi));
    if (rhs > 0.0) {
      const double ratio = std::abs(f1 - f2) / rhs;
      if (ratio > lip_sup) lip_sup = ratio;
    }
  }
  rep.lipschitz_c = 1.1 * lip_sup;

  // pass 2: verify the Lipschitz bound with the derived constant on a fresh
  // stream
  Rng rng2(mix_seed(seed, 9001));
  auto draw2 = [&](std::vector<double>& u, std::vector<double>& x) {
    const double ru = rng2.log_uniform(1e-3, 1e3);
    const double rx = rng2.log_uniform(1e-3, 1e3);
    for (auto& v : u) v = ru * rng2.normal();
    for (auto& v : x) v = rx * rng2.normal();
  };
  for (std::int64_t k = 0; k < samples; ++k) {
    const std::size_t node = static_cast<std::size_t>(rng2.uniform01() * nodes) % nodes;
    draw2(u1, x1);
    draw2(u2, x2);
    const double f1 = integrand_eval(spec, node, u1.data(), ncomp, x1.data(), n);
    const double f2 = integrand_eval(spec, node, u2.data(), ncomp, x2.data(), n);
    double du = 0.0, dxi = 0.0;
    for (int c = 0; c < ncomp; ++c) du += (u1[c] - u2[c]) * (u1[c] - u2[c]);
    for (int j = 0; j < nxi; ++j) dxi += (x1[j] - x2[j]) * (x1[j] - x2[j]);
    const double bracket =
        std::pow(vec_norm(x1.data(), nxi) + vec_norm(x2.data(), nxi) + vec_norm(u1.data(), ncomp) +
                     vec_norm(u2.data(), ncomp),
                 spec.p - 1.0) +
        std::pow(spec.growth_at(node), (spec.p - 1.0) / spec.p);
    const double rhs = rep.lipschitz_c * bracket * (std::sqrt(du) + std::sqrt(dxi));
    if (std::abs(f1 - f2) > rhs + 1e-12 * (1.0 + std::abs(f1) + std::abs(f2))) {
      rep.lipschitz_ok = false;
      fail("local Lipschitz", std::abs(f1 - f2), rhs);
    }
  }
  return rep;
}

std::vector<double> growth_envelope(const IntegrandSpec& spec, double M, int quantile_grid) {
  if (M < 0.0) throw std::invalid_argument("M must be nonnegative");
  const int k = std::max(1, quantile_grid);
  const int ncomp = 1, n = spec.lattice.n;
  std::vector<double> out(spec.lattice.node_count(), 0.0);
  std::vector<double> u(ncomp, 0.0), xi(ncomp * n, 0.0);
  for (std::size_t id = 0; id < out.size(); ++id) {
    double best = 0.0;
    for (int iu = 0; iu <= k; ++iu)
      for (int ix = 0; ix <= k; ++ix) {
        u[0] = M * iu / k;
        xi[0] = M * ix / k;
        best = std::max(best, integrand_eval(spec, id, u.data(), ncomp, xi.data(), n));
      }
    out[id] = best;
  }
  return out;
}

}  // namespace dnflow
