#include "dnflow/exact.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "dnflow/algebra.hpp"
#include "dnflow/util.hpp"

namespace dnflow {

namespace {
constexpr double kPi = 3.14159265358979323846;

struct PmeParams {
  double m, alpha, beta, kappa;
};

PmeParams pme_params(const ExactSolution& sol) {
  PmeParams pp;
  pp.m = 1.0 / sol.q;
  pp.alpha = sol.n / (sol.n * (pp.m - 1.0) + 2.0);
  pp.beta = pp.alpha / sol.n;
  pp.kappa = pp.alpha * (pp.m - 1.0) / (2.0 * pp.m * sol.n);
  return pp;
}

struct PlapParams {
  double alpha, beta, kappa;
};

PlapParams plap_params(const ExactSolution& sol) {
  PlapParams pp;
  pp.alpha = sol.n / (sol.n * (sol.p - 2.0) + sol.p);
  pp.beta = pp.alpha / sol.n;
  pp.kappa = (sol.p - 2.0) / sol.p * std::pow(pp.alpha / sol.n, 1.0 / (sol.p - 1.0));
  return pp;
}

}  // namespace

void ExactSolution::validate() const {
  if (n != 1 && n != 2) throw std::invalid_argument("exact solutions support n in {1,2}");
  if (!(amplitude > 0.0)) throw std::invalid_argument("amplitude must be positive");
  switch (kind) {
    case ExactKind::heat_separable:
      if (q != 1.0 || p != 2.0)
        throw RegimeError("heat_separable requires q = 1, p = 2");
      break;
    case ExactKind::barenblatt_pme:
      if (p != 2.0) throw RegimeError("barenblatt_pme requires p = 2");
      if (!(q > 0.0 && q < 1.0))
        throw RegimeError("barenblatt_pme requires q in (0,1) (slow diffusion)");
      if (!(t0 > 0.0)) throw RegimeError("barenblatt profiles need t0 > 0");
      break;
    case ExactKind::barenblatt_plaplace:
      if (q != 1.0) throw RegimeError("barenblatt_plaplace requires q = 1");
      if (!(p > 2.0)) throw RegimeError("barenblatt_plaplace requires p > 2 (slow diffusion)");
      if (!(t0 > 0.0)) throw RegimeError("barenblatt profiles need t0 > 0");
      break;
  }
}

bool ExactSolution::slow_diffusion() const { return p - 1.0 > q; }

double exact_value(const ExactSolution& sol, double x1, double x2, double t) {
  switch (sol.kind) {
    case ExactKind::heat_separable: {
      double v = sol.amplitude * std::exp(-sol.n * kPi * kPi * t) * std::sin(kPi * x1);
      if (sol.n == 2) v *= std::sin(kPi * x2);
      return v;
    }
    case ExactKind::barenblatt_pme: {
      const PmeParams pp = pme_params(sol);
      const double s = sol.t0 + t;
      if (!(s > 0.0)) throw std::out_of_range("time before the profile origin");
      const double dx = x1 - sol.center[0];
      const double dy = (sol.n == 2) ? x2 - sol.center[1] : 0.0;
      const double r2 = dx * dx + dy * dy;
      const double arg =
          sol.amplitude - pp.kappa * r2 * std::pow(s, -2.0 * pp.beta);
      if (arg <= 0.0) return 0.0;
      const double v = std::pow(s, -pp.alpha) * std::pow(arg, 1.0 / (pp.m - 1.0));
      return std::pow(v, pp.m);  // u = v^{1/q} = v^m
    }
    case ExactKind::barenblatt_plaplace: {
      const PlapParams pp = plap_params(sol);
      const double s = sol.t0 + t;
      if (!(s > 0.0)) throw std::out_of_range("time before the profile origin");
      const double dx = x1 - sol.center[0];
      const double dy = (sol.n == 2) ? x2 - sol.center[1] : 0.0;
      const double r = std::sqrt(dx * dx + dy * dy);
      const double arg =
          sol.amplitude -
          pp.kappa * std::pow(r * std::pow(s, -pp.beta), sol.p / (sol.p - 1.0));
      if (arg <= 0.0) return 0.0;
      return std::pow(s, -pp.alpha) * std::pow(arg, (sol.p - 1.0) / (sol.p - 2.0));
    }
  }
  return 0.0;
}

double support_radius(const ExactSolution& sol, double t) {
  switch (sol.kind) {
    case ExactKind::heat_separable:
      return std::numeric_limits<double>::infinity();
    case ExactKind::barenblatt_pme: {
      const PmeParams pp = pme_params(sol);
      return std::sqrt(sol.amplitude / pp.kappa) * std::pow(sol.t0 + t, pp.beta);
    }
    case ExactKind::barenblatt_plaplace: {
      const PlapParams pp = plap_params(sol);
      return std::pow(sol.amplitude / pp.kappa, (sol.p - 1.0) / sol.p) *
             std::pow(sol.t0 + t, pp.beta);
    }
  }
  return 0.0;
}

Field sample_exact(const ExactSolution& sol, const Lattice& lat, double t, int ncomp) {
  sol.validate();
  Field f(lat, ncomp);
  for (std::size_t id = 0; id < lat.node_count(); ++id)
    f(id, 0) = exact_value(sol, lat.x1(id), lat.x2(id), t);
  return f;
}

DomainFamily support_hull_family(const ExactSolution& sol, const Lattice& lat, double margin,
                                 const std::vector<double>& times) {
  sol.validate();
  if (!(margin > 0.0)) throw std::invalid_argument("hull margin must be positive");
  if (!sol.compactly_supported() || !sol.slow_diffusion())
    throw RegimeError("support hull requires a compactly supported slow-diffusion profile");
  DomainFamily f;
  f.times = times;
  f.horizon = times.back();
  f.slices.reserve(times.size());
  for (double t : times)
    f.slices.push_back(ball_mask(lat, sol.center, support_radius(sol, t) + margin));
  f.validate_structure();
  return f;
}

ErrorNorms error_norms(const Trajectory& traj, const ExactSolution& sol) {
  sol.validate();
  const Lattice& L = traj.steps[0].lattice;
  const double vol = L.cell_volume();
  const double q1 = traj.q + 1.0;
  ErrorNorms en;
  double acc = 0.0, acc_exact = 0.0;
  for (int i = 0; i <= traj.ell(); ++i) {
    const double t = i * traj.h;
    const Field& u = traj.steps[static_cast<std::size_t>(i)];
    double s = 0.0, se = 0.0;
    for (std::size_t id = 0; id < L.node_count(); ++id) {
      const double ex = exact_value(sol, L.x1(id), L.x2(id), t);
      s += std::pow(std::abs(u(id, 0) - ex), q1);
      se += std::pow(std::abs(ex), q1);
    }
    const double slice = std::pow(s * vol, 1.0 / q1);
    const double slice_exact = std::pow(se * vol, 1.0 / q1);
    en.sup_in_time_lq1 = std::max(en.sup_in_time_lq1, slice);
    en.exact_sup_in_time_lq1 = std::max(en.exact_sup_in_time_lq1, slice_exact);
    if (i >= 1) {
      acc += traj.h * s * vol;
      acc_exact += traj.h * se * vol;
    }
  }
  en.lq1_space_time = std::pow(acc, 1.0 / q1);
  en.exact_lq1_space_time = std::pow(acc_exact, 1.0 / q1);
  return en;
}

}  // namespace dnflow
