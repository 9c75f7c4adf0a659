#include "dnflow/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "dnflow/algebra.hpp"
#include "dnflow/grid_ops.hpp"
#include "dnflow/mollify.hpp"
#include "dnflow/util.hpp"

namespace dnflow {

namespace {

Trajectory forward_quotient_with_extension(const Trajectory& traj) {
  Trajectory out;
  out.h = traj.h;
  out.family = traj.family;
  out.q = traj.q;
  out.p = traj.p;
  out.steps.reserve(traj.steps.size());
  for (int i = 0; i <= traj.ell(); ++i) {
    const Field& hi = traj.step_clamped(i + 1);
    const Field& lo = traj.steps[static_cast<std::size_t>(i)];
    Field d = lo;
    for (std::size_t k = 0; k < d.values.size(); ++k)
      d.values[k] = (hi.values[k] - lo.values[k]) / traj.h;
    out.steps.push_back(std::move(d));
  }
  return out;
}

// sum_cells f(x, w, D_h w) vol over the whole box
double energy_integral(const IntegrandSpec& spec, const Field& w) {
  const Lattice& L = w.lattice;
  const int N = w.ncomp;
  const int n = L.n;
  double xi[16];
  double fsum = 0.0;
  const int nx = L.dims[0];
  const int cy = (n == 2) ? L.dims[1] - 1 : 1;
  for (int iy = 0; iy < cy; ++iy)
    for (int ix = 0; ix < nx - 1; ++ix) {
      const std::size_t id = L.id(ix, iy);
      const std::size_t idx = id + 1;
      const std::size_t idy = (n == 2) ? id + nx : 0;
      const double* wc = w.at(id);
      for (int c = 0; c < N; ++c) {
        xi[c * n + 0] = (w.values[idx * N + c] - wc[c]) / L.spacing[0];
        if (n == 2) xi[c * n + 1] = (w.values[idy * N + c] - wc[c]) / L.spacing[1];
      }
      fsum += integrand_eval(spec, id, wc, N, xi, n);
    }
  return fsum * L.cell_volume();
}

double bregman_integral(const Field& a, const Field& b, double q) {
  const double vol = a.lattice.cell_volume();
  double s = 0.0;
  for (std::size_t id = 0; id < a.lattice.node_count(); ++id)
    s += bregman_gap(a.at(id), b.at(id), a.ncomp, q);
  return s * vol;
}

double l1_norm(const Field& f) {
  double s = 0.0;
  for (double v : f.values) s += std::abs(v);
  return s;
}

double l1_diff(const Field& a, const Field& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.values.size(); ++k) s += std::abs(a.values[k] - b.values[k]);
  return s;
}

// Rejects maps whose slices differ from u_star outside each slice mask.
void require_admissible(const Trajectory& v, const DomainFamily& family, const Field& u_star,
                        const char* who) {
  for (int i = 0; i <= v.ell(); ++i) {
    const SpatialMask& m = slice_mask(family, std::min(i * v.h, family.horizon));
    const Field& f = v.steps[static_cast<std::size_t>(i)];
    for (std::size_t id = 0; id < f.lattice.node_count(); ++id) {
      if (m.contains(id)) continue;
      for (int c = 0; c < f.ncomp; ++c)
        if (f(id, c) != u_star(id, c)) {
          std::ostringstream os;
          os << who << ": boundary mismatch at node " << id << " slice " << i;
          throw std::invalid_argument(os.str());
        }
    }
  }
}

}  // namespace

ComparisonMap stationary_comparison(ComparisonKind kind, const Field& v, const Field& u_star,
                                    const Trajectory& like) {
  ComparisonMap out;
  out.kind = kind;
  out.u_star = u_star;
  out.trajectory.h = like.h;
  out.trajectory.family = like.family;
  out.trajectory.q = like.q;
  out.trajectory.p = like.p;
  out.trajectory.steps.assign(like.steps.size(), v);
  out.time_derivative = forward_quotient_with_extension(out.trajectory);
  return out;
}

ComparisonMap landes_comparison(const Trajectory& u, double lambda, const Field& v_o,
                                const Field& u_star) {
  ComparisonMap out;
  out.kind = ComparisonKind::landes_of_solution;
  out.u_star = u_star;
  out.trajectory = landes_mollify(u, lambda, v_o);
  out.time_derivative = forward_quotient_with_extension(out.trajectory);
  return out;
}

std::vector<TestFunction> make_test_basis(const Trajectory& like, const DomainFamily& family,
                                          double sigma1, double sigma2) {
  const Lattice& L = like.steps[0].lattice;
  const int ell = like.ell();
  const double T = like.horizon();

  // interior bump seeded on the initial slice
  const SpatialMask& m0 = slice_mask(family, 0.0);
  const auto dist0 = distance_to_complement(m0);
  double cx = 0.0, cy = 0.0, best = 0.0;
  std::size_t cnt = 0;
  for (std::size_t id = 0; id < L.node_count(); ++id) {
    if (!m0.contains(id)) continue;
    cx += L.x1(id);
    cy += L.x2(id);
    ++cnt;
    best = std::max(best, dist0[id]);
  }
  cx /= std::max<std::size_t>(cnt, 1);
  cy /= std::max<std::size_t>(cnt, 1);
  const double bump_r = std::max(0.5 * best, 4.0 * std::min(L.spacing[0], L.spacing[1]));
  auto bump = [&](std::size_t id) {
    const double dx = (L.x1(id) - cx) / bump_r;
    const double dy = (L.n == 2) ? (L.x2(id) - cy) / bump_r : 0.0;
    const double r2 = dx * dx + dy * dy;
    return (r2 >= 1.0) ? 0.0 : std::exp(1.0 - 1.0 / (1.0 - r2));
  };

  std::vector<TestFunction> basis;
  const double sigmas[2] = {sigma1, sigma2};
  for (int si = 0; si < 2; ++si)
    for (int with_bump = 0; with_bump < 2; ++with_bump)
      for (int temporal = 0; temporal < 2; ++temporal) {
        TestFunction tf;
        tf.phi.h = like.h;
        tf.phi.family = like.family;
        tf.phi.q = like.q;
        tf.phi.p = like.p;
        tf.phi.steps.reserve(ell + 1);
        for (int i = 0; i <= ell; ++i) {
          const double t = i * like.h;
          const double theta =
              (temporal == 0)
                  ? 1.0 - std::abs(2.0 * t / T - 1.0)
                  : std::pow(std::sin(3.14159265358979323846 * t / T), 2.0);
          const SpatialMask& mi = slice_mask(family, std::min(t, family.horizon));
          const auto eta = cutoff_eta_sigma(mi, sigmas[si]);
          Field f(L, like.steps[0].ncomp);
          for (std::size_t id = 0; id < L.node_count(); ++id) {
            double v = theta * eta[id];
            if (with_bump) v *= bump(id);
            f(id, 0) = v;
          }
          tf.phi.steps.push_back(std::move(f));
        }
        const double nrm = vp_norm(tf.phi);
        if (!(nrm > 0.0))
          throw std::invalid_argument("test basis element vanishes; shrink sigma");
        for (auto& s : tf.phi.steps)
          for (auto& v : s.values) v /= nrm;
        std::ostringstream os;
        os << "eta" << (si + 1) << (with_bump ? "*bump" : "") << (temporal ? "*sin2" : "*hat");
        tf.label = os.str();
        basis.push_back(std::move(tf));
      }
  return basis;
}

ResidualReport variational_residual(const SchemeRun& run, const IntegrandSpec& spec,
                                    const ComparisonMap& v, double tau) {
  const Trajectory& u = run.trajectory;
  const double h = u.h;
  const double q = u.q;
  const int m = static_cast<int>(std::llround(tau / h));
  if (m < 1 || m > u.ell() || std::abs(m * h - tau) > 1e-9 * (1.0 + tau))
    throw std::out_of_range("tau must be a positive scheme time");
  require_admissible(v.trajectory, *u.family, v.u_star, "variational_residual");

  double f_u = 0.0, f_v = 0.0, pairing = 0.0;
  double solver_slack = 0.0;
  const double vol = u.steps[0].lattice.cell_volume();
  const int N = u.steps[0].ncomp;
  double pv[8], pu[8];
  for (int i = 1; i <= m; ++i) {
    const Field& ui = u.steps[static_cast<std::size_t>(i)];
    const Field& vi = v.trajectory.steps[static_cast<std::size_t>(i)];
    const Field& dvi = v.time_derivative.steps[static_cast<std::size_t>(i)];
    f_u += h * energy_integral(spec, ui);
    f_v += h * energy_integral(spec, vi);
    double acc = 0.0;
    for (std::size_t id = 0; id < ui.lattice.node_count(); ++id) {
      signed_power(vi.at(id), N, q, pv);
      signed_power(ui.at(id), N, q, pu);
      for (int c = 0; c < N; ++c) acc += dvi(id, c) * (pv[c] - pu[c]);
    }
    pairing += h * acc * vol;
    solver_slack +=
        h * run.ledger.steps[static_cast<std::size_t>(i)].achieved_tol * l1_diff(vi, ui);
  }
  const double b_end =
      bregman_integral(u.steps[static_cast<std::size_t>(m)],
                       v.trajectory.steps[static_cast<std::size_t>(m)], q);
  const double b_init = bregman_integral(u.steps[0], v.trajectory.steps[0], q);

  // time-discretization credit of the piecewise-constant interpolant: the
  // v(0) -> v(h) shift of the initial gap, the quadratic v-increment sum,
  // and the end-of-window quotient term
  const double b_init_shift =
      bregman_integral(u.steps[0], v.trajectory.step_clamped(1), q) - b_init;
  double dsum = 0.0;
  for (int i = 1; i <= m - 1; ++i) {
    const Field& a = v.trajectory.steps[static_cast<std::size_t>(i)];
    const Field& b = v.trajectory.steps[static_cast<std::size_t>(i + 1)];
    double acc = 0.0;
    for (std::size_t id = 0; id < a.lattice.node_count(); ++id) {
      signed_power(a.at(id), N, q, pu);
      signed_power(b.at(id), N, q, pv);
      for (int c = 0; c < N; ++c) acc += (pv[c] - pu[c]) * (b(id, c) - a(id, c));
    }
    dsum += acc * vol;
  }
  double end_term = 0.0;
  {
    const Field& vm = v.trajectory.steps[static_cast<std::size_t>(m)];
    const Field& vm1 = v.trajectory.step_clamped(m + 1);
    const Field& um = u.steps[static_cast<std::size_t>(m)];
    double acc = 0.0;
    for (std::size_t id = 0; id < vm.lattice.node_count(); ++id) {
      signed_power(vm.at(id), N, q, pv);
      signed_power(um.at(id), N, q, pu);
      for (int c = 0; c < N; ++c) acc -= (vm1(id, c) - vm(id, c)) * (pv[c] - pu[c]);
    }
    end_term = acc * vol;
  }

  ResidualReport rep;
  rep.lhs = f_u;
  rep.rhs = f_v + pairing - b_end + b_init;
  rep.margin = rep.rhs - rep.lhs;
  rep.slack = solver_slack + std::max(0.0, b_init_shift) + std::max(0.0, dsum) +
              std::max(0.0, end_term) +
              1e-10 * (std::abs(rep.lhs) + std::abs(rep.rhs) + 1.0);
  rep.pass = rep.margin >= -rep.slack;
  return rep;
}

ResidualReport parabolic_minimizer_residual(const SchemeRun& run, const IntegrandSpec& spec,
                                            const TestFunction& phi) {
  const Trajectory& u = run.trajectory;
  const int ell = u.ell();
  if (phi.phi.ell() != ell) throw std::invalid_argument("test function time grid mismatch");
  // support and endpoint validation
  for (double v : phi.phi.steps[0].values)
    if (v != 0.0) throw std::invalid_argument("test function must vanish at t = 0");
  for (double v : phi.phi.steps[static_cast<std::size_t>(ell)].values)
    if (v != 0.0) throw std::invalid_argument("test function must vanish at t = T");
  for (int i = 1; i < ell; ++i) {
    const SpatialMask& mi = slice_mask(*u.family, i * u.h);
    const Field& f = phi.phi.steps[static_cast<std::size_t>(i)];
    for (std::size_t id = 0; id < f.lattice.node_count(); ++id) {
      if (mi.contains(id)) continue;
      for (int c = 0; c < f.ncomp; ++c)
        if (f(id, c) != 0.0)
          throw std::invalid_argument("test function support leaves the domain");
    }
  }

  double f_u = 0.0, f_up = 0.0, solver_slack = 0.0;
  for (int i = 1; i <= ell; ++i) {
    const Field& ui = u.steps[static_cast<std::size_t>(i)];
    const Field& pi = phi.phi.steps[static_cast<std::size_t>(i)];
    Field shifted = ui;
    for (std::size_t k = 0; k < shifted.values.size(); ++k)
      shifted.values[k] += pi.values[k];
    f_u += u.h * energy_integral(spec, ui);
    f_up += u.h * energy_integral(spec, shifted);
    solver_slack +=
        u.h * run.ledger.steps[static_cast<std::size_t>(i)].achieved_tol * l1_norm(pi);
  }
  const double pairing = dual_pairing(run, phi);

  ResidualReport rep;
  rep.lhs = f_u + pairing;
  rep.rhs = f_up;
  rep.margin = rep.rhs - rep.lhs;
  rep.slack = solver_slack + 1e-10 * (std::abs(rep.lhs) + std::abs(rep.rhs) + 1.0);
  rep.pass = rep.margin >= -rep.slack;
  return rep;
}

double dual_pairing(const SchemeRun& run, const TestFunction& phi) {
  const Trajectory& u = run.trajectory;
  const double vol = u.steps[0].lattice.cell_volume();
  const int N = u.steps[0].ncomp;
  const double q = u.q;
  double pu[8];
  double acc = 0.0;
  for (int i = 0; i < u.ell(); ++i) {
    const Field& ui = u.steps[static_cast<std::size_t>(i)];
    const Field& pi = phi.phi.steps[static_cast<std::size_t>(i)];
    const Field& pnext = phi.phi.steps[static_cast<std::size_t>(i + 1)];
    double s = 0.0;
    for (std::size_t id = 0; id < ui.lattice.node_count(); ++id) {
      signed_power(ui.at(id), N, q, pu);
      for (int c = 0; c < N; ++c) s += pu[c] * (pnext(id, c) - pi(id, c));
    }
    acc += s * vol;  // h * (phi_{i+1} - phi_i)/h
  }
  return acc;
}

DualNormReport dual_norm_estimate(const SchemeRun& run, const IntegrandSpec& spec,
                                  const std::vector<TestFunction>& basis) {
  if (basis.empty()) throw std::invalid_argument("dual norm estimate needs a basis");
  DualNormReport rep;
  for (const auto& phi : basis)
    rep.dual_norm_lower_bound =
        std::max(rep.dual_norm_lower_bound, std::abs(dual_pairing(run, phi)));
  const Trajectory& u = run.trajectory;
  const double p = u.p;
  double g_l1 = 0.0;
  {
    const Lattice& L = u.steps[0].lattice;
    const double vol = L.cell_volume();
    double s = 0.0;
    for (std::size_t id = 0; id < L.node_count(); ++id) s += spec.growth_at(id);
    g_l1 = s * vol * u.horizon();
  }
  rep.rhs_bound = std::pow(std::pow(vp_norm(u), p) + g_l1, (p - 1.0) / p);
  rep.ratio = (rep.rhs_bound > 0.0) ? rep.dual_norm_lower_bound / rep.rhs_bound : 0.0;
  return rep;
}

std::vector<double> initial_condition_check(const SchemeRun& run, const Field& u_o,
                                            const SpatialMask& K,
                                            const std::vector<double>& h_list) {
  const Trajectory& u = run.trajectory;
  const SpatialMask& m0 = slice_mask(*u.family, 0.0);
  const double hmin =
      std::min(K.lattice.spacing[0], K.lattice.n == 2 ? K.lattice.spacing[1] : K.lattice.spacing[0]);
  if (!K.subset_of(inner_parallel_set(m0, 0.5 * hmin)))
    throw std::invalid_argument("K must sit inside the interior of the initial slice");
  const double vol = u.steps[0].lattice.cell_volume();
  const double q1 = u.q + 1.0;
  std::vector<double> out;
  out.reserve(h_list.size());
  for (double hwin : h_list) {
    if (!(hwin > 0.0) || hwin > u.horizon() * (1.0 + 1e-12))
      throw std::out_of_range("averaging window outside (0, T]");
    double acc = 0.0;
    for (int i = 1; i <= u.ell(); ++i) {
      if (i * u.h > hwin * (1.0 + 1e-12)) break;
      const Field& ui = u.steps[static_cast<std::size_t>(i)];
      double s = 0.0;
      for (std::size_t id = 0; id < ui.lattice.node_count(); ++id) {
        if (!K.contains(id)) continue;
        double d2 = 0.0;
        for (int c = 0; c < ui.ncomp; ++c) {
          const double d = ui(id, c) - u_o(id, c);
          d2 += d * d;
        }
        s += std::pow(std::sqrt(d2), q1);
      }
      acc += u.h * s * vol;
    }
    out.push_back(acc / hwin);
  }
  return out;
}

double continuity_modulus(const Trajectory& traj, double q) {
  const double vol = traj.steps[0].lattice.cell_volume();
  const double q1 = q + 1.0;
  double worst = 0.0;
  for (int i = 1; i <= traj.ell(); ++i) {
    const Field& a = traj.steps[static_cast<std::size_t>(i - 1)];
    const Field& b = traj.steps[static_cast<std::size_t>(i)];
    double s = 0.0;
    for (std::size_t id = 0; id < a.lattice.node_count(); ++id) {
      double d2 = 0.0;
      for (int c = 0; c < a.ncomp; ++c) {
        const double d = b(id, c) - a(id, c);
        d2 += d * d;
      }
      s += std::pow(std::sqrt(d2), q1);
    }
    worst = std::max(worst, std::pow(s * vol, 1.0 / q1));
  }
  return worst;
}

HardyReport hardy_check(const Field& field, const SpatialMask& mask, double p) {
  if (!field.lattice.compatible(mask.lattice))
    throw std::invalid_argument("hardy_check: lattice mismatch");
  for (std::size_t id = 0; id < field.lattice.node_count(); ++id)
    if (!mask.contains(id))
      for (int c = 0; c < field.ncomp; ++c)
        if (field(id, c) != 0.0)
          throw std::invalid_argument("hardy_check: field must vanish off the mask");
  const auto dist = distance_to_complement(mask);
  const Lattice& L = field.lattice;
  const double vol = L.cell_volume();
  double num = 0.0;
  for (std::size_t id = 0; id < L.node_count(); ++id) {
    if (!mask.contains(id)) continue;
    num += std::pow(vec_norm(field.at(id), field.ncomp) / dist[id], p);
  }
  num *= vol;
  const CellGradient g = discrete_gradient(field);
  double den = 0.0;
  L.for_cells([&](std::size_t id) {
    den += std::pow(vec_norm(g.at(id), field.ncomp * L.n), p);
  });
  den *= vol;

  HardyReport rep;
  rep.numerator = num;
  rep.denominator = den;
  if (den <= 1e-300) {
    if (num <= 1e-300)
      rep.degenerate = true;
    else
      rep.unbounded = true;
    rep.ratio = 0.0;
    return rep;
  }
  rep.ratio = num / den;
  return rep;
}

}  // namespace dnflow
