#include "dnflow/mollify.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "dnflow/algebra.hpp"
#include "dnflow/grid_ops.hpp"

namespace dnflow {

Trajectory landes_mollify(const Trajectory& traj, double h, const Field& v_o) {
  if (!(h > 0.0)) throw std::out_of_range("mollification parameter must be positive");
  if (!v_o.same_layout(traj.steps[0]))
    throw std::invalid_argument("mollifier initial value layout mismatch");
  Trajectory out;
  out.h = traj.h;
  out.family = traj.family;
  out.q = traj.q;
  out.p = traj.p;
  out.steps.reserve(traj.steps.size());
  out.steps.push_back(v_o);
  const double theta = std::exp(-traj.h / h);
  for (int i = 1; i <= traj.ell(); ++i) {
    const Field& prev = out.steps.back();
    const Field& vi = traj.steps[static_cast<std::size_t>(i)];
    Field next = prev;
    for (std::size_t k = 0; k < next.values.size(); ++k)
      next.values[k] = theta * prev.values[k] + (1.0 - theta) * vi.values[k];
    out.steps.push_back(std::move(next));
  }
  return out;
}

std::vector<std::vector<double>> landes_mollify_scalar(
    const std::vector<std::vector<double>>& series, double dt, double h,
    const std::vector<double>& init) {
  std::vector<std::vector<double>> out;
  out.reserve(series.size() + 1);
  out.push_back(init);
  const double theta = std::exp(-dt / h);
  for (const auto& s : series) {
    std::vector<double> next(init.size());
    const auto& prev = out.back();
    for (std::size_t k = 0; k < next.size(); ++k)
      next[k] = theta * prev[k] + (1.0 - theta) * s[k];
    out.push_back(std::move(next));
  }
  return out;
}

namespace {

double slice_lq1_norm(const Field& f, double q) {
  const double vol = f.lattice.cell_volume();
  double s = 0.0;
  for (std::size_t id = 0; id < f.lattice.node_count(); ++id)
    s += std::pow(vec_norm(f.at(id), f.ncomp), q + 1.0);
  return std::pow(s * vol, 1.0 / (q + 1.0));
}

}  // namespace

MollifierMargin check_mollifier_bound(const Trajectory& traj, double h, const Field& v_o,
                                      double r) {
  if (!(r >= 1.0)) throw std::invalid_argument("r must lie in [1, infinity]");
  const Trajectory moll = landes_mollify(traj, h, v_o);
  const double q = traj.q;
  const double norm_vo = slice_lq1_norm(v_o, q);
  const bool rinf = std::isinf(r);

  std::vector<double> nv(traj.steps.size()), nm(traj.steps.size());
  for (std::size_t i = 0; i < traj.steps.size(); ++i) {
    nv[i] = slice_lq1_norm(traj.steps[i], q);
    nm[i] = slice_lq1_norm(moll.steps[i], q);
  }

  MollifierMargin rep;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  double acc_v = 0.0, acc_m = 0.0;
  double sup_v = 0.0, sup_m = 0.0;
  for (int m = 1; m <= traj.ell(); ++m) {
    const double t_o = m * traj.h;
    double lhs, rhs;
    if (rinf) {
      sup_v = std::max(sup_v, nv[static_cast<std::size_t>(m)]);
      sup_m = std::max(sup_m, nm[static_cast<std::size_t>(m)]);
      lhs = sup_m;
      rhs = sup_v + norm_vo;
    } else {
      acc_v += traj.h * std::pow(nv[static_cast<std::size_t>(m)], r);
      acc_m += traj.h * std::pow(nm[static_cast<std::size_t>(m)], r);
      lhs = std::pow(acc_m, 1.0 / r);
      const double bracket = h / r * (1.0 - std::exp(-t_o * r / h));
      rhs = std::pow(acc_v, 1.0 / r) + std::pow(bracket, 1.0 / r) * norm_vo;
    }
    const double margin = rhs - lhs;
    if (margin < rep.worst_margin) {
      rep.worst_margin = margin;
      rep.lhs = lhs;
      rep.rhs = rhs;
    }
    if (margin < -1e-10 * (std::abs(rhs) + 1.0)) rep.pass = false;
  }
  return rep;
}

MollifierMargin check_mollifier_convexity(const Trajectory& traj, double h,
                                          const IntegrandSpec& spec, const Field& v_o) {
  const Trajectory moll = landes_mollify(traj, h, v_o);
  const Lattice& L = traj.steps[0].lattice;
  const int N = traj.steps[0].ncomp;
  const int n = L.n;

  // per-cell energy density of a field
  auto density = [&](const Field& f) {
    std::vector<double> d(L.node_count(), 0.0);
    const CellGradient g = discrete_gradient(f);
    L.for_cells([&](std::size_t id) {
      d[id] = integrand_eval(spec, id, f.at(id), N, g.at(id), n);
    });
    return d;
  };

  std::vector<std::vector<double>> series;
  series.reserve(traj.steps.size() - 1);
  for (int i = 1; i <= traj.ell(); ++i)
    series.push_back(density(traj.steps[static_cast<std::size_t>(i)]));
  const auto scalar_moll = landes_mollify_scalar(series, traj.h, h, density(v_o));

  MollifierMargin rep;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= traj.ell(); ++i) {
    const auto lhs_density = density(moll.steps[static_cast<std::size_t>(i)]);
    const auto& rhs_density = scalar_moll[static_cast<std::size_t>(i)];
    for (std::size_t id = 0; id < lhs_density.size(); ++id) {
      if (!L.is_cell(id)) continue;
      const double margin = rhs_density[id] - lhs_density[id];
      if (margin < rep.worst_margin) {
        rep.worst_margin = margin;
        rep.lhs = lhs_density[id];
        rep.rhs = rhs_density[id];
      }
      if (margin < -1e-12 * (1.0 + std::abs(rhs_density[id]))) rep.pass = false;
    }
  }
  return rep;
}

Trajectory difference_quotient(const Trajectory& traj, int h_steps, bool backward) {
  if (h_steps < 1 || h_steps > traj.ell())
    throw std::out_of_range("difference quotient shift outside [1, ell]");
  const double hh = h_steps * traj.h;
  Trajectory out;
  out.h = traj.h;
  out.family = traj.family;
  out.q = traj.q;
  out.p = traj.p;
  out.steps.reserve(traj.steps.size());
  for (int i = 0; i <= traj.ell(); ++i) {
    const Field& hi = traj.step_clamped(backward ? i : i + h_steps);
    const Field& lo = traj.step_clamped(backward ? i - h_steps : i);
    Field d = hi;
    for (std::size_t k = 0; k < d.values.size(); ++k)
      d.values[k] = (hi.values[k] - lo.values[k]) / hh;
    out.steps.push_back(std::move(d));
  }
  return out;
}

PartsReport check_finite_integration_by_parts(const Trajectory& u, const Trajectory& v,
                                              int h_steps) {
  if (u.ell() != v.ell() || u.h != v.h)
    throw std::invalid_argument("integration by parts needs matching time grids");
  if (h_steps < 1 || h_steps > u.ell()) throw std::out_of_range("h_steps outside [1, ell]");
  const Lattice& L = u.steps[0].lattice;
  const int N = u.steps[0].ncomp;
  const double vol = L.cell_volume();
  const double q = u.q;
  const double hl = u.h;
  const double hh = h_steps * hl;
  const int ell = u.ell();

  double pw_hi[8], pw_lo[8];
  double lhs = 0.0, rhs1 = 0.0, rhs2 = 0.0, delta1 = 0.0, delta2 = 0.0;
  for (int i = 1; i <= ell; ++i) {
    const Field& ui = u.steps[static_cast<std::size_t>(i)];
    const Field& ui_back = u.step_clamped(i - h_steps);
    const Field& vi = v.steps[static_cast<std::size_t>(i)];
    const Field& vi_fwd = v.step_clamped(i + h_steps);
    double acc_l = 0.0, acc_r = 0.0, acc_d1 = 0.0;
    for (std::size_t id = 0; id < L.node_count(); ++id) {
      signed_power(ui.at(id), N, q, pw_hi);
      signed_power(ui_back.at(id), N, q, pw_lo);
      double pv[8];
      signed_power(vi.at(id), N, q, pv);
      for (int c = 0; c < N; ++c) {
        acc_l += (pw_hi[c] - pw_lo[c]) / hh * (vi(id, c) - ui(id, c));
        acc_r += (vi_fwd(id, c) - vi(id, c)) / hh * (pv[c] - pw_hi[c]);
      }
      acc_d1 += bregman_gap(vi.at(id), vi_fwd.at(id), N, q);
    }
    lhs += hl * acc_l * vol;
    rhs1 += hl * acc_r * vol;
    delta1 += hl / hh * acc_d1 * vol;
    if (i > ell - h_steps) {
      // boundary window (T-h, T): -(1/h) b[u(t), v(t+h)]
      double acc_b = 0.0;
      for (std::size_t id = 0; id < L.node_count(); ++id)
        acc_b += bregman_gap(ui.at(id), vi_fwd.at(id), N, q);
      rhs2 -= hl / hh * acc_b * vol;
    }
  }
  // (1/h) intint_{(-h,0)} b[u(t), v(t)]: u and v are frozen at their initial
  // slices there, the window has measure h
  {
    double acc_b = 0.0;
    for (std::size_t id = 0; id < L.node_count(); ++id)
      acc_b += bregman_gap(u.steps[0].at(id), v.steps[0].at(id), N, q);
    rhs2 += acc_b * vol;
  }
  // delta2 over (-h, 0): v(t) = v(0), u(t) = u(0), v(t+h) walks j = 1..k
  for (int j = 1; j <= h_steps; ++j) {
    const Field& vj = v.step_clamped(j);
    double acc = 0.0;
    for (std::size_t id = 0; id < L.node_count(); ++id) {
      double pvj[8], pu0[8];
      signed_power(vj.at(id), N, q, pvj);
      signed_power(u.steps[0].at(id), N, q, pu0);
      for (int c = 0; c < N; ++c)
        acc += (vj(id, c) - v.steps[0](id, c)) / hh * (pvj[c] - pu0[c]);
    }
    delta2 += hl * acc * vol;
  }

  PartsReport rep;
  rep.lhs = lhs;
  rep.delta1 = delta1;
  rep.delta2 = delta2;
  rep.rhs = rhs1 + rhs2 + delta1 + delta2;
  rep.pass = lhs <= rep.rhs + 1e-10 * (1.0 + std::abs(rep.rhs));
  return rep;
}

}  // namespace dnflow
