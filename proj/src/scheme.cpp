#include "dnflow/scheme.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "dnflow/algebra.hpp"
#include "dnflow/grid_ops.hpp"
#include "dnflow/util.hpp"

namespace dnflow {

void SchemeConfig::validate() const {
  if (ell < 1) throw std::invalid_argument("scheme needs ell >= 1");
  if (!(T > 0.0) || !(q > 0.0)) throw std::invalid_argument("scheme needs T, q > 0");
  if (!family || !spec) throw std::invalid_argument("scheme needs a family and an integrand");
  if (std::abs(family->horizon - T) > 1e-12 * (1.0 + T))
    throw std::invalid_argument("family horizon must equal T");
  if (!u_o.same_layout(u_star)) throw std::invalid_argument("u_o / u_star layout mismatch");
  settings.validate();
}

namespace {

double lq1_mass_of(const Field& u, double q) {
  const double vol = u.lattice.cell_volume();
  double s = 0.0;
  for (std::size_t id = 0; id < u.lattice.node_count(); ++id)
    s += std::pow(vec_norm(u.at(id), u.ncomp), q + 1.0);
  return s * vol;
}

double l1_diff(const Field& a, const Field& b, const SpatialMask& mask) {
  double s = 0.0;
  for (std::size_t id = 0; id < a.lattice.node_count(); ++id) {
    if (!mask.contains(id)) continue;
    for (int c = 0; c < a.ncomp; ++c) s += std::abs(a(id, c) - b(id, c));
  }
  return s;
}

double dissipation_mass(const Field& prev, const Field& next, double q) {
  const double vol = prev.lattice.cell_volume();
  double s = 0.0;
  for (std::size_t id = 0; id < prev.lattice.node_count(); ++id)
    s += dissipation_increment(prev.at(id), next.at(id), prev.ncomp, q);
  return s * vol;
}

}  // namespace

SchemeRun scheme_run(const SchemeConfig& config) {
  config.validate();
  if (!check_nondecreasing(*config.family))
    throw DomainError("scheme requires a nondecreasing domain family");
  {
    const SelfCheckReport rep = integrand_self_check(*config.spec, 2000, config.seed ^ 0xabcdef);
    if (!rep.ok())
      throw std::invalid_argument("integrand self check failed: " + rep.witness);
  }

  const double h = config.T / config.ell;
  SchemeRun out;
  out.nu_cache = config.spec->nu();
  {
    // per unit time: shift * |Omega|, the price of the eps regularization in
    // the coercivity route
    const Lattice& L = config.u_o.lattice;
    out.shift_cache =
        config.spec->coercivity_shift() * L.cell_volume() * static_cast<double>(L.cell_count());
  }
  Trajectory& traj = out.trajectory;
  traj.h = h;
  traj.family = config.family;
  traj.q = config.q;
  traj.p = config.spec->p;
  traj.steps.reserve(config.ell + 1);

  const SpatialMask& mask0 = slice_mask(*config.family, 0.0);
  traj.steps.push_back(clamp_to_boundary(config.u_o, mask0, config.u_star));

  EnergyLedger& led = out.ledger;
  {
    StepProblem p0;
    p0.spec = config.spec.get();
    p0.u_prev = traj.steps[0];
    p0.u_star = config.u_star;
    p0.mask = mask0;
    p0.h = h;
    p0.q = config.q;
    led.energy_ustar = step_energy(p0, config.u_star);
    led.lq1_uo = lq1_mass_of(traj.steps[0], config.q);
    led.lq1_ustar = lq1_mass_of(config.u_star, config.q);
    StepRecord r0;
    r0.t = 0.0;
    r0.energy_f = step_energy(p0, traj.steps[0]);
    r0.lq1_mass = led.lq1_uo;
    led.steps.push_back(r0);
  }

  for (int i = 1; i <= config.ell; ++i) {
    const double t = i * h;
    StepProblem prob;
    prob.spec = config.spec.get();
    prob.u_prev = traj.steps[static_cast<std::size_t>(i - 1)];
    prob.u_star = config.u_star;
    prob.mask = slice_mask(*config.family, t);
    prob.h = h;
    prob.q = config.q;

    StepResult res = minimize_step(prob, config.settings);

    StepRecord rec;
    rec.t = t;
    rec.energy_f = step_energy(prob, res.minimizer);
    rec.lq1_mass = lq1_mass_of(res.minimizer, config.q);
    rec.dissipation = dissipation_mass(prob.u_prev, res.minimizer, config.q);
    rec.achieved_tol = res.achieved_tol;
    rec.iterations = res.iterations;
    rec.converged = res.converged;
    rec.slack_vs_ustar = res.achieved_tol * l1_diff(config.u_star, res.minimizer, prob.mask);
    rec.slack_vs_prev =
        res.achieved_tol *
        l1_diff(clamp_to_boundary(prob.u_prev, prob.mask, config.u_star), res.minimizer,
                prob.mask);
    if (!res.converged) led.any_nonconverged = true;

    if (config.minimality_competitors > 0) {
      const MinimalityReport mrep = verify_step_minimality(
          prob, res, config.minimality_competitors,
          mix_seed(config.seed, static_cast<std::uint64_t>(i)));
      rec.step_margin = mrep.worst_margin;
      rec.step_margin_slack = mrep.worst_margin_slack;
    }

    led.steps.push_back(rec);
    traj.steps.push_back(std::move(res.minimizer));
  }
  return out;
}

std::string EnergyLedger::to_csv() const {
  std::ostringstream os;
  os << "i,t,energy_f,lq1_mass,dissipation,step_margin,converged\n";
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const StepRecord& r = steps[i];
    os << i << ',' << format_double(r.t) << ',' << format_double(r.energy_f) << ','
       << format_double(r.lq1_mass) << ',' << format_double(r.dissipation) << ','
       << format_double(r.step_margin) << ',' << (r.converged ? 1 : 0) << '\n';
  }
  return os.str();
}

namespace {

// Right-hand side of the explicit-constant chain at step m, plus the
// accumulated per-step slack for the u_* competitor.
double energy_rhs(const SchemeRun& run, int m) {
  const EnergyLedger& led = run.ledger;
  const double q = run.trajectory.q;
  const double h = run.trajectory.h;
  double slack = 0.0;
  for (int i = 1; i <= m; ++i) slack += h * led.steps[static_cast<std::size_t>(i)].slack_vs_ustar;
  return m * h * led.energy_ustar + 2.0 * q / (q + 1.0) * led.lq1_uo +
         (std::pow(2.0, q) + 1.0) / (q + 1.0) * led.lq1_ustar + slack;
}

}  // namespace

MarginReport check_energy_estimates(const SchemeRun& run, char which) {
  const EnergyLedger& led = run.ledger;
  const double q = run.trajectory.q;
  const int ell = run.trajectory.ell();
  MarginReport rep;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  if (which == 'm') {
    for (int m = 1; m <= ell; ++m) {
      const double lhs =
          q / (2.0 * (q + 1.0)) * led.steps[static_cast<std::size_t>(m)].lq1_mass;
      const double rhs = energy_rhs(run, m);
      const double margin = rhs - lhs;
      if (margin < rep.worst_margin) {
        rep.worst_margin = margin;
        rep.lhs = lhs;
        rep.rhs = rhs;
      }
      if (margin < -1e-8 * std::abs(rhs)) rep.pass = false;
    }
  } else {
    // nu intint |Du|^p <= sum_i h energy_f_i <= RHS(ell); the eps shift of a
    // regularized integrand enters the right-hand side explicitly
    const Trajectory& traj = run.trajectory;
    const double grad_acc = std::pow(gradient_lp_space_time(traj, traj.p), traj.p);
    const double lhs = run.nu_cache * grad_acc;
    const double rhs = energy_rhs(run, ell) + run.shift_cache * traj.horizon();
    rep.lhs = lhs;
    rep.rhs = rhs;
    rep.worst_margin = rhs - lhs;
    rep.pass = rep.worst_margin >= -1e-8 * std::abs(rhs);
  }
  rep.slack = 0.0;
  return rep;
}

MarginReport check_dissipation_bound(const SchemeRun& run, double epsilon, double c34a) {
  const Trajectory& traj = run.trajectory;
  const double T = traj.horizon();
  if (!(epsilon > 0.0) || traj.ell() <= 4.0 * T / epsilon)
    throw std::invalid_argument("dissipation bound requires ell > 4T/eps");
  const double h = traj.h;
  const double lhs = dissipation_lhs(run, epsilon, c34a);
  double slack_prev = 0.0;
  for (std::size_t i = 2; i < run.ledger.steps.size(); ++i)
    slack_prev += run.ledger.steps[i].slack_vs_prev;
  const double rhs = (energy_rhs(run, traj.ell())) / (epsilon - 2.0 * h) + slack_prev;
  MarginReport rep;
  rep.lhs = lhs;
  rep.rhs = rhs;
  rep.worst_margin = rhs - lhs;
  rep.slack = slack_prev;
  rep.pass = rep.worst_margin >= -1e-8 * std::abs(rhs);
  return rep;
}

double dissipation_lhs(const SchemeRun& run, double epsilon, double c34a) {
  const Trajectory& traj = run.trajectory;
  const double h = traj.h;
  double acc = 0.0;
  for (int i = 1; i <= traj.ell(); ++i) {
    const double t = i * h;
    if (t <= epsilon) continue;
    // h * |Delta_{-h} increment|^2 summed = (1/h) * dissipation mass
    acc += run.ledger.steps[static_cast<std::size_t>(i)].dissipation / h;
  }
  return acc / c34a;
}

}  // namespace dnflow
