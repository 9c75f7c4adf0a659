#include "dnflow/grid_ops.hpp"

#include <cmath>
#include <stdexcept>

#include "dnflow/util.hpp"

namespace dnflow {

CellGradient discrete_gradient(const Field& field) {
  const Lattice& L = field.lattice;
  for (int a = 0; a < L.n; ++a)
    if (L.dims[a] < 2) throw std::invalid_argument("gradient needs >= 2 nodes per axis");
  CellGradient g;
  g.lattice = L;
  g.ncomp = field.ncomp;
  g.values.assign(L.node_count() * static_cast<std::size_t>(field.ncomp * L.n), 0.0);
  const int N = field.ncomp;
  L.for_cells([&](std::size_t id) {
    const int ix = L.ix_of(id), iy = L.iy_of(id);
    double* out = g.at(id);
    for (int a = 0; a < L.n; ++a) {
      const std::size_t nb = (a == 0) ? L.id(ix + 1, iy) : L.id(ix, iy + 1);
      const double inv = 1.0 / L.spacing[a];
      for (int c = 0; c < N; ++c)
        out[c * L.n + a] = (field(nb, c) - field(id, c)) * inv;
    }
  });
  return g;
}

double lp_space_norm(const Field& field, const SpatialMask& mask, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("p must be >= 1");
  if (!field.lattice.compatible(mask.lattice))
    throw std::invalid_argument("field/mask lattice mismatch");
  const double vol = field.lattice.cell_volume();
  double s = 0.0;
  for (std::size_t id = 0; id < field.lattice.node_count(); ++id) {
    if (!mask.contains(id)) continue;
    s += std::pow(vec_norm(field.at(id), field.ncomp), p);
  }
  return std::pow(s * vol, 1.0 / p);
}

double lp_space_norm(const Field& field, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("p must be >= 1");
  const double vol = field.lattice.cell_volume();
  double s = 0.0;
  for (std::size_t id = 0; id < field.lattice.node_count(); ++id)
    s += std::pow(vec_norm(field.at(id), field.ncomp), p);
  return std::pow(s * vol, 1.0 / p);
}

double vp_norm(const Trajectory& traj) {
  const double p = traj.p;
  double grad_acc = 0.0, val_acc = 0.0;
  for (int i = 1; i <= traj.ell(); ++i) {
    const Field& u = traj.steps[i];
    const double sn = lp_space_norm(u, p);
    val_acc += traj.h * std::pow(sn, p);
    const CellGradient g = discrete_gradient(u);
    const Lattice& L = u.lattice;
    const double vol = L.cell_volume();
    double gs = 0.0;
    L.for_cells([&](std::size_t id) {
      gs += std::pow(vec_norm(g.at(id), u.ncomp * L.n), p);
    });
    grad_acc += traj.h * gs * vol;
  }
  return std::pow(grad_acc, 1.0 / p) + std::pow(val_acc, 1.0 / p);
}

double lq1_space_time_norm(const Trajectory& traj, double q) {
  if (!(q > 0.0)) throw std::invalid_argument("q must be positive");
  double acc = 0.0;
  for (int i = 1; i <= traj.ell(); ++i) {
    const Field& u = traj.steps[i];
    const double vol = u.lattice.cell_volume();
    double s = 0.0;
    for (std::size_t id = 0; id < u.lattice.node_count(); ++id)
      s += std::pow(vec_norm(u.at(id), u.ncomp), q + 1.0);
    acc += traj.h * s * vol;
  }
  return std::pow(acc, 1.0 / (q + 1.0));
}

double gradient_lp_space_time(const Trajectory& traj, double p) {
  double acc = 0.0;
  for (int i = 1; i <= traj.ell(); ++i) {
    const Field& u = traj.steps[i];
    const CellGradient g = discrete_gradient(u);
    const Lattice& L = u.lattice;
    double gs = 0.0;
    L.for_cells([&](std::size_t id) {
      gs += std::pow(vec_norm(g.at(id), u.ncomp * L.n), p);
    });
    acc += traj.h * gs * L.cell_volume();
  }
  return std::pow(acc, 1.0 / p);
}

Field clamp_to_boundary(const Field& field, const SpatialMask& mask, const Field& u_star) {
  if (!field.same_layout(u_star) || !field.lattice.compatible(mask.lattice))
    throw std::invalid_argument("clamp_to_boundary: mismatched lattices");
  Field out = field;
  for (std::size_t id = 0; id < field.lattice.node_count(); ++id) {
    if (mask.contains(id)) continue;
    for (int c = 0; c < field.ncomp; ++c) out(id, c) = u_star(id, c);
  }
  return out;
}

const Field& interpolant_at(const Trajectory& traj, double t) {
  const double T = traj.horizon();
  if (t <= -traj.h || t > T * (1.0 + 1e-12) + 1e-300)
    throw std::out_of_range("interpolant time outside (-h, T]");
  if (t <= 0.0) return traj.steps[0];
  int i = static_cast<int>(std::ceil(t / traj.h - 1e-12));
  if (i < 0) i = 0;
  if (i > traj.ell()) i = traj.ell();
  return traj.steps[static_cast<std::size_t>(i)];
}

}  // namespace dnflow
