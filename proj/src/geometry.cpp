#include "dnflow/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dnflow/util.hpp"

namespace dnflow {

std::size_t SpatialMask::occupied_count() const {
  std::size_t c = 0;
  for (auto v : cells) c += v;
  return c;
}

void SpatialMask::validate() const {
  if (cells.size() != lattice.node_count())
    throw std::invalid_argument("mask size does not match lattice");
  std::size_t occ = 0;
  for (std::size_t id = 0; id < cells.size(); ++id) {
    if (!cells[id]) continue;
    ++occ;
    if (lattice.on_box_boundary(id))
      throw std::invalid_argument("occupied node on the bounding-box face");
  }
  if (occ == 0 && !empty_flag)
    throw std::invalid_argument("mask has no occupied node and is not flagged empty");
  if (occ > 0 && empty_flag) throw std::invalid_argument("nonempty mask flagged empty");
}

bool SpatialMask::subset_of(const SpatialMask& other) const {
  if (!lattice.compatible(other.lattice)) throw DomainError("mismatched slice lattices");
  for (std::size_t id = 0; id < cells.size(); ++id)
    if (cells[id] && !other.cells[id]) return false;
  return true;
}

void DomainFamily::validate_structure() const {
  if (slices.empty() || times.size() != slices.size())
    throw DomainError("family needs one slice per time");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw DomainError("family times must increase");
  if (times.front() != 0.0) throw DomainError("family must start at t = 0");
  if (std::abs(times.back() - horizon) > 1e-12 * (1.0 + horizon))
    throw DomainError("family horizon does not match final time");
  for (std::size_t i = 1; i < slices.size(); ++i)
    if (!slices[i].lattice.compatible(slices[0].lattice))
      throw DomainError("family slices on mismatched lattices");
}

namespace {

// Lower-envelope pass of the exact squared distance transform
// (Felzenszwalb–Huttenlocher). All inputs finite: the x-sweep below always
// finds a complement node per row because masks never occupy the box ring.
void edt_pass(const std::vector<double>& f, double step, std::vector<double>& out,
              std::vector<int>& v, std::vector<double>& z) {
  const int m = static_cast<int>(f.size());
  v.assign(m, 0);
  z.assign(m + 1, 0.0);
  int k = 0;
  v[0] = 0;
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  auto sq = [](double a) { return a * a; };
  for (int qi = 1; qi < m; ++qi) {
    for (;;) {
      const int p = v[k];
      const double s =
          (f[qi] + sq(qi * step) - f[p] - sq(p * step)) / (2.0 * step * (qi - p));
      if (s <= z[k] && k > 0) {
        --k;
        continue;
      }
      if (s <= z[k]) {  // k == 0: replace the root parabola
        v[0] = qi;
        z[1] = std::numeric_limits<double>::infinity();
      } else {
        ++k;
        v[k] = qi;
        z[k] = s;
        z[k + 1] = std::numeric_limits<double>::infinity();
      }
      break;
    }
  }
  k = 0;
  for (int qi = 0; qi < m; ++qi) {
    const double x = qi * step;
    while (z[k + 1] < x) ++k;
    out[qi] = sq(x - v[k] * step) + f[v[k]];
  }
}

std::vector<double> distance_two_pass(const SpatialMask& mask) {
  const Lattice& L = mask.lattice;
  const int nx = L.dims[0];
  const int ny = (L.n == 2) ? L.dims[1] : 1;
  std::vector<double> d2(L.node_count(), 0.0);
  // pass along x by sweeps: per-row distance to the nearest complement node
  const double big = 1e30;
  for (int iy = 0; iy < ny; ++iy) {
    double run = big;
    for (int ix = 0; ix < nx; ++ix) {
      run = mask.contains(L.id(ix, iy)) ? run + L.spacing[0] : 0.0;
      d2[L.id(ix, iy)] = run;
    }
    run = big;
    for (int ix = nx - 1; ix >= 0; --ix) {
      run = mask.contains(L.id(ix, iy)) ? run + L.spacing[0] : 0.0;
      double& cur = d2[L.id(ix, iy)];
      cur = std::min(cur, run);
      cur = cur * cur;
    }
  }
  if (L.n == 2) {
    std::vector<double> line(ny), outl(ny);
    std::vector<int> v;
    std::vector<double> z;
    for (int ix = 0; ix < nx; ++ix) {
      for (int iy = 0; iy < ny; ++iy) line[iy] = d2[L.id(ix, iy)];
      edt_pass(line, L.spacing[1], outl, v, z);
      for (int iy = 0; iy < ny; ++iy) d2[L.id(ix, iy)] = outl[iy];
    }
  }
  std::vector<double> d(d2.size());
  for (std::size_t i = 0; i < d2.size(); ++i) d[i] = std::sqrt(d2[i]);
  return d;
}

std::vector<double> distance_brute(const SpatialMask& mask) {
  const Lattice& L = mask.lattice;
  std::vector<std::size_t> comp;
  for (std::size_t id = 0; id < L.node_count(); ++id)
    if (!mask.contains(id)) comp.push_back(id);
  std::vector<double> d(L.node_count(), 0.0);
  for (std::size_t id = 0; id < L.node_count(); ++id) {
    if (!mask.contains(id)) continue;
    const double x = L.x1(id), y = L.x2(id);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c : comp) {
      const double dx = L.x1(c) - x;
      const double dy = L.x2(c) - y;
      const double dd = dx * dx + dy * dy;
      if (dd < best) best = dd;
    }
    d[id] = std::sqrt(best);
  }
  return d;
}

}  // namespace

std::vector<double> distance_to_complement(const SpatialMask& mask) {
  if (mask.lattice.node_count() < 64 * 64) return distance_brute(mask);
  return distance_two_pass(mask);
}

const SpatialMask& slice_mask(const DomainFamily& family, double t) {
  family.validate_structure();
  if (t < 0.0 || t > family.horizon * (1.0 + 1e-12))
    throw std::out_of_range("slice time outside [0,T]");
  std::size_t best = 0;
  for (std::size_t i = 0; i < family.times.size(); ++i)
    if (family.times[i] <= t + 1e-12 * (1.0 + family.horizon)) best = i;
  return family.slices[best];
}

bool check_nondecreasing(const DomainFamily& family) {
  family.validate_structure();
  for (std::size_t i = 1; i < family.slices.size(); ++i)
    if (!family.slices[i - 1].subset_of(family.slices[i])) return false;
  return true;
}

SpatialMask inner_parallel_set(const SpatialMask& mask, double sigma) {
  if (sigma < 0.0) throw std::out_of_range("sigma must be nonnegative");
  const auto dist = distance_to_complement(mask);
  SpatialMask out(mask.lattice);
  std::size_t occ = 0;
  for (std::size_t id = 0; id < dist.size(); ++id) {
    if (mask.contains(id) && dist[id] > sigma) {
      out.cells[id] = 1;
      ++occ;
    }
  }
  out.empty_flag = (occ == 0);
  return out;
}

FatnessReport measure_density_estimate(const SpatialMask& mask, std::int64_t probes,
                                       std::uint64_t seed) {
  if (probes < 1) throw std::invalid_argument("need at least one probe");
  const Lattice& L = mask.lattice;
  std::vector<std::size_t> comp;
  for (std::size_t id = 0; id < L.node_count(); ++id)
    if (!mask.contains(id)) comp.push_back(id);
  FatnessReport rep;
  if (comp.empty()) {
    rep.complement_empty = true;
    rep.delta_hat = 0.0;
    return rep;
  }
  Rng rng(seed);
  rep.delta_hat = 1.0;
  const double diam_x = L.spacing[0] * (L.dims[0] - 1);
  const double diam_y = (L.n == 2) ? L.spacing[1] * (L.dims[1] - 1) : diam_x;
  const double hmin = std::min(L.spacing[0], L.n == 2 ? L.spacing[1] : L.spacing[0]);
  std::int64_t done = 0;
  while (done < probes) {
    const std::size_t xo = comp[static_cast<std::size_t>(rng.uniform01() * comp.size()) %
                               comp.size()];
    const double cx = L.x1(xo), cy = L.x2(xo);
    // largest ball around xo inside the box; radii beyond it would sample
    // off-lattice area that is complement anyway and only raises the ratio
    double rmax = std::min(cx - L.origin[0], L.origin[0] + diam_x - cx);
    if (L.n == 2) {
      rmax = std::min(rmax, cy - L.origin[1]);
      rmax = std::min(rmax, L.origin[1] + diam_y - cy);
    }
    if (rmax < 2.0 * hmin) {
      rmax = 2.0 * hmin;  // edge nodes still get small-ball probes
    }
    const double r = rng.log_uniform(2.0 * hmin, std::max(2.0 * hmin * (1.0 + 1e-9), rmax));
    std::int64_t in_ball = 0, in_comp = 0;
    const int rx = static_cast<int>(r / L.spacing[0]) + 1;
    const int ry = (L.n == 2) ? static_cast<int>(r / L.spacing[1]) + 1 : 0;
    const int ix0 = L.ix_of(xo), iy0 = L.iy_of(xo);
    for (int dy = -ry; dy <= ry; ++dy) {
      const int iy = iy0 + dy;
      if (L.n == 2 && (iy < 0 || iy >= L.dims[1])) continue;
      for (int dx = -rx; dx <= rx; ++dx) {
        const int ix = ix0 + dx;
        if (ix < 0 || ix >= L.dims[0]) continue;
        const double ddx = dx * L.spacing[0];
        const double ddy = dy * (L.n == 2 ? L.spacing[1] : 0.0);
        if (ddx * ddx + ddy * ddy > r * r) continue;
        ++in_ball;
        if (!mask.contains(L.id(ix, L.n == 2 ? iy : 0))) ++in_comp;
      }
    }
    if (in_ball == 0) continue;
    ++done;
    const double ratio = static_cast<double>(in_comp) / static_cast<double>(in_ball);
    if (ratio < rep.delta_hat) {
      rep.delta_hat = ratio;
      rep.worst_case = {xo, r, ratio};
    }
  }
  rep.samples = probes;
  return rep;
}

double complementary_excess(const DomainFamily& family, double s, double t) {
  if (s > t) throw std::out_of_range("complementary excess needs s <= t");
  const SpatialMask& ms = slice_mask(family, s);
  const SpatialMask& mt = slice_mask(family, t);
  const auto dist_s = distance_to_complement(ms);  // 0 on complement of E^s
  double sup = 0.0;
  for (std::size_t id = 0; id < mt.cells.size(); ++id)
    if (!mt.contains(id)) sup = std::max(sup, dist_s[id]);
  return sup;
}

std::vector<double> cutoff_eta_sigma(const SpatialMask& mask, double sigma) {
  if (!(sigma > 0.0)) throw std::out_of_range("sigma must be positive");
  const auto dist = distance_to_complement(mask);
  std::vector<double> eta(dist.size(), 0.0);
  for (std::size_t id = 0; id < dist.size(); ++id) {
    const double r = dist[id] / sigma;
    eta[id] = (r <= 1.0) ? 0.0 : (r >= 2.0 ? 1.0 : r - 1.0);
  }
  return eta;
}

Field mollify_initial_datum(const Field& u_o, const Field& u_star, const SpatialMask& mask0,
                            double epsilon) {
  if (!u_o.same_layout(u_star) || !u_o.lattice.compatible(mask0.lattice))
    throw std::invalid_argument("mollify_initial_datum: mismatched lattices");
  const Lattice& L = u_o.lattice;
  const double hmin = std::min(L.spacing[0], L.n == 2 ? L.spacing[1] : L.spacing[0]);
  if (!(epsilon > 0.0)) throw std::out_of_range("epsilon must be positive");
  if (epsilon < hmin) throw std::invalid_argument("degenerate kernel: epsilon below spacing");

  const SpatialMask inner2 = inner_parallel_set(mask0, 2.0 * epsilon);

  // normalized polynomial bump (1 - r^2)^2 on |y| < eps
  const int rx = static_cast<int>(epsilon / L.spacing[0]);
  const int ry = (L.n == 2) ? static_cast<int>(epsilon / L.spacing[1]) : 0;
  std::vector<std::pair<std::array<int, 2>, double>> kernel;
  double wsum = 0.0;
  for (int dy = -ry; dy <= ry; ++dy)
    for (int dx = -rx; dx <= rx; ++dx) {
      const double yx = dx * L.spacing[0];
      const double yy = dy * (L.n == 2 ? L.spacing[1] : 0.0);
      const double r2 = (yx * yx + yy * yy) / (epsilon * epsilon);
      if (r2 >= 1.0) continue;
      const double w = (1.0 - r2) * (1.0 - r2);
      kernel.push_back({{dx, dy}, w});
      wsum += w;
    }
  for (auto& kv : kernel) kv.second /= wsum;

  Field out = u_star;
  const int N = u_o.ncomp;
  for (std::size_t id = 0; id < L.node_count(); ++id) {
    const int ix = L.ix_of(id), iy = L.iy_of(id);
    for (const auto& kv : kernel) {
      const int jx = ix - kv.first[0];
      const int jy = iy - kv.first[1];
      if (jx < 0 || jx >= L.dims[0]) continue;
      if (L.n == 2 && (jy < 0 || jy >= L.dims[1])) continue;
      const std::size_t jd = L.id(jx, L.n == 2 ? jy : 0);
      if (!inner2.contains(jd)) continue;
      for (int c = 0; c < N; ++c)
        out(id, c) += kv.second * (u_o(jd, c) - u_star(jd, c));
    }
  }
  return out;
}

double boundary_cell_fraction(const DomainFamily& family) {
  family.validate_structure();
  double acc = 0.0;
  for (const auto& m : family.slices) {
    const Lattice& L = m.lattice;
    std::size_t boundary = 0;
    L.for_cells([&](std::size_t id) {
      const int ix = L.ix_of(id), iy = L.iy_of(id);
      bool any_in = false, any_out = false;
      for (int dy = 0; dy <= (L.n == 2 ? 1 : 0); ++dy)
        for (int dx = 0; dx <= 1; ++dx) {
          if (m.contains(L.id(ix + dx, iy + dy)))
            any_in = true;
          else
            any_out = true;
        }
      if (any_in && any_out) ++boundary;
    });
    acc += static_cast<double>(boundary) / static_cast<double>(L.cell_count());
  }
  return acc / static_cast<double>(family.slices.size());
}

SpatialMask full_box_mask(const Lattice& lat) {
  SpatialMask m(lat);
  std::size_t occ = 0;
  for (std::size_t id = 0; id < lat.node_count(); ++id)
    if (!lat.on_box_boundary(id)) {
      m.cells[id] = 1;
      ++occ;
    }
  m.empty_flag = (occ == 0);
  return m;
}

SpatialMask ball_mask(const Lattice& lat, const std::array<double, 2>& center, double radius) {
  SpatialMask m(lat);
  std::size_t occ = 0;
  for (std::size_t id = 0; id < lat.node_count(); ++id) {
    if (lat.on_box_boundary(id)) continue;
    const double dx = lat.x1(id) - center[0];
    const double dy = (lat.n == 2) ? lat.x2(id) - center[1] : 0.0;
    if (dx * dx + dy * dy < radius * radius) {
      m.cells[id] = 1;
      ++occ;
    }
  }
  m.empty_flag = (occ == 0);
  return m;
}

SpatialMask rect_mask(const Lattice& lat, const std::array<double, 2>& lo,
                      const std::array<double, 2>& hi) {
  SpatialMask m(lat);
  std::size_t occ = 0;
  for (std::size_t id = 0; id < lat.node_count(); ++id) {
    if (lat.on_box_boundary(id)) continue;
    const double x = lat.x1(id);
    const double y = lat.x2(id);
    bool in = x > lo[0] && x < hi[0];
    if (lat.n == 2) in = in && y > lo[1] && y < hi[1];
    if (in) {
      m.cells[id] = 1;
      ++occ;
    }
  }
  m.empty_flag = (occ == 0);
  return m;
}

namespace {
DomainFamily make_family(const std::vector<double>& times, std::vector<SpatialMask> slices) {
  DomainFamily f;
  f.times = times;
  f.slices = std::move(slices);
  f.horizon = times.back();
  f.validate_structure();
  return f;
}
}  // namespace

DomainFamily cylinder_family(const Lattice& lat, const std::vector<double>& times) {
  std::vector<SpatialMask> slices(times.size(), full_box_mask(lat));
  return make_family(times, std::move(slices));
}

DomainFamily expanding_ball_family(const Lattice& lat, const std::vector<double>& times,
                                   const std::array<double, 2>& center, double r0,
                                   double growth) {
  std::vector<SpatialMask> slices;
  slices.reserve(times.size());
  for (double t : times) slices.push_back(ball_mask(lat, center, r0 + growth * t));
  return make_family(times, std::move(slices));
}

DomainFamily expanding_rect_family(const Lattice& lat, const std::vector<double>& times,
                                   const std::array<double, 2>& center,
                                   const std::array<double, 2>& half0, double growth) {
  std::vector<SpatialMask> slices;
  slices.reserve(times.size());
  for (double t : times) {
    const std::array<double, 2> lo{center[0] - half0[0] - growth * t,
                                   center[1] - half0[1] - growth * t};
    const std::array<double, 2> hi{center[0] + half0[0] + growth * t,
                                   center[1] + half0[1] + growth * t};
    slices.push_back(rect_mask(lat, lo, hi));
  }
  return make_family(times, std::move(slices));
}

std::string family_to_csv(const DomainFamily& family) {
  std::ostringstream os;
  os << "t,cells\n";
  for (std::size_t i = 0; i < family.times.size(); ++i) {
    os << format_double(family.times[i]);
    for (auto v : family.slices[i].cells) os << ',' << (v ? 1 : 0);
    os << '\n';
  }
  return os.str();
}

DomainFamily family_from_csv(const std::string& text, const Lattice& lat) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line.rfind("t,", 0) != 0)
    throw ConfigError("mask csv: missing `t,cells` header");
  DomainFamily f;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tok;
    if (!std::getline(ls, tok, ',')) throw ConfigError("mask csv: malformed row");
    SpatialMask m(lat);
    double t = std::stod(tok);
    std::size_t id = 0, occ = 0;
    while (std::getline(ls, tok, ',')) {
      if (id >= lat.node_count()) throw ConfigError("mask csv: row longer than lattice");
      const int v = std::stoi(tok);
      m.cells[id] = (v != 0);
      occ += (v != 0);
      ++id;
    }
    if (id != lat.node_count()) throw ConfigError("mask csv: row shorter than lattice");
    m.empty_flag = (occ == 0);
    m.validate();
    f.times.push_back(t);
    f.slices.push_back(std::move(m));
  }
  if (f.times.empty()) throw ConfigError("mask csv: no slices");
  f.horizon = f.times.back();
  f.validate_structure();
  return f;
}

}  // namespace dnflow
