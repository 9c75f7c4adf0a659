#ifndef DNFLOW_GEOMETRY_HPP
#define DNFLOW_GEOMETRY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "dnflow/field.hpp"
#include "dnflow/lattice.hpp"

namespace dnflow {

// Occupancy mask of one time slice E^t. Nodes on the bounding-box faces are
// never occupied (the slice is relatively compact in Omega on the lattice).
struct SpatialMask {
  Lattice lattice;
  std::vector<std::uint8_t> cells;  // per node, 1 = occupied
  bool empty_flag = false;

  SpatialMask() = default;
  explicit SpatialMask(const Lattice& lat)
      : lattice(lat), cells(lat.node_count(), 0), empty_flag(true) {}

  bool contains(std::size_t id) const { return cells[id] != 0; }
  std::size_t occupied_count() const;
  // Validates the invariants: no occupied boundary node; empty_flag
  // consistent with the occupancy.
  void validate() const;
  bool subset_of(const SpatialMask& other) const;
};

// Nondecreasing-in-time slices at discrete times 0 = t_0 < ... < t_m = T.
struct DomainFamily {
  std::vector<double> times;
  std::vector<SpatialMask> slices;
  double horizon = 0.0;

  void validate_structure() const;  // shared lattice, sorted times, horizon
};

struct FatnessProbe {
  std::size_t center_id = 0;
  double radius = 0.0;
  double ratio = 1.0;
};

struct FatnessReport {
  double delta_hat = 0.0;
  std::int64_t samples = 0;
  FatnessProbe worst_case;
  bool complement_empty = false;  // condition vacuous, delta_hat forced to 0
};

// Euclidean distance from each node to the nearest node of the complement
// (0 on the complement itself). Exact: brute force below 64^2 nodes, a
// two-pass exact transform above.
std::vector<double> distance_to_complement(const SpatialMask& mask);

// Right-continuous step interpolation: the slice at the largest t_i <= t.
const SpatialMask& slice_mask(const DomainFamily& family, double t);

bool check_nondecreasing(const DomainFamily& family);

// E^{t,sigma} = { x in E^t : dist(x, complement) > sigma }, strict.
SpatialMask inner_parallel_set(const SpatialMask& mask, double sigma);

// Minimum over probed (x_o, r) of |complement ∩ B_r(x_o)| / |B_r(x_o)|,
// node counting, x_o in the complement, deterministic probe stream. Radii
// are capped at the largest ball contained in the lattice box.
FatnessReport measure_density_estimate(const SpatialMask& mask, std::int64_t probes,
                                       std::uint64_t seed = 2027);

// sup over nodes x outside E^t of dist(x, complement of E^s); zero whenever
// the complement of E^t is contained in the complement of E^s.
double complementary_excess(const DomainFamily& family, double s, double t);

// Node values eta~(dist/sigma) with eta~ = 0 on (-inf,1], r-1 on (1,2),
// 1 on [2,inf). Vanishes off the mask.
std::vector<double> cutoff_eta_sigma(const SpatialMask& mask, double sigma);

// u_*(x) + sum_k w_k (u_o - u_*)(x - y_k) chi_{inner 2eps}(x - y_k) with a
// normalized bump kernel of radius eps. The perturbation support stays
// inside the eps-inner set.
Field mollify_initial_datum(const Field& u_o, const Field& u_star, const SpatialMask& mask0,
                            double epsilon);

// Fraction of lattice cells touching both occupied and complement nodes,
// time-averaged; a transparency proxy for the vanishing space-time boundary
// measure of rasterized families.
double boundary_cell_fraction(const DomainFamily& family);

// Built-in analytic generators. All masks exclude the box boundary ring.
SpatialMask full_box_mask(const Lattice& lat);
SpatialMask ball_mask(const Lattice& lat, const std::array<double, 2>& center, double radius);
SpatialMask rect_mask(const Lattice& lat, const std::array<double, 2>& lo,
                      const std::array<double, 2>& hi);

DomainFamily cylinder_family(const Lattice& lat, const std::vector<double>& times);
DomainFamily expanding_ball_family(const Lattice& lat, const std::vector<double>& times,
                                   const std::array<double, 2>& center, double r0,
                                   double growth);
DomainFamily expanding_rect_family(const Lattice& lat, const std::vector<double>& times,
                                   const std::array<double, 2>& center,
                                   const std::array<double, 2>& half0, double growth);

// CSV slices, one row `t,<flattened 0/1 row-major cells>` under a `t,cells`
// header; lattice geometry travels in the config, not the file.
std::string family_to_csv(const DomainFamily& family);
DomainFamily family_from_csv(const std::string& text, const Lattice& lat);

}  // namespace dnflow

#endif
