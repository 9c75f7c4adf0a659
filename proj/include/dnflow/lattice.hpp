#ifndef DNFLOW_LATTICE_HPP
#define DNFLOW_LATTICE_HPP

#include <array>
#include <cstddef>
#include <stdexcept>

namespace dnflow {

// Uniform node lattice over the bounding box Omega, n in {1,2}.
// Node id layout: x fastest, id = iy*dims[0] + ix (1D: id = ix).
// Cells are nodes whose full forward stencil exists; per-cell quantities are
// attached to the cell's base node.
struct Lattice {
  int n = 2;
  std::array<int, 2> dims{2, 2};
  std::array<double, 2> origin{0.0, 0.0};
  std::array<double, 2> spacing{1.0, 1.0};

  static Lattice box(int n_, std::array<int, 2> dims_, std::array<double, 2> lo,
                     std::array<double, 2> hi) {
    Lattice L;
    L.n = n_;
    L.dims = dims_;
    L.origin = lo;
    for (int a = 0; a < n_; ++a) {
      if (dims_[a] < 2) throw std::invalid_argument("lattice needs >= 2 nodes per axis");
      L.spacing[a] = (hi[a] - lo[a]) / (dims_[a] - 1);
      if (!(L.spacing[a] > 0)) throw std::invalid_argument("lattice spacing must be positive");
    }
    if (n_ == 1) {
      L.dims[1] = 1;
      L.spacing[1] = 1.0;
      L.origin[1] = 0.0;
    }
    return L;
  }

  std::size_t node_count() const {
    return static_cast<std::size_t>(dims[0]) * (n == 2 ? dims[1] : 1);
  }
  std::size_t cell_count() const {
    std::size_t c = static_cast<std::size_t>(dims[0] - 1);
    if (n == 2) c *= static_cast<std::size_t>(dims[1] - 1);
    return c;
  }
  // Volume element of the node/cell quadrature.
  double cell_volume() const {
    double v = spacing[0];
    if (n == 2) v *= spacing[1];
    return v;
  }

  std::size_t id(int ix, int iy = 0) const {
    return static_cast<std::size_t>(iy) * dims[0] + ix;
  }
  int ix_of(std::size_t id_) const { return static_cast<int>(id_ % dims[0]); }
  int iy_of(std::size_t id_) const { return static_cast<int>(id_ / dims[0]); }

  double x1(std::size_t id_) const { return origin[0] + spacing[0] * ix_of(id_); }
  double x2(std::size_t id_) const { return origin[1] + spacing[1] * iy_of(id_); }

  // True when the node sits on the outer face of the bounding box; such nodes
  // carry the Dirichlet datum and never belong to a mask.
  bool on_box_boundary(std::size_t id_) const {
    const int ix = ix_of(id_);
    if (ix == 0 || ix == dims[0] - 1) return true;
    if (n == 2) {
      const int iy = iy_of(id_);
      if (iy == 0 || iy == dims[1] - 1) return true;
    }
    return false;
  }

  bool is_cell(std::size_t id_) const {
    if (ix_of(id_) >= dims[0] - 1) return false;
    if (n == 2 && iy_of(id_) >= dims[1] - 1) return false;
    return true;
  }

  // Enumerates cell base-node ids in a fixed row-major order.
  template <typename F>
  void for_cells(F&& f) const {
    const int ny = (n == 2) ? dims[1] - 1 : 1;
    for (int iy = 0; iy < ny; ++iy)
      for (int ix = 0; ix < dims[0] - 1; ++ix) f(id(ix, iy));
  }

  bool compatible(const Lattice& o) const {
    return n == o.n && dims == o.dims && origin == o.origin && spacing == o.spacing;
  }
};

}  // namespace dnflow

#endif
