#ifndef DNFLOW_FIELD_HPP
#define DNFLOW_FIELD_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "dnflow/lattice.hpp"

namespace dnflow {

// Grid function Omega-lattice -> R^N, node-major storage values[id*ncomp+c].
struct Field {
  Lattice lattice;
  int ncomp = 1;
  std::vector<double> values;

  Field() = default;
  Field(const Lattice& lat, int ncomp_, double fill = 0.0)
      : lattice(lat), ncomp(ncomp_),
        values(lat.node_count() * static_cast<std::size_t>(ncomp_), fill) {
    if (ncomp_ < 1 || ncomp_ > 8) throw std::invalid_argument("ncomp out of range");
  }

  double* at(std::size_t id) { return values.data() + id * ncomp; }
  const double* at(std::size_t id) const { return values.data() + id * ncomp; }
  double& operator()(std::size_t id, int c) { return values[id * ncomp + c]; }
  double operator()(std::size_t id, int c) const { return values[id * ncomp + c]; }

  bool all_finite() const {
    for (double v : values)
      if (!std::isfinite(v)) return false;
    return true;
  }

  bool same_layout(const Field& o) const {
    return ncomp == o.ncomp && lattice.compatible(o.lattice);
  }
};

}  // namespace dnflow

#endif
