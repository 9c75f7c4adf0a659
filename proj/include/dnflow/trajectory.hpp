#ifndef DNFLOW_TRAJECTORY_HPP
#define DNFLOW_TRAJECTORY_HPP

#include <memory>
#include <vector>

#include "dnflow/field.hpp"
#include "dnflow/geometry.hpp"

namespace dnflow {

// Piecewise-constant-in-time approximation: steps[i] lives on the interval
// ((i-1)h, ih], steps[0] is the extended initial datum. Index access is
// clamped to [0, ell] so the scheme's extensions v(t) = v(0) for t <= 0 and
// v(t) = v(T) for t >= T come out of the same accessor.
struct Trajectory {
  std::vector<Field> steps;
  double h = 0.0;
  std::shared_ptr<const DomainFamily> family;
  double q = 1.0;
  double p = 2.0;

  int ell() const { return static_cast<int>(steps.size()) - 1; }
  double horizon() const { return h * ell(); }

  const Field& step_clamped(int i) const {
    if (i < 0) i = 0;
    if (i > ell()) i = ell();
    return steps[static_cast<std::size_t>(i)];
  }
};

// u_ell(t) = steps[ceil(t/h)] with steps[0] for t <= 0; domain (-h, T].
const Field& interpolant_at(const Trajectory& traj, double t);

}  // namespace dnflow

#endif
