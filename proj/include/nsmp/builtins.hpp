#ifndef NSMP_BUILTINS_HPP
#define NSMP_BUILTINS_HPP

#include <string>
#include <vector>

#include "nsmp/oracle.hpp"

namespace nsmp {

// Built-in test functionals, addressable by name:
//   double_well  x^4 - x^2 + y^2
//   kink_well    (|x| - 1)^2 + y^2
//   abs          |x| on R
//   norm_sq      |x|^2 on R^dim
//   max2         max(x, y)
// Nonsmooth members decline grad_ae within kink_radius of their kink set.

Functional double_well(double kink_radius = 1e-9);
Functional kink_well(double kink_radius = 1e-9);
Functional abs_functional(double kink_radius = 1e-9);
Functional norm_sq(int dim = 2);
Functional max2(double kink_radius = 1e-9);

/// Throws std::invalid_argument for names outside the list above.
Functional builtin_functional(const std::string& name, int dim = 2, double kink_radius = 1e-9);
std::vector<std::string> builtin_names();

/// F = {x : x[axis] = offset}; Omega_0 is the side x[axis] < offset.
ClosedSetOracle hyperplane(int dim, int axis, double offset, double level_tolerance = 1e-12);

}  // namespace nsmp

#endif
