#ifndef NSMP_PROPERTIES_HPP
#define NSMP_PROPERTIES_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "nsmp/oracle.hpp"

namespace nsmp {

/// One invariant checked over a seeded sample.
struct PropertyCheck {
    std::string property;
    std::string subject;
    int samples = 0;
    /// Largest observed violation; the property passes when worst <= tolerance.
    double worst = 0.0;
    double tolerance = 0.0;
    bool pass = true;
};

/// grad_ae against central differences at seeded smooth points of every built-in.
std::vector<PropertyCheck> oracle_properties(const SolverConfig& cfg, int samples = 100);

/// Homogeneity, subadditivity, reflection, Lipschitz bound and support
/// inequality of the directional derivative estimate, per built-in.
std::vector<PropertyCheck> clarke_properties(const SolverConfig& cfg, int samples = 200);

/// min_norm_element against an exhaustive simplex grid on random hulls of 2 to 4 vectors.
std::vector<PropertyCheck> min_norm_properties(std::uint64_t seed, int hulls = 50, double resolution = 1e-3);

/// Norm domination, symmetry, triangle inequality, bounded-set equivalence
/// and the 1D closed forms.
std::vector<PropertyCheck> geodesic_properties(std::uint64_t seed, int pairs = 500);

/// Certificates on random 1D grid functions checked over the full grid,
/// plus the tampered-certificate control.
std::vector<PropertyCheck> ekeland_properties(std::uint64_t seed, int runs = 100);

/// scale_to_Fh roots, W symmetry, the F_h positivity bound and separation of (0, z1).
std::vector<PropertyCheck> loop_properties(std::uint64_t seed, int loops = 20);

std::vector<PropertyCheck> all_properties(const SolverConfig& cfg);

}  // namespace nsmp

#endif
