#ifndef NSMP_CLARKE_HPP
#define NSMP_CLARKE_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "nsmp/oracle.hpp"

namespace nsmp {

/// Raised when gradient sampling cannot find differentiable points.
class SamplingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct DirectionalEstimate {
    double value = 0.0;
    /// False when the two finest radius levels disagree by more than tol_dd.
    bool stabilized = true;
    std::vector<double> level_values;
};

struct MinNormResult {
    Vector point;
    std::vector<double> weights;
    double gap = 0.0;
    int iterations = 0;
};

/// Finite gradient sample standing in for the Clarke subdifferential at base_point.
struct SubdifferentialEstimate {
    Vector base_point;
    std::vector<Vector> gradients;
    Vector min_norm_point;
    std::vector<double> weights;
    double min_norm_value = 0.0;
    double sampling_radius = 0.0;

    /// Re-checks the simplex certificate: weights >= 0, sum 1, and the
    /// weighted combination reproduces min_norm_point within tol.
    bool certificate_holds(double tol = 1e-9) const;
};

/**
 * Estimate of the generalized directional derivative f0(x; v).
 *
 * The limsup is taken as a max of difference quotients |v| (f(b + t v/|v|) - f(b)) / t
 * with base points b in {w, w - t v/|v|}, offsets w in balls of radius
 * r_k = sampling_radius * 2^-k, k = 0..3, and steps t in {r_k, r_k/2, r_k/4}.
 * The returned value is the max over the two finest levels.
 */
DirectionalEstimate directional_derivative(const Functional& f, const Vector& x, const Vector& v,
                                           const SolverConfig& cfg);

/// Minimum-norm point of conv(gradients) by Mitchell-Demyanov-Malozemov pair steps.
MinNormResult min_norm_element(const std::vector<Vector>& gradients, double gap_tolerance = 1e-10,
                               int max_iterations = 200000);

SubdifferentialEstimate subdifferential_sample(const Functional& f, const Vector& x, const SolverConfig& cfg);

/// (1 + |x|) * min-norm of the sampled subdifferential.
double scaled_residual(const Functional& f, const Vector& x, const SolverConfig& cfg);
double scaled_residual(const SubdifferentialEstimate& est);

}  // namespace nsmp

#endif
