#ifndef NSMP_GEODESIC_HPP
#define NSMP_GEODESIC_HPP

#include <functional>
#include <limits>

#include "nsmp/oracle.hpp"
#include "nsmp/path.hpp"

namespace nsmp {

// Geodesic distance for the conformal weight 1 / (1 + |x|):
//   l(c) = int_0^1 |c'(t)| / (1 + |c(t)|) dt,   delta(x1, x2) = inf_c l(c).
// Every value returned here is the length of an explicit curve, so it is an
// upper bound on delta.

struct GeodesicConfig {
    int quadrature_points = 16;
    /// Free interior nodes of the polygonal relaxation (0 disables it).
    int refine_nodes = 0;
    int refine_iters = 0;
    /// Use the exact planar geodesic (shooting on the Clairaut integral).
    bool planar_geodesic = true;
    /// Probe directions for set distances; 0 selects 2 * dim + 8.
    int probe_count = 0;
    /// Probe rays extend to probe_range_factor * (1 + |x|).
    double probe_range_factor = 8.0;
    int polish_trials = 24;
    std::uint64_t rng_seed = 20240601;
};

struct SegmentLength {
    double value = 0.0;
    /// Difference between the last two panel doublings.
    double error = 0.0;
};

SegmentLength segment_length_with_error(const Vector& x1, const Vector& x2, const GeodesicConfig& cfg);
double segment_length(const Vector& x1, const Vector& x2, const GeodesicConfig& cfg = {});

/// Length of the shortest geodesic of the weighted metric in the plane
/// spanned by 0, x1, x2 (including the broken path through the origin).
double planar_geodesic_length(const Vector& x1, const Vector& x2);

/// Upper bound on delta(x1, x2); never exceeds segment_length + 1e-12.
double delta_estimate(const Vector& x1, const Vector& x2, const GeodesicConfig& cfg = {});

/// Closed set with an optional membership filter, used for F_gamma = F n {f >= gamma - tol}.
struct RestrictedSet {
    ClosedSetOracle set;
    std::function<bool(const Vector&)> member;

    bool contains(const Vector& y) const { return !member || member(y); }
};

struct SetDistance {
    double value = std::numeric_limits<double>::infinity();
    Vector nearest;
    /// False when no probe found a crossing (value is then +inf).
    bool found = false;
    int probes = 0;
};

SetDistance dist_delta_to_set(const Vector& x, const RestrictedSet& F, const GeodesicConfig& cfg = {});
SetDistance dist_delta_to_set(const Vector& x, const ClosedSetOracle& F, const GeodesicConfig& cfg = {});

/// max over grid nodes of delta_estimate(p1(s_i), p2(s_i)).
double path_metric_rho(const DiscretePath& p1, const DiscretePath& p2, const GeodesicConfig& cfg = {});

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const GaussLegendre& gauss_legendre(int n);

}  // namespace nsmp

#endif
