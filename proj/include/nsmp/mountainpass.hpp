#ifndef NSMP_MOUNTAINPASS_HPP
#define NSMP_MOUNTAINPASS_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nsmp/clarke.hpp"
#include "nsmp/ekeland.hpp"
#include "nsmp/geodesic.hpp"
#include "nsmp/oracle.hpp"
#include "nsmp/path.hpp"

namespace nsmp {

struct PathMax {
    double value = 0.0;
    /// All indices within the tie tolerance 1e-12 (1 + |max|) of the maximum.
    std::vector<int> indices;
};

PathMax max_set(const std::vector<double>& values, double tie_relative = 1e-12);
/// Evaluates p (filling p.values) and returns its node maximum and max-set.
PathMax path_max(const Functional& f, DiscretePath& p, double tie_relative = 1e-12);

struct MinimaxEstimate {
    double gamma = 0.0;
    DiscretePath best_path;
    /// (iteration, path max) at every accepted improvement; nonincreasing.
    std::vector<std::pair<int, double>> history;
    int iterations = 0;
    bool stagnant = false;
    /// False when an endpoint value is not below the initial path max.
    bool mountain_geometry = true;
};

/**
 * Discrete minimax over polygonal paths from z0 to z1.
 *
 * Each iteration moves interior nodes along the negative min-norm sampled
 * subgradient, projected normal to the path, with backtracking; the max node
 * then climbs to the top of its two segments and the other nodes are
 * redistributed to equal chord length on either side of it. The best path
 * is kept by node max and by a segment-sampled max, so history is monotone.
 */
MinimaxEstimate gamma_estimate(const Functional& f, const Vector& z0, const Vector& z1, const SolverConfig& cfg,
                               const std::optional<DiscretePath>& initial_path = std::nullopt);

struct PathCrossing {
    int segment = 0;
    Vector point;
    double value = 0.0;
    /// value >= gamma - tol, i.e. the crossing lies in the super-level set.
    bool in_level = false;
};

struct PathCrossings {
    std::vector<PathCrossing> crossings;
    Component start = Component::boundary;
    Component end = Component::boundary;
    /// Endpoints lie in different open components.
    bool applicable = false;
    bool crosses_level = false;
    double path_max = 0.0;
};

enum class SeparationVerdict { holds, violated, not_applicable };

struct SeparationReport {
    std::vector<PathCrossings> paths;
    SeparationVerdict verdict = SeparationVerdict::not_applicable;
};

/// Locates every sign change of F's gap along each path by bisection.
/// Throws ContractViolation when an applicable path has no crossing.
SeparationReport separation_check(const ClosedSetOracle& F, const Functional& f, double gamma,
                                  const std::vector<DiscretePath>& paths, double tol = 1e-9);

/// F_gamma = F n {f >= gamma - tol}.
RestrictedSet level_restricted(const ClosedSetOracle& F, const Functional& f, double gamma, double tol);

/// Right end of the admissible epsilon range: 0.5 min(1, dist(z0, F_gamma), dist(z1, F_gamma)).
double admissible_epsilon_bound(const Vector& z0, const Vector& z1, const RestrictedSet& F_gamma,
                                const GeodesicConfig& gcfg);

/// max(0, eps^2 - eps d).
double psi_from_distance(double epsilon, double distance);

struct PenaltyValue {
    double value = 0.0;
    double distance = 0.0;
};

/// Penalty max(0, eps^2 - eps dist_delta(x, F_gamma)); throws ContractViolation
/// with the admissible range when eps is outside it.
PenaltyValue penalty_psi(const Vector& x, const ClosedSetOracle& F, const Functional& f, double gamma,
                         double epsilon, const Vector& z0, const Vector& z1, const GeodesicConfig& gcfg,
                         double level_tol = 1e-4);

/// Raised when the path cannot be trimmed for the requested epsilon.
class TrimmingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct TrimmedSegment {
    int t0_index = 0;
    int t1_index = 0;
    double t0_distance = 0.0;
    double t1_distance = 0.0;
};

/// Discrete t0/t1: last Omega_0 node at distance >= eps from F_gamma, then the
/// first later Omega_1 node at distance >= eps. Throws TrimmingError.
TrimmedSegment trim_path(const DiscretePath& c, const ClosedSetOracle& F, const RestrictedSet& F_gamma,
                         double epsilon, const GeodesicConfig& gcfg);

struct CeramiPoint {
    Vector x;
    double epsilon = 0.0;
    double phi_value = 0.0;
    double dist_delta_F = 0.0;
    double scaled_residual = 0.0;
    double penalty_value = 0.0;
};

/// The three quantitative guarantees checked at every Cerami point.
struct BoundLedger {
    double gamma = 0.0;
    double epsilon = 0.0;
    double residual = 0.0;
    double residual_bound = 0.0;  // 3 eps / 2
    double distance = 0.0;
    double distance_bound = 0.0;  // 3 eps / 2
    double level = 0.0;           // Phi + Psi at the point
    double level_lower = 0.0;     // gamma + eps^2
    double level_upper = 0.0;     // gamma + 5 eps^2 / 4
    double slack_quadrature = 0.0;
    double slack_sampling = 0.0;
    double slack_discretization = 0.0;

    double slack() const { return slack_quadrature + slack_sampling + slack_discretization; }
    bool residual_ok() const { return residual <= residual_bound + slack(); }
    bool distance_ok() const { return distance <= distance_bound + slack(); }
    bool level_ok() const { return level_lower - slack() <= level && level <= level_upper + slack(); }
    bool all_ok() const { return residual_ok() && distance_ok() && level_ok(); }
};

struct MountainPassOptions {
    GeodesicConfig geodesic;
    /// Tolerance of the F_gamma membership test f >= gamma - level_tol; it
    /// has to cover the error of the discrete minimax value.
    double level_tol = 1e-4;
    /// Path doublings allowed when trimming needs interior nodes.
    int max_refinements = 3;
    int fresh_witnesses = 64;
    /// Times a fresh witness that beats the Ekeland point may restart the refinement.
    int resume_rounds = 4;
    int random_neighbors = 4;
    std::optional<DiscretePath> initial_path;
};

struct CeramiStepResult {
    CeramiPoint point;
    TrimmedSegment trim;
    DiscretePath start_path;  // trimmed c
    EkelandCertificate<DiscretePath> certificate;
    VerificationReport fresh_check;
    BoundLedger ledger;
    /// Size of the max-set M over nodes and F-crossings of the refined path.
    int max_set_size = 0;
};

/**
 * One epsilon of the construction: trim the near-optimal path, run the
 * Ekeland refinement of phi(f) = max (Phi + Psi) over the trimmed path space
 * with metric rho, epsilon^2/4 and lambda = epsilon/2, then return the
 * max-set point of smallest scaled residual.
 */
CeramiStepResult cerami_step(const Functional& f, const ClosedSetOracle& F, const MinimaxEstimate& gamma_est,
                             double epsilon, const SolverConfig& cfg, const MountainPassOptions& opt = {});

struct CeramiSequence {
    MinimaxEstimate minimax;
    SeparationReport separation;
    double epsilon_bound = 0.0;
    std::vector<double> schedule;
    std::vector<std::string> warnings;
    std::vector<CeramiStepResult> steps;
    /// Largest pairwise Euclidean distance among the tail points.
    double tail_diameter = 0.0;
    bool all_bounds_hold() const;
};

CeramiSequence cerami_sequence(const Functional& f, const ClosedSetOracle& F, const Vector& z0, const Vector& z1,
                               const SolverConfig& cfg, const MountainPassOptions& opt = {});

}  // namespace nsmp

#endif
