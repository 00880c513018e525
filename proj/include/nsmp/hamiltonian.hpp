#ifndef NSMP_HAMILTONIAN_HPP
#define NSMP_HAMILTONIAN_HPP

#include <string>
#include <vector>

#include "nsmp/mountainpass.hpp"
#include "nsmp/oracle.hpp"

namespace nsmp {

/// V(q) = a |q|^mu1 + mu2 / mu1 on R^n, mu1 >= 1.
struct PotentialSpec {
    int n = 2;
    double a = 1.0;
    double mu1 = 2.0;
    double mu2 = 0.0;

    double value(const Vector& q) const;
    /// Representative of dV(q); zero at the origin.
    Vector gradient(const Vector& q) const;
    /// Euclidean distance from y to dV(q). At the origin dV is {0} for
    /// mu1 > 1 and the closed ball of radius a for mu1 = 1.
    double distance_to_subdifferential(const Vector& q, const Vector& y) const;
    /// min over y in dV(q) of <y, q>.
    double min_inner(const Vector& q) const;
    /// Radius beyond which V >= h.
    double m_radius(double h) const;
    /// Throws ContractViolation on a <= 0, mu1 < 1, mu2 < 0 or n < 1.
    void validate() const;
};

struct EnergyProblem {
    PotentialSpec potential;
    double h = 1.0;

    /// Throws ContractViolation unless h > mu2 / mu1.
    void validate() const;
};

/**
 * Antisymmetric loop on the uniform grid t_j = j / m, stored as the first
 * m/2 nodes; u(t + 1/2) = -u(t) gives the rest.
 *
 * Coordinates: x = sqrt(2/m) * (stacked half nodes), so |x| is the
 * trapezoidal L2 norm of the full loop.
 */
struct LoopState {
    int n = 2;
    int m = 128;
    Eigen::MatrixXd half;  // n x m/2

    static LoopState zero(int n, int m);
    /// R (cos 2 pi t, sin 2 pi t, 0, ...).
    static LoopState circle(int n, int m, double R);
    static LoopState from_coords(const Vector& x, int n, int m);
    Vector coords() const;

    /// u(t_j) for any integer j (periodic).
    Vector at(int j) const;
    /// Central difference (u_{j+1} - u_{j-1}) m / 2.
    Vector velocity(int j) const;
    double min_radius() const;
    LoopState scaled(double s) const;
};

struct ActionParts {
    double kinetic = 0.0;    // int |u'|^2
    double potential = 0.0;  // int (h - V(u))
    double value = 0.0;      // kinetic * potential / 2
};

ActionParts action_parts(const LoopState& u, const EnergyProblem& prob);
double action(const LoopState& u, const EnergyProblem& prob);
/// W(u) = int [V(u) + 1/2 min <y, u>].
double w_functional(const LoopState& u, const PotentialSpec& pot);

/// a(u) > 0 with |W(a u) - h| <= 1e-10 (1 + h), by bracketing and bisection.
double scale_to_Fh(const LoopState& u, const EnergyProblem& prob);

class DegenerateLoop : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// T = sqrt(int |u'|^2 / 2 / int (h - V)). Throws DegenerateLoop naming the
/// nonpositive factor.
double period_from_loop(const LoopState& u, const EnergyProblem& prob);

/// The action as a Functional on loop coordinates (dimension n m / 2).
Functional action_functional(const EnergyProblem& prob, int m, double kink_radius = 1e-9);
/// F_h = {W = h}; Omega_0 = {W < h} holds the zero loop.
ClosedSetOracle energy_level_set(const EnergyProblem& prob, int m);

struct ResidualReport {
    double inclusion_max = 0.0;
    double inclusion_mean = 0.0;
    /// Max over samples with |q| above the origin exclusion radius.
    double inclusion_max_off_origin = 0.0;
    double energy_max = 0.0;
    double energy_mean = 0.0;
    std::vector<double> inclusion;
    std::vector<double> energy;
};

struct PeriodicOrbit {
    double T = 0.0;
    int n = 2;
    std::vector<double> t;
    std::vector<Vector> q;
    std::vector<Vector> qdot;
    LoopState loop;
    ResidualReport residual;
    bool degenerate = false;
    bool converged = false;
};

/// Samples q(t_j T) = u(t_j) and the matching velocities.
PeriodicOrbit orbit_from_loop(const LoopState& u, double T);

/// -q'' by periodic second differences against dV(q), and the energy defect.
ResidualReport residual_check(const PeriodicOrbit& orbit, const EnergyProblem& prob,
                              double origin_exclusion = 1e-2);

/// One record per Cerami iterate of the bound <y*, u> <= (-mu1 h/2 + mu2/2) |u|_E^2 + alpha.
struct BoundednessRecord {
    double epsilon = 0.0;
    double norm_E = 0.0;
    double inner = 0.0;
    double coefficient = 0.0;
};

struct OrbitOptions {
    int grid = 128;
    /// Gradient-sampling radius on loop coordinates; the kinetic term is stiff
    /// (curvature ~ m^2), so the saddle default is far too coarse here.
    double sampling_radius = 1e-8;
    int probe_count = 16;
    int polish_trials = 8;
    double R_start = 1.0;
    int max_doublings = 40;
};

struct OrbitRun {
    EnergyProblem problem;
    LoopState z1;
    double R = 0.0;
    double w_zero = 0.0;
    double w_z1 = 0.0;
    CeramiSequence sequence;
    LoopState cerami_loop;
    double projection_scale = 1.0;
    /// int min <y, u> over the certified F_h loop and its lower bound (h - mu2/mu1) / (1/2 + 1/mu1).
    double positivity_integral = 0.0;
    double positivity_bound = 0.0;
    std::vector<BoundednessRecord> boundedness;
    PeriodicOrbit orbit;
};

/// Smallest R = R_start 2^k with f(R circle) <= 0 and W(R circle) > h.
double place_far_loop(const EnergyProblem& prob, int m, double R_start = 1.0, int max_doublings = 40);
/// int min <y, u> dt over dV(u(t)).
double min_inner_integral(const LoopState& u, const PotentialSpec& pot);
/// (h - mu2/mu1) / (1/2 + 1/mu1), the lower bound of min_inner_integral on F_h.
double positivity_bound(const EnergyProblem& prob);

/// Mountain pass on the loop space between 0 and a scaled circle beyond F_h.
OrbitRun find_orbit(const EnergyProblem& prob, const SolverConfig& cfg, const OrbitOptions& opt = {});

}  // namespace nsmp

#endif
