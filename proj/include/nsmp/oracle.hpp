#ifndef NSMP_ORACLE_HPP
#define NSMP_ORACLE_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace nsmp {

using Vector = Eigen::VectorXd;

/// Raised when a functional returns a non-finite value.
class EvaluationError : public std::runtime_error {
public:
    EvaluationError(const std::string& what, Vector point)
        : std::runtime_error(what), point_(std::move(point)) {}
    const Vector& point() const { return point_; }

private:
    Vector point_;
};

/// Raised when a caller breaks an operation's precondition.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/**
 * A locally Lipschitz map on R^dim.
 *
 * grad_ae returns std::nullopt at points where the functional declines to
 * report a gradient (on or within kink_radius of its nonsmooth set).
 * Instances are immutable once built and may be shared across threads.
 */
struct Functional {
    std::string name;
    int dim = 0;
    std::function<double(const Vector&)> eval;
    std::function<std::optional<Vector>(const Vector&)> grad_ae;
    /// Local Lipschitz constant valid on the ball of radius lipschitz_radius.
    std::optional<double> lipschitz_hint;
    double lipschitz_radius = 0.0;

    double operator()(const Vector& x) const;
    /// eval() that throws EvaluationError on a non-finite result.
    double checked(const Vector& x) const;
};

/// The functional x -> -f(x).
Functional negated(const Functional& f);

enum class Component { omega0, omega1, boundary };

/**
 * Closed set F = {gap = 0} with the two open sides {gap < 0} (Omega_0)
 * and {gap > 0} (Omega_1).
 */
struct ClosedSetOracle {
    std::string name;
    int dim = 0;
    std::function<double(const Vector&)> indicator_gap;
    double level_tolerance = 1e-12;

    Component component_of(const Vector& x) const;
};

/// Tolerances and budgets shared by the solver modules.
struct SolverConfig {
    std::uint64_t rng_seed = 20240601;
    double sampling_radius = 1e-3;
    int sample_count = 12;
    int quadrature_points = 16;
    int path_nodes = 64;
    std::vector<double> epsilon_schedule{0.1, 0.05, 0.02, 0.01};
    std::map<std::string, double> tolerances{
        {"tol_dd", 1e-3},
        {"tol_hom", 1e-2},
        {"tol_support", 1e-2},
        {"kink_radius", 1e-9},
        {"min_norm_gap", 1e-10},
        {"tie", 1e-12},
    };
    int minimax_iterations = 200;
    int minimax_patience = 40;
    int ekeland_budget = 200;

    double tol(const std::string& key) const;
    /// Throws ContractViolation when a count is below 2 or the schedule is
    /// not strictly decreasing and positive.
    void validate() const;
};

/// Central differences: (f(x+h e_i) - f(x-h e_i)) / 2h.
Vector finite_difference_gradient(const Functional& f, const Vector& x, double step);

}  // namespace nsmp

#endif
