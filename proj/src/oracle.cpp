#include "nsmp/oracle.hpp"

#include <cmath>

#include <fmt/format.h>

namespace nsmp {

namespace {

std::string format_point(const Vector& x) {
    std::string s = "(";
    const Eigen::Index shown = std::min<Eigen::Index>(x.size(), 6);
    for (Eigen::Index i = 0; i < shown; ++i) {
        if (i) s += ", ";
        s += fmt::format("{:.6g}", x[i]);
    }
    if (shown < x.size()) s += ", ...";
    return s + ")";
}

}  // namespace

double Functional::operator()(const Vector& x) const { return eval(x); }

double Functional::checked(const Vector& x) const {
    const double v = eval(x);
    if (!std::isfinite(v)) {
        throw EvaluationError(fmt::format("{}: non-finite value at {}", name, format_point(x)), x);
    }
    return v;
}

Functional negated(const Functional& f) {
    Functional g = f;
    g.name = "-" + f.name;
    g.eval = [e = f.eval](const Vector& x) { return -e(x); };
    g.grad_ae = [ga = f.grad_ae](const Vector& x) -> std::optional<Vector> {
        auto grad = ga(x);
        if (!grad) return std::nullopt;
        return Vector(-*grad);
    };
    return g;
}

Component ClosedSetOracle::component_of(const Vector& x) const {
    const double g = indicator_gap(x);
    if (std::abs(g) <= level_tolerance) return Component::boundary;
    return g < 0.0 ? Component::omega0 : Component::omega1;
}

double SolverConfig::tol(const std::string& key) const {
    auto it = tolerances.find(key);
    if (it == tolerances.end()) throw ContractViolation("unknown tolerance '" + key + "'");
    return it->second;
}

void SolverConfig::validate() const {
    if (sampling_radius <= 0.0) throw ContractViolation("sampling_radius must be positive");
    if (sample_count < 2 || quadrature_points < 2 || path_nodes < 2) {
        throw ContractViolation("sample_count, quadrature_points and path_nodes must be >= 2");
    }
    if (epsilon_schedule.empty()) throw ContractViolation("epsilon_schedule is empty");
    for (std::size_t i = 0; i < epsilon_schedule.size(); ++i) {
        if (!(epsilon_schedule[i] > 0.0)) throw ContractViolation("epsilon_schedule entries must be positive");
        if (i > 0 && !(epsilon_schedule[i] < epsilon_schedule[i - 1])) {
            throw ContractViolation("epsilon_schedule must be strictly decreasing");
        }
    }
    for (const auto& [k, v] : tolerances) {
        if (!(v >= 0.0)) throw ContractViolation("tolerance '" + k + "' must be nonnegative");
    }
}

Vector finite_difference_gradient(const Functional& f, const Vector& x, double step) {
    if (!(step > 0.0)) throw ContractViolation("finite_difference_gradient: step must be positive");
    Vector g(x.size());
    Vector probe = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        probe[i] = x[i] + step;
        const double fp = f.checked(probe);
        probe[i] = x[i] - step;
        const double fm = f.checked(probe);
        probe[i] = x[i];
        g[i] = (fp - fm) / (2.0 * step);
    }
    return g;
}

}  // namespace nsmp
