#include "nsmp/builtins.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace nsmp {

Functional double_well(double /*kink_radius*/) {
    Functional f;
    f.name = "double_well";
    f.dim = 2;
    f.eval = [](const Vector& p) {
        const double x = p[0], y = p[1];
        return x * x * x * x - x * x + y * y;
    };
    f.grad_ae = [](const Vector& p) -> std::optional<Vector> {
        Vector g(2);
        g << 4.0 * p[0] * p[0] * p[0] - 2.0 * p[0], 2.0 * p[1];
        return g;
    };
    f.lipschitz_hint = 29.0;
    f.lipschitz_radius = 2.0;
    return f;
}

Functional kink_well(double kink_radius) {
    Functional f;
    f.name = "kink_well";
    f.dim = 2;
    f.eval = [](const Vector& p) {
        const double a = std::abs(p[0]) - 1.0;
        return a * a + p[1] * p[1];
    };
    f.grad_ae = [kink_radius](const Vector& p) -> std::optional<Vector> {
        if (std::abs(p[0]) <= kink_radius) return std::nullopt;
        Vector g(2);
        g << 2.0 * (std::abs(p[0]) - 1.0) * (p[0] > 0 ? 1.0 : -1.0), 2.0 * p[1];
        return g;
    };
    f.lipschitz_hint = 4.5;
    f.lipschitz_radius = 2.0;
    return f;
}

Functional abs_functional(double kink_radius) {
    Functional f;
    f.name = "abs";
    f.dim = 1;
    f.eval = [](const Vector& p) { return std::abs(p[0]); };
    f.grad_ae = [kink_radius](const Vector& p) -> std::optional<Vector> {
        if (std::abs(p[0]) <= kink_radius) return std::nullopt;
        return Vector::Constant(1, p[0] > 0 ? 1.0 : -1.0);
    };
    f.lipschitz_hint = 1.0;
    f.lipschitz_radius = 1e300;
    return f;
}

Functional norm_sq(int dim) {
    Functional f;
    f.name = "norm_sq";
    f.dim = dim;
    f.eval = [](const Vector& p) { return p.squaredNorm(); };
    f.grad_ae = [](const Vector& p) -> std::optional<Vector> { return Vector(2.0 * p); };
    f.lipschitz_hint = 4.0;
    f.lipschitz_radius = 2.0;
    return f;
}

Functional max2(double kink_radius) {
    Functional f;
    f.name = "max2";
    f.dim = 2;
    f.eval = [](const Vector& p) { return std::max(p[0], p[1]); };
    f.grad_ae = [kink_radius](const Vector& p) -> std::optional<Vector> {
        if (std::abs(p[0] - p[1]) <= kink_radius) return std::nullopt;
        Vector g = Vector::Zero(2);
        g[p[0] > p[1] ? 0 : 1] = 1.0;
        return g;
    };
    f.lipschitz_hint = 1.0;
    f.lipschitz_radius = 1e300;
    return f;
}

Functional builtin_functional(const std::string& name, int dim, double kink_radius) {
    if (name == "double_well") return double_well(kink_radius);
    if (name == "kink_well") return kink_well(kink_radius);
    if (name == "abs") return abs_functional(kink_radius);
    if (name == "norm_sq") return norm_sq(dim);
    if (name == "max2") return max2(kink_radius);
    throw std::invalid_argument(fmt::format("unknown functional '{}'", name));
}

std::vector<std::string> builtin_names() { return {"double_well", "kink_well", "abs", "norm_sq", "max2"}; }

ClosedSetOracle hyperplane(int dim, int axis, double offset, double level_tolerance) {
    if (axis < 0 || axis >= dim) throw std::invalid_argument("hyperplane: axis out of range");
    ClosedSetOracle F;
    F.name = fmt::format("x{}={}", axis + 1, offset);
    F.dim = dim;
    F.indicator_gap = [axis, offset](const Vector& x) { return x[axis] - offset; };
    F.level_tolerance = level_tolerance;
    return F;
}

}  // namespace nsmp
