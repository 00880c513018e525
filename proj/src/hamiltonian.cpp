#include "nsmp/hamiltonian.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/tools/roots.hpp>
#include <fmt/format.h>

namespace nsmp {

double PotentialSpec::value(const Vector& q) const { return a * std::pow(q.norm(), mu1) + mu2 / mu1; }

Vector PotentialSpec::gradient(const Vector& q) const {
    const double r = q.norm();
    if (r == 0.0) return Vector::Zero(q.size());
    return a * mu1 * std::pow(r, mu1 - 2.0) * q;
}

double PotentialSpec::distance_to_subdifferential(const Vector& q, const Vector& y) const {
    if (q.norm() == 0.0) return mu1 > 1.0 ? y.norm() : std::max(0.0, y.norm() - a);
    return (y - gradient(q)).norm();
}

double PotentialSpec::min_inner(const Vector& q) const { return mu1 * a * std::pow(q.norm(), mu1); }

double PotentialSpec::m_radius(double h) const { return std::pow(std::max(0.0, h - mu2 / mu1) / a, 1.0 / mu1); }

void PotentialSpec::validate() const {
    if (n < 1) throw ContractViolation("potential dimension must be positive");
    if (!(a > 0.0)) throw ContractViolation("potential coefficient a must be positive");
    if (!(mu1 >= 1.0)) throw ContractViolation("mu1 must be at least 1 for a locally Lipschitz potential");
    if (!(mu2 >= 0.0)) throw ContractViolation("mu2 must be nonnegative");
}

void EnergyProblem::validate() const {
    potential.validate();
    if (!(h > potential.mu2 / potential.mu1))
        throw ContractViolation(
            fmt::format("energy h = {} must exceed mu2/mu1 = {}", h, potential.mu2 / potential.mu1));
}

LoopState LoopState::zero(int n, int m) {
    if (m < 4 || m % 2 != 0) throw ContractViolation(fmt::format("loop grid must be even and >= 4, got {}", m));
    LoopState u;
    u.n = n;
    u.m = m;
    u.half = Eigen::MatrixXd::Zero(n, m / 2);
    return u;
}

LoopState LoopState::circle(int n, int m, double R) {
    if (n < 2) throw ContractViolation("the circle seed loop needs n >= 2");
    LoopState u = zero(n, m);
    for (int j = 0; j < m / 2; ++j) {
        const double t = 2.0 * std::numbers::pi * j / m;
        u.half(0, j) = R * std::cos(t);
        u.half(1, j) = R * std::sin(t);
    }
    return u;
}

LoopState LoopState::from_coords(const Vector& x, int n, int m) {
    LoopState u = zero(n, m);
    if (x.size() != static_cast<Eigen::Index>(n) * (m / 2))
        throw ContractViolation(fmt::format("loop coordinates have size {}, expected {}", x.size(), n * (m / 2)));
    const double c = std::sqrt(2.0 / m);
    u.half = Eigen::Map<const Eigen::MatrixXd>(x.data(), n, m / 2) / c;
    return u;
}

Vector LoopState::coords() const {
    const double c = std::sqrt(2.0 / m);
    return c * Eigen::Map<const Vector>(half.data(), half.size());
}

Vector LoopState::at(int j) const {
    j %= m;
    if (j < 0) j += m;
    return j < m / 2 ? Vector(half.col(j)) : Vector(-half.col(j - m / 2));
}

Vector LoopState::velocity(int j) const { return (at(j + 1) - at(j - 1)) * (0.5 * m); }

double LoopState::min_radius() const {
    double r = std::numeric_limits<double>::infinity();
    for (int j = 0; j < m / 2; ++j) r = std::min(r, half.col(j).norm());
    return r;
}

LoopState LoopState::scaled(double s) const {
    LoopState u = *this;
    u.half *= s;
    return u;
}

ActionParts action_parts(const LoopState& u, const EnergyProblem& prob) {
    // By antisymmetry both integrands repeat on the second half.
    ActionParts p;
    const int half = u.m / 2;
    for (int j = 0; j < half; ++j) {
        p.kinetic += u.velocity(j).squaredNorm();
        p.potential += prob.h - prob.potential.value(u.half.col(j));
    }
    p.kinetic /= half;
    p.potential /= half;
    p.value = 0.5 * p.kinetic * p.potential;
    return p;
}

double action(const LoopState& u, const EnergyProblem& prob) { return action_parts(u, prob).value; }

double w_functional(const LoopState& u, const PotentialSpec& pot) {
    double s = 0.0;
    for (int j = 0; j < u.m / 2; ++j) {
        const Vector q = u.half.col(j);
        s += pot.value(q) + 0.5 * pot.min_inner(q);
    }
    return s / (u.m / 2);
}

double scale_to_Fh(const LoopState& u, const EnergyProblem& prob) {
    if (!(u.min_radius() > 0.0)) throw ContractViolation("scale_to_Fh needs a loop with min_t |u(t)| > 0");
    const double h = prob.h;
    auto g = [&](double s) { return w_functional(u.scaled(s), prob.potential) - h; };
    double hi = 1.0;
    int grow = 0;
    while (g(hi) <= 0.0) {
        hi *= 2.0;
        if (++grow > 200)
            throw std::runtime_error(fmt::format("scale_to_Fh: W(a u) stayed below h = {} up to a = {}", h, hi));
    }
    double lo = 0.0;
    const double tol = 1e-10 * (1.0 + h);
    boost::uintmax_t iters = 200;
    auto [a, b] = boost::math::tools::toms748_solve(g, lo, hi, g(lo), g(hi),
                                                    boost::math::tools::eps_tolerance<double>(52), iters);
    const double s = std::abs(g(a)) <= std::abs(g(b)) ? a : b;
    if (std::abs(g(s)) > tol) {
        // Bisection fallback keeps the stated tolerance.
        double l = a, r = b;
        for (int it = 0; it < 200 && r - l > 0.0; ++it) {
            const double mid = 0.5 * (l + r);
            (g(mid) < 0.0 ? l : r) = mid;
        }
        return std::abs(g(l)) <= std::abs(g(r)) ? l : r;
    }
    return s;
}

double period_from_loop(const LoopState& u, const EnergyProblem& prob) {
    const ActionParts p = action_parts(u, prob);
    if (!(p.kinetic > 0.0))
        throw DegenerateLoop(fmt::format("kinetic factor int |u'|^2 = {} is not positive", p.kinetic));
    if (!(p.potential > 0.0))
        throw DegenerateLoop(fmt::format("potential factor int (h - V(u)) = {} is not positive", p.potential));
    return std::sqrt(0.5 * p.kinetic / p.potential);
}

Functional action_functional(const EnergyProblem& prob, int m, double kink_radius) {
    prob.validate();
    const int n = prob.potential.n;
    Functional f;
    f.name = "action";
    f.dim = n * (m / 2);
    f.eval = [prob, n, m](const Vector& x) { return action(LoopState::from_coords(x, n, m), prob); };
    f.grad_ae = [prob, n, m, kink_radius](const Vector& x) -> std::optional<Vector> {
        const LoopState u = LoopState::from_coords(x, n, m);
        const PotentialSpec& V = prob.potential;
        if (V.mu1 < 2.0)
            for (int j = 0; j < m / 2; ++j)
                if (u.half.col(j).norm() <= kink_radius) return std::nullopt;
        const ActionParts p = action_parts(u, prob);
        const double c = std::sqrt(2.0 / m);
        Eigen::MatrixXd g(n, m / 2);
        // Full-node derivative d/du_j = 1/2 (K' P + K P') with K' = u'_{j-1} - u'_{j+1}
        // and P' = -grad V(u_j) / m; half node j also drives u_{j+m/2} = -u_j.
        auto full = [&](int j) -> Vector {
            const Vector dK = u.velocity(j - 1) - u.velocity(j + 1);
            const Vector dP = -V.gradient(u.at(j)) / m;
            return 0.5 * (dK * p.potential + p.kinetic * dP);
        };
        for (int j = 0; j < m / 2; ++j) g.col(j) = (full(j) - full(j + m / 2)) / c;
        return Vector(Eigen::Map<const Vector>(g.data(), g.size()));
    };
    return f;
}

ClosedSetOracle energy_level_set(const EnergyProblem& prob, int m) {
    const int n = prob.potential.n;
    ClosedSetOracle F;
    F.name = "F_h";
    F.dim = n * (m / 2);
    F.level_tolerance = 1e-10 * (1.0 + prob.h);
    F.indicator_gap = [prob, n, m](const Vector& x) {
        return w_functional(LoopState::from_coords(x, n, m), prob.potential) - prob.h;
    };
    return F;
}

PeriodicOrbit orbit_from_loop(const LoopState& u, double T) {
    PeriodicOrbit o;
    o.T = T;
    o.n = u.n;
    o.loop = u;
    for (int j = 0; j < u.m; ++j) {
        o.t.push_back(T * j / u.m);
        o.q.push_back(u.at(j));
        o.qdot.push_back(u.velocity(j) / T);
    }
    return o;
}

ResidualReport residual_check(const PeriodicOrbit& orbit, const EnergyProblem& prob, double origin_exclusion) {
    ResidualReport r;
    const int m = static_cast<int>(orbit.q.size());
    if (m < 3 || !(orbit.T > 0.0) || orbit.qdot.size() != orbit.q.size()) return r;
    const double dt = orbit.T / m;
    auto q = [&](int j) -> const Vector& { return orbit.q[((j % m) + m) % m]; };
    for (int j = 0; j < m; ++j) {
        const Vector qdd = (q(j + 1) - 2.0 * q(j) + q(j - 1)) / (dt * dt);
        const Vector& qd = orbit.qdot[j];
        const double inc = prob.potential.distance_to_subdifferential(q(j), -qdd);
        const double en = std::abs(0.5 * qd.squaredNorm() + prob.potential.value(q(j)) - prob.h);
        r.inclusion.push_back(inc);
        r.energy.push_back(en);
        r.inclusion_max = std::max(r.inclusion_max, inc);
        r.energy_max = std::max(r.energy_max, en);
        r.inclusion_mean += inc / m;
        r.energy_mean += en / m;
        if (q(j).norm() > origin_exclusion) r.inclusion_max_off_origin = std::max(r.inclusion_max_off_origin, inc);
    }
    return r;
}

double place_far_loop(const EnergyProblem& prob, int m, double R_start, int max_doublings) {
    double R = R_start;
    for (int k = 0;; ++k) {
        const LoopState z = LoopState::circle(prob.potential.n, m, R);
        if (action(z, prob) <= 0.0 && w_functional(z, prob.potential) > prob.h) return R;
        if (k >= max_doublings) throw std::runtime_error("could not place z1 beyond F_h with f(z1) <= 0");
        R *= 2.0;
    }
}

double min_inner_integral(const LoopState& u, const PotentialSpec& pot) {
    double inner = 0.0;
    for (int j = 0; j < u.m / 2; ++j) inner += pot.min_inner(u.half.col(j));
    return inner / (u.m / 2);
}

double positivity_bound(const EnergyProblem& prob) {
    return (prob.h - prob.potential.mu2 / prob.potential.mu1) / (0.5 + 1.0 / prob.potential.mu1);
}

OrbitRun find_orbit(const EnergyProblem& prob, const SolverConfig& base, const OrbitOptions& opt) {
    prob.validate();
    SolverConfig cfg = base;
    cfg.sampling_radius = opt.sampling_radius;
    cfg.validate();
    const int n = prob.potential.n;
    const int m = opt.grid;
    OrbitRun run;
    run.problem = prob;
    const Functional f = action_functional(prob, m, cfg.tol("kink_radius"));
    const ClosedSetOracle F = energy_level_set(prob, m);

    const LoopState zero = LoopState::zero(n, m);
    run.w_zero = w_functional(zero, prob.potential);
    if (!(run.w_zero < prob.h)) throw ContractViolation("W(0) must lie below h");

    run.R = place_far_loop(prob, m, opt.R_start, opt.max_doublings);
    run.z1 = LoopState::circle(n, m, run.R);
    run.w_z1 = w_functional(run.z1, prob.potential);

    MountainPassOptions mp;
    mp.geodesic.quadrature_points = cfg.quadrature_points;
    mp.geodesic.rng_seed = cfg.rng_seed;
    mp.geodesic.probe_count = opt.probe_count;
    mp.geodesic.polish_trials = opt.polish_trials;
    run.sequence = cerami_sequence(f, F, zero.coords(), run.z1.coords(), cfg, mp);

    const double coefficient = 0.5 * (-prob.potential.mu1 * prob.h + prob.potential.mu2);
    for (const auto& s : run.sequence.steps) {
        const SubdifferentialEstimate sub = subdifferential_sample(f, s.point.x, cfg);
        BoundednessRecord b;
        b.epsilon = s.point.epsilon;
        b.norm_E = std::sqrt(action_parts(LoopState::from_coords(s.point.x, n, m), prob).kinetic);
        b.inner = sub.min_norm_point.dot(s.point.x);
        b.coefficient = coefficient;
        run.boundedness.push_back(b);
    }

    run.cerami_loop = LoopState::from_coords(run.sequence.steps.back().point.x, n, m);
    run.projection_scale = scale_to_Fh(run.cerami_loop, prob);
    const LoopState u = run.cerami_loop.scaled(run.projection_scale);

    run.positivity_integral = min_inner_integral(u, prob.potential);
    run.positivity_bound = positivity_bound(prob);

    try {
        run.orbit = orbit_from_loop(u, period_from_loop(u, prob));
    } catch (const DegenerateLoop&) {
        run.orbit = orbit_from_loop(u, 0.0);
        run.orbit.degenerate = true;
    }
    run.orbit.residual = residual_check(run.orbit, prob);
    run.orbit.converged = !run.orbit.degenerate && run.sequence.all_bounds_hold();
    return run;
}

}  // namespace nsmp
