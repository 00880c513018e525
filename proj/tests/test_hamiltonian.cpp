#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nsmp/hamiltonian.hpp"

using namespace nsmp;

static EnergyProblem problem(double mu1, double h = 1.0, double a = 1.0, double mu2 = 0.0) {
    EnergyProblem p;
    p.potential.n = 2;
    p.potential.a = a;
    p.potential.mu1 = mu1;
    p.potential.mu2 = mu2;
    p.h = h;
    return p;
}

static constexpr double pi = std::numbers::pi;

TEST_CASE("loops are antisymmetric by construction") {
    LoopState u = LoopState::circle(3, 16, 1.3);
    u.half(2, 3) = 0.7;
    for (int j = -20; j < 40; ++j) CHECK(u.at(j + 8) == -u.at(j));
    CHECK(u.at(16) == u.at(0));
    const LoopState back = LoopState::from_coords(u.coords(), 3, 16);
    CHECK((back.half - u.half).norm() <= 1e-14);
    CHECK_THROWS_AS(LoopState::zero(2, 7), ContractViolation);
    // |x| is the trapezoidal L2 norm of the full loop.
    double l2 = 0;
    for (int j = 0; j < 16; ++j) l2 += u.at(j).squaredNorm() / 16;
    CHECK(u.coords().norm() == doctest::Approx(std::sqrt(l2)).epsilon(1e-14));
}

TEST_CASE("action examples") {
    const EnergyProblem p = problem(2.0);
    CHECK(action(LoopState::zero(2, 128), p) == 0.0);
    for (double R : {0.3, 1.0, 1.7}) {
        const double exact = 0.5 * std::pow(2 * pi * R, 2) * (1 - R * R);
        const double got = action(LoopState::circle(2, 128, R), p);
        CHECK(std::abs(got - exact) <= 1e-3 * std::abs(exact) + 1e-12);
    }
    const LoopState u = LoopState::circle(2, 128, 0.4);
    CHECK(action_parts(u.scaled(2.0), p).kinetic == doctest::Approx(4 * action_parts(u, p).kinetic).epsilon(1e-14));
}

TEST_CASE("W examples") {
    PotentialSpec pot = problem(2.0, 1.0, 1.0, 0.6).potential;
    CHECK(w_functional(LoopState::zero(2, 64), pot) == doctest::Approx(0.3));
    for (double mu1 : {1.0, 2.0, 3.0}) {
        pot = problem(mu1, 1.0, 1.5, 0.2).potential;
        const double R = 0.8;
        CHECK(w_functional(LoopState::circle(2, 64, R), pot) ==
              doctest::Approx((1 + mu1 / 2) * 1.5 * std::pow(R, mu1) + 0.2 / mu1).epsilon(1e-13));
    }
    CHECK(w_functional(LoopState::circle(2, 64, 1 / std::sqrt(2.0)), problem(2.0).potential) ==
          doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("W is exactly even") {
    LoopState u = LoopState::circle(2, 32, 0.9);
    u.half(0, 2) += 0.31;
    for (double mu1 : {1.0, 1.5, 2.0})
        CHECK(w_functional(u.scaled(-1.0), problem(mu1).potential) == w_functional(u, problem(mu1).potential));
}

TEST_CASE("scale to F_h") {
    const LoopState c = LoopState::circle(2, 128, 1.0);
    const EnergyProblem p2 = problem(2.0), p1 = problem(1.0);
    CHECK(scale_to_Fh(c, p2) == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-9));
    CHECK(scale_to_Fh(c, p1) == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
    const LoopState on = c.scaled(1 / std::sqrt(2.0));
    CHECK(scale_to_Fh(on, p2) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(w_functional(c.scaled(scale_to_Fh(c, p1)), p1.potential) - 1.0) <= 2e-10);
    CHECK_THROWS_AS(scale_to_Fh(LoopState::zero(2, 128), p2), ContractViolation);
}

TEST_CASE("period from loop") {
    const double T2 = period_from_loop(LoopState::circle(2, 128, 1 / std::sqrt(2.0)), problem(2.0));
    CHECK(T2 == doctest::Approx(pi * std::sqrt(2.0)).epsilon(1e-3));
    const double T1 = period_from_loop(LoopState::circle(2, 128, 2.0 / 3.0), problem(1.0));
    CHECK(T1 == doctest::Approx(2 * pi * std::sqrt(2.0 / 3.0)).epsilon(1e-3));
    CHECK_THROWS_AS(period_from_loop(LoopState::zero(2, 128), problem(2.0)), DegenerateLoop);
    CHECK_THROWS_AS(period_from_loop(LoopState::circle(2, 128, 3.0), problem(2.0)), DegenerateLoop);
    // Small loops: T shrinks with the kinetic factor.
    const double small = period_from_loop(LoopState::circle(2, 128, 1e-6), problem(2.0));
    CHECK(small > 0.0);
    CHECK(small < 1e-5);
}

TEST_CASE("residuals of the exact harmonic circle") {
    const EnergyProblem p = problem(2.0);
    const double R = 1 / std::sqrt(2.0), w = std::sqrt(2.0), T = 2 * pi / w;
    double prev_inc = 0, prev_en = 0;
    for (int m : {64, 128}) {
        PeriodicOrbit o;
        o.T = T;
        for (int j = 0; j < m; ++j) {
            const double t = T * j / m;
            Vector q(2), qd(2);
            q << R * std::cos(w * t), R * std::sin(w * t);
            const double dt = T / m;
            // Central-difference velocities of the analytic samples.
            qd << R * (std::cos(w * (t + dt)) - std::cos(w * (t - dt))) / (2 * dt),
                R * (std::sin(w * (t + dt)) - std::sin(w * (t - dt))) / (2 * dt);
            o.t.push_back(t);
            o.q.push_back(q);
            o.qdot.push_back(qd);
        }
        const ResidualReport r = residual_check(o, p);
        CHECK(r.inclusion_max <= 10.0 / (m * m));
        CHECK(r.energy_max <= 10.0 / (m * m));
        if (m == 128) {
            CHECK(r.inclusion_max == doctest::Approx(prev_inc / 4).epsilon(0.05));
            CHECK(r.energy_max == doctest::Approx(prev_en / 4).epsilon(0.05));
        }
        prev_inc = r.inclusion_max;
        prev_en = r.energy_max;
    }
}

TEST_CASE("zero orbit is not a solution") {
    const EnergyProblem p = problem(2.0, 1.5, 1.0, 0.5);
    PeriodicOrbit o = orbit_from_loop(LoopState::zero(2, 32), 1.0);
    const ResidualReport r = residual_check(o, p);
    CHECK(r.energy_max == doctest::Approx(1.5 - 0.25));
}

TEST_CASE("potential conditions") {
    for (double mu1 : {1.0, 1.5, 2.0, 4.0}) {
        const PotentialSpec pot = problem(mu1, 2.0, 0.7, 0.3).potential;
        Vector q(2);
        q << 0.4, -1.1;
        CHECK(pot.value(-q) == pot.value(q));
        CHECK(pot.gradient(q).dot(q) == doctest::Approx(mu1 * pot.value(q) - pot.mu2).epsilon(1e-12));
        CHECK(pot.min_inner(q) == doctest::Approx(pot.gradient(q).dot(q)).epsilon(1e-12));
        const double M = pot.m_radius(2.0);
        Vector far(2);
        far << M, 0;
        CHECK(pot.value(far) >= 2.0 - 1e-12);
        CHECK(pot.value(1.5 * far) >= 2.0);
        CHECK(pot.distance_to_subdifferential(q, pot.gradient(q)) <= 1e-14);
    }
    const PotentialSpec cone = problem(1.0).potential;
    Vector y(2);
    y << 0.6, 0.0;
    CHECK(cone.distance_to_subdifferential(Vector::Zero(2), y) == 0.0);
    y << 1.5, 0.0;
    CHECK(cone.distance_to_subdifferential(Vector::Zero(2), y) == doctest::Approx(0.5));
}

TEST_CASE("the action's a.e. gradient matches differences") {
    const EnergyProblem p = problem(1.5);
    const Functional f = action_functional(p, 16);
    LoopState u = LoopState::circle(2, 16, 0.6);
    u.half(1, 2) += 0.2;
    const Vector x = u.coords();
    const auto g = f.grad_ae(x);
    REQUIRE(g.has_value());
    const Vector fd = finite_difference_gradient(f, x, 1e-6);
    CHECK((*g - fd).norm() <= 1e-6 * (1 + g->norm()));
}

TEST_CASE("energy level set components") {
    const EnergyProblem p = problem(2.0);
    const ClosedSetOracle F = energy_level_set(p, 64);
    CHECK(F.component_of(LoopState::zero(2, 64).coords()) == Component::omega0);
    CHECK(F.component_of(LoopState::circle(2, 64, 2.0).coords()) == Component::omega1);
    CHECK(F.component_of(LoopState::circle(2, 64, 1 / std::sqrt(2.0)).coords()) == Component::boundary);
}

TEST_CASE("z1 placement straddles W = h") {
    for (double mu1 : {1.0, 2.0, 3.0}) {
        const EnergyProblem p = problem(mu1, 1.3, 0.8, 0.4);
        const double R = place_far_loop(p, 64);
        const LoopState z1 = LoopState::circle(2, 64, R);
        CHECK(action(z1, p) <= 0.0);
        CHECK(w_functional(z1, p.potential) > p.h);
        CHECK(w_functional(LoopState::zero(2, 64), p.potential) < p.h);
        CHECK(min_inner_integral(z1.scaled(scale_to_Fh(z1, p)), p.potential) >= positivity_bound(p) - 1e-6);
    }
}

TEST_CASE("energies at or below mu2/mu1 are rejected") {
    EnergyProblem p = problem(2.0, 0.5, 1.0, 1.0);
    CHECK_THROWS_AS(p.validate(), ContractViolation);
    CHECK_THROWS_AS(find_orbit(p, SolverConfig{}), ContractViolation);
    p.h = 0.4;
    CHECK_THROWS_AS(find_orbit(p, SolverConfig{}), ContractViolation);
}
