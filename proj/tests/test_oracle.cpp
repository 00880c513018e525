#include <doctest.h>

#include <cmath>

#include "nsmp/builtins.hpp"
#include "nsmp/oracle.hpp"
#include "nsmp/path.hpp"
#include "nsmp/properties.hpp"
#include "nsmp/rng.hpp"

using namespace nsmp;

static Vector v2(double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
}

TEST_CASE("central differences on the quadratic are exact") {
    const Vector g = finite_difference_gradient(norm_sq(2), v2(1, 0), 1e-5);
    CHECK(std::abs(g[0] - 2.0) <= 1e-8);
    CHECK(std::abs(g[1]) <= 1e-8);
}

TEST_CASE("central differences away from the kink of |x1|") {
    Functional f;
    f.dim = 2;
    f.eval = [](const Vector& x) { return std::abs(x[0]); };
    const Vector g = finite_difference_gradient(f, v2(2, 3), 1e-5);
    CHECK(g[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(g[1]) <= 1e-9);
}

TEST_CASE("central differences on the double well at (1, 1)") {
    const Vector g = finite_difference_gradient(double_well(), v2(1, 1), 1e-5);
    CHECK(g[0] == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(g[1] == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("non-finite values are reported with the point") {
    Functional f;
    f.name = "bad";
    f.dim = 1;
    f.eval = [](const Vector& x) { return x[0] > 0 ? std::nan("") : 0.0; };
    try {
        finite_difference_gradient(f, Vector::Constant(1, 1.0), 1e-3);
        FAIL("expected EvaluationError");
    } catch (const EvaluationError& e) {
        CHECK(e.point().size() == 1);
        CHECK(e.point()[0] > 0.0);
    }
    CHECK_THROWS_AS(finite_difference_gradient(norm_sq(2), v2(0, 0), 0.0), ContractViolation);
}

TEST_CASE("grad_ae declines at kinks and agrees with differences elsewhere") {
    CHECK_FALSE(kink_well().grad_ae(v2(0, 0.3)).has_value());
    CHECK_FALSE(abs_functional().grad_ae(Vector::Zero(1)).has_value());
    CHECK_FALSE(max2().grad_ae(v2(0.2, 0.2)).has_value());
    CHECK(max2().grad_ae(v2(0.3, 0.2)).has_value());
    SolverConfig cfg;
    for (const auto& c : oracle_properties(cfg)) {
        INFO(c.subject << " worst " << c.worst);
        CHECK(c.samples == 100);
        CHECK(c.pass);
    }
}

TEST_CASE("hyperplane components and level tolerance") {
    const ClosedSetOracle F = hyperplane(2, 0, 0.0);
    CHECK(F.component_of(v2(-1, 0)) == Component::omega0);
    CHECK(F.component_of(v2(1, 0)) == Component::omega1);
    CHECK(F.component_of(v2(0, 5)) == Component::boundary);
    CHECK(F.component_of(v2(1e-13, 5)) == Component::boundary);
    CHECK(F.component_of(v2(1e-6, 5)) == Component::omega1);
}

TEST_CASE("negated functional") {
    const Functional g = negated(double_well());
    CHECK(g(v2(1, 1)) == -1.0);
    const auto d = g.grad_ae(v2(1, 1));
    REQUIRE(d.has_value());
    CHECK((*d)[0] == -2.0);
}

TEST_CASE("solver config validation") {
    SolverConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.epsilon_schedule = {0.1, 0.1};
    CHECK_THROWS_AS(cfg.validate(), ContractViolation);
    cfg.epsilon_schedule = {0.1, -0.05};
    CHECK_THROWS_AS(cfg.validate(), ContractViolation);
    cfg = SolverConfig{};
    cfg.sample_count = 1;
    CHECK_THROWS_AS(cfg.validate(), ContractViolation);
    CHECK_THROWS(SolverConfig{}.tol("no_such_tolerance"));
}

TEST_CASE("registry") {
    for (const auto& name : builtin_names()) CHECK(builtin_functional(name).name == name);
    CHECK_THROWS_AS(builtin_functional("rosenbrock"), std::invalid_argument);
    CHECK(builtin_functional("norm_sq", 3).dim == 3);
}

TEST_CASE("seeded streams are reproducible and label-separated") {
    auto a = split_rng(7, "x"), b = split_rng(7, "x"), c = split_rng(7, "y");
    const auto va = a(), vb = b(), vc = c();
    CHECK(va == vb);
    CHECK(va != vc);
    CHECK(label_hash("abc") == label_hash("abc"));
    auto r = split_rng(1, "ball");
    for (int i = 0; i < 100; ++i) CHECK(uniform_in_ball(r, v2(1, 1), 0.5).size() == 2);
    auto r2 = split_rng(1, "ball");
    for (int i = 0; i < 100; ++i) CHECK((uniform_in_ball(r2, v2(1, 1), 0.5) - v2(1, 1)).norm() <= 0.5);
}

TEST_CASE("discrete paths") {
    const DiscretePath p = DiscretePath::straight(v2(-1, 0), v2(1, 0), 4);
    CHECK(p.size() == 5);
    CHECK(p.at(0.5).isApprox(v2(0, 0)));
    CHECK(p.at(0.375)[0] == doctest::Approx(-0.25));
    CHECK_NOTHROW(p.validate());
    DiscretePath bad = p;
    bad.grid[2] = bad.grid[1];
    CHECK_THROWS_AS(bad.validate(), ContractViolation);
    CHECK(p.same_grid(DiscretePath::straight(v2(0, 0), v2(3, 3), 4)));
    CHECK_FALSE(p.same_grid(DiscretePath::straight(v2(0, 0), v2(3, 3), 5)));
}
