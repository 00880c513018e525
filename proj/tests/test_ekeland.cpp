#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "nsmp/ekeland.hpp"
#include "nsmp/properties.hpp"

using namespace nsmp;

namespace {

// Grid [-2, 2] with step 1e-3, points as indices.
struct Grid {
    static constexpr double lo = -2.0, step = 1e-3;
    static constexpr int count = 4001;
    std::vector<int> all;
    std::vector<double> values;

    template <class F>
    explicit Grid(F f) {
        for (int i = 0; i < count; ++i) {
            all.push_back(i);
            values.push_back(f(x(i)));
        }
    }
    static double x(int i) { return lo + i * step; }
    static int index(double x) { return static_cast<int>(std::lround((x - lo) / step)); }

    MetricSpaceView<int> space(bool local = false) const {
        MetricSpaceView<int> s;
        s.dist = [](const int& a, const int& b) { return std::abs(a - b) * step; };
        s.value = [this](const int& p) { return values[p]; };
        if (local) {
            s.neighbors = [](const int& p, double r) {
                std::vector<int> out;
                const int k = static_cast<int>(r / step);
                for (int i = std::max(0, p - k); i <= std::min(count - 1, p + k); ++i) out.push_back(i);
                return out;
            };
        } else {
            s.neighbors = [this](const int&, double) { return all; };
        }
        return s;
    }
};

}  // namespace

TEST_CASE("x^2 from 1 with eps = lambda = 1") {
    const Grid g([](double x) { return x * x; });
    const auto space = g.space();
    const auto cert = ekeland_refine(space, Grid::index(1.0), 1.0, 1.0, 200);
    CHECK(cert.terminated);
    CHECK(std::abs(Grid::x(cert.result)) <= 0.5);
    const auto rep = verify_certificate(space, cert, g.all);
    CHECK(rep.all_hold());
    CHECK(rep.clauses[2].worst_margin >= 0.0);
    CHECK(cert.max_violation <= 0.0);

    std::mt19937_64 rng(5);
    std::vector<int> sample;
    for (int i = 0; i < 100; ++i) sample.push_back(std::uniform_int_distribution<int>(0, Grid::count - 1)(rng));
    const auto again = verify_certificate(space, cert, sample);
    for (const auto& c : again.clauses) CHECK(c.worst_margin >= 0.0);
}

TEST_CASE("constant value stays put") {
    const Grid g([](double) { return 0.0; });
    const int u = Grid::index(0.37);
    const auto cert = ekeland_refine(g.space(), u, 0.5, 0.3, 50);
    CHECK(cert.result == u);
    CHECK(cert.steps == 0);
    CHECK(cert.terminated);
}

TEST_CASE("|x| + x^2/10 from 1.5, clause 3 over the whole grid") {
    const Grid g([](double x) { return std::abs(x) + x * x / 10; });
    const int u = Grid::index(1.5);
    const double eps = g.values[u];
    const auto space = g.space();
    const auto cert = ekeland_refine(space, u, eps, 0.5, 500);
    CHECK(cert.terminated);
    CHECK(space.dist(u, cert.result) <= 0.5 + 1e-12);
    CHECK(g.values[cert.result] <= g.values[u]);
    // Exhaustive oracle: no grid point beats the result under the perturbed order.
    const double weight = eps / 0.5;
    int violations = 0;
    for (int w = 0; w < Grid::count; ++w) {
        if (w == cert.result) continue;
        if (!(g.values[w] > g.values[cert.result] - weight * space.dist(cert.result, w) - cert.slack)) ++violations;
    }
    CHECK(violations == 0);
    CHECK(verify_certificate(space, cert, g.all).all_hold());
}

TEST_CASE("value history decreases strictly by more than slack") {
    const Grid g([](double x) { return std::cos(3 * x) + 0.2 * x * x; });
    const auto cert = ekeland_refine(g.space(true), Grid::index(1.9), 0.5, 0.2, 500);
    REQUIRE(cert.value_history.size() == static_cast<std::size_t>(cert.steps) + 1);
    for (std::size_t i = 1; i < cert.value_history.size(); ++i)
        CHECK(cert.value_history[i] < cert.value_history[i - 1] - cert.slack);
    CHECK(cert.terminated);
}

TEST_CASE("budget exhaustion is flagged") {
    const Grid g([](double x) { return x; });
    const auto cert = ekeland_refine(g.space(true), Grid::index(2.0), 0.001, 0.002, 3);
    CHECK_FALSE(cert.terminated);
    CHECK(cert.steps == 3);
}

TEST_CASE("tampered certificate fails clause 2") {
    const Grid g([](double x) { return x * x; });
    const auto space = g.space();
    auto cert = ekeland_refine(space, Grid::index(1.0), 1.0, 0.5, 200);
    REQUIRE(verify_certificate(space, cert, g.all).all_hold());
    cert.result = Grid::index(-1.0);
    const auto rep = verify_certificate(space, cert, g.all);
    CHECK_FALSE(rep.clauses[1].holds);
    CHECK(rep.clauses[1].worst_margin < 0.0);
}

TEST_CASE("resume accepts only a strictly better witness") {
    const Grid g([](double x) { return x * x; });
    const auto space = g.space(true);
    auto cert = ekeland_refine(space, Grid::index(1.0), 1.0, 1.0, 200);
    const auto before = cert.result;
    CHECK_FALSE(ekeland_resume(space, cert, cert.result, 10));
    CHECK_FALSE(ekeland_resume(space, cert, Grid::index(1.5), 10));
    CHECK(cert.result == before);
}

TEST_CASE("seeded grid-function runs") {
    for (const auto& c : ekeland_properties(99, 20)) {
        INFO(c.property << " worst " << c.worst);
        CHECK(c.pass);
    }
}
