#include "nsmp/properties.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nsmp/builtins.hpp"
#include "nsmp/clarke.hpp"
#include "nsmp/ekeland.hpp"
#include "nsmp/geodesic.hpp"
#include "nsmp/hamiltonian.hpp"
#include "nsmp/rng.hpp"

namespace nsmp {

namespace {

struct Tracker {
    PropertyCheck c;
    Tracker(std::string property, std::string subject, double tol) {
        c.property = std::move(property);
        c.subject = std::move(subject);
        c.tolerance = tol;
        c.worst = -std::numeric_limits<double>::infinity();
    }
    void add(double violation) {
        ++c.samples;
        c.worst = std::max(c.worst, violation);
    }
    PropertyCheck done() {
        if (c.samples == 0) c.worst = 0.0;
        c.pass = c.worst <= c.tolerance;
        return c;
    }
};

double uniform(std::mt19937_64& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

// Euclidean distance to the kink set of a built-in (inf for smooth ones).
double kink_distance(const std::string& name, const Vector& x) {
    if (name == "abs" || name == "kink_well") return std::abs(x[0]);
    if (name == "max2") return std::abs(x[0] - x[1]) / std::sqrt(2.0);
    return std::numeric_limits<double>::infinity();
}

void project_to_kink(const std::string& name, Vector& x) {
    if (name == "abs" || name == "kink_well") x[0] = 0.0;
    if (name == "max2") x[0] = x[1] = 0.5 * (x[0] + x[1]);
}

Vector nonzero_direction(std::mt19937_64& rng, int dim) {
    const Vector origin = Vector::Zero(dim);
    for (;;) {
        Vector v = uniform_in_ball(rng, origin, 1.0);
        if (v.norm() >= 0.1) return v;
    }
}

double grid_min_norm(const std::vector<Vector>& g, double h) {
    const int k = static_cast<int>(g.size());
    const int steps = static_cast<int>(std::lround(1.0 / h));
    double best = std::numeric_limits<double>::infinity();
    auto norm_of = [&](double w0, double w1, double w2) {
        const double w[4] = {w0, w1, w2, 0.0};
        Vector p = Vector::Zero(g[0].size());
        double rest = 1.0;
        for (int i = 0; i + 1 < k; ++i) {
            p += w[i] * g[i];
            rest -= w[i];
        }
        p += rest * g[k - 1];
        return p.norm();
    };
    if (k == 1) return g[0].norm();
    if (k == 2) {
        for (int i = 0; i <= steps; ++i) best = std::min(best, norm_of(i * h, 0, 0));
        return best;
    }
    if (k == 3) {
        for (int i = 0; i <= steps; ++i)
            for (int j = 0; i + j <= steps; ++j) best = std::min(best, norm_of(i * h, j * h, 0));
        return best;
    }
    // Four vectors: full grid at 10 h, then the h grid on a box around the coarse optimum.
    const int coarse = steps / 10;
    const double H = 10.0 * h;
    int bi = 0, bj = 0, bl = 0;
    for (int i = 0; i <= coarse; ++i)
        for (int j = 0; i + j <= coarse; ++j)
            for (int l = 0; i + j + l <= coarse; ++l) {
                const double v = norm_of(i * H, j * H, l * H);
                if (v < best) {
                    best = v;
                    bi = 10 * i;
                    bj = 10 * j;
                    bl = 10 * l;
                }
            }
    for (int i = std::max(0, bi - 20); i <= std::min(steps, bi + 20); ++i)
        for (int j = std::max(0, bj - 20); j <= std::min(steps, bj + 20) && i + j <= steps; ++j)
            for (int l = std::max(0, bl - 20); l <= std::min(steps, bl + 20) && i + j + l <= steps; ++l)
                best = std::min(best, norm_of(i * h, j * h, l * h));
    return best;
}

}  // namespace

std::vector<PropertyCheck> oracle_properties(const SolverConfig& cfg, int samples) {
    std::vector<PropertyCheck> out;
    for (const std::string& name : builtin_names()) {
        const Functional f = builtin_functional(name, 2, cfg.tol("kink_radius"));
        auto rng = split_rng(cfg.rng_seed, "properties.oracle." + name);
        Tracker t("grad_ae matches central differences", name, 1e-4);
        const Vector origin = Vector::Zero(f.dim);
        while (t.c.samples < samples) {
            const Vector x = uniform_in_ball(rng, origin, 1.5);
            if (kink_distance(name, x) < 1e-3) continue;
            const Vector g = *f.grad_ae(x);
            const Vector fd = finite_difference_gradient(f, x, 1e-5);
            t.add((g - fd).norm() / (1.0 + g.norm()));
        }
        out.push_back(t.done());
    }
    return out;
}

std::vector<PropertyCheck> clarke_properties(const SolverConfig& cfg, int samples) {
    std::vector<PropertyCheck> out;
    const double tol_hom = cfg.tol("tol_hom");
    const double tol_support = cfg.tol("tol_support");
    for (const std::string& name : builtin_names()) {
        const Functional f = builtin_functional(name, 2, cfg.tol("kink_radius"));
        const Functional g = negated(f);
        auto rng = split_rng(cfg.rng_seed, "properties.clarke." + name);
        Tracker hom("positive homogeneity", name, tol_hom);
        Tracker sub("subadditivity", name, tol_hom);
        Tracker refl("reflection", name, tol_hom);
        Tracker bound("Lipschitz bound", name, tol_hom);
        Tracker supp("support inequality", name, tol_support);
        const Vector origin = Vector::Zero(f.dim);
        const double K = f.lipschitz_hint.value_or(std::numeric_limits<double>::infinity());
        for (int i = 0; i < samples; ++i) {
            Vector x = uniform_in_ball(rng, origin, 1.0);
            if (i % 4 == 0) project_to_kink(name, x);
            const Vector v = nonzero_direction(rng, f.dim);
            const Vector w = nonzero_direction(rng, f.dim);
            const double dv = directional_derivative(f, x, v, cfg).value;
            const double dw = directional_derivative(f, x, w, cfg).value;

            double worst_hom = 0.0;
            for (double lam : {0.5, 2.0, 7.0})
                worst_hom = std::max(worst_hom, std::abs(directional_derivative(f, x, lam * v, cfg).value - lam * dv));
            hom.add(worst_hom);

            const Vector vw = v + w;
            if (vw.norm() > 1e-12) sub.add(directional_derivative(f, x, vw, cfg).value - dv - dw);

            refl.add(std::abs(directional_derivative(f, x, -v, cfg).value - directional_derivative(g, x, v, cfg).value));
            bound.add(std::abs(dv) / v.norm() - K);

            const SubdifferentialEstimate est = subdifferential_sample(f, x, cfg);
            double worst_supp = -std::numeric_limits<double>::infinity();
            for (const Vector& y : est.gradients) worst_supp = std::max(worst_supp, y.dot(v) - dv);
            supp.add(worst_supp);
        }
        out.push_back(hom.done());
        out.push_back(sub.done());
        out.push_back(refl.done());
        out.push_back(bound.done());
        out.push_back(supp.done());
    }
    return out;
}

std::vector<PropertyCheck> min_norm_properties(std::uint64_t seed, int hulls, double resolution) {
    auto rng = split_rng(seed, "properties.min_norm");
    Tracker match("min_norm_element matches simplex grid", "random hulls", 1e-3);
    Tracker never_worse("min_norm_element no worse than grid", "random hulls", 1e-12);
    Tracker cert("simplex certificate", "random hulls", 0.0);
    for (int h = 0; h < hulls; ++h) {
        const int k = 2 + h % 3;
        const int dim = 2 + (h / 3) % 2;
        const Vector centre = uniform_in_ball(rng, Vector::Zero(dim), 1.0);
        std::vector<Vector> g;
        for (int i = 0; i < k; ++i) g.push_back(uniform_in_ball(rng, centre, 1.0));
        const MinNormResult r = min_norm_element(g);
        const double grid = grid_min_norm(g, resolution);
        match.add(std::abs(grid - r.point.norm()));
        never_worse.add(r.point.norm() - grid);
        SubdifferentialEstimate est;
        est.gradients = g;
        est.weights = r.weights;
        est.min_norm_point = r.point;
        cert.add(est.certificate_holds() ? 0.0 : 1.0);
    }
    return {match.done(), never_worse.done(), cert.done()};
}

std::vector<PropertyCheck> geodesic_properties(std::uint64_t seed, int pairs) {
    auto rng = split_rng(seed, "properties.geodesic");
    const GeodesicConfig gcfg;
    Tracker dom("norm domination", "delta_estimate", 1e-9);
    Tracker sym("symmetry", "delta_estimate", 1e-9);
    Tracker tri("triangle inequality", "delta_estimate", 1e-9);
    Tracker equiv("bounded-set equivalence", "delta_estimate", 1e-9);
    for (int i = 0; i < pairs; ++i) {
        const int dim = 2 + i % 2;
        const Vector origin = Vector::Zero(dim);
        const Vector a = uniform_in_ball(rng, origin, 3.0);
        const Vector b = uniform_in_ball(rng, origin, 3.0);
        const Vector c = uniform_in_ball(rng, origin, 3.0);
        const double ab = delta_estimate(a, b, gcfg);
        const double ba = delta_estimate(b, a, gcfg);
        const double bc = delta_estimate(b, c, gcfg);
        const double ac = delta_estimate(a, c, gcfg);
        dom.add(ab - (a - b).norm());
        sym.add(std::abs(ab - ba));
        tri.add(ac - ab - bc);
        const double R = std::max(a.norm(), b.norm());
        equiv.add((a - b).norm() / (1.0 + 3.0 * R) - ab);
    }
    Tracker closed("1D closed forms", "segment_length, delta_estimate", 1e-8);
    const Vector zero = Vector::Zero(1);
    closed.add(std::abs(segment_length(zero, Vector::Constant(1, std::exp(1.0) - 1.0), gcfg) - 1.0));
    closed.add(std::abs(delta_estimate(Vector::Constant(1, -1.0), Vector::Constant(1, 1.0), gcfg) - 2.0 * std::log(2.0)));
    return {dom.done(), sym.done(), tri.done(), equiv.done(), closed.done()};
}

std::vector<PropertyCheck> ekeland_properties(std::uint64_t seed, int runs) {
    auto rng = split_rng(seed, "properties.ekeland");
    constexpr double lo = -2.0, step = 1e-3;
    constexpr int count = 4001;
    std::vector<int> grid(count);
    for (int i = 0; i < count; ++i) grid[i] = i;

    Tracker clauses("certificate clauses over the full grid", "1D grid functions", 0.0);
    Tracker tampered("tampered certificate detected", "1D grid functions", 0.0);
    for (int r = 0; r < runs; ++r) {
        const double a = uniform(rng, 0.0, 1.0), c = uniform(rng, -1.5, 1.5), b = uniform(rng, 0.05, 0.5);
        const double s = uniform(rng, 0.0, 0.2), k = uniform(rng, 1.0, 10.0);
        std::vector<double> values(count);
        for (int i = 0; i < count; ++i) {
            const double x = lo + i * step;
            values[i] = a * std::abs(x - c) + b * x * x + s * std::sin(k * x);
        }
        MetricSpaceView<int> space;
        space.dist = [](const int& p, const int& q) { return std::abs(p - q) * step; };
        space.value = [&values](const int& p) { return values[p]; };
        space.neighbors = [&grid](const int&, double) { return grid; };

        const int u = std::uniform_int_distribution<int>(0, count - 1)(rng);
        const double fmin = *std::min_element(values.begin(), values.end());
        const double eps = values[u] - fmin + 0.01;
        const double lambda = uniform(rng, 0.05, 1.0);
        const auto cert = ekeland_refine(space, u, eps, lambda, 1000);
        const VerificationReport rep = verify_certificate(space, cert, grid);
        double worst = cert.terminated ? -std::numeric_limits<double>::infinity() : 1.0;
        for (const ClauseCheck& cc : rep.clauses) worst = std::max(worst, -(cc.worst_margin + cert.slack));
        clauses.add(worst);

        auto bad = cert;
        const int shift = static_cast<int>(lambda / step) + 10;
        bad.result = cert.start + shift < count ? cert.start + shift : cert.start - shift;
        tampered.add(verify_certificate(space, bad, grid).clauses[1].holds ? 1.0 : 0.0);
    }
    return {clauses.done(), tampered.done()};
}

std::vector<PropertyCheck> loop_properties(std::uint64_t seed, int loops) {
    auto rng = split_rng(seed, "properties.loops");
    Tracker root("scale_to_Fh residual", "random loops", 0.0);
    Tracker sym("W symmetry", "random loops", 0.0);
    Tracker pos("positivity bound on F_h", "random loops", 1e-6);
    Tracker act("action positive on F_h", "random loops", 0.0);
    Tracker sep("(0, z1) straddle W = h", "random problems", 0.0);
    constexpr double two_pi = 6.283185307179586;
    for (int i = 0; i < loops; ++i) {
        EnergyProblem prob;
        prob.potential.n = 2 + i % 2;
        prob.potential.mu1 = std::vector<double>{1.0, 1.5, 2.0, 3.0}[i % 4];
        prob.potential.a = uniform(rng, 0.5, 2.0);
        prob.potential.mu2 = uniform(rng, 0.0, 1.0);
        prob.h = prob.potential.mu2 / prob.potential.mu1 + uniform(rng, 0.2, 2.0);
        const int n = prob.potential.n, m = 64;

        const double R = uniform(rng, 0.2, 3.0);
        std::vector<Vector> coef;
        for (int j = 0; j < 4; ++j) coef.push_back(uniform_in_ball(rng, Vector::Zero(n), 0.1 * R));
        LoopState u = LoopState::zero(n, m);
        for (int j = 0; j < m / 2; ++j) {
            const double t = static_cast<double>(j) / m;
            Vector q = Vector::Zero(n);
            q[0] = R * std::cos(two_pi * t);
            q[1] = R * std::sin(two_pi * t);
            q += coef[0] * std::cos(3 * two_pi * t) + coef[1] * std::sin(3 * two_pi * t);
            q += coef[2] * std::cos(5 * two_pi * t) + coef[3] * std::sin(5 * two_pi * t);
            u.half.col(j) = q;
        }

        const double s = scale_to_Fh(u, prob);
        const LoopState v = u.scaled(s);
        root.add(std::abs(w_functional(v, prob.potential) - prob.h) - 1e-10 * (1.0 + prob.h));
        sym.add(std::abs(w_functional(u.scaled(-1.0), prob.potential) - w_functional(u, prob.potential)));
        pos.add(positivity_bound(prob) - min_inner_integral(v, prob.potential));
        act.add(action(v, prob) > 0.0 ? 0.0 : 1.0);

        const LoopState z1 = LoopState::circle(n, m, place_far_loop(prob, m));
        const double w0 = w_functional(LoopState::zero(n, m), prob.potential);
        const double w1 = w_functional(z1, prob.potential);
        sep.add(w0 < prob.h && w1 > prob.h ? 0.0 : 1.0);
    }
    return {root.done(), sym.done(), pos.done(), act.done(), sep.done()};
}

std::vector<PropertyCheck> all_properties(const SolverConfig& cfg) {
    std::vector<PropertyCheck> out;
    auto append = [&out](std::vector<PropertyCheck> v) { out.insert(out.end(), v.begin(), v.end()); };
    append(oracle_properties(cfg));
    append(clarke_properties(cfg));
    append(min_norm_properties(cfg.rng_seed));
    append(geodesic_properties(cfg.rng_seed));
    append(ekeland_properties(cfg.rng_seed));
    append(loop_properties(cfg.rng_seed));
    return out;
}

}  // namespace nsmp
