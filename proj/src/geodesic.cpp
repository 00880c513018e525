#include "nsmp/geodesic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <utility>

#include <boost/math/tools/roots.hpp>

#include "nsmp/rng.hpp"

namespace nsmp {

const GaussLegendre& gauss_legendre(int n) {
    static std::mutex mu;
    static std::map<int, GaussLegendre> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    GaussLegendre gl;
    gl.nodes.resize(n);
    gl.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it2 = 0; it2 < 100; ++it2) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        gl.nodes[i] = x;
        gl.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return cache.emplace(n, std::move(gl)).first->second;
}

namespace {

template <class F>
double composite_gl(F&& f, double a, double b, int panels, const GaussLegendre& gl) {
    const double h = (b - a) / panels;
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * h;
        const double mid = lo + 0.5 * h;
        double part = 0.0;
        for (std::size_t i = 0; i < gl.nodes.size(); ++i) part += gl.weights[i] * f(mid + 0.5 * h * gl.nodes[i]);
        sum += 0.5 * h * part;
    }
    return sum;
}

// Panel doubling until successive estimates agree.
template <class F>
SegmentLength adaptive_gl(F&& f, double a, double b, const GaussLegendre& gl) {
    SegmentLength out;
    if (b <= a) return out;
    double prev = composite_gl(f, a, b, 1, gl);
    for (int panels = 2; panels <= 512; panels *= 2) {
        const double cur = composite_gl(f, a, b, panels, gl);
        out.value = cur;
        out.error = std::abs(cur - prev);
        if (out.error <= 1e-14 * (1.0 + std::abs(cur))) break;
        prev = cur;
    }
    return out;
}

// Surface-of-revolution form of the metric: with sigma = log(1 + r) it reads
// d sigma^2 + phi(sigma)^2 d theta^2, phi = r / (1 + r) = 1 - exp(-sigma).
// Geodesics keep phi^2 theta' = c (Clairaut) and only have minima in sigma,
// where phi = c.
double phi_of(double sigma) { return -std::expm1(-sigma); }

struct ClairautPiece {
    double angle = 0.0;
    double length = 0.0;
};

// Angle swept and length travelled from the turning radius phi = c out to sigma_end.
ClairautPiece from_turning(double c, double sigma_end) {
    ClairautPiece out;
    const double phi_end = phi_of(sigma_end);
    if (!(phi_end > c)) return out;
    const GaussLegendre& gl = gauss_legendre(16);

    // phi = c cosh(tau) near the turning point removes the square-root singularity.
    const double phi_split = std::min(phi_end, 0.5 * (1.0 + c));
    const double tau_max = std::acosh(phi_split / c);
    const int tau_panels = std::max(1, static_cast<int>(std::ceil(tau_max / 1.5)));
    out.angle += composite_gl(
        [c](double tau) {
            const double ch = std::cosh(tau);
            return 1.0 / (ch * (1.0 - c * ch));
        },
        0.0, tau_max, tau_panels, gl);
    out.length += composite_gl(
        [c](double tau) {
            const double cc = c * std::cosh(tau);
            return cc / (1.0 - cc);
        },
        0.0, tau_max, tau_panels, gl);

    if (phi_split < phi_end) {
        const double sigma_split = -std::log1p(-phi_split);
        const int panels = std::max(1, static_cast<int>(std::ceil(sigma_end - sigma_split)));
        auto root = [c](double sigma) {
            const double phi = phi_of(sigma);
            const double gap = (1.0 - c) - std::exp(-sigma);  // phi - c
            return std::sqrt(gap * (phi + c));
        };
        out.angle += composite_gl([c, root](double s) { return c / (phi_of(s) * root(s)); }, sigma_split, sigma_end,
                                  panels, gl);
        out.length +=
            composite_gl([root](double s) { return phi_of(s) / root(s); }, sigma_split, sigma_end, panels, gl);
    }
    return out;
}

// Geodesics from (sigma1, 0) toward radius sigma2 (sigma1 <= sigma2) are
// indexed by s in [0, 2]: s <= 1 is monotone in sigma with c = s phi1;
// s > 1 dips to a turning radius with c = (2 - s) phi1.
struct PlanarBranches {
    double sigma1, sigma2, phi1;

    double c_of(double s) const { return (s <= 1.0 ? s : 2.0 - s) * phi1; }

    ClairautPiece at(double s) const {
        const double c = c_of(s);
        if (s <= 0.0 || c <= 0.0) {
            return s <= 0.0 ? ClairautPiece{0.0, sigma2 - sigma1}
                            : ClairautPiece{std::numbers::pi, sigma1 + sigma2};
        }
        const ClairautPiece a = from_turning(c, sigma1);
        const ClairautPiece b = from_turning(c, sigma2);
        if (s <= 1.0) return {b.angle - a.angle, b.length - a.length};
        return {a.angle + b.angle, a.length + b.length};
    }
};

double angle_between(const Vector& x1, double r1, const Vector& x2, double r2) {
    const Vector u1 = x1 / r1;
    const Vector u2 = x2 / r2;
    return 2.0 * std::atan2((u1 - u2).norm(), (u1 + u2).norm());
}

bool lexicographically_less(const Vector& a, const Vector& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a[i] < b[i]) return true;
        if (a[i] > b[i]) return false;
    }
    return false;
}

double polygon_length(const std::vector<Vector>& pts, const GeodesicConfig& cfg) {
    double total = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) total += segment_length(pts[i - 1], pts[i], cfg);
    return total;
}

// Coordinate descent on the free interior nodes; nodes may not leave the
// ball of radius 3 max(|x1|, |x2|).
double refined_polygon(const Vector& x1, const Vector& x2, const GeodesicConfig& cfg) {
    const int k = cfg.refine_nodes;
    std::vector<Vector> pts(k + 2);
    for (int i = 0; i <= k + 1; ++i) {
        const double s = static_cast<double>(i) / (k + 1);
        pts[i] = (1.0 - s) * x1 + s * x2;
    }
    pts.front() = x1;
    pts.back() = x2;
    const double ball = 3.0 * std::max(x1.norm(), x2.norm());
    double step = 0.5 * (x2 - x1).norm() / (k + 1);
    for (int sweep = 0; sweep < cfg.refine_iters && step > 1e-14; ++sweep) {
        bool improved = false;
        for (int i = 1; i <= k; ++i) {
            for (Eigen::Index d = 0; d < x1.size(); ++d) {
                for (double sign : {1.0, -1.0}) {
                    Vector trial = pts[i];
                    trial[d] += sign * step;
                    if (trial.norm() > ball) continue;
                    const double before = segment_length(pts[i - 1], pts[i], cfg) + segment_length(pts[i], pts[i + 1], cfg);
                    const double after = segment_length(pts[i - 1], trial, cfg) + segment_length(trial, pts[i + 1], cfg);
                    if (after < before) {
                        pts[i] = trial;
                        improved = true;
                        break;
                    }
                }
            }
        }
        if (!improved) step *= 0.5;
    }
    return polygon_length(pts, cfg);
}

}  // namespace

SegmentLength segment_length_with_error(const Vector& x1, const Vector& x2, const GeodesicConfig& cfg) {
    const Vector d = x2 - x1;
    const double len = d.norm();
    if (len == 0.0) return {};
    const GaussLegendre& gl = gauss_legendre(std::max(2, cfg.quadrature_points));
    auto integrand = [&](double s) { return len / (1.0 + (x1 + s * d).norm()); };
    // The norm is only non-smooth where the segment meets the origin, which is
    // at the closest approach; split there.
    const double s_star = std::clamp(-x1.dot(d) / (len * len), 0.0, 1.0);
    SegmentLength out;
    for (auto [a, b] : {std::pair{0.0, s_star}, std::pair{s_star, 1.0}}) {
        const SegmentLength piece = adaptive_gl(integrand, a, b, gl);
        out.value += piece.value;
        out.error += piece.error;
    }
    return out;
}

double segment_length(const Vector& x1, const Vector& x2, const GeodesicConfig& cfg) {
    return segment_length_with_error(x1, x2, cfg).value;
}

double planar_geodesic_length(const Vector& x1, const Vector& x2) {
    double r1 = x1.norm();
    double r2 = x2.norm();
    if (r1 == 0.0 || r2 == 0.0) return std::abs(std::log1p(r2) - std::log1p(r1));
    const double theta = angle_between(x1, r1, x2, r2);
    double sigma1 = std::log1p(r1);
    double sigma2 = std::log1p(r2);
    if (sigma1 > sigma2) std::swap(sigma1, sigma2);
    if (theta <= 1e-15) return sigma2 - sigma1;

    const PlanarBranches branches{sigma1, sigma2, phi_of(sigma1)};
    double best = sigma1 + sigma2;  // radial in, radial out through the origin

    constexpr int kScan = 16;
    std::array<double, kScan + 1> s_grid{};
    std::array<double, kScan + 1> angle{};
    for (int j = 0; j <= kScan; ++j) {
        s_grid[j] = 2.0 * j / kScan;
        angle[j] = branches.at(s_grid[j]).angle;
    }
    // A geodesic may reach the target going either way around the origin.
    for (double target : {theta, 2.0 * std::numbers::pi - theta}) {
        for (int j = 0; j < kScan; ++j) {
            const double fa = angle[j] - target;
            const double fb = angle[j + 1] - target;
            if (fa * fb > 0.0) continue;
            double root;
            if (fa == 0.0) {
                root = s_grid[j];
            } else if (fb == 0.0) {
                root = s_grid[j + 1];
            } else {
                std::uintmax_t max_iter = 100;
                auto [lo, hi] = boost::math::tools::toms748_solve(
                    [&](double s) { return branches.at(s).angle - target; }, s_grid[j], s_grid[j + 1], fa, fb,
                    boost::math::tools::eps_tolerance<double>(52), max_iter);
                root = 0.5 * (lo + hi);
            }
            best = std::min(best, branches.at(root).length);
        }
    }
    return best;
}

double delta_estimate(const Vector& x1_in, const Vector& x2_in, const GeodesicConfig& cfg) {
    // Fixed argument order makes the estimate exactly symmetric.
    const bool swap = lexicographically_less(x2_in, x1_in);
    const Vector& x1 = swap ? x2_in : x1_in;
    const Vector& x2 = swap ? x1_in : x2_in;
    const double sep = (x1 - x2).norm();
    if (sep == 0.0) return 0.0;

    double best = segment_length(x1, x2, cfg);
    if (cfg.refine_nodes > 0 && cfg.refine_iters > 0) best = std::min(best, refined_polygon(x1, x2, cfg));
    // Below this scale the straight chord is within ~sep^3 / 24 of the geodesic.
    const double relative = sep / (1.0 + std::min(x1.norm(), x2.norm()));
    if (cfg.planar_geodesic && x1.size() >= 2 && relative > 1e-4) best = std::min(best, planar_geodesic_length(x1, x2));
    return best;
}

namespace {

struct Crossing {
    double s;
    Vector y;
};

double sign_of(double g) { return g < 0.0 ? -1.0 : (g > 0.0 ? 1.0 : 0.0); }

// First point of the restricted set along x + s d, s in (0, range].
std::optional<Crossing> first_crossing(const Vector& x, const Vector& d, const RestrictedSet& F, double range) {
    constexpr int kSamples = 64;
    const auto& gap = F.set.indicator_gap;
    double prev_s = 0.0;
    double prev_g = gap(x);
    for (int k = 1; k <= kSamples; ++k) {
        const double t = static_cast<double>(k) / kSamples;
        const double s = range * t * t;
        const double g = gap(x + s * d);
        if (sign_of(g) * sign_of(prev_g) <= 0.0) {
            double lo = prev_s, hi = s, glo = prev_g;
            if (g != 0.0 && prev_g != 0.0) {
                for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const double gm = gap(x + mid * d);
                    if (gm == 0.0) {
                        lo = hi = mid;
                        break;
                    }
                    if (sign_of(gm) == sign_of(glo)) {
                        lo = mid;
                        glo = gm;
                    } else {
                        hi = mid;
                    }
                }
            }
            const double root = (g == 0.0 && prev_g != 0.0) ? s : (prev_g == 0.0 ? prev_s : 0.5 * (lo + hi));
            Crossing c{root, x + root * d};
            if (F.contains(c.y)) return c;
        }
        prev_s = s;
        prev_g = g;
    }
    return std::nullopt;
}

}  // namespace

SetDistance dist_delta_to_set(const Vector& x, const RestrictedSet& F, const GeodesicConfig& cfg) {
    SetDistance out;
    const int dim = static_cast<int>(x.size());
    if (F.set.component_of(x) == Component::boundary && F.contains(x)) {
        out.value = 0.0;
        out.nearest = x;
        out.found = true;
        return out;
    }

    const int count = cfg.probe_count > 0 ? cfg.probe_count : 2 * dim + 8;
    std::vector<Vector> dirs;
    dirs.reserve(count);
    const double xn = x.norm();
    if (xn > 0.0) {
        dirs.push_back(-x / xn);
        dirs.push_back(x / xn);
    }
    if (cfg.probe_count <= 0) {
        for (int i = 0; i < dim; ++i) {
            for (double sgn : {1.0, -1.0}) {
                Vector e = Vector::Zero(dim);
                e[i] = sgn;
                dirs.push_back(e);
            }
        }
    }
    auto rng = split_rng(cfg.rng_seed, "geodesic.probe");
    while (static_cast<int>(dirs.size()) < count) dirs.push_back(uniform_direction(rng, dim));
    dirs.resize(count);

    const double range = cfg.probe_range_factor * (1.0 + xn);
    std::vector<std::pair<Crossing, Vector>> hits;
    for (const Vector& d : dirs) {
        if (auto c = first_crossing(x, d, F, range)) hits.emplace_back(std::move(*c), d);
    }
    out.probes = count;
    if (hits.empty()) return out;

    std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) { return a.first.s < b.first.s; });
    // delta(x, y) >= |x - y| / (1 + max(|x|, |y|)) prunes most exact evaluations.
    auto lower_bound = [&](const Crossing& c) { return c.s / (1.0 + std::max(xn, c.y.norm())); };
    Vector best_dir;
    double best_s = 0.0;
    for (const auto& [c, d] : hits) {
        if (lower_bound(c) >= out.value) continue;
        const double v = delta_estimate(x, c.y, cfg);
        if (v < out.value) {
            out.value = v;
            out.nearest = c.y;
            best_dir = d;
            best_s = c.s;
        }
    }
    out.found = true;

    auto polish_rng = split_rng(cfg.rng_seed, "geodesic.polish");
    double spread = 0.5;
    for (int t = 0; t < cfg.polish_trials; ++t) {
        Vector d = best_dir + spread * uniform_direction(polish_rng, dim);
        const double dn = d.norm();
        if (dn == 0.0) continue;
        d /= dn;
        const auto c = first_crossing(x, d, F, std::min(range, 4.0 * best_s + 1e-12));
        if (c && lower_bound(*c) < out.value) {
            const double v = delta_estimate(x, c->y, cfg);
            if (v < out.value) {
                out.value = v;
                out.nearest = c->y;
                best_dir = d;
                best_s = c->s;
                continue;
            }
        }
        spread *= 0.7;
    }
    return out;
}

SetDistance dist_delta_to_set(const Vector& x, const ClosedSetOracle& F, const GeodesicConfig& cfg) {
    return dist_delta_to_set(x, RestrictedSet{F, {}}, cfg);
}

double path_metric_rho(const DiscretePath& p1, const DiscretePath& p2, const GeodesicConfig& cfg) {
    if (p1.size() != p2.size() || !p1.same_grid(p2)) {
        throw ContractViolation("path_metric_rho: paths must share the node count and parameter grid");
    }
    double rho = 0.0;
    for (std::size_t i = 0; i < p1.size(); ++i) rho = std::max(rho, delta_estimate(p1.nodes[i], p2.nodes[i], cfg));
    return rho;
}

}  // namespace nsmp
