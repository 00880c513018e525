#include "nsmp/mountainpass.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <unordered_map>

#include <fmt/format.h>

#include "nsmp/rng.hpp"

namespace nsmp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string vector_key(const Vector& x) {
    std::string key(static_cast<std::size_t>(x.size()) * sizeof(double), '\0');
    if (x.size() > 0) std::memcpy(key.data(), x.data(), key.size());
    return key;
}

DiscretePath uniform_path(std::vector<Vector> nodes) {
    DiscretePath p = DiscretePath::from_nodes(std::move(nodes));
    return p;
}

// Equal chords on [0, pin] and [pin, N] separately, keeping the polyline and node pin fixed.
DiscretePath equal_chord(const DiscretePath& p, int pin) {
    const int N = p.intervals();
    std::vector<double> cum(N + 1, 0.0);
    for (int i = 1; i <= N; ++i) cum[i] = cum[i - 1] + (p.nodes[i] - p.nodes[i - 1]).norm();
    DiscretePath out = p;
    out.values.clear();
    auto spread = [&](int a, int b) {
        const double L = cum[b] - cum[a];
        if (L <= 0.0 || b - a < 2) return;
        int seg = a;
        for (int k = a + 1; k < b; ++k) {
            const double target = cum[a] + L * (k - a) / (b - a);
            while (seg < b - 1 && cum[seg + 1] < target) ++seg;
            const double len = cum[seg + 1] - cum[seg];
            const double s = len > 0.0 ? (target - cum[seg]) / len : 0.0;
            out.nodes[k] = p.nodes[seg] + s * (p.nodes[seg + 1] - p.nodes[seg]);
        }
    };
    spread(0, pin);
    spread(pin, N);
    return out;
}

// Max over nodes and three interior points per segment; guards against
// nodes straddling a ridge the polyline still crosses.
double segment_max(const Functional& f, const DiscretePath& p) {
    double m = *std::max_element(p.values.begin(), p.values.end());
    for (int i = 0; i < p.intervals(); ++i)
        for (double s : {0.25, 0.5, 0.75}) m = std::max(m, f.checked(p.nodes[i] + s * (p.nodes[i + 1] - p.nodes[i])));
    return m;
}

DiscretePath refine_path(const DiscretePath& p) {
    DiscretePath out;
    for (int i = 0; i < p.intervals(); ++i) {
        out.grid.push_back(p.grid[i]);
        out.grid.push_back(0.5 * (p.grid[i] + p.grid[i + 1]));
        out.nodes.push_back(p.nodes[i]);
        out.nodes.push_back(0.5 * (p.nodes[i] + p.nodes[i + 1]));
    }
    out.grid.push_back(p.grid.back());
    out.nodes.push_back(p.nodes.back());
    return out;
}

struct RawCrossing {
    int segment;
    Vector point;
};

// Boundary nodes count once; strict sign changes are bisected on the segment.
std::vector<RawCrossing> locate_crossings(const ClosedSetOracle& F, const std::vector<Vector>& nodes) {
    std::vector<RawCrossing> out;
    const double tol = F.level_tolerance;
    std::vector<double> gap(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) gap[i] = F.indicator_gap(nodes[i]);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (std::abs(gap[i]) <= tol) {
            out.push_back({static_cast<int>(i == nodes.size() - 1 && i > 0 ? i - 1 : i), nodes[i]});
            continue;
        }
        if (i + 1 == nodes.size()) break;
        const double a = gap[i], b = gap[i + 1];
        if (!((a < -tol && b > tol) || (a > tol && b < -tol))) continue;
        double lo = 0.0, hi = 1.0, glo = a;
        Vector mid = nodes[i];
        for (int it = 0; it < 200; ++it) {
            const double s = 0.5 * (lo + hi);
            mid = nodes[i] + s * (nodes[i + 1] - nodes[i]);
            const double gm = F.indicator_gap(mid);
            if (std::abs(gm) <= tol || hi - lo < 1e-16) break;
            if ((gm < 0) == (glo < 0)) {
                lo = s;
                glo = gm;
            } else {
                hi = s;
            }
        }
        out.push_back({static_cast<int>(i), mid});
    }
    return out;
}

double max_pairwise(const std::vector<Vector>& pts) {
    double d = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, (pts[i] - pts[j]).norm());
    return d;
}

}  // namespace

PathMax max_set(const std::vector<double>& values, double tie_relative) {
    PathMax pm;
    if (values.empty()) return pm;
    pm.value = *std::max_element(values.begin(), values.end());
    const double thr = tie_relative * (1.0 + std::abs(pm.value));
    for (std::size_t i = 0; i < values.size(); ++i)
        if (values[i] >= pm.value - thr) pm.indices.push_back(static_cast<int>(i));
    return pm;
}

PathMax path_max(const Functional& f, DiscretePath& p, double tie_relative) {
    if (p.values.size() != p.nodes.size()) p.evaluate(f);
    return max_set(p.values, tie_relative);
}

namespace {

// Places node k at the maximum of f on the broken line x_{k-1} -> x_k -> x_{k+1}.
void climb(const Functional& f, DiscretePath& p, int k) {
    const Vector a = p.nodes[k - 1], b = p.nodes[k], c = p.nodes[k + 1];
    auto at = [&](double u) -> Vector { return u < 0.0 ? Vector(b + u * (b - a)) : Vector(b + u * (c - b)); };
    constexpr int kScan = 16;
    double best_u = 0.0, best_v = p.values[k];
    for (int j = 0; j <= 2 * kScan; ++j) {
        const double u = -0.5 + 0.5 * j / kScan;
        const double v = f.checked(at(u));
        if (v > best_v) {
            best_v = v;
            best_u = u;
        }
    }
    double lo = std::max(-0.5, best_u - 0.5 / kScan), hi = std::min(0.5, best_u + 0.5 / kScan);
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
    double f1 = f.checked(at(x1)), f2 = f.checked(at(x2));
    for (int it = 0; it < 40; ++it) {
        if (f1 >= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f.checked(at(x1));
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f.checked(at(x2));
        }
    }
    const double um = f1 >= f2 ? x1 : x2;
    const double vm = std::max(f1, f2);
    if (vm > best_v) {
        best_v = vm;
        best_u = um;
    }
    if (best_u != 0.0) {
        p.nodes[k] = at(best_u);
        p.values[k] = best_v;
    }
}

}  // namespace

MinimaxEstimate gamma_estimate(const Functional& f, const Vector& z0, const Vector& z1, const SolverConfig& cfg,
                               const std::optional<DiscretePath>& initial_path) {
    cfg.validate();
    const double tie = cfg.tol("tie");
    MinimaxEstimate est;

    if ((z0 - z1).norm() == 0.0 && !initial_path) {
        est.best_path = uniform_path(std::vector<Vector>(cfg.path_nodes + 1, z0));
        const PathMax pm = path_max(f, est.best_path, tie);
        est.gamma = pm.value;
        est.history.emplace_back(0, pm.value);
        est.mountain_geometry = false;
        return est;
    }

    DiscretePath p = initial_path ? *initial_path : DiscretePath::straight(z0, z1, cfg.path_nodes);
    p.validate();
    p.values.clear();
    for (const auto& x : p.nodes) p.values.push_back(f.checked(x));
    const int N = p.intervals();
    PathMax pm = max_set(p.values, tie);
    est.mountain_geometry = std::max(p.values.front(), p.values.back()) < pm.value;
    if (pm.indices.front() > 0 && pm.indices.front() < N) {
        climb(f, p, pm.indices.front());
        pm = max_set(p.values, tie);
    }
    est.history.emplace_back(0, pm.value);
    est.best_path = p;
    double best = pm.value;
    double best_seg = segment_max(f, p);

    std::vector<double> step(N + 1);
    for (int i = 0; i <= N; ++i) step[i] = 0.05 * (1.0 + p.nodes[i].norm());
    const double stationary = std::sqrt(std::max(cfg.tol("min_norm_gap"), 1e-300));

    int since = 0;
    int it = 0;
    for (it = 1; it <= cfg.minimax_iterations; ++it) {
        // Descent normal to the path, then the max node climbs back to the
        // top of its two segments so the node max tracks the polyline max.
        for (int idx = 1; idx < N; ++idx) {
            const Vector x = p.nodes[idx];
            const double fx = p.values[idx];
            const SubdifferentialEstimate sub = subdifferential_sample(f, x, cfg);
            Vector tangent = p.nodes[idx + 1] - p.nodes[idx - 1];
            const double tn = tangent.norm();
            Vector g = sub.min_norm_point;
            if (tn > 0.0) {
                tangent /= tn;
                g -= g.dot(tangent) * tangent;
            }
            const double gn = g.norm();
            if (gn * (1.0 + x.norm()) <= stationary) continue;
            const Vector d = -g / gn;
            const double chord = std::min((x - p.nodes[idx - 1]).norm(), (p.nodes[idx + 1] - x).norm());
            double alpha = std::min(2.0 * step[idx], std::max(0.5 * chord, 1e-12));
            const double alpha_min = 1e-12 * (1.0 + x.norm());
            while (alpha >= alpha_min) {
                const Vector y = x + alpha * d;
                const double fy = f.checked(y);
                if (fy < fx) {
                    p.nodes[idx] = y;
                    p.values[idx] = fy;
                    break;
                }
                alpha *= 0.5;
            }
            step[idx] = std::max(alpha, alpha_min);
        }

        const int k = max_set(p.values, tie).indices.front();
        if (k > 0 && k < N) climb(f, p, k);
        DiscretePath redistributed = equal_chord(p, k > 0 && k < N ? k : N / 2);
        for (const auto& x : redistributed.nodes) redistributed.values.push_back(f.checked(x));
        p = std::move(redistributed);
        pm = max_set(p.values, tie);

        const double seg = segment_max(f, p);
        const double scale = 1e-15 * (1.0 + std::abs(best));
        if (pm.value <= best && seg <= best_seg && (pm.value < best - scale || seg < best_seg - scale)) {
            best = pm.value;
            best_seg = seg;
            est.best_path = p;
            est.history.emplace_back(it, best);
            since = 0;
        } else if (++since >= cfg.minimax_patience) {
            est.stagnant = true;
            break;
        }
    }
    est.iterations = std::min(it, cfg.minimax_iterations);
    est.gamma = best;
    return est;
}

SeparationReport separation_check(const ClosedSetOracle& F, const Functional& f, double gamma,
                                  const std::vector<DiscretePath>& paths, double tol) {
    SeparationReport rep;
    bool any = false, all = true;
    for (const auto& p : paths) {
        PathCrossings pc;
        pc.start = F.component_of(p.front());
        pc.end = F.component_of(p.back());
        pc.applicable = pc.start != Component::boundary && pc.end != Component::boundary && pc.start != pc.end;
        pc.path_max = -kInf;
        for (const auto& x : p.nodes) pc.path_max = std::max(pc.path_max, f.checked(x));
        for (auto& raw : locate_crossings(F, p.nodes)) {
            PathCrossing c;
            c.segment = raw.segment;
            c.value = f.checked(raw.point);
            c.point = std::move(raw.point);
            c.in_level = c.value >= gamma - tol;
            pc.crosses_level = pc.crosses_level || c.in_level;
            pc.crossings.push_back(std::move(c));
        }
        if (pc.applicable && pc.crossings.empty())
            throw ContractViolation(
                fmt::format("set oracle '{}' is inconsistent: a path between its two components never crosses it",
                            F.name));
        if (pc.applicable) {
            any = true;
            all = all && pc.crosses_level;
        }
        rep.paths.push_back(std::move(pc));
    }
    rep.verdict = !any ? SeparationVerdict::not_applicable
                       : (all ? SeparationVerdict::holds : SeparationVerdict::violated);
    return rep;
}

RestrictedSet level_restricted(const ClosedSetOracle& F, const Functional& f, double gamma, double tol) {
    RestrictedSet R;
    R.set = F;
    R.member = [f, gamma, tol](const Vector& y) { return f(y) >= gamma - tol; };
    return R;
}

double admissible_epsilon_bound(const Vector& z0, const Vector& z1, const RestrictedSet& F_gamma,
                                const GeodesicConfig& gcfg) {
    const double d0 = dist_delta_to_set(z0, F_gamma, gcfg).value;
    const double d1 = dist_delta_to_set(z1, F_gamma, gcfg).value;
    return 0.5 * std::min({1.0, d0, d1});
}

double psi_from_distance(double epsilon, double distance) {
    return std::max(0.0, epsilon * epsilon - epsilon * distance);
}

PenaltyValue penalty_psi(const Vector& x, const ClosedSetOracle& F, const Functional& f, double gamma,
                         double epsilon, const Vector& z0, const Vector& z1, const GeodesicConfig& gcfg,
                         double level_tol) {
    const RestrictedSet Fg = level_restricted(F, f, gamma, level_tol);
    const double bound = admissible_epsilon_bound(z0, z1, Fg, gcfg);
    if (!(epsilon > 0.0 && epsilon < bound))
        throw ContractViolation(fmt::format("epsilon {} outside the admissible range (0, {})", epsilon, bound));
    PenaltyValue out;
    out.distance = dist_delta_to_set(x, Fg, gcfg).value;
    out.value = psi_from_distance(epsilon, out.distance);
    return out;
}

TrimmedSegment trim_path(const DiscretePath& c, const ClosedSetOracle& F, const RestrictedSet& F_gamma,
                         double epsilon, const GeodesicConfig& gcfg) {
    const int N = c.intervals();
    TrimmedSegment t;
    t.t0_index = -1;
    for (int i = N; i >= 0; --i) {
        if (F.component_of(c.nodes[i]) != Component::omega0) continue;
        const double d = dist_delta_to_set(c.nodes[i], F_gamma, gcfg).value;
        if (d >= epsilon) {
            t.t0_index = i;
            t.t0_distance = d;
            break;
        }
    }
    if (t.t0_index < 0)
        throw TrimmingError(fmt::format(
            "no node of the path lies in Omega_0 at distance >= {} from F_gamma; use a smaller epsilon", epsilon));
    t.t1_index = -1;
    for (int i = t.t0_index + 1; i <= N; ++i) {
        if (F.component_of(c.nodes[i]) != Component::omega1) continue;
        const double d = dist_delta_to_set(c.nodes[i], F_gamma, gcfg).value;
        if (d >= epsilon) {
            t.t1_index = i;
            t.t1_distance = d;
            break;
        }
    }
    if (t.t1_index < 0)
        throw TrimmingError(fmt::format(
            "the path never reaches Omega_1 at distance >= {} from F_gamma after t0; use a smaller epsilon or "
            "check that F separates the endpoints",
            epsilon));
    return t;
}

namespace {

struct NodeEval {
    double phi = 0.0;
    double psi = 0.0;
    double dist = kInf;
    Vector nearest;
};

struct EvalPoint {
    Vector x;
    double level = 0.0;  // Phi + Psi
};

// Trimmed path space with cached node data.
class PathSpace {
public:
    PathSpace(const Functional& f, const ClosedSetOracle& F, RestrictedSet Fg, double epsilon,
              const SolverConfig& cfg, const MountainPassOptions& opt)
        : f_(f), F_(F), Fg_(std::move(Fg)), eps_(epsilon), cfg_(cfg), opt_(opt) {}

    const NodeEval& node(const Vector& x) {
        const std::string key = vector_key(x);
        auto it = nodes_.find(key);
        if (it != nodes_.end()) return it->second;
        NodeEval e;
        e.phi = f_.checked(x);
        const SetDistance sd = dist_delta_to_set(x, Fg_, opt_.geodesic);
        e.dist = sd.value;
        if (sd.found) e.nearest = sd.nearest;
        e.psi = psi_from_distance(eps_, e.dist);
        return nodes_.emplace(key, std::move(e)).first->second;
    }

    const SubdifferentialEstimate& sub(const Vector& x) {
        const std::string key = vector_key(x);
        auto it = subs_.find(key);
        if (it != subs_.end()) return it->second;
        return subs_.emplace(key, subdifferential_sample(f_, x, cfg_)).first->second;
    }

    std::vector<EvalPoint> points(const DiscretePath& p) {
        std::vector<EvalPoint> out;
        for (const auto& x : p.nodes) {
            const NodeEval& e = node(x);
            out.push_back({x, e.phi + e.psi});
        }
        for (auto& c : locate_crossings(F_, p.nodes)) {
            const NodeEval& e = node(c.point);
            out.push_back({std::move(c.point), e.phi + e.psi});
        }
        return out;
    }

    double value(const DiscretePath& p) {
        double m = -kInf;
        for (const auto& e : points(p)) m = std::max(m, e.level);
        return m;
    }

    double lower_bound(const DiscretePath& p) {
        double m = -kInf;
        for (const auto& x : p.nodes) {
            auto it = nodes_.find(vector_key(x));
            m = std::max(m, it != nodes_.end() ? it->second.phi + it->second.psi : f_.checked(x));
        }
        return m;
    }

    double dist(const DiscretePath& a, const DiscretePath& b) const { return path_metric_rho(a, b, opt_.geodesic); }

    static std::vector<double> taper(int K) {
        const double R = std::max(1.0, K / 4.0);
        std::vector<double> w(K + 1);
        for (int j = 0; j <= K; ++j) w[j] = std::min({1.0, j / R, (K - j) / R});
        return w;
    }

    // Tapered negative min-norm field, scaled to (1 + |node|).
    std::vector<Vector> descent_field(const DiscretePath& p) {
        const int K = p.intervals();
        const auto w = taper(K);
        std::vector<Vector> v(K + 1, Vector::Zero(p.nodes[0].size()));
        for (int j = 1; j < K; ++j) {
            const Vector& g = sub(p.nodes[j]).min_norm_point;
            const double gn = g.norm();
            if (gn > 0.0) v[j] = -w[j] * (1.0 + p.nodes[j].norm()) / gn * g;
        }
        return v;
    }

    std::vector<Vector> random_field(const DiscretePath& p, std::mt19937_64& rng) {
        const int K = p.intervals();
        const auto w = taper(K);
        std::vector<Vector> v(K + 1, Vector::Zero(p.nodes[0].size()));
        for (int j = 1; j < K; ++j)
            v[j] = w[j] * (1.0 + p.nodes[j].norm()) * uniform_direction(rng, static_cast<int>(p.nodes[j].size()));
        return v;
    }

    static DiscretePath shifted(const DiscretePath& p, const std::vector<Vector>& v, double h,
                                const std::vector<int>* only = nullptr) {
        DiscretePath q = p;
        q.values.clear();
        if (only) {
            for (int j : *only)
                if (j > 0 && j < p.intervals()) q.nodes[j] += h * v[j];
        } else {
            for (int j = 1; j < p.intervals(); ++j) q.nodes[j] += h * v[j];
        }
        return q;
    }

    std::vector<DiscretePath> neighbors(const DiscretePath& p, double radius) {
        std::vector<DiscretePath> out;
        const auto v = descent_field(p);
        std::vector<double> node_levels;
        for (const auto& x : p.nodes) node_levels.push_back(node(x).phi + node(x).psi);
        const std::vector<int> top = max_set(node_levels, cfg_.tol("tie")).indices;
        for (int k = 0; k < 12; ++k) out.push_back(shifted(p, v, radius * std::ldexp(1.0, -k)));
        for (int k = 0; k < 12; ++k) out.push_back(shifted(p, v, radius * std::ldexp(1.0, -k), &top));
        auto rng = split_rng(cfg_.rng_seed, fmt::format("mountainpass.neighbors.{}", calls_++));
        for (int r = 0; r < opt_.random_neighbors; ++r) {
            const auto u = random_field(p, rng);
            for (double h : {0.5, 0.125, 0.03125}) out.push_back(shifted(p, u, radius * h));
        }
        return out;
    }

    std::vector<DiscretePath> witnesses(const DiscretePath& p, double radius, int count, int round) {
        std::vector<DiscretePath> out;
        auto rng = split_rng(cfg_.rng_seed, fmt::format("mountainpass.witness.{}", round));
        std::uniform_real_distribution<double> expo(0.0, 10.0);
        const auto v = descent_field(p);
        for (int i = 0; i < count; ++i) {
            const double h = radius * std::exp2(-expo(rng));
            if (i % 4 == 0) {
                out.push_back(shifted(p, v, h));
            } else {
                out.push_back(shifted(p, random_field(p, rng), h));
            }
        }
        return out;
    }

private:
    const Functional& f_;
    const ClosedSetOracle& F_;
    RestrictedSet Fg_;
    double eps_;
    const SolverConfig& cfg_;
    const MountainPassOptions& opt_;
    std::unordered_map<std::string, NodeEval> nodes_;
    std::unordered_map<std::string, SubdifferentialEstimate> subs_;
    int calls_ = 0;
};

DiscretePath slice(const DiscretePath& c, int a, int b) {
    DiscretePath s;
    s.grid.assign(c.grid.begin() + a, c.grid.begin() + b + 1);
    s.nodes.assign(c.nodes.begin() + a, c.nodes.begin() + b + 1);
    return s;
}

}  // namespace

CeramiStepResult cerami_step(const Functional& f, const ClosedSetOracle& F, const MinimaxEstimate& gamma_est,
                             double epsilon, const SolverConfig& cfg, const MountainPassOptions& opt) {
    if (!(epsilon > 0.0)) throw ContractViolation("epsilon must be positive");
    const double gamma = gamma_est.gamma;
    const RestrictedSet Fg = level_restricted(F, f, gamma, opt.level_tol);

    DiscretePath c = gamma_est.best_path;
    double cmax = -kInf;
    for (const auto& x : c.nodes) cmax = std::max(cmax, f.checked(x));
    if (!(cmax < gamma + 0.25 * epsilon * epsilon))
        throw ContractViolation(
            fmt::format("best path max {} is not below gamma + eps^2/4 = {}", cmax, gamma + 0.25 * epsilon * epsilon));

    CeramiStepResult res;
    for (int r = 0;; ++r) {
        res.trim = trim_path(c, F, Fg, epsilon, opt.geodesic);
        if (res.trim.t0_index > 0 && res.trim.t1_index < c.intervals()) break;
        if (r >= opt.max_refinements)
            throw TrimmingError(fmt::format("trimming at epsilon {} needs interior nodes; path too coarse after {} "
                                            "refinements",
                                            epsilon, r));
        c = refine_path(c);
    }

    PathSpace ps(f, F, Fg, epsilon, cfg, opt);
    MetricSpaceView<DiscretePath> space;
    space.dist = [&ps](const DiscretePath& a, const DiscretePath& b) { return ps.dist(a, b); };
    space.value = [&ps](const DiscretePath& p) { return ps.value(p); };
    space.value_lower_bound = [&ps](const DiscretePath& p) { return ps.lower_bound(p); };
    space.neighbors = [&ps](const DiscretePath& p, double radius) { return ps.neighbors(p, radius); };

    res.start_path = slice(c, res.trim.t0_index, res.trim.t1_index);
    const double lambda = 0.5 * epsilon;
    res.certificate = ekeland_refine(space, res.start_path, 0.25 * epsilon * epsilon, lambda, cfg.ekeland_budget);
    for (int round = 0;; ++round) {
        const auto wit = ps.witnesses(res.certificate.result, lambda, opt.fresh_witnesses, round);
        res.fresh_check = verify_certificate(space, res.certificate, wit);
        const ClauseCheck& c3 = res.fresh_check.clauses[2];
        if (c3.holds || round >= opt.resume_rounds) break;
        if (!ekeland_resume(space, res.certificate, wit[c3.worst_witness], cfg.ekeland_budget)) break;
    }

    const auto pts = ps.points(res.certificate.result);
    std::vector<double> levels;
    for (const auto& e : pts) levels.push_back(e.level);
    const PathMax M = max_set(levels, cfg.tol("tie"));
    res.max_set_size = static_cast<int>(M.indices.size());
    int chosen = -1;
    double best_res = kInf;
    for (int i : M.indices) {
        const double sr = scaled_residual(ps.sub(pts[i].x));
        if (sr < best_res) {
            best_res = sr;
            chosen = i;
        }
    }
    const Vector& xb = pts[chosen].x;
    const NodeEval& ne = ps.node(xb);
    const SubdifferentialEstimate& sb = ps.sub(xb);
    CeramiPoint& cp = res.point;
    cp.x = xb;
    cp.epsilon = epsilon;
    cp.phi_value = ne.phi;
    cp.penalty_value = ne.psi;
    cp.dist_delta_F = ne.dist;
    cp.scaled_residual = best_res;

    BoundLedger& L = res.ledger;
    L.gamma = gamma;
    L.epsilon = epsilon;
    L.residual = cp.scaled_residual;
    L.residual_bound = 1.5 * epsilon;
    L.distance = cp.dist_delta_F;
    L.distance_bound = 1.5 * epsilon;
    L.level = cp.phi_value + cp.penalty_value;
    L.level_lower = gamma + epsilon * epsilon;
    L.level_upper = gamma + 1.25 * epsilon * epsilon;
    if (ne.nearest.size() == xb.size() && std::isfinite(ne.dist))
        L.slack_quadrature = segment_length_with_error(xb, ne.nearest, opt.geodesic).error;
    L.slack_sampling = cfg.sampling_radius * sb.min_norm_value * (1.0 + xb.norm());
    double low = 0.0, high = 0.0;
    for (const auto* p : {&res.start_path, &res.certificate.result}) {
        for (const auto& cr : locate_crossings(F, p->nodes)) {
            const double v = f.checked(cr.point);
            if (p == &res.start_path) high = std::max(high, v - gamma);
            low = std::max(low, gamma - v);
        }
    }
    L.slack_discretization = low + high;
    return res;
}

bool CeramiSequence::all_bounds_hold() const {
    for (const auto& s : steps)
        if (!s.ledger.all_ok()) return false;
    return !steps.empty();
}

CeramiSequence cerami_sequence(const Functional& f, const ClosedSetOracle& F, const Vector& z0, const Vector& z1,
                               const SolverConfig& cfg, const MountainPassOptions& opt) {
    cfg.validate();
    CeramiSequence seq;
    seq.minimax = gamma_estimate(f, z0, z1, cfg, opt.initial_path);
    const double gamma = seq.minimax.gamma;
    if (!seq.minimax.mountain_geometry)
        seq.warnings.push_back("endpoint values are not below the initial path max");
    seq.separation = separation_check(F, f, gamma, {seq.minimax.best_path, DiscretePath::straight(z0, z1, cfg.path_nodes)},
                                      opt.level_tol);
    if (seq.separation.verdict == SeparationVerdict::violated)
        seq.warnings.push_back("a tested path crosses F below the gamma level");

    const RestrictedSet Fg = level_restricted(F, f, gamma, opt.level_tol);
    seq.epsilon_bound = admissible_epsilon_bound(z0, z1, Fg, opt.geodesic);
    for (double e : cfg.epsilon_schedule) {
        if (e < seq.epsilon_bound) {
            seq.schedule.push_back(e);
        } else {
            seq.warnings.push_back(
                fmt::format("epsilon {} dropped: admissible range is (0, {})", e, seq.epsilon_bound));
        }
    }
    if (seq.schedule.empty())
        throw ContractViolation(
            fmt::format("no epsilon of the schedule lies in the admissible range (0, {})", seq.epsilon_bound));

    for (double e : seq.schedule) seq.steps.push_back(cerami_step(f, F, seq.minimax, e, cfg, opt));

    std::vector<Vector> tail;
    const std::size_t from = seq.steps.size() / 2;
    for (std::size_t i = from; i < seq.steps.size(); ++i) tail.push_back(seq.steps[i].point.x);
    seq.tail_diameter = max_pairwise(tail);
    return seq;
}

}  // namespace nsmp
