#include "nsmp/clarke.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "nsmp/rng.hpp"

namespace nsmp {

namespace {

constexpr int kRadiusLevels = 4;

}  // namespace

DirectionalEstimate directional_derivative(const Functional& f, const Vector& x, const Vector& v,
                                           const SolverConfig& cfg) {
    const double vnorm = v.norm();
    if (!(vnorm > 0.0)) throw ContractViolation("directional_derivative: v must be nonzero");
    // Steps are taken along the unit direction, so the estimate scales exactly with |v|.
    const Vector vhat = v / vnorm;

    // The offset pattern depends only on (seed, label), so estimates for
    // different directions at the same x share their sample points.
    auto rng = split_rng(cfg.rng_seed, "clarke.directional");
    std::vector<Vector> unit_offsets;
    unit_offsets.reserve(cfg.sample_count + 5);
    unit_offsets.push_back(Vector::Zero(x.size()));
    for (double s : {1.0, 0.5, -0.5, -1.0}) unit_offsets.push_back(s * vhat);
    const Vector origin = Vector::Zero(x.size());
    for (int i = 0; i < cfg.sample_count; ++i) unit_offsets.push_back(uniform_in_ball(rng, origin, 1.0));

    DirectionalEstimate est;
    est.level_values.reserve(kRadiusLevels);
    double r = cfg.sampling_radius;
    for (int k = 0; k < kRadiusLevels; ++k, r *= 0.5) {
        double best = -std::numeric_limits<double>::infinity();
        for (const Vector& u : unit_offsets) {
            const Vector w = x + r * u;
            const double fw = f.checked(w);
            for (double t : {r, 0.5 * r, 0.25 * r}) {
                // Base points w and w - t vhat; the pairing makes f0(x, -v) and (-f)0(x, v) scan the same quotients.
                const double ahead = (f.checked(w + t * vhat) - fw) / t;
                const double behind = (fw - f.checked(w - t * vhat)) / t;
                best = std::max(best, vnorm * std::max(ahead, behind));
            }
        }
        est.level_values.push_back(best);
    }
    const double fine = est.level_values[kRadiusLevels - 1];
    const double coarse = est.level_values[kRadiusLevels - 2];
    est.value = std::max(fine, coarse);
    est.stabilized = std::abs(fine - coarse) <= cfg.tol("tol_dd");
    return est;
}

MinNormResult min_norm_element(const std::vector<Vector>& gradients, double gap_tolerance, int max_iterations) {
    if (gradients.empty()) throw ContractViolation("min_norm_element: empty gradient list");
    const std::size_t k = gradients.size();

    double scale = 1.0;
    std::size_t start = 0;
    double best_norm = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < k; ++i) {
        const double n = gradients[i].squaredNorm();
        scale = std::max(scale, n);
        if (n < best_norm) {
            best_norm = n;
            start = i;
        }
    }
    // The duality gap is measured relative to the largest squared gradient norm.
    const double tol = gap_tolerance * scale;

    MinNormResult res;
    res.weights.assign(k, 0.0);
    res.weights[start] = 1.0;
    Vector p = gradients[start];
    std::vector<double> dots(k);

    int it = 0;
    for (; it < max_iterations; ++it) {
        for (std::size_t i = 0; i < k; ++i) dots[i] = gradients[i].dot(p);
        std::size_t lo = 0;
        for (std::size_t i = 1; i < k; ++i) {
            if (dots[i] < dots[lo]) lo = i;
        }
        res.gap = p.squaredNorm() - dots[lo];
        if (res.gap <= tol) break;

        std::size_t hi = k;
        for (std::size_t i = 0; i < k; ++i) {
            if (res.weights[i] > 0.0 && (hi == k || dots[i] > dots[hi])) hi = i;
        }
        const Vector d = gradients[hi] - gradients[lo];
        const double dd = d.squaredNorm();
        if (dd <= 0.0) break;
        const double t = std::min(res.weights[hi], (dots[hi] - dots[lo]) / dd);
        if (!(t > 0.0)) break;
        res.weights[hi] -= t;
        res.weights[lo] += t;
        p -= t * d;
        if ((it & 63) == 63) {
            p.setZero();
            for (std::size_t i = 0; i < k; ++i) p += res.weights[i] * gradients[i];
        }
    }
    double total = 0.0;
    for (double& w : res.weights) {
        w = std::max(w, 0.0);
        total += w;
    }
    p.setZero();
    for (std::size_t i = 0; i < k; ++i) {
        res.weights[i] /= total;
        p += res.weights[i] * gradients[i];
    }
    res.point = p;
    res.iterations = it;
    return res;
}

bool SubdifferentialEstimate::certificate_holds(double tol) const {
    if (weights.size() != gradients.size() || gradients.empty()) return false;
    double sum = 0.0;
    Vector p = Vector::Zero(min_norm_point.size());
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] < 0.0) return false;
        sum += weights[i];
        p += weights[i] * gradients[i];
    }
    return std::abs(sum - 1.0) <= tol && (p - min_norm_point).norm() <= tol * (1.0 + min_norm_point.norm());
}

SubdifferentialEstimate subdifferential_sample(const Functional& f, const Vector& x, const SolverConfig& cfg) {
    SubdifferentialEstimate est;
    est.base_point = x;
    est.sampling_radius = cfg.sampling_radius;
    auto rng = split_rng(cfg.rng_seed, "clarke.subdifferential");
    const int redraw_limit = 1000 * cfg.sample_count;
    int draws = 0;
    while (static_cast<int>(est.gradients.size()) < cfg.sample_count) {
        if (++draws > redraw_limit) {
            throw SamplingError(fmt::format("{}: gradient sampling found no differentiable points near x (|x| = {:.6g})",
                                            f.name, x.norm()));
        }
        const Vector w = uniform_in_ball(rng, x, cfg.sampling_radius);
        auto g = f.grad_ae(w);
        if (!g || !g->allFinite()) continue;
        est.gradients.push_back(std::move(*g));
    }
    MinNormResult mn = min_norm_element(est.gradients, cfg.tol("min_norm_gap"));
    est.min_norm_point = std::move(mn.point);
    est.weights = std::move(mn.weights);
    est.min_norm_value = est.min_norm_point.norm();
    return est;
}

double scaled_residual(const SubdifferentialEstimate& est) {
    return (1.0 + est.base_point.norm()) * est.min_norm_value;
}

double scaled_residual(const Functional& f, const Vector& x, const SolverConfig& cfg) {
    return scaled_residual(subdifferential_sample(f, x, cfg));
}

}  // namespace nsmp
