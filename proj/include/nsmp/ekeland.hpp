#ifndef NSMP_EKELAND_HPP
#define NSMP_EKELAND_HPP

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace nsmp {

/**
 * A metric space seen through finitely many sampled points.
 *
 * neighbors(p, radius) yields the candidate points the refinement is allowed
 * to try around p. The value map may return +inf.
 */
template <class Point>
struct MetricSpaceView {
    std::function<double(const Point&, const Point&)> dist;
    std::function<double(const Point&)> value;
    std::function<std::vector<Point>(const Point&, double)> neighbors;
    /// Optional cheap bound value_lower_bound(p) <= value(p); lets the
    /// refinement skip candidates that cannot be accepted.
    std::function<double(const Point&)> value_lower_bound;
};

template <class Point>
struct EkelandCertificate {
    Point start;
    Point result;
    double epsilon = 0.0;
    double lambda = 0.0;
    double slack = 0.0;
    double start_value = 0.0;
    double result_value = 0.0;
    double start_result_distance = 0.0;
    int steps = 0;
    /// False when the budget ran out while steps were still being accepted.
    bool terminated = true;
    int witnesses_checked = 0;
    /// max over witnesses w != result of value(result) - value(w) - (eps/lambda) d(result, w).
    double max_violation = -std::numeric_limits<double>::infinity();
    std::vector<double> value_history;
};

struct ClauseCheck {
    std::string clause;
    /// Smallest margin seen; the clause holds when margin >= -slack.
    double worst_margin = std::numeric_limits<double>::infinity();
    int worst_witness = -1;
    bool holds = true;
};

struct VerificationReport {
    std::array<ClauseCheck, 3> clauses;
    int witnesses = 0;
    bool all_hold() const { return clauses[0].holds && clauses[1].holds && clauses[2].holds; }
};

inline double default_ekeland_slack(double start_value) { return 1e-10 * (1.0 + std::abs(start_value)); }

/**
 * Ekeland refinement over sampled neighborhoods.
 *
 * From v_0 = u, step to the neighbor w minimising value(w) + (eps/lambda) d(v_k, w)
 * while that improves on value(v_k) by more than slack. The final candidate
 * set serves as the witness set for the strict-minimum clause.
 */
namespace detail {

// Runs the refinement from (v, fv), appending to cert.
template <class Point>
void ekeland_run(const MetricSpaceView<Point>& space, EkelandCertificate<Point>& cert, Point v, double fv,
                 int budget) {
    const double weight = cert.epsilon / cert.lambda;
    cert.terminated = false;

    std::vector<Point> candidates;
    std::vector<double> cand_value, cand_dist;
    auto evaluate_candidates = [&](const Point& centre) {
        candidates = space.neighbors(centre, cert.lambda);
        cand_value.resize(candidates.size());
        cand_dist.resize(candidates.size());
        for (std::size_t i = 0; i < candidates.size(); ++i) cand_dist[i] = space.dist(centre, candidates[i]);
        double best_q = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            if (space.value_lower_bound && cand_dist[i] > 0.0) {
                // A lower bound on the value keeps the violation estimate conservative.
                const double lb = space.value_lower_bound(candidates[i]);
                if (lb + weight * cand_dist[i] >= std::min(best_q, fv - cert.slack)) {
                    cand_value[i] = lb;
                    continue;
                }
            }
            cand_value[i] = space.value(candidates[i]);
            if (cand_dist[i] > 0.0) best_q = std::min(best_q, cand_value[i] + weight * cand_dist[i]);
        }
    };

    for (int k = 0; k <= budget; ++k) {
        evaluate_candidates(v);
        std::size_t best = candidates.size();
        double best_q = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            if (cand_dist[i] <= 0.0) continue;
            const double q = cand_value[i] + weight * cand_dist[i];
            if (q < best_q) {
                best_q = q;
                best = i;
            }
        }
        if (best == candidates.size() || !(best_q < fv - cert.slack)) {
            cert.terminated = true;
            break;
        }
        if (k == budget) break;  // still improving; leave the witnesses of v in place
        v = candidates[best];
        fv = cand_value[best];
        ++cert.steps;
        cert.value_history.push_back(fv);
    }

    cert.result = v;
    cert.result_value = fv;
    cert.start_result_distance = space.dist(cert.start, v);
    cert.witnesses_checked = 0;
    cert.max_violation = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (cand_dist[i] <= 0.0) continue;
        ++cert.witnesses_checked;
        cert.max_violation = std::max(cert.max_violation, fv - cand_value[i] - weight * cand_dist[i]);
    }
}

}  // namespace detail

/**
 * Ekeland refinement over sampled neighborhoods.
 *
 * From v_0 = u, step to the neighbor w minimising value(w) + (eps/lambda) d(v_k, w)
 * while that improves on value(v_k) by more than slack. The final candidate
 * set serves as the witness set for the strict-minimum clause.
 */
template <class Point>
EkelandCertificate<Point> ekeland_refine(const MetricSpaceView<Point>& space, const Point& u, double epsilon,
                                         double lambda, int budget, double slack = -1.0) {
    EkelandCertificate<Point> cert;
    cert.start = u;
    cert.epsilon = epsilon;
    cert.lambda = lambda;
    cert.start_value = space.value(u);
    cert.slack = slack >= 0.0 ? slack : default_ekeland_slack(cert.start_value);
    cert.value_history.push_back(cert.start_value);
    detail::ekeland_run(space, cert, u, cert.start_value, budget);
    return cert;
}

/**
 * Takes w as an accepted step when it beats the current result by the
 * refinement's own rule, then resumes. Returns false (and leaves cert alone)
 * when w does not qualify.
 */
template <class Point>
bool ekeland_resume(const MetricSpaceView<Point>& space, EkelandCertificate<Point>& cert, const Point& w,
                    int budget) {
    const double d = space.dist(cert.result, w);
    if (!(d > 0.0)) return false;
    const double fw = space.value(w);
    if (!(fw + cert.epsilon / cert.lambda * d < cert.result_value - cert.slack)) return false;
    ++cert.steps;
    cert.value_history.push_back(fw);
    detail::ekeland_run(space, cert, w, fw, budget);
    return true;
}

/// Re-evaluates the three clauses of the certificate against fresh witnesses.
template <class Point>
VerificationReport verify_certificate(const MetricSpaceView<Point>& space, const EkelandCertificate<Point>& cert,
                                      const std::vector<Point>& extra_witnesses) {
    VerificationReport rep;
    const double slack = cert.slack;
    const double f_start = space.value(cert.start);
    const double f_result = space.value(cert.result);

    ClauseCheck& c1 = rep.clauses[0];
    c1.clause = "value(result) <= value(start)";
    c1.worst_margin = f_start - f_result;
    c1.holds = c1.worst_margin >= -slack;

    ClauseCheck& c2 = rep.clauses[1];
    c2.clause = "dist(start, result) <= lambda";
    c2.worst_margin = cert.lambda - space.dist(cert.start, cert.result);
    c2.holds = c2.worst_margin >= -slack;

    ClauseCheck& c3 = rep.clauses[2];
    c3.clause = "value(w) > value(result) - (eps/lambda) dist(result, w)";
    const double weight = cert.epsilon / cert.lambda;
    for (std::size_t i = 0; i < extra_witnesses.size(); ++i) {
        const double d = space.dist(cert.result, extra_witnesses[i]);
        if (d <= 0.0) continue;
        ++rep.witnesses;
        const double margin = space.value(extra_witnesses[i]) - f_result + weight * d;
        if (margin < c3.worst_margin) {
            c3.worst_margin = margin;
            c3.worst_witness = static_cast<int>(i);
        }
    }
    c3.holds = c3.worst_margin >= -slack;
    return rep;
}

}  // namespace nsmp

#endif
