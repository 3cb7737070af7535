#ifndef BBL_BOUNDS_HPP
#define BBL_BOUNDS_HPP

// Executable sandwich bounds for the Beta-Binomial pmf with the binomial
// coefficient removed (the "beta-function ratio"). Interior groups:
//
//   r^2 pE qE / prod_{i=0}^{n-1}(i+r)  <=  ratio  <=  r pE qE / (1+r)
//
// with the exact pre-relaxation product on the lower side. Extreme groups:
// pE^n <= ratio <= pE (all successes), qE^n <= ratio <= qE (all failures);
// both sides are free of r. All bounds hold pointwise with no hidden
// constants, so audits can run at 1e-10 log slack.

#include <Eigen/Dense>
#include <cmath>
#include <span>
#include <vector>

#include "bbl/math.hpp"
#include "bbl/model.hpp"

namespace bbl {

enum class GroupKind { Interior, ExtremeSuccess, ExtremeFailure };

struct GroupBound {
    double lower_log = 0.0;
    double upper_log = 0.0;
    GroupKind kind = GroupKind::Interior;
    // Explicit multipliers behind the interior bounds: the Appendix-A product
    // prod_{i=0}^{n-1}(i+r) and the constant 1/n^(n-1) of the relaxed form
    // r pE qE/(1+r)^(n-1). relaxed_lower_log <= lower_log always.
    double log_prod_shifted_r = 0.0;
    double relaxed_lower_log = neg_inf;
};

inline GroupBound group_bounds(const Group& group, double r, double pE, double qE = -1.0) {
    if (!(r > 0.0)) throw std::invalid_argument("group_bounds: r must be > 0");
    if (qE < 0.0) qE = 1.0 - pE;
    if (!(pE > 0.0) || !(qE > 0.0))
        throw std::invalid_argument("group_bounds: pE must lie strictly inside (0,1)");
    const double lp = std::log(pE), lq = std::log(qE), lr = std::log(r);

    GroupBound b;
    if (group.interior()) {
        b.kind = GroupKind::Interior;
        double log_prod = 0.0;
        for (int i = 0; i < group.n; ++i) log_prod += std::log(i + r);
        b.log_prod_shifted_r = log_prod;
        b.upper_log = lr + lp + lq - std::log1p(r);
        b.lower_log = 2.0 * lr + lp + lq - log_prod;
        b.relaxed_lower_log = lr + lp + lq - (group.n - 1) * std::log1p(r) -
                              (group.n - 1) * std::log(static_cast<double>(group.n));
    } else if (group.extreme_success()) {
        b.kind = GroupKind::ExtremeSuccess;
        b.upper_log = lp;
        b.lower_log = group.n * lp;
    } else {
        b.kind = GroupKind::ExtremeFailure;
        b.upper_log = lq;
        b.lower_log = group.n * lq;
    }
    return b;
}

// Sum of the per-group bounds: a sandwich for log L(r, beta) minus the
// binomial coefficient terms.
inline std::pair<double, double> likelihood_sandwich(const Dataset& data, double r,
                                                     const Eigen::VectorXd& beta) {
    const ExpectedRandomEffects e = logistic_link(data, beta);
    double lo = 0.0, hi = 0.0;
    for (std::size_t j = 0; j < data.groups.size(); ++j) {
        const GroupBound b = group_bounds(data.groups[j], r, e.pE(j), e.qE(j));
        lo += b.lower_log;
        hi += b.upper_log;
    }
    return {lo, hi};
}

struct SandwichAuditReport {
    std::size_t points = 0;
    double max_lower_violation = 0.0;  // lower_log - value, positive = violation
    double max_upper_violation = 0.0;  // value - upper_log, positive = violation
    double max_relaxed_violation = 0.0;
    double worst_r = 0.0;
    Eigen::VectorXd worst_beta;

    bool ok(double slack = 1e-10) const {
        return max_lower_violation <= slack && max_upper_violation <= slack &&
               max_relaxed_violation <= slack;
    }
};

// Evaluates the sandwich against log L - sum(log C(n_j, y_j)) on the grid.
inline SandwichAuditReport sandwich_audit(const Dataset& data, std::span<const double> r_values,
                                          std::span<const Eigen::VectorXd> beta_values) {
    const double log_coeffs = sum_log_binomial_coefficients(data);
    SandwichAuditReport rep;
    for (double r : r_values) {
        for (const Eigen::VectorXd& beta : beta_values) {
            const double value = log_likelihood(data, r, beta) - log_coeffs;
            const ExpectedRandomEffects e = logistic_link(data, beta);
            double lo = 0.0, hi = 0.0, relaxed = 0.0;
            for (std::size_t j = 0; j < data.groups.size(); ++j) {
                const GroupBound b = group_bounds(data.groups[j], r, e.pE(j), e.qE(j));
                lo += b.lower_log;
                hi += b.upper_log;
                relaxed += b.kind == GroupKind::Interior ? b.relaxed_lower_log : b.lower_log;
            }
            ++rep.points;
            const double lo_viol = lo - value;
            const double hi_viol = value - hi;
            const double relaxed_viol = relaxed - value;
            if (lo_viol > rep.max_lower_violation || hi_viol > rep.max_upper_violation) {
                rep.worst_r = r;
                rep.worst_beta = beta;
            }
            rep.max_lower_violation = std::max(rep.max_lower_violation, lo_viol);
            rep.max_upper_violation = std::max(rep.max_upper_violation, hi_viol);
            rep.max_relaxed_violation = std::max(rep.max_relaxed_violation, relaxed_viol);
        }
    }
    return rep;
}

}  // namespace bbl

#endif
