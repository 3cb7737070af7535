#ifndef BBL_MODEL_HPP
#define BBL_MODEL_HPP

// Beta-Binomial-Logit model: data types, hyper-prior family, and the exact
// model mathematics (marginal pmf, likelihood, posterior kernel, conditional
// random-effect posterior, shrinkage algebra). Everything is computed in the
// log domain; beta functions go through lgamma so large r*n never overflows.

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "bbl/math.hpp"

namespace bbl {

// One group: y successes out of n trials plus a covariate row.
struct Group {
    int n = 0;
    int y = 0;
    Eigen::RowVectorXd x;

    bool interior() const { return y >= 1 && y <= n - 1; }
    bool extreme_success() const { return y == n; }
    bool extreme_failure() const { return y == 0; }
};

struct Dataset {
    std::vector<Group> groups;
    Eigen::Index m = 0;  // covariate dimension

    Eigen::Index k() const { return static_cast<Eigen::Index>(groups.size()); }

    Eigen::MatrixXd covariate_matrix() const {
        Eigen::MatrixXd X(k(), m);
        for (Eigen::Index j = 0; j < k(); ++j) X.row(j) = groups[j].x;
        return X;
    }

    // True when every row is the same nonzero scalar (m=1); the all-extreme
    // propriety condition only depends on a shared scalar predictor.
    bool intercept_only() const {
        if (m != 1 || groups.empty()) return false;
        const double c = groups.front().x(0);
        if (c == 0.0 || !std::isfinite(c)) return false;
        for (const Group& g : groups)
            if (g.x(0) != c) return false;
        return true;
    }

    void validate() const {
        if (groups.empty()) throw std::invalid_argument("dataset has no groups");
        if (m < 1) throw std::invalid_argument("covariate dimension must be >= 1");
        for (std::size_t j = 0; j < groups.size(); ++j) {
            const Group& g = groups[j];
            const std::string at = "group " + std::to_string(j + 1) + ": ";
            if (g.n < 1) throw std::invalid_argument(at + "n must be >= 1");
            if (g.y < 0 || g.y > g.n) throw std::invalid_argument(at + "y must satisfy 0 <= y <= n");
            if (g.x.size() != m) throw std::invalid_argument(at + "covariate length != m");
            if (!g.x.allFinite()) throw std::invalid_argument(at + "covariates must be finite");
        }
    }
};

inline Dataset make_dataset(const std::vector<int>& n, const std::vector<int>& y,
                            const Eigen::MatrixXd& X) {
    if (n.size() != y.size() || static_cast<Eigen::Index>(n.size()) != X.rows())
        throw std::invalid_argument("make_dataset: inconsistent sizes");
    Dataset d;
    d.m = X.cols();
    d.groups.resize(n.size());
    for (std::size_t j = 0; j < n.size(); ++j) {
        d.groups[j].n = n[j];
        d.groups[j].y = y[j];
        d.groups[j].x = X.row(static_cast<Eigen::Index>(j));
    }
    d.validate();
    return d;
}

// ---------------------------------------------------------------------------
// Hyper-prior family: f(r) dr for r, independently g(beta) for the regression
// coefficients. PowerLaw is dr/(t+r)^(u+1); proper iff t > 0. DrOverR is the
// dr/r pathology kept outside the power-law class.

struct PowerLawF {
    double t = 1.0;
    double u = 1.0;
};
struct DrOverRF {};

struct FlatG {};
struct StandardLogisticInterceptG {};  // density p^E q^E on an intercept term
struct GaussianG {
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;
};

struct HyperPriorSpec {
    std::variant<PowerLawF, DrOverRF> f;
    std::variant<FlatG, StandardLogisticInterceptG, GaussianG> g;

    bool f_is_dr_over_r() const { return std::holds_alternative<DrOverRF>(f); }
    bool f_proper() const {
        if (f_is_dr_over_r()) return false;
        return std::get<PowerLawF>(f).t > 0.0;
    }
    bool g_flat() const { return std::holds_alternative<FlatG>(g); }
    bool g_proper() const { return !g_flat(); }

    void validate(Eigen::Index m) const {
        if (const auto* pl = std::get_if<PowerLawF>(&f)) {
            if (pl->t < 0.0) throw std::invalid_argument("power-law hyper-prior needs t >= 0");
            if (!(pl->u > 0.0)) throw std::invalid_argument("power-law hyper-prior needs u > 0");
        }
        if (const auto* gg = std::get_if<GaussianG>(&g)) {
            if (gg->mean.size() != m || gg->covariance.rows() != m || gg->covariance.cols() != m)
                throw std::invalid_argument("Gaussian hyper-prior dimensions do not match m");
            Eigen::LLT<Eigen::MatrixXd> llt(gg->covariance);
            if (llt.info() != Eigen::Success)
                throw std::invalid_argument("Gaussian hyper-prior covariance must be positive definite");
        }
    }

    // log f(r) up to the class constant, parameterized by s = log r so the
    // oracle can reach r values whose exp would overflow.
    double log_f_of_log_r(double s) const {
        if (f_is_dr_over_r()) return -s;
        const auto& pl = std::get<PowerLawF>(f);
        return -(pl.u + 1.0) * log_t_plus_exp(pl.t, s);
    }
    double log_f(double r) const {
        if (r <= 0.0) throw std::invalid_argument("hyper-prior f needs r > 0");
        return log_f_of_log_r(std::log(r));
    }

    double log_g(const Eigen::VectorXd& beta) const {
        if (std::holds_alternative<FlatG>(g)) return 0.0;
        if (std::holds_alternative<StandardLogisticInterceptG>(g)) {
            // standard logistic density exp(b)/(1+exp(b))^2 on the intercept
            const double b = beta(0);
            return log_logistic(b) + log_logistic(-b);
        }
        const auto& gg = std::get<GaussianG>(g);
        Eigen::LLT<Eigen::MatrixXd> llt(gg.covariance);
        const Eigen::VectorXd c = beta - gg.mean;
        const Eigen::VectorXd z = llt.matrixL().solve(c);
        double log_det_half = 0.0;
        for (Eigen::Index i = 0; i < beta.size(); ++i)
            log_det_half += std::log(llt.matrixL()(i, i));
        const double m = static_cast<double>(beta.size());
        return -0.5 * z.squaredNorm() - log_det_half - 0.5 * m * std::log(2.0 * M_PI);
    }

    std::string f_label() const {
        if (f_is_dr_over_r()) return "dr/r";
        const auto& pl = std::get<PowerLawF>(f);
        return "dr/(" + std::to_string(pl.t) + "+r)^" + std::to_string(pl.u + 1.0);
    }
    std::string g_label() const {
        if (std::holds_alternative<FlatG>(g)) return "flat";
        if (std::holds_alternative<StandardLogisticInterceptG>(g)) return "standard-logistic";
        return "gaussian";
    }
};

// ---------------------------------------------------------------------------
// Expected random effects p^E_j = logistic(x_j . beta). q^E is evaluated as
// logistic(-x_j . beta) so the saturated tail keeps full precision instead of
// rounding 1 - p^E to zero.

struct ExpectedRandomEffects {
    Eigen::VectorXd pE;
    Eigen::VectorXd qE;
};

inline ExpectedRandomEffects logistic_link(const Eigen::VectorXd& beta, const Eigen::MatrixXd& X) {
    if (beta.size() != X.cols()) throw std::invalid_argument("logistic_link: beta length != X columns");
    ExpectedRandomEffects e;
    const Eigen::VectorXd lin = X * beta;
    e.pE.resize(lin.size());
    e.qE.resize(lin.size());
    for (Eigen::Index j = 0; j < lin.size(); ++j) {
        e.pE(j) = logistic(lin(j));
        e.qE(j) = logistic(-lin(j));
    }
    return e;
}

inline ExpectedRandomEffects logistic_link(const Dataset& data, const Eigen::VectorXd& beta) {
    return logistic_link(beta, data.covariate_matrix());
}

namespace detail {
// Guard for logs of pE/qE handed in at the boundary of double precision.
inline double clamp_unit(double v) { return v < 1e-300 ? 1e-300 : v; }
}  // namespace detail

// log of the Beta-Binomial pmf: C(n,y) B(y + r pE, n - y + r qE) / B(r pE, r qE).
// qE defaults to 1 - pE; callers that know the linear predictor pass the
// stably evaluated complement to keep extreme tails exact.
inline double log_bb_pmf(const Group& group, double r, double pE, double qE = -1.0) {
    if (!(r > 0.0)) throw std::invalid_argument("log_bb_pmf: r must be > 0");
    if (group.y < 0 || group.y > group.n || group.n < 1)
        throw std::invalid_argument("log_bb_pmf: invalid (n, y)");
    if (qE < 0.0) qE = 1.0 - pE;
    const double a = r * detail::clamp_unit(pE);
    const double b = r * detail::clamp_unit(qE);
    return log_binomial_coefficient(group.n, group.y) +
           log_beta(group.y + a, group.n - group.y + b) - log_beta(a, b);
}

// log L(r, beta): sum of the group-wise Beta-Binomial log pmfs, binomial
// coefficients included (they are constant in (r, beta)).
inline double log_likelihood(const Dataset& data, double r, const Eigen::VectorXd& beta) {
    const ExpectedRandomEffects e = logistic_link(data, beta);
    double total = 0.0;
    for (std::size_t j = 0; j < data.groups.size(); ++j)
        total += log_bb_pmf(data.groups[j], r, e.pE(j), e.qE(j));
    return total;
}

inline double sum_log_binomial_coefficients(const Dataset& data) {
    double s = 0.0;
    for (const Group& g : data.groups) s += log_binomial_coefficient(g.n, g.y);
    return s;
}

// Unnormalized log posterior of the hyper-parameters: log f + log g + log L.
inline double log_hyper_posterior_kernel(const Dataset& data, const HyperPriorSpec& hp, double r,
                                         const Eigen::VectorXd& beta) {
    if (!(r > 0.0)) throw std::invalid_argument("log_hyper_posterior_kernel: r must be > 0");
    return hp.log_f(r) + hp.log_g(beta) + log_likelihood(data, r, beta);
}

// Same kernel parameterized by s = log r (no Jacobian term; the oracle adds
// it where the integration variable is s).
inline double log_hyper_posterior_kernel_log_r(const Dataset& data, const HyperPriorSpec& hp,
                                               double s, const Eigen::VectorXd& beta) {
    const ExpectedRandomEffects e = logistic_link(data, beta);
    const double r = std::exp(s);
    double total = hp.log_f_of_log_r(s) + hp.log_g(beta);
    for (std::size_t j = 0; j < data.groups.size(); ++j)
        total += log_bb_pmf(data.groups[j], r, e.pE(j), e.qE(j));
    return total;
}

// ---------------------------------------------------------------------------
// Conditional posterior of the random effects: p_j | r, beta, y is
// Beta(r pE_j + y_j, r qE_j + n_j - y_j).

struct ConditionalPosteriorParams {
    Eigen::VectorXd alpha;
    Eigen::VectorXd beta;
};

inline ConditionalPosteriorParams conditional_posterior_params(const Dataset& data, double r,
                                                               const Eigen::VectorXd& beta) {
    if (!(r > 0.0)) throw std::invalid_argument("conditional_posterior_params: r must be > 0");
    const ExpectedRandomEffects e = logistic_link(data, beta);
    ConditionalPosteriorParams cp;
    cp.alpha.resize(data.k());
    cp.beta.resize(data.k());
    for (Eigen::Index j = 0; j < data.k(); ++j) {
        const Group& g = data.groups[static_cast<std::size_t>(j)];
        cp.alpha(j) = r * e.pE(j) + g.y;
        cp.beta(j) = r * e.qE(j) + (g.n - g.y);
    }
    return cp;
}

// Shrinkage factors B_j = r/(r+n_j), posterior means and variances.
struct ShrinkageSummary {
    Eigen::VectorXd B;
    Eigen::VectorXd post_mean;
    Eigen::VectorXd post_var;
};

inline ShrinkageSummary shrinkage_summary(const Dataset& data, double r, const Eigen::VectorXd& beta) {
    if (!(r > 0.0)) throw std::invalid_argument("shrinkage_summary: r must be > 0");
    const ExpectedRandomEffects e = logistic_link(data, beta);
    ShrinkageSummary s;
    s.B.resize(data.k());
    s.post_mean.resize(data.k());
    s.post_var.resize(data.k());
    for (Eigen::Index j = 0; j < data.k(); ++j) {
        const Group& g = data.groups[static_cast<std::size_t>(j)];
        const double B = r / (r + g.n);
        const double ybar = static_cast<double>(g.y) / g.n;
        const double mean = (1.0 - B) * ybar + B * e.pE(j);
        s.B(j) = B;
        s.post_mean(j) = mean;
        s.post_var(j) = mean * (1.0 - mean) / (r + g.n + 1.0);
    }
    return s;
}

}  // namespace bbl

#endif
