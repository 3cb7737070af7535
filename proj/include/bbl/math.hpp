#ifndef BBL_MATH_HPP
#define BBL_MATH_HPP

// Log-domain scalar helpers shared by the model, bounds, oracle and sampler.

#include <cmath>
#include <limits>

namespace bbl {

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

// log(exp(a) + exp(b)) without overflow; tolerates -inf on either side.
inline double log_sum_exp(double a, double b) {
    if (a == neg_inf) return b;
    if (b == neg_inf) return a;
    const double hi = a > b ? a : b;
    const double lo = a > b ? b : a;
    return hi + std::log1p(std::exp(lo - hi));
}

// log(1 + exp(x)), stable over the whole real line.
inline double log1p_exp(double x) {
    if (x > 0.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

// logistic(x) = exp(x)/(1+exp(x)), evaluated on the branch that avoids
// overflow and keeps precision in the saturated tail.
inline double logistic(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// log(logistic(x)); exact down to x ~ -745 where exp underflows.
inline double log_logistic(double x) { return -log1p_exp(-x); }

// log(t + exp(s)) without forming exp(s); t >= 0.
inline double log_t_plus_exp(double t, double s) {
    if (t == 0.0) return s;
    const double lt = std::log(t);
    if (s > lt) return s + std::log1p(t * std::exp(-s));
    return lt + log1p_exp(s - lt);
}

// log C(n, y) via lgamma.
inline double log_binomial_coefficient(int n, int y) {
    return std::lgamma(n + 1.0) - std::lgamma(y + 1.0) - std::lgamma(n - y + 1.0);
}

// log B(a, b) via lgamma; requires a, b > 0.
inline double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

}  // namespace bbl

#endif
