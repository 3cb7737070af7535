#ifndef BBL_CLASSIFY_HPP
#define BBL_CLASSIFY_HPP

// Interior/extreme classification and the rank machinery behind the
// rank(X_y) = m propriety condition.

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <cstdint>
#include <vector>

#include "bbl/model.hpp"

namespace bbl {

struct RankOptions {
    // Relative singular-value cutoff; <= 0 selects the default
    // sigma_max * max(rows, cols) * machine epsilon.
    double rel_tol = -1.0;
    // Fraction-free elimination for integer matrices gives an exact answer
    // independent of scaling; used whenever all entries are (small) integers.
    bool exact_integer_path = true;
};

namespace detail {

inline bool integer_matrix(const Eigen::MatrixXd& M) {
    for (Eigen::Index i = 0; i < M.rows(); ++i)
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            const double v = M(i, j);
            if (std::nearbyint(v) != v || std::abs(v) > 1e9) return false;
        }
    return true;
}

// Bareiss fraction-free Gaussian elimination in 128-bit integers; exact for
// entries up to ~1e9 on the matrix sizes this library sees.
inline int bareiss_rank(const Eigen::MatrixXd& M) {
    const Eigen::Index rows = M.rows(), cols = M.cols();
    std::vector<__int128> a(static_cast<std::size_t>(rows * cols));
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
            a[static_cast<std::size_t>(i * cols + j)] =
                static_cast<__int128>(std::llround(M(i, j)));
    auto at = [&](Eigen::Index i, Eigen::Index j) -> __int128& {
        return a[static_cast<std::size_t>(i * cols + j)];
    };
    __int128 prev = 1;
    Eigen::Index rank = 0;
    for (Eigen::Index col = 0; col < cols && rank < rows; ++col) {
        Eigen::Index pivot = -1;
        for (Eigen::Index i = rank; i < rows; ++i)
            if (at(i, col) != 0) { pivot = i; break; }
        if (pivot < 0) continue;
        if (pivot != rank)
            for (Eigen::Index j = 0; j < cols; ++j) std::swap(at(pivot, j), at(rank, j));
        for (Eigen::Index i = rank + 1; i < rows; ++i) {
            for (Eigen::Index j = col + 1; j < cols; ++j)
                at(i, j) = (at(rank, col) * at(i, j) - at(i, col) * at(rank, j)) / prev;
            at(i, col) = 0;
        }
        prev = at(rank, col);
        ++rank;
    }
    return static_cast<int>(rank);
}

}  // namespace detail

// Rank via singular values with a relative threshold; rank 0 for an empty
// matrix. Integer matrices take the exact path unless disabled.
inline int numeric_rank(const Eigen::MatrixXd& M, const RankOptions& opt = {}) {
    if (M.rows() == 0 || M.cols() == 0) return 0;
    if (opt.exact_integer_path && detail::integer_matrix(M)) return detail::bareiss_rank(M);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    const Eigen::VectorXd& sv = svd.singularValues();
    if (sv.size() == 0) return 0;
    const double smax = sv(0);
    if (smax == 0.0) return 0;
    const double rel = opt.rel_tol > 0.0
                           ? opt.rel_tol
                           : static_cast<double>(std::max(M.rows(), M.cols())) *
                                 std::numeric_limits<double>::epsilon();
    const double cutoff = smax * rel;
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) ++rank;
    return rank;
}

// Definition-1 partition of the data plus the covariate matrix of the
// interior groups and its rank.
struct ClassificationResult {
    std::vector<std::size_t> interior_idx;  // 0-based, in group order
    std::size_t k_y = 0;
    Eigen::MatrixXd X_y;
    int rank_Xy = 0;
    std::size_t extreme_success_count = 0;
    std::size_t extreme_failure_count = 0;
};

inline ClassificationResult classify(const Dataset& data, const RankOptions& opt = {}) {
    data.validate();
    ClassificationResult res;
    for (std::size_t j = 0; j < data.groups.size(); ++j) {
        const Group& g = data.groups[j];
        if (g.interior()) res.interior_idx.push_back(j);
        else if (g.extreme_success()) ++res.extreme_success_count;
        else ++res.extreme_failure_count;
    }
    res.k_y = res.interior_idx.size();
    res.X_y.resize(static_cast<Eigen::Index>(res.k_y), data.m);
    for (std::size_t i = 0; i < res.k_y; ++i)
        res.X_y.row(static_cast<Eigen::Index>(i)) = data.groups[res.interior_idx[i]].x;
    res.rank_Xy = numeric_rank(res.X_y, opt);
    return res;
}

// The interior groups as a standalone dataset (Corollary-1 reduction).
inline Dataset interior_reduction(const Dataset& data) {
    Dataset out;
    out.m = data.m;
    for (const Group& g : data.groups)
        if (g.interior()) out.groups.push_back(g);
    return out;
}

}  // namespace bbl

#endif
