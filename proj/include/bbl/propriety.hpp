#ifndef BBL_PROPRIETY_HPP
#define BBL_PROPRIETY_HPP

// Data-dependent propriety decision for the BBL hyper-posterior. The decision
// table distinguishes interior-bearing data (where only interior groups
// matter) from all-extreme data, and improper power-law r-priors from proper
// ones. Two threshold modes exist for the improper power-law cells:
//
//   PaperTable1:        k_y >= u + 1
//   CorrectedThreshold: k_y > u
//
// The sandwich bounds give a posterior r-density behaving like r^(k_y - u - 1)
// near zero, which is integrable exactly when k_y > u; the stricter published
// threshold disagrees for non-integer u (the dr/r^1.5 single-interior-group
// case integrates to pi, for instance). The corrected mode is the default so
// the verdict matches the numerical oracle; both are evaluated and a
// discrepancy flag is raised whenever they differ.

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "bbl/classify.hpp"
#include "bbl/model.hpp"

namespace bbl {

enum class Status { Proper, Improper, Unknown };
enum class Mode { PaperTable1, CorrectedThreshold };

inline const char* to_string(Status s) {
    switch (s) {
        case Status::Proper: return "Proper";
        case Status::Improper: return "Improper";
        default: return "Unknown";
    }
}
inline const char* to_string(Mode m) {
    return m == Mode::PaperTable1 ? "paper-table1" : "corrected-threshold";
}

// One evaluated condition: which table cell it belongs to, what was tested,
// what was observed, and whether it held.
struct ConditionRecord {
    std::string cell;       // stable machine id, e.g. "interior.improper_f.flat_g"
    std::string condition;  // the tested predicate, human readable
    std::string observed;
    bool satisfied = false;
};

struct ProprietyVerdict {
    Status status = Status::Unknown;
    std::vector<ConditionRecord> reasons;
    Mode mode = Mode::CorrectedThreshold;
    bool discrepancy_flag = false;  // the two threshold modes disagree here
};

namespace detail {

inline bool threshold_holds(std::size_t k_y, double u, Mode mode) {
    const double ky = static_cast<double>(k_y);
    return mode == Mode::PaperTable1 ? ky >= u + 1.0 : ky > u;
}

inline std::string threshold_text(double u, Mode mode) {
    std::ostringstream os;
    if (mode == Mode::PaperTable1) os << "k_y >= u+1 = " << (u + 1.0);
    else os << "k_y > u = " << u;
    return os.str();
}

inline ConditionRecord record(std::string cell, std::string cond, std::string obs, bool ok) {
    return ConditionRecord{std::move(cell), std::move(cond), std::move(obs), ok};
}

}  // namespace detail

// Full decision procedure. Interior-bearing data are reduced to their
// interior groups first; the rank condition therefore reads rank(X_y) = m.
inline ProprietyVerdict decide(const Dataset& data, const HyperPriorSpec& hp,
                               Mode mode = Mode::CorrectedThreshold,
                               const RankOptions& rank_opt = {}) {
    data.validate();
    hp.validate(data.m);
    if (std::holds_alternative<StandardLogisticInterceptG>(hp.g)) {
        bool all_ones = data.m == 1;
        if (all_ones)
            for (const Group& g : data.groups)
                if (g.x(0) != 1.0) { all_ones = false; break; }
        if (!all_ones)
            throw std::invalid_argument(
                "standard-logistic hyper-prior on beta requires an intercept-only design (m=1, x=1)");
    }

    const ClassificationResult cls = classify(data, rank_opt);
    ProprietyVerdict v;
    v.mode = mode;

    std::ostringstream ky_obs;
    ky_obs << "k_y = " << cls.k_y << " of k = " << data.k();

    if (hp.f_is_dr_over_r()) {
        v.status = Status::Improper;
        v.reasons.push_back(detail::record(
            "f.dr_over_r", "f(r) = dr/r leads to an improper posterior for every dataset",
            "f(r) = dr/r", false));
        return v;
    }

    const auto& pl = std::get<PowerLawF>(hp.f);
    const bool f_proper = hp.f_proper();
    const bool g_proper = hp.g_proper();

    auto add_threshold_records = [&](const std::string& cell) -> bool {
        const bool held_mode = detail::threshold_holds(cls.k_y, pl.u, mode);
        const bool held_paper = detail::threshold_holds(cls.k_y, pl.u, Mode::PaperTable1);
        const bool held_corr = detail::threshold_holds(cls.k_y, pl.u, Mode::CorrectedThreshold);
        v.reasons.push_back(detail::record(cell, detail::threshold_text(pl.u, mode), ky_obs.str(),
                                           held_mode));
        if (held_paper != held_corr) {
            v.discrepancy_flag = true;
            const Mode other = mode == Mode::PaperTable1 ? Mode::CorrectedThreshold : Mode::PaperTable1;
            v.reasons.push_back(detail::record(
                cell + ".other_mode",
                std::string(to_string(other)) + " would test " + detail::threshold_text(pl.u, other),
                ky_obs.str(), other == Mode::PaperTable1 ? held_paper : held_corr));
        }
        return held_mode;
    };

    auto add_rank_record = [&](const std::string& cell) -> bool {
        const bool ok = cls.rank_Xy == static_cast<int>(data.m);
        std::ostringstream obs;
        obs << "rank(X_y) = " << cls.rank_Xy << ", m = " << data.m;
        if (cls.k_y < static_cast<std::size_t>(data.m))
            obs << " (k_y = " << cls.k_y << " < m already forbids full rank)";
        v.reasons.push_back(detail::record(cell, "rank(X_y) = m", obs.str(), ok));
        return ok;
    };

    if (cls.k_y >= 1) {
        if (f_proper && g_proper) {
            v.status = Status::Proper;
            v.reasons.push_back(detail::record("interior.proper_f.proper_g",
                                               "proper f(r) and proper g(beta): always proper",
                                               ky_obs.str(), true));
        } else if (f_proper && !g_proper) {
            const bool ok = add_rank_record("interior.proper_f.flat_g");
            v.status = ok ? Status::Proper : Status::Improper;
        } else if (!f_proper && g_proper) {
            const bool ok = add_threshold_records("interior.improper_f.proper_g");
            v.status = ok ? Status::Proper : Status::Improper;
        } else {
            const bool t_ok = add_threshold_records("interior.improper_f.flat_g");
            const bool r_ok = add_rank_record("interior.improper_f.flat_g");
            v.status = (t_ok && r_ok) ? Status::Proper : Status::Improper;
        }
        return v;
    }

    // k_y = 0: only extreme groups.
    if (!f_proper) {
        v.status = Status::Improper;
        v.reasons.push_back(detail::record(
            "all_extreme.improper_f",
            "improper f(r) with all-extreme data: never proper", ky_obs.str(), false));
        return v;
    }
    if (g_proper) {
        v.status = Status::Proper;
        v.reasons.push_back(detail::record("all_extreme.proper_f.proper_g",
                                           "proper f(r) and proper g(beta): always proper",
                                           ky_obs.str(), true));
        return v;
    }
    if (data.intercept_only()) {
        const bool succ = cls.extreme_success_count >= 1;
        const bool fail = cls.extreme_failure_count >= 1;
        std::ostringstream obs;
        obs << cls.extreme_success_count << " all-success and " << cls.extreme_failure_count
            << " all-failure groups";
        v.reasons.push_back(detail::record(
            "all_extreme.proper_f.flat_g.intercept",
            "at least one all-success and at least one all-failure group", obs.str(), succ && fail));
        v.status = (succ && fail) ? Status::Proper : Status::Improper;
        return v;
    }
    v.status = Status::Unknown;
    v.reasons.push_back(detail::record(
        "all_extreme.proper_f.flat_g.covariates",
        "propriety is unknown for all-extreme data with a flat g(beta) and covariates",
        ky_obs.str(), false));
    return v;
}

// Corollary-1 self check: the verdict must not change when the data are
// reduced to their interior groups. Requires k_y >= 1.
inline bool verdict_invariance_check(const Dataset& data, const HyperPriorSpec& hp,
                                     Mode mode = Mode::CorrectedThreshold,
                                     const RankOptions& rank_opt = {}) {
    const Dataset reduced = interior_reduction(data);
    if (reduced.groups.empty())
        throw std::invalid_argument("verdict_invariance_check requires at least one interior group");
    const ProprietyVerdict full = decide(data, hp, mode, rank_opt);
    const ProprietyVerdict part = decide(reduced, hp, mode, rank_opt);
    return full.status == part.status;
}

}  // namespace bbl

#endif
