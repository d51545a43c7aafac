#include "mindet/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mindet/errors.hpp"

namespace mindet {

const char* to_string(FamilyKind k) {
    switch (k) {
    case FamilyKind::stieltjes: return "stieltjes";
    case FamilyKind::operator_flow: return "operator";
    }
    return "?";
}

const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::m_indeterminate_confirmed: return "M_INDETERMINATE_CONFIRMED";
    case Verdict::failed: return "FAILED";
    }
    return "?";
}

const char* to_string(FailReason r) {
    switch (r) {
    case FailReason::none: return "none";
    case FailReason::moment_spread: return "moment_spread";
    case FailReason::distinctness: return "distinctness";
    case FailReason::negativity: return "negativity";
    case FailReason::normalization: return "normalization";
    case FailReason::condition_check: return "condition_check";
    }
    return "?";
}

namespace {

void fail(VerificationReport& rep, FailReason reason, std::string detail) {
    rep.verdict = Verdict::failed;
    rep.fail_reason = reason;
    rep.fail_detail = std::move(detail);
}

} // namespace

VerificationReport
verify_family(FamilyKind kind,
              const std::vector<std::pair<double, DensityFunction>>& members,
              int n_max, double distinctness_threshold,
              std::vector<ConditionCheck> extra_checks) {
    if (members.empty())
        throw EmptyFamily("verify_family: no members to verify");
    for (size_t i = 1; i < members.size(); ++i)
        require_same_grid(members[0].second.grid, members[i].second.grid,
                          "verify_family");

    VerificationReport rep;
    rep.family_kind = kind;
    rep.n_max = n_max;
    rep.distinctness_threshold = distinctness_threshold;
    rep.condition_checks = std::move(extra_checks);

    for (const auto& [param, density] : members) {
        rep.params.push_back(param);
        rep.moment_table.push_back(moments_from_density(density, n_max));
        rep.normalization_errors.push_back(density.norm_error);
        rep.negativity_worst.push_back(density.worst_negative);
    }

    for (int n = 0; n <= n_max; ++n) {
        double lo = rep.moment_table[0].values[n];
        double hi = lo;
        for (const MomentVector& row : rep.moment_table) {
            lo = std::min(lo, row.values[n]);
            hi = std::max(hi, row.values[n]);
        }
        rep.max_moment_spread.push_back(hi - lo);
        rep.spread_tolerance.push_back(moment_tolerance(rep.moment_table[0], n));
    }

    rep.min_pairwise_l1 = std::numeric_limits<double>::infinity();
    for (size_t a = 0; a < members.size(); ++a)
        for (size_t b = a + 1; b < members.size(); ++b)
            rep.min_pairwise_l1 = std::min(
                rep.min_pairwise_l1,
                distance(members[a].second, members[b].second, Metric::l1));

    rep.verdict = Verdict::m_indeterminate_confirmed;
    rep.fail_reason = FailReason::none;

    // report the most violated order, not the first, so the diagnostic
    // points at the strongest symptom
    int worst_order = -1;
    double worst_ratio = 1.0;
    for (int n = 0; n <= n_max; ++n) {
        double tol = rep.spread_tolerance[n];
        double ratio = tol > 0.0
                           ? rep.max_moment_spread[n] / tol
                           : (rep.max_moment_spread[n] > 0.0
                                  ? std::numeric_limits<double>::infinity()
                                  : 0.0);
        if (ratio > worst_ratio) {
            worst_ratio = ratio;
            worst_order = n;
        }
    }
    if (worst_order >= 0) {
        std::ostringstream os;
        os << "moment spread " << rep.max_moment_spread[worst_order]
           << " at order " << worst_order << " exceeds tol "
           << rep.spread_tolerance[worst_order];
        fail(rep, FailReason::moment_spread, os.str());
        return rep;
    }

    if (rep.min_pairwise_l1 < distinctness_threshold) {
        std::ostringstream os;
        os << "smallest pairwise L1 distance " << rep.min_pairwise_l1
           << " is below the distinctness threshold " << distinctness_threshold;
        fail(rep, FailReason::distinctness, os.str());
        return rep;
    }

    for (size_t i = 0; i < members.size(); ++i)
        if (!members[i].second.nonnegative()) {
            std::ostringstream os;
            os << "member " << i << " (param " << members[i].first
               << ") dips to " << rep.negativity_worst[i];
            fail(rep, FailReason::negativity, os.str());
            return rep;
        }

    for (size_t i = 0; i < members.size(); ++i)
        if (!members[i].second.normalized()) {
            std::ostringstream os;
            os << "member " << i << " (param " << members[i].first
               << ") has normalization error " << rep.normalization_errors[i];
            fail(rep, FailReason::normalization, os.str());
            return rep;
        }

    for (const ConditionCheck& c : rep.condition_checks)
        if (!c.pass) {
            std::ostringstream os;
            os << "condition check '" << c.name << "' failed with value "
               << c.value;
            fail(rep, FailReason::condition_check, os.str());
            return rep;
        }

    return rep;
}

std::vector<double> two_path_moment_check(const DensityFunction& P,
                                          const CharFn& M, int n_max) {
    const int cap = std::min(n_max, 4);
    MomentVector from_density = moments_from_density(P, cap);
    MomentVector from_charfun = moments_from_charfun(M, cap);
    std::vector<double> residuals(cap + 1);
    for (int n = 0; n <= cap; ++n)
        residuals[n] =
            std::abs(from_density.values[n] - from_charfun.values[n]);
    return residuals;
}

} // namespace mindet
