#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mindet/charfun.hpp"

namespace mindet {

enum class FamilyKind { stieltjes, operator_flow };

enum class Verdict { m_indeterminate_confirmed, failed };

// gates, in the order they are evaluated
enum class FailReason {
    none,
    moment_spread,
    distinctness,
    negativity,
    normalization,
    condition_check,
};

const char* to_string(FamilyKind k);
const char* to_string(Verdict v);
const char* to_string(FailReason r);

struct VerificationReport {
    FamilyKind family_kind = FamilyKind::stieltjes;
    int n_max = 0;
    std::vector<double> params;               // member parameters, in order
    std::vector<MomentVector> moment_table;   // one row per member
    std::vector<double> max_moment_spread;    // per order: max - min
    std::vector<double> spread_tolerance;     // per order: tol_n of member 0
    double min_pairwise_l1 = 0.0;             // +inf for a single member
    double distinctness_threshold = 0.0;
    std::vector<double> normalization_errors; // per member
    std::vector<double> negativity_worst;     // per member, <= 0
    std::vector<ConditionCheck> condition_checks;
    Verdict verdict = Verdict::failed;
    FailReason fail_reason = FailReason::none;
    std::string fail_detail; // first failing gate, with its value
};

// Verdict is confirmed iff the per-order moment spread stays within tol_n,
// the members are pairwise distinct in L1, every member is a valid density,
// and every folded-in builder check passed. Gates are evaluated in the
// FailReason order above and the first failure wins.
VerificationReport
verify_family(FamilyKind kind,
              const std::vector<std::pair<double, DensityFunction>>& members,
              int n_max, double distinctness_threshold = 1e-3,
              std::vector<ConditionCheck> extra_checks = {});

// |m_n from P - m_n from M| for n = 0..min(n_max, 4); the charfun route
// differentiates at 0, so only low orders are comparable
std::vector<double> two_path_moment_check(const DensityFunction& P,
                                          const CharFn& M, int n_max);

} // namespace mindet
