#pragma once

#include <vector>

#include "mindet/charfun.hpp"
#include "mindet/generators.hpp"

namespace mindet {

enum class OperatorKind { translation, gauged_translation };

// A = (1/i) d/dx, optionally plus the gauge potential c(power+1)x^power
struct OperatorSpec {
    OperatorKind kind = OperatorKind::translation;
    double c = 0.0; // gauge strength, ignored for translation
    int power = 1;  // gauge exponent, >= 1
};

// (1/i) f' (+ potential term); support must stay inside the input support
GridFunction apply_operator(const OperatorSpec& op, const GridFunction& f);

// n-fold composition of apply_operator; n = 0 is the identity, n capped at 12
GridFunction apply_power(const OperatorSpec& op, const GridFunction& f, int n);

// e^{i theta A} f. theta must be a whole number of cells; a flow that would
// carry support across the grid edge is rejected, not wrapped
GridFunction evolve(const OperatorSpec& op, const GridFunction& f,
                    double theta);

// same flow through a dense eigendecomposition of the discretized operator;
// independent of evolve's closed form, grid capped at 2048 points
GridFunction evolve_oracle(const OperatorSpec& op, const GridFunction& f,
                           double theta);

// M_A(theta) = <f, e^{i theta A} f> on a theta grid with the x spacing
CharFn operator_charfun(const OperatorSpec& op, const GridFunction& f,
                        const Grid& theta_grid);

// the four bilinears M_lm(theta) = <f_l, e^{i theta A} f_m> plus the
// assembled M_A for one beta; assembly is checked against the directly
// computed charfun of f1 + e^{i beta} f2
struct CrossComponents {
    GridFunction m11, m22, m12, m21;
    CharFn assembled;
    double assembly_error = 0.0; // worst sample-wise deviation from direct
};

CrossComponents cross_charfun_components(const OperatorSpec& op,
                                         const GridFunction& f1,
                                         const GridFunction& f2, double beta,
                                         const Grid& theta_grid);

// |<f1, A^n f2>| and |<f2, A^n f1>| for n = 0..n_max, estimated from
// finite differences of the cross charfuns at theta = 0 (exact zeros for
// hard-zero disjoint supports)
struct CrossTermReport {
    std::vector<double> forward;  // |<f1, A^n f2>|
    std::vector<double> backward; // |<f2, A^n f1>|
    double worst = 0.0;
};

CrossTermReport operator_cross_terms(const OperatorSpec& op,
                                     const GridFunction& f1,
                                     const GridFunction& f2, int n_max);

// E[R^n] = <f1, A^n f1> + <f2, A^n f2> after checking the cross terms are
// negligible; beta-independent by construction
MomentVector operator_moments(const OperatorSpec& op, const GridFunction& f1,
                              const GridFunction& f2, double beta, int n_max);

// |<Af, g> - <f, Ag>|
double check_self_adjoint(const OperatorSpec& op, const GridFunction& f,
                          const GridFunction& g);

struct OperatorFamilySpec {
    Grid x_grid;
    DisjointPairSpec pair;
    OperatorSpec op;
    std::vector<double> betas = {0.0};
    int n_max = 8;
    // optional overrides; defaults: theta zero-aligned at the x spacing with
    // the x point count, r centered on [-128, 128] with the x point count
    Grid theta_grid;
    bool have_theta_grid = false;
    Grid r_grid;
    bool have_r_grid = false;
};

struct OperatorFamilyMember {
    double beta = 0.0;
    CharFn charfun;
    DensityFunction density;
};

struct OperatorFamily {
    GridFunction f1, f2;
    OperatorSpec op;
    int n_max = 0;
    std::vector<OperatorFamilyMember> members;
    // beta-independent charfun components on the theta grid
    GridFunction m11, m22, m12, m21;
    MomentVector operator_route_moments;
    std::vector<MomentVector> density_route_moments; // one per member
    CrossTermReport cross_terms;
    std::vector<ConditionCheck> condition_checks;
};

OperatorFamily build_operator_family(const OperatorFamilySpec& spec);

} // namespace mindet
