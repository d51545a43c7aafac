#pragma once

#include <string>

#include "mindet/charfun.hpp"
#include "mindet/generators.hpp"

namespace mindet {

struct StieltjesFamilySpec {
    BumpSpec generator;
    double lambda = 2.5; // perturbation frequency, must exceed the extent
    double phi = 0.0;    // perturbation phase, in [-pi, pi]
    std::vector<double> epsilons = {-1.0, -0.5, 0.0, 0.5, 1.0};
    int n_max = 8;
    // building a family that violates the extent condition is allowed only
    // explicitly, for negative-control diagnostics
    bool enforce_extent_condition = true;
};

struct ExtentConditionReport {
    double extent = 0.0;
    double margin = 0.0;
    bool pass = false;
};

struct StieltjesFamily {
    GridFunction generator;       // f on the x grid
    CharFn charfun;               // M0 on the theta grid
    DensityFunction base_density; // P0 on the r grid
    double extent = 0.0;          // L-hat of M0
    double lambda = 0.0;
    double phi = 0.0;
    int n_max = 0;
    std::vector<double> epsilons;
    std::vector<DensityFunction> members; // aligned with epsilons
    std::vector<ConditionCheck> condition_checks;
};

// optional overrides for the derived grids; defaults: theta zero-aligned at
// x spacing with the x point count, r centered on [-W, W] with the same
// point count, W = min(512, pi/dx) so the window stays clear of the alias
// images of the sampled generator
struct StieltjesGrids {
    Grid theta_grid;
    bool have_theta = false;
    Grid r_grid;
    bool have_r = false;
};

StieltjesFamily build_stieltjes_family(const StieltjesFamilySpec& spec,
                                       const Grid& grid);
StieltjesFamily build_stieltjes_family(const StieltjesFamilySpec& spec,
                                       const Grid& grid,
                                       const StieltjesGrids& grids);

// q_n = integral x^n P0(x) cos(lambda x + phi) dx, n = 0..n_max: the
// pre-integration-by-parts form of the moment-independence condition
std::vector<double> q_derivatives_at_zero(const DensityFunction& P0,
                                          double lambda, double phi,
                                          int n_max);

ExtentConditionReport verify_finite_extent_condition(const CharFn& M0,
                                                     double lambda);

// secondary entry for arbitrary bounded h: checks |h| <= 1 sample-wise and
// gates on q_derivatives against the base density's tolerance schedule
// instead of assuming validity
std::vector<DensityFunction>
stieltjes_members_from_h(const DensityFunction& P0,
                         const std::vector<double>& h,
                         const std::vector<double>& epsilons, int n_max);

} // namespace mindet
