#pragma once

#include "mindet/grid.hpp"

#include <string>

namespace mindet {

struct MomentVector {
    int n_max = 0;
    std::vector<double> values; // E[X^n] for n = 0..n_max
    // sqrt(m2 - m1^2) of the density these moments came from; scales the
    // per-order tolerance
    double sigma_ref = 0.0;
};

// one named diagnostic from a family builder, e.g. an extent margin or a
// reconstruction residual
struct ConditionCheck {
    std::string name;
    bool pass = false;
    double value = 0.0;
};

// tol_n = atol * sigma^n + rtol * |m_n| of the reference vector
double moment_tolerance(const MomentVector& ref, int n, double atol = 1e-8,
                        double rtol = 1e-6);

// M(theta) = integral conj(f(x)) f(x + theta) dx, theta on a grid whose
// spacing equals the x spacing so every shift is a whole number of cells
CharFn autocorrelation_charfun(const GridFunction& f, const Grid& theta_grid);

// P(r) = (1/2pi) integral M(theta) e^{-i theta r} dtheta
DensityFunction density_from_charfun(const CharFn& M, const Grid& r_grid);

// M(theta) = integral P(r) e^{+i theta r} dr
CharFn charfun_from_density(const DensityFunction& P, const Grid& theta_grid);

// smallest theta0 with |M| below drop_tol * max|M| outside [-theta0, theta0];
// drop_tol = 0 scans for exact zeros
double support_extent(const CharFn& M, double drop_tol = 1e-10);

// quadrature of r^n P(r); n_max capped at 12
MomentVector moments_from_density(const DensityFunction& P, int n_max);

// (1/i)^n d^n/dtheta^n M at 0 via central differences with one Richardson
// step (steps dtheta and 2 dtheta); n_max capped at 4
MomentVector moments_from_charfun(const CharFn& M, int n_max);

} // namespace mindet
