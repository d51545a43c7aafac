#pragma once

#include <complex>
#include <vector>

#include "mindet/errors.hpp"

namespace mindet {

using cplx = std::complex<double>;

// Uniform grid of n_points midpoint samples on [x_min, x_max]:
//   x_j = x_min + (j + 1/2) dx,   dx = (x_max - x_min) / n_points.
// Midpoint sampling makes sum(v_j) dx exact for constants and exactly zero
// for odd functions on symmetric intervals, and keeps dx * n equal to the
// interval length with no endpoint double-counting.
struct Grid {
    double x_min = 0.0;
    double x_max = 1.0;
    int n_points = 8;

    Grid() = default;
    Grid(double x_min_, double x_max_, int n_points_);

    double dx() const { return (x_max - x_min) / n_points; }
    double point(int j) const { return x_min + (j + 0.5) * dx(); }
    int size() const { return n_points; }
    double length() const { return x_max - x_min; }

    std::vector<double> points() const;

    // symmetric grid on [-half_span, half_span]
    static Grid centered(double half_span, int n_points);

    // grid with the given spacing whose samples are exactly the integer
    // multiples (j - n/2) * spacing, so 0 is always a sample
    static Grid zero_aligned(double spacing, int n_points);

    bool same_as(const Grid& other, double rtol = 1e-12) const;

    // index j with |point(j)| <= dx/2 rounding error, i.e. 0 is a sample
    bool has_zero_sample() const;
    int zero_index() const; // GridMismatch if 0 is not a sample
};

void require_same_grid(const Grid& a, const Grid& b, const char* where);

// complex-valued samples on a grid
struct GridFunction {
    Grid grid;
    std::vector<cplx> values;

    GridFunction() = default;
    GridFunction(Grid g, std::vector<cplx> v);

    int size() const { return grid.n_points; }
};

GridFunction real_grid_function(const Grid& g, const std::vector<double>& v);

// real, nonnegative, unit-mass samples. The `checked` factory enforces the
// invariants; `measured` records violations without throwing so that broken
// inputs can still be handed to the verification gates.
struct DensityFunction {
    Grid grid;
    std::vector<double> values;
    double norm_error = 0.0;     // |integral - 1|
    double worst_negative = 0.0; // most negative sample (<= 0)
    double max_value = 0.0;

    static DensityFunction checked(Grid g, std::vector<double> v,
                                   double norm_tol = 1e-8,
                                   double neg_tol_rel = 1e-12);
    static DensityFunction measured(Grid g, std::vector<double> v);

    int size() const { return grid.n_points; }
    bool normalized(double tol = 1e-8) const { return norm_error <= tol; }
    bool nonnegative(double tol_rel = 1e-12) const {
        return -worst_negative <= tol_rel * max_value;
    }
};

// characteristic-function samples M(theta) on a theta-grid that contains 0.
// Invariants: M(0) = 1, |M| <= 1, Hermitian symmetry M(-t) = conj(M(t))
// wherever -t is also a sample.
struct CharFn {
    Grid grid;
    std::vector<cplx> values;
    double worst_hermitian_error = 0.0;
    double worst_modulus_excess = 0.0;

    static CharFn checked(Grid g, std::vector<cplx> v, double tol = 1e-8);
    static CharFn measured(Grid g, std::vector<cplx> v);

    int size() const { return grid.n_points; }
    int zero_index() const { return grid.zero_index(); }
    cplx at_zero() const { return values[grid.zero_index()]; }
};

// compensated (Neumaier) summation; deterministic left-to-right order
double compensated_sum(const std::vector<double>& terms);
cplx compensated_sum(const std::vector<cplx>& terms);

double integrate(const Grid& g, const std::vector<double>& v);
cplx integrate(const GridFunction& f);
double integrate(const DensityFunction& p);

// <f, g> = integral conj(f) g  (conjugate-linear in the first slot)
cplx inner_product(const GridFunction& f, const GridFunction& g);
double norm_l2(const GridFunction& f);

// direct-sum transform between arbitrary grids:
//   out(k_m) = scale * dx * sum_j v_j exp(i sign k_m x_j)
GridFunction dft_sum(const GridFunction& f, const Grid& target, int sign,
                     double scale);

// unnormalized DFT of a raw sample vector: out_m = sum_j v_j e^{sign*i*2pi*jm/n}
std::vector<cplx> dft_bins(const std::vector<cplx>& v, int sign);

// unitary-convention pair: kernel exp(-ikx)/sqrt(2pi) and its inverse
GridFunction fourier_transform(const GridFunction& f, const Grid& k_grid);
GridFunction inverse_fourier_transform(const GridFunction& f,
                                       const Grid& x_grid);

// FFT differentiation of the trigonometric interpolant; for odd orders the
// Nyquist bin is zeroed so the operator stays exactly anti-Hermitian.
// Throws EdgeSupport if the outermost cells carry mass above edge_tol
// relative to the max modulus (periodic wraparound would corrupt the result).
GridFunction spectral_derivative(const GridFunction& f, int order,
                                 double edge_tol = 1e-12);

enum class Metric { l1, linf };

double distance(const GridFunction& a, const GridFunction& b, Metric m);
double distance(const DensityFunction& a, const DensityFunction& b, Metric m);

} // namespace mindet
