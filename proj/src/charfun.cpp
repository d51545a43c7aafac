#include "mindet/charfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace mindet {

double moment_tolerance(const MomentVector& ref, int n, double atol,
                        double rtol) {
    if (n < 0 || n > ref.n_max)
        throw OrderTooHigh("moment_tolerance: order " + std::to_string(n) +
                           " outside reference vector");
    return atol * std::pow(ref.sigma_ref, n) + rtol * std::abs(ref.values[n]);
}

CharFn autocorrelation_charfun(const GridFunction& f, const Grid& theta_grid) {
    const Grid& g = f.grid;
    const double dx = g.dx();
    if (std::abs(theta_grid.dx() - dx) > 1e-12 * dx)
        throw GridIncompatible(
            "autocorrelation_charfun: theta spacing must equal x spacing");
    const int n = g.n_points;
    std::vector<cplx> M(theta_grid.n_points);
    std::vector<cplx> terms;
    terms.reserve(n);
    for (int k = 0; k < theta_grid.n_points; ++k) {
        double ratio = theta_grid.point(k) / dx;
        long s = std::lround(ratio);
        if (std::abs(ratio - static_cast<double>(s)) > 1e-9)
            throw GridIncompatible(
                "autocorrelation_charfun: theta sample is not a whole number "
                "of cells; use a zero-aligned theta grid");
        terms.clear();
        if (std::llabs(s) >= n) {
            M[k] = 0.0;
            continue;
        }
        // shift by s cells with zero fill, so |theta| beyond the support
        // width meets hard zeros and the sum is exactly 0
        long lo = std::max<long>(0, -s);
        long hi = std::min<long>(n, n - s);
        for (long j = lo; j < hi; ++j)
            terms.push_back(std::conj(f.values[j]) * f.values[j + s]);
        M[k] = compensated_sum(terms) * dx;
    }
    return CharFn::checked(theta_grid, std::move(M), 1e-8);
}

DensityFunction density_from_charfun(const CharFn& M, const Grid& r_grid) {
    const double two_pi = 2.0 * std::numbers::pi;
    GridFunction Mf(M.grid, M.values);
    GridFunction out = dft_sum(Mf, r_grid, -1, 1.0 / two_pi);
    double imag_residue = 0.0;
    std::vector<double> re(out.size());
    for (int j = 0; j < out.size(); ++j) {
        imag_residue = std::max(imag_residue, std::abs(out.values[j].imag()));
        re[j] = out.values[j].real();
    }
    if (imag_residue > 1e-9) {
        std::ostringstream os;
        os << "inverse transform has imaginary residue " << imag_residue
           << "; charfun is inconsistent or truncated";
        throw NotADensity(os.str());
    }
    return DensityFunction::checked(r_grid, std::move(re));
}

CharFn charfun_from_density(const DensityFunction& P, const Grid& theta_grid) {
    GridFunction Pf = real_grid_function(P.grid, P.values);
    GridFunction out = dft_sum(Pf, theta_grid, +1, 1.0);
    return CharFn::checked(theta_grid, std::move(out.values), 1e-8);
}

double support_extent(const CharFn& M, double drop_tol) {
    if (drop_tol < 0.0)
        throw Error("support_extent: drop_tol must be >= 0");
    const int n = M.grid.n_points;
    double peak = 0.0;
    for (const cplx& z : M.values) peak = std::max(peak, std::abs(z));
    const double threshold = drop_tol * peak;
    auto above = [&](int j) {
        double a = std::abs(M.values[j]);
        return threshold > 0.0 ? a >= threshold : a != 0.0;
    };
    if (above(0) || above(n - 1)) {
        std::ostringstream os;
        os << "|M| has not dropped below " << drop_tol
           << " of its peak at the theta-grid edge";
        throw NoCompactSupport(os.str());
    }
    double extent = 0.0;
    for (int j = 0; j < n; ++j)
        if (above(j)) extent = std::max(extent, std::abs(M.grid.point(j)));
    return extent;
}

MomentVector moments_from_density(const DensityFunction& P, int n_max) {
    if (n_max < 0 || n_max > 12)
        throw OrderTooHigh("moments_from_density: n_max " +
                           std::to_string(n_max) + " outside [0, 12]");
    MomentVector mv;
    mv.n_max = n_max;
    mv.values.resize(n_max + 1);
    const int n = P.grid.n_points;
    std::vector<double> terms(n);
    std::vector<double> xpow(n, 1.0);
    for (int k = 0; k <= n_max; ++k) {
        for (int j = 0; j < n; ++j) terms[j] = xpow[j] * P.values[j];
        mv.values[k] = compensated_sum(terms) * P.grid.dx();
        if (k < n_max)
            for (int j = 0; j < n; ++j) xpow[j] *= P.grid.point(j);
    }
    if (n_max >= 2) {
        double var = mv.values[2] - mv.values[1] * mv.values[1];
        mv.sigma_ref = std::sqrt(std::max(var, 0.0));
    }
    return mv;
}

namespace {

// second-order central stencil for the k-th derivative at 0, step h given as
// a whole number of theta-grid cells
cplx central_stencil(const CharFn& M, int order, int step_cells) {
    const int j0 = M.grid.zero_index();
    const double h = step_cells * M.grid.dx();
    auto at = [&](int cells) -> cplx {
        int j = j0 + cells * step_cells;
        if (j < 0 || j >= M.grid.n_points)
            throw GridIncompatible(
                "moments_from_charfun: stencil leaves the theta grid");
        return M.values[j];
    };
    switch (order) {
    case 0:
        return at(0);
    case 1:
        return (at(1) - at(-1)) / (2.0 * h);
    case 2:
        return (at(1) - 2.0 * at(0) + at(-1)) / (h * h);
    case 3:
        return (at(2) - 2.0 * at(1) + 2.0 * at(-1) - at(-2)) /
               (2.0 * h * h * h);
    case 4:
        return (at(2) - 4.0 * at(1) + 6.0 * at(0) - 4.0 * at(-1) + at(-2)) /
               (h * h * h * h);
    default:
        throw OrderTooHigh("central_stencil: order above 4");
    }
}

} // namespace

MomentVector moments_from_charfun(const CharFn& M, int n_max) {
    if (n_max < 0 || n_max > 4)
        throw OrderTooHigh("moments_from_charfun: n_max " +
                           std::to_string(n_max) +
                           " outside [0, 4] (finite differencing of higher "
                           "orders is ill-conditioned)");
    MomentVector mv;
    mv.n_max = n_max;
    mv.values.resize(n_max + 1);
    const cplx minus_i(0.0, -1.0);
    for (int k = 0; k <= n_max; ++k) {
        cplx d1 = central_stencil(M, k, 1);
        cplx d2 = central_stencil(M, k, 2);
        cplx richardson = (4.0 * d1 - d2) / 3.0;
        cplx mk = richardson;
        for (int p = 0; p < k; ++p) mk *= minus_i;
        if (std::abs(mk.imag()) > 1e-6) {
            std::ostringstream os;
            os << "moment " << k << " from charfun has imaginary residue "
               << mk.imag();
            throw Error(os.str());
        }
        mv.values[k] = mk.real();
    }
    if (n_max >= 2) {
        double var = mv.values[2] - mv.values[1] * mv.values[1];
        mv.sigma_ref = std::sqrt(std::max(var, 0.0));
    }
    return mv;
}

} // namespace mindet
