#include "mindet/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

namespace mindet {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

std::string grid_str(const Grid& g) {
    std::ostringstream os;
    os << "[" << g.x_min << ", " << g.x_max << "] n=" << g.n_points;
    return os.str();
}

} // namespace

Grid::Grid(double x_min_, double x_max_, int n_points_)
    : x_min(x_min_), x_max(x_max_), n_points(n_points_) {
    if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_min < x_max))
        throw GridMismatch("grid interval must be finite with x_min < x_max");
    if (!is_power_of_two(n_points) || n_points < 8)
        throw GridMismatch("n_points must be a power of two >= 8, got " +
                           std::to_string(n_points));
}

std::vector<double> Grid::points() const {
    std::vector<double> xs(n_points);
    for (int j = 0; j < n_points; ++j) xs[j] = point(j);
    return xs;
}

Grid Grid::centered(double half_span, int n_points) {
    return Grid(-half_span, half_span, n_points);
}

Grid Grid::zero_aligned(double spacing, int n_points) {
    if (!(spacing > 0.0) || !std::isfinite(spacing))
        throw GridMismatch("zero_aligned spacing must be positive");
    double lo = -(n_points / 2 + 0.5) * spacing;
    return Grid(lo, lo + n_points * spacing, n_points);
}

bool Grid::same_as(const Grid& other, double rtol) const {
    if (n_points != other.n_points) return false;
    double scale = std::max({std::abs(x_min), std::abs(x_max), 1.0});
    return std::abs(x_min - other.x_min) <= rtol * scale &&
           std::abs(x_max - other.x_max) <= rtol * scale;
}

bool Grid::has_zero_sample() const {
    double j = -x_min / dx() - 0.5;
    double jr = std::round(j);
    if (jr < 0 || jr >= n_points) return false;
    return std::abs(j - jr) <= 1e-9;
}

int Grid::zero_index() const {
    if (!has_zero_sample())
        throw GridMismatch("grid " + grid_str(*this) +
                           " has no sample at 0; use Grid::zero_aligned");
    return static_cast<int>(std::round(-x_min / dx() - 0.5));
}

void require_same_grid(const Grid& a, const Grid& b, const char* where) {
    if (!a.same_as(b))
        throw GridMismatch(std::string(where) + ": grids differ, " +
                           grid_str(a) + " vs " + grid_str(b));
}

GridFunction::GridFunction(Grid g, std::vector<cplx> v)
    : grid(g), values(std::move(v)) {
    if (static_cast<int>(values.size()) != grid.n_points)
        throw GridMismatch("GridFunction: " + std::to_string(values.size()) +
                           " values on grid with n_points=" +
                           std::to_string(grid.n_points));
    for (const cplx& z : values)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw Error("GridFunction: non-finite sample");
}

GridFunction real_grid_function(const Grid& g, const std::vector<double>& v) {
    std::vector<cplx> z(v.size());
    for (size_t j = 0; j < v.size(); ++j) z[j] = cplx(v[j], 0.0);
    return GridFunction(g, std::move(z));
}

DensityFunction DensityFunction::measured(Grid g, std::vector<double> v) {
    if (static_cast<int>(v.size()) != g.n_points)
        throw GridMismatch("DensityFunction: value count does not match grid");
    for (double x : v)
        if (!std::isfinite(x)) throw NotADensity("non-finite sample");
    DensityFunction p;
    p.grid = g;
    p.values = std::move(v);
    double mn = p.values[0], mx = p.values[0];
    for (double x : p.values) {
        mn = std::min(mn, x);
        mx = std::max(mx, x);
    }
    p.worst_negative = std::min(mn, 0.0);
    p.max_value = mx;
    p.norm_error = std::abs(integrate(g, p.values) - 1.0);
    return p;
}

DensityFunction DensityFunction::checked(Grid g, std::vector<double> v,
                                         double norm_tol, double neg_tol_rel) {
    DensityFunction p = measured(g, std::move(v));
    if (-p.worst_negative > neg_tol_rel * p.max_value) {
        std::ostringstream os;
        os << "density has negative sample " << p.worst_negative
           << " (max " << p.max_value << ")";
        throw NotADensity(os.str());
    }
    if (p.norm_error > norm_tol) {
        std::ostringstream os;
        os << "density norm error " << p.norm_error << " exceeds " << norm_tol;
        throw NotADensity(os.str());
    }
    return p;
}

namespace {

void charfn_stats(CharFn& m) {
    int n = m.grid.n_points;
    int j0 = m.grid.zero_index();
    double herm = 0.0, excess = 0.0;
    for (int j = 0; j < n; ++j) {
        excess = std::max(excess, std::abs(m.values[j]) - 1.0);
        int jm = 2 * j0 - j; // index of -theta_j when it is on the grid
        if (jm >= 0 && jm < n)
            herm = std::max(herm,
                            std::abs(m.values[j] - std::conj(m.values[jm])));
    }
    m.worst_hermitian_error = herm;
    m.worst_modulus_excess = std::max(excess, 0.0);
}

} // namespace

CharFn CharFn::measured(Grid g, std::vector<cplx> v) {
    if (static_cast<int>(v.size()) != g.n_points)
        throw GridMismatch("CharFn: value count does not match grid");
    if (!g.has_zero_sample())
        throw GridIncompatible("CharFn grid must contain theta = 0");
    for (const cplx& z : v)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw CharFnInvalid("non-finite sample");
    CharFn m;
    m.grid = g;
    m.values = std::move(v);
    charfn_stats(m);
    return m;
}

CharFn CharFn::checked(Grid g, std::vector<cplx> v, double tol) {
    CharFn m = measured(g, std::move(v));
    cplx z0 = m.at_zero();
    if (std::abs(z0 - 1.0) > tol) {
        std::ostringstream os;
        os << "M(0) = " << z0.real() << (z0.imag() < 0 ? "-" : "+")
           << std::abs(z0.imag()) << "i, not 1 within " << tol;
        throw CharFnInvalid(os.str());
    }
    if (m.worst_modulus_excess > tol) {
        std::ostringstream os;
        os << "|M| exceeds 1 by " << m.worst_modulus_excess;
        throw CharFnInvalid(os.str());
    }
    if (m.worst_hermitian_error > tol) {
        std::ostringstream os;
        os << "Hermitian symmetry violated by " << m.worst_hermitian_error;
        throw CharFnInvalid(os.str());
    }
    return m;
}

double compensated_sum(const std::vector<double>& terms) {
    // Neumaier variant: exact when partial sums stay in range
    double s = 0.0, c = 0.0;
    for (double x : terms) {
        double t = s + x;
        if (std::abs(s) >= std::abs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    return s + c;
}

cplx compensated_sum(const std::vector<cplx>& terms) {
    double sr = 0.0, cr = 0.0, si = 0.0, ci = 0.0;
    for (const cplx& z : terms) {
        double x = z.real();
        double t = sr + x;
        if (std::abs(sr) >= std::abs(x))
            cr += (sr - t) + x;
        else
            cr += (x - t) + sr;
        sr = t;
        double y = z.imag();
        double u = si + y;
        if (std::abs(si) >= std::abs(y))
            ci += (si - u) + y;
        else
            ci += (y - u) + si;
        si = u;
    }
    return cplx(sr + cr, si + ci);
}

double integrate(const Grid& g, const std::vector<double>& v) {
    if (static_cast<int>(v.size()) != g.n_points)
        throw GridMismatch("integrate: value count does not match grid");
    return compensated_sum(v) * g.dx();
}

cplx integrate(const GridFunction& f) {
    return compensated_sum(f.values) * f.grid.dx();
}

double integrate(const DensityFunction& p) {
    return integrate(p.grid, p.values);
}

cplx inner_product(const GridFunction& f, const GridFunction& g) {
    require_same_grid(f.grid, g.grid, "inner_product");
    std::vector<cplx> terms(f.values.size());
    for (size_t j = 0; j < terms.size(); ++j)
        terms[j] = std::conj(f.values[j]) * g.values[j];
    return compensated_sum(terms) * f.grid.dx();
}

double norm_l2(const GridFunction& f) {
    return std::sqrt(std::abs(inner_product(f, f)));
}

GridFunction dft_sum(const GridFunction& f, const Grid& target, int sign,
                     double scale) {
    if (sign != 1 && sign != -1)
        throw Error("dft_sum: sign must be +1 or -1");
    const int ns = f.grid.n_points;
    const int nt = target.n_points;
    const double dx = f.grid.dx();
    std::vector<cplx> out(nt);
    std::vector<cplx> terms(ns);
    for (int m = 0; m < nt; ++m) {
        const double k = target.point(m);
        const cplx step = std::polar(1.0, sign * k * dx);
        cplx ph = std::polar(1.0, sign * k * f.grid.point(0));
        for (int j = 0; j < ns; ++j) {
            // resync the running phasor periodically so rounding in the
            // repeated multiply cannot accumulate past ~1e-14
            if ((j & 63) == 0 && j != 0)
                ph = std::polar(1.0, sign * k * f.grid.point(j));
            terms[j] = f.values[j] * ph;
            ph *= step;
        }
        out[m] = compensated_sum(terms) * (scale * dx);
    }
    return GridFunction(target, std::move(out));
}

GridFunction fourier_transform(const GridFunction& f, const Grid& k_grid) {
    const double scale = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    return dft_sum(f, k_grid, -1, scale);
}

GridFunction inverse_fourier_transform(const GridFunction& f,
                                       const Grid& x_grid) {
    const double scale = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    return dft_sum(f, x_grid, +1, scale);
}

namespace {
std::mutex fftw_mutex; // FFTW planning is not thread-safe
}

std::vector<cplx> dft_bins(const std::vector<cplx>& v, int sign) {
    if (sign != 1 && sign != -1) throw Error("dft_bins: sign must be +-1");
    std::vector<cplx> buf(v);
    std::lock_guard<std::mutex> lock(fftw_mutex);
    fftw_plan plan = fftw_plan_dft_1d(
        static_cast<int>(buf.size()),
        reinterpret_cast<fftw_complex*>(buf.data()),
        reinterpret_cast<fftw_complex*>(buf.data()),
        sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    return buf;
}

GridFunction spectral_derivative(const GridFunction& f, int order,
                                 double edge_tol) {
    if (order < 0) throw Error("spectral_derivative: negative order");
    if (order == 0) return f;
    const int n = f.grid.n_points;
    double peak = 0.0;
    for (const cplx& z : f.values) peak = std::max(peak, std::abs(z));
    double edge = std::max(std::abs(f.values[0]), std::abs(f.values[n - 1]));
    if (peak > 0.0 && edge > edge_tol * peak) {
        std::ostringstream os;
        os << "edge samples carry " << edge / peak
           << " of the peak modulus (tol " << edge_tol
           << "); periodic differentiation would wrap";
        throw EdgeSupport(os.str());
    }

    std::vector<cplx> buf(f.values);
    {
        std::lock_guard<std::mutex> lock(fftw_mutex);
        fftw_plan fwd = fftw_plan_dft_1d(
            n, reinterpret_cast<fftw_complex*>(buf.data()),
            reinterpret_cast<fftw_complex*>(buf.data()), FFTW_FORWARD,
            FFTW_ESTIMATE);
        fftw_execute(fwd);
        fftw_destroy_plan(fwd);
    }

    const double dk = 2.0 * std::numbers::pi / (n * f.grid.dx());
    for (int m = 0; m < n; ++m) {
        double k = dk * (m < n / 2 ? m : m - n);
        if (order % 2 == 1 && m == n / 2) {
            // the Nyquist mode has no signed frequency; dropping it keeps
            // odd-order differentiation exactly anti-Hermitian
            buf[m] = 0.0;
            continue;
        }
        cplx ik(0.0, k);
        cplx mult = 1.0;
        for (int p = 0; p < order; ++p) mult *= ik;
        buf[m] *= mult;
    }

    {
        std::lock_guard<std::mutex> lock(fftw_mutex);
        fftw_plan bwd = fftw_plan_dft_1d(
            n, reinterpret_cast<fftw_complex*>(buf.data()),
            reinterpret_cast<fftw_complex*>(buf.data()), FFTW_BACKWARD,
            FFTW_ESTIMATE);
        fftw_execute(bwd);
        fftw_destroy_plan(bwd);
    }
    const double inv_n = 1.0 / n;
    for (cplx& z : buf) z *= inv_n;
    return GridFunction(f.grid, std::move(buf));
}

double distance(const GridFunction& a, const GridFunction& b, Metric m) {
    require_same_grid(a.grid, b.grid, "distance");
    if (m == Metric::linf) {
        double d = 0.0;
        for (size_t j = 0; j < a.values.size(); ++j)
            d = std::max(d, std::abs(a.values[j] - b.values[j]));
        return d;
    }
    std::vector<double> terms(a.values.size());
    for (size_t j = 0; j < terms.size(); ++j)
        terms[j] = std::abs(a.values[j] - b.values[j]);
    return compensated_sum(terms) * a.grid.dx();
}

double distance(const DensityFunction& a, const DensityFunction& b, Metric m) {
    require_same_grid(a.grid, b.grid, "distance");
    if (m == Metric::linf) {
        double d = 0.0;
        for (size_t j = 0; j < a.values.size(); ++j)
            d = std::max(d, std::abs(a.values[j] - b.values[j]));
        return d;
    }
    std::vector<double> terms(a.values.size());
    for (size_t j = 0; j < terms.size(); ++j)
        terms[j] = std::abs(a.values[j] - b.values[j]);
    return compensated_sum(terms) * a.grid.dx();
}

} // namespace mindet
