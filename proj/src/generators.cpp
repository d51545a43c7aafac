#include "mindet/generators.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace mindet {

namespace {

double profile(double u, const BumpSpec& spec) {
    // hard zeros outside the open support: the disjoint-support algebra
    // downstream relies on exact sample-wise zeros, not underflowed tails
    if (!(std::abs(u) < 1.0)) return 0.0;
    if (spec.kind == BumpKind::standard_bump)
        return std::exp(-1.0 / (1.0 - u * u));
    double c = std::cos(0.5 * std::numbers::pi * u);
    double out = 1.0;
    for (int k = 0; k < spec.power; ++k) out *= c;
    return out;
}

void validate(const BumpSpec& spec) {
    if (!(spec.half_width > 0.0))
        throw Error("BumpSpec: half_width must be positive");
    if (spec.kind == BumpKind::cosine_power_bump && spec.power < 4)
        throw Error("BumpSpec: cosine power must be >= 4");
    if (std::abs(std::abs(spec.amplitude_phase) - 1.0) > 1e-12)
        throw Error("BumpSpec: amplitude_phase must have unit modulus");
}

void check_padding(const BumpSpec& spec, const Grid& grid) {
    // supports live in the central quarter of the grid so the periodic
    // transforms downstream see >= 4x padding
    double len = grid.length();
    double lo = grid.x_min + 0.375 * len;
    double hi = grid.x_max - 0.375 * len;
    double slack = 1e-12 * len;
    if (spec.center - spec.half_width < lo - slack ||
        spec.center + spec.half_width > hi + slack) {
        std::ostringstream os;
        os << "bump support [" << spec.center - spec.half_width << ", "
           << spec.center + spec.half_width
           << "] exceeds the central quarter [" << lo << ", " << hi
           << "] of the grid";
        throw SupportOverflow(os.str());
    }
}

// raw samples scaled so the grid quadrature of the squared modulus is
// `target`; phase applied afterwards
GridFunction normalized_bump(const BumpSpec& spec, const Grid& grid,
                             double target) {
    validate(spec);
    check_padding(spec, grid);
    const int n = grid.n_points;
    std::vector<double> raw(n);
    for (int j = 0; j < n; ++j)
        raw[j] = profile((grid.point(j) - spec.center) / spec.half_width, spec);
    std::vector<double> sq(n);
    for (int j = 0; j < n; ++j) sq[j] = raw[j] * raw[j];
    double s = integrate(grid, sq);
    if (!(s > 0.0))
        throw Error("bump support contains no grid samples");
    double scale = std::sqrt(target / s);
    std::vector<cplx> v(n);
    for (int j = 0; j < n; ++j)
        v[j] = raw[j] == 0.0 ? cplx(0.0) : spec.amplitude_phase * (scale * raw[j]);
    return GridFunction(grid, std::move(v));
}

} // namespace

GridFunction make_bump(const BumpSpec& spec, const Grid& grid) {
    return normalized_bump(spec, grid, 1.0);
}

std::pair<GridFunction, GridFunction>
make_disjoint_pair(const DisjointPairSpec& spec, const Grid& grid) {
    if (!(spec.norm_split > 0.0 && spec.norm_split < 1.0))
        throw Error("DisjointPairSpec: norm_split must lie in (0, 1)");
    const BumpSpec& a = spec.left;
    const BumpSpec& b = spec.right;
    double a_hi = a.center + a.half_width;
    double b_lo = b.center - b.half_width;
    double a_lo = a.center - a.half_width;
    double b_hi = b.center + b.half_width;
    double gap = std::max(b_lo - a_hi, a_lo - b_hi); // whichever side is left
    if (gap < grid.dx() * (1.0 - 1e-12)) {
        std::ostringstream os;
        os << "supports [" << a_lo << ", " << a_hi << "] and [" << b_lo << ", "
           << b_hi << "] need a gap of at least one grid cell (dx = "
           << grid.dx() << "), got " << gap;
        throw SupportsOverlap(os.str());
    }
    GridFunction f1 = normalized_bump(a, grid, spec.norm_split);
    GridFunction f2 = normalized_bump(b, grid, 1.0 - spec.norm_split);
    for (int j = 0; j < grid.n_points; ++j)
        if (f1.values[j] != cplx(0.0) && f2.values[j] != cplx(0.0))
            throw SupportsOverlap("discretized supports share grid point " +
                                  std::to_string(j));
    return {std::move(f1), std::move(f2)};
}

} // namespace mindet
