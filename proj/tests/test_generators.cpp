#include "doctest.h"

#include <cmath>
#include <numbers>

#include "mindet/generators.hpp"

using namespace mindet;

namespace {

// adaptive-quadrature value of the squared-bump integral
// int_{-1}^{1} exp(-2/(1-x^2)) dx, frozen from an extended-precision run
const double kBumpSquareIntegral = 0.133086120844994272;
// normalization constant 1/sqrt of the above
const double kBumpNormC = 2.741155145706972313;

double bump_formula(double x) {
    return std::abs(x) < 1.0 ? std::exp(-1.0 / (1.0 - x * x)) : 0.0;
}

// independent five-point second derivative with one Richardson step
double second_derivative_fd(double (*fn)(double), double x, double h) {
    auto d = [&](double hh) {
        return (fn(x + hh) - 2.0 * fn(x) + fn(x - hh)) / (hh * hh);
    };
    return (4.0 * d(0.5 * h) - d(h)) / 3.0;
}

} // namespace

TEST_CASE("standard bump: normalization and frozen constants") {
    // zero-aligned grid so the bump center is an actual sample
    Grid g = Grid::zero_aligned(1.0 / 512, 8192);
    BumpSpec spec; // standard, center 0, half_width 1
    GridFunction f = make_bump(spec, g);

    std::vector<double> sq(f.size());
    for (int j = 0; j < f.size(); ++j) sq[j] = std::norm(f.values[j]);
    CHECK(integrate(g, sq) == doctest::Approx(1.0).epsilon(1e-13));

    // peak = C e^{-1}; C from the adaptive-quadrature oracle
    double peak = f.values[g.zero_index()].real();
    CHECK(peak * std::exp(1.0) == doctest::Approx(kBumpNormC).epsilon(1e-8));
    CHECK(peak == doctest::Approx(1.0084146231669).epsilon(1e-8));
    CHECK(kBumpNormC ==
          doctest::Approx(1.0 / std::sqrt(kBumpSquareIntegral)).epsilon(1e-15));

    // unnormalized value at the center is e^{-1}
    CHECK(bump_formula(0.0) == std::exp(-1.0));
}

TEST_CASE("standard bump: hard zeros and exact support") {
    Grid g = Grid::centered(4.0, 4096);
    BumpSpec spec;
    GridFunction f = make_bump(spec, g);
    int nonzero = 0;
    for (int j = 0; j < f.size(); ++j) {
        double x = g.point(j);
        if (std::abs(x) >= 1.0) {
            CHECK(f.values[j] == cplx(0.0));
        } else {
            CHECK(f.values[j].real() > 0.0);
            ++nonzero;
        }
    }
    CHECK(nonzero == 1024); // (-1, 1) holds exactly 2/dx midpoint samples
}

TEST_CASE("standard bump: second derivative at the center") {
    // oracle first: Richardson finite differences on the raw formula
    double d2_raw = second_derivative_fd(&bump_formula, 0.0, 5e-3);
    CHECK(d2_raw == doctest::Approx(-2.0 * std::exp(-1.0)).epsilon(1e-8));

    // frozen normalized value -2 C e^{-1}
    const double d2_frozen = -2.01682924633381;
    CHECK(kBumpNormC * d2_raw == doctest::Approx(d2_frozen).epsilon(1e-8));

    // spectral route through the library agrees
    Grid g = Grid::zero_aligned(1.0 / 512, 8192);
    GridFunction f = make_bump(BumpSpec{}, g);
    GridFunction d2 = spectral_derivative(f, 2);
    CHECK(d2.values[g.zero_index()].real() ==
          doctest::Approx(d2_frozen).epsilon(1e-7));
}

TEST_CASE("cosine power bump: normalization against the Wallis formula") {
    Grid g = Grid::centered(8.0, 4096);
    BumpSpec spec;
    spec.kind = BumpKind::cosine_power_bump;
    spec.power = 12;
    spec.half_width = 1.0;
    GridFunction f = make_bump(spec, g);

    std::vector<double> sq(f.size());
    for (int j = 0; j < f.size(); ++j) sq[j] = std::norm(f.values[j]);
    CHECK(integrate(g, sq) == doctest::Approx(1.0).epsilon(1e-13));

    // continuum norm: int_{-1}^{1} cos^{2p}(pi u / 2) du = 2 binom(2p, p) / 4^p
    double binom = 1.0;
    for (int k = 1; k <= 12; ++k) binom *= (12.0 + k) / k;
    double cont = 2.0 * binom / std::pow(4.0, 12);
    double expect_peak = 1.0 / std::sqrt(cont);
    // peak sample sits half a cell off center; compare against the formula
    // evaluated at that sample instead of at 0
    int j_peak = 2048; // first sample right of center
    double u = g.point(j_peak);
    double c = std::cos(0.5 * std::numbers::pi * u);
    double formula = expect_peak * std::pow(c, 12);
    CHECK(f.values[j_peak].real() == doctest::Approx(formula).epsilon(1e-8));

    spec.power = 3;
    CHECK_THROWS_AS(make_bump(spec, g), Error);
}

TEST_CASE("bump validation and padding") {
    Grid g = Grid::centered(4.0, 4096);
    BumpSpec spec;
    spec.center = 3.5;
    CHECK_THROWS_AS(make_bump(spec, g), SupportOverflow);
    spec.center = 0.0;
    spec.half_width = 1.5; // support [-1.5, 1.5] vs central quarter [-1, 1]
    CHECK_THROWS_AS(make_bump(spec, g), SupportOverflow);
    spec.half_width = -1.0;
    CHECK_THROWS_AS(make_bump(spec, g), Error);
    spec.half_width = 1.0;
    spec.amplitude_phase = cplx(1.0, 1.0);
    CHECK_THROWS_AS(make_bump(spec, g), Error);

    spec.amplitude_phase = std::polar(1.0, 0.25 * std::numbers::pi);
    GridFunction f = make_bump(spec, g);
    std::vector<double> sq(f.size());
    for (int j = 0; j < f.size(); ++j) sq[j] = std::norm(f.values[j]);
    CHECK(integrate(g, sq) == doctest::Approx(1.0).epsilon(1e-13));
    int mid = 2048;
    CHECK(std::arg(f.values[mid]) ==
          doctest::Approx(0.25 * std::numbers::pi).epsilon(1e-12));
}

TEST_CASE("derivative boundary behaviour of the standard bump") {
    Grid g = Grid::centered(8.0, 8192);
    GridFunction f = make_bump(BumpSpec{}, g);
    // relative outside-support residual of the spectral derivative; the
    // schedule reflects the double-precision floor at high orders
    const int orders[] = {1, 2, 4, 6, 8};
    const double tol[] = {1e-10, 1e-8, 1e-6, 1e-4, 1e-3};
    for (int i = 0; i < 5; ++i) {
        GridFunction d = spectral_derivative(f, orders[i]);
        double ring = 0.0, peak = 0.0;
        for (int j = 0; j < d.size(); ++j) {
            double a = std::abs(d.values[j]);
            CHECK(std::isfinite(a));
            peak = std::max(peak, a);
            if (std::abs(g.point(j)) >= 1.0) ring = std::max(ring, a);
        }
        CHECK(ring < tol[i] * peak);
    }
}

TEST_CASE("disjoint pairs") {
    Grid g = Grid::centered(8.0, 4096);
    DisjointPairSpec pair;
    pair.left = BumpSpec{-1.5, 0.5, BumpKind::cosine_power_bump, 12, cplx(1.0)};
    pair.right = BumpSpec{1.5, 0.5, BumpKind::cosine_power_bump, 12, cplx(1.0)};
    auto [f1, f2] = make_disjoint_pair(pair, g);

    std::vector<double> sq(f1.size());
    for (int j = 0; j < f1.size(); ++j) sq[j] = std::norm(f1.values[j]);
    CHECK(integrate(g, sq) == doctest::Approx(0.5).epsilon(1e-13));
    for (int j = 0; j < f2.size(); ++j) sq[j] = std::norm(f2.values[j]);
    CHECK(integrate(g, sq) == doctest::Approx(0.5).epsilon(1e-13));

    // sample-wise product is exactly zero, so is the inner product
    for (int j = 0; j < f1.size(); ++j)
        CHECK(f1.values[j] * f2.values[j] == cplx(0.0));
    CHECK(inner_product(f1, f2) == cplx(0.0));

    // Pythagoras for the combined function
    std::vector<cplx> sum(f1.size());
    for (int j = 0; j < f1.size(); ++j) sum[j] = f1.values[j] + f2.values[j];
    GridFunction fsum(g, sum);
    CHECK(std::abs(inner_product(fsum, fsum)) ==
          doctest::Approx(1.0).epsilon(1e-13));

    // uneven split
    pair.norm_split = 0.25;
    auto [g1, g2] = make_disjoint_pair(pair, g);
    for (int j = 0; j < g1.size(); ++j) sq[j] = std::norm(g1.values[j]);
    CHECK(integrate(g, sq) == doctest::Approx(0.25).epsilon(1e-13));
    for (int j = 0; j < g2.size(); ++j) sq[j] = std::norm(g2.values[j]);
    CHECK(integrate(g, sq) == doctest::Approx(0.75).epsilon(1e-13));

    pair.norm_split = 1.5;
    CHECK_THROWS_AS(make_disjoint_pair(pair, g), Error);
    pair.norm_split = 0.5;
    pair.right.center = -0.75; // supports [-2,-1] and [-1.25,-0.25] overlap
    CHECK_THROWS_AS(make_disjoint_pair(pair, g), SupportsOverlap);
}

TEST_CASE("shifted-copy pair translates samples exactly") {
    Grid g = Grid::centered(16.0, 4096); // dx = 2^-7, D = 3 is 384 cells
    DisjointPairSpec pair;
    pair.left = BumpSpec{0.0, 1.0, BumpKind::standard_bump, 12, cplx(1.0)};
    pair.right = BumpSpec{3.0, 1.0, BumpKind::standard_bump, 12, cplx(1.0)};
    auto [f1, f2] = make_disjoint_pair(pair, g);
    int shift = static_cast<int>(std::round(3.0 / g.dx()));
    CHECK(shift == 384);
    for (int j = 0; j + shift < g.n_points; ++j)
        CHECK(f2.values[j + shift] == f1.values[j]); // bitwise
}
