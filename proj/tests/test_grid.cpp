#include "doctest.h"

#include <cmath>
#include <numbers>

#include "mindet/grid.hpp"

using namespace mindet;

TEST_CASE("grid sampling: midpoints, spacing, factories") {
    Grid g(-4.0, 4.0, 4096);
    CHECK(g.dx() == 8.0 / 4096);
    CHECK(g.point(0) == -4.0 + 0.5 * g.dx());
    CHECK(g.point(4095) == doctest::Approx(4.0 - 0.5 * g.dx()).epsilon(1e-15));
    CHECK(g.points().size() == 4096);

    Grid c = Grid::centered(4.0, 4096);
    CHECK(c.same_as(g));
    CHECK_FALSE(c.has_zero_sample()); // midpoints of a centered grid skip 0

    Grid z = Grid::zero_aligned(g.dx(), 4096);
    CHECK(z.has_zero_sample());
    CHECK(z.zero_index() == 2048);
    CHECK(z.point(2048) == 0.0);
    CHECK(z.point(2049) == g.dx());
    CHECK(z.dx() == g.dx());
}

TEST_CASE("grid validation") {
    CHECK_THROWS_AS(Grid(0.0, 1.0, 1000), GridMismatch); // not a power of two
    CHECK_THROWS_AS(Grid(0.0, 1.0, 4), GridMismatch);    // too small
    CHECK_THROWS_AS(Grid(1.0, 1.0, 16), GridMismatch);   // empty interval
    CHECK_THROWS_AS(Grid(2.0, 1.0, 16), GridMismatch);
    CHECK_THROWS_AS(Grid::centered(4.0, 16).zero_index(), GridMismatch);
}

TEST_CASE("integration is exact for constants and odd functions") {
    Grid g = Grid::centered(5.0, 4096);
    std::vector<double> ones(4096, 1.0);
    CHECK(integrate(g, ones) == 10.0); // midpoint rule, no endpoint bias

    std::vector<double> odd(4096);
    for (int j = 0; j < 4096; ++j) {
        double x = g.point(j);
        odd[j] = x * std::exp(-x * x);
    }
    CHECK(integrate(g, odd) == 0.0); // pairwise cancellation is exact

    std::vector<double> wrong(100, 1.0);
    CHECK_THROWS_AS(integrate(g, wrong), GridMismatch);
}

TEST_CASE("compensated summation survives catastrophic cancellation") {
    std::vector<double> terms = {1e16, 1.0, -1e16};
    CHECK(compensated_sum(terms) == 1.0);
    std::vector<cplx> cterms = {{1e16, -1.0}, {1.0, 1e16}, {-1e16, -1e16}};
    CHECK(compensated_sum(cterms) == cplx(1.0, -1.0));
}

TEST_CASE("gaussian quadrature sanity and inner product") {
    Grid g = Grid::centered(8.0, 512);
    std::vector<double> p(512);
    const double c = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    for (int j = 0; j < 512; ++j) {
        double x = g.point(j);
        p[j] = c * std::exp(-0.5 * x * x);
    }
    CHECK(integrate(g, p) == doctest::Approx(1.0).epsilon(1e-14));

    GridFunction f = real_grid_function(g, p);
    cplx ip = inner_product(f, f);
    // integral of (2pi)^-1 exp(-x^2) = 1/(2 sqrt(pi))
    CHECK(ip.real() ==
          doctest::Approx(0.5 / std::sqrt(std::numbers::pi)).epsilon(1e-14));
    CHECK(ip.imag() == 0.0);

    // conjugate-linear in the first argument
    std::vector<cplx> iv(p.size());
    for (size_t j = 0; j < p.size(); ++j) iv[j] = cplx(0.0, p[j]);
    GridFunction fi(g, iv);
    cplx a = inner_product(fi, f);
    CHECK(a.imag() == doctest::Approx(-ip.real()).epsilon(1e-14));
}

TEST_CASE("fourier transform of a gaussian is a gaussian") {
    Grid g = Grid::centered(8.0, 512);
    std::vector<cplx> v(512);
    for (int j = 0; j < 512; ++j) {
        double x = g.point(j);
        v[j] = std::exp(-0.5 * x * x);
    }
    GridFunction f(g, v);
    Grid kg = Grid::centered(8.0, 512);
    GridFunction F = fourier_transform(f, kg);
    double worst = 0.0;
    for (int m = 0; m < 512; ++m) {
        double k = kg.point(m);
        worst = std::max(worst, std::abs(F.values[m] - std::exp(-0.5 * k * k)));
    }
    CHECK(worst < 1e-12);

    // Parseval and the round trip
    CHECK(norm_l2(F) == doctest::Approx(norm_l2(f)).epsilon(1e-13));
    GridFunction back = inverse_fourier_transform(F, g);
    CHECK(distance(back, f, Metric::linf) < 1e-12);
}

TEST_CASE("spectral derivative of a gaussian") {
    Grid g = Grid::centered(8.0, 512);
    std::vector<cplx> v(512);
    for (int j = 0; j < 512; ++j) {
        double x = g.point(j);
        v[j] = std::exp(-0.5 * x * x);
    }
    GridFunction f(g, v);
    GridFunction d1 = spectral_derivative(f, 1);
    double worst = 0.0;
    for (int j = 0; j < 512; ++j) {
        double x = g.point(j);
        worst = std::max(worst,
                         std::abs(d1.values[j] - (-x) * std::exp(-0.5 * x * x)));
    }
    CHECK(worst < 1e-11);

    GridFunction d2 = spectral_derivative(f, 2);
    worst = 0.0;
    for (int j = 0; j < 512; ++j) {
        double x = g.point(j);
        double ref = (x * x - 1.0) * std::exp(-0.5 * x * x);
        worst = std::max(worst, std::abs(d2.values[j] - ref));
    }
    CHECK(worst < 1e-10);

    // odd order with the Nyquist bin dropped: exactly anti-Hermitian
    std::vector<cplx> w(512);
    for (int j = 0; j < 512; ++j) {
        double x = g.point(j);
        w[j] = x * std::exp(-0.6 * x * x) * cplx(1.0, 0.25);
    }
    GridFunction h(g, w);
    cplx lhs = inner_product(f, spectral_derivative(h, 1));
    cplx rhs = inner_product(spectral_derivative(f, 1), h);
    CHECK(std::abs(lhs + rhs) < 1e-13);

    std::vector<cplx> ones(512, 1.0);
    CHECK_THROWS_AS(spectral_derivative(GridFunction(g, ones), 1), EdgeSupport);
}

TEST_CASE("density factories") {
    Grid g = Grid::centered(8.0, 512);
    std::vector<double> p(512);
    const double c = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    for (int j = 0; j < 512; ++j) {
        double x = g.point(j);
        p[j] = c * std::exp(-0.5 * x * x);
    }
    DensityFunction d = DensityFunction::checked(g, p);
    CHECK(d.normalized(1e-8));
    CHECK(d.nonnegative());
    CHECK(d.norm_error < 1e-14);

    std::vector<double> neg = p;
    neg[100] = -0.01;
    CHECK_THROWS_AS(DensityFunction::checked(g, neg), NotADensity);
    DensityFunction dm = DensityFunction::measured(g, neg);
    CHECK(dm.worst_negative == -0.01);
    CHECK_FALSE(dm.nonnegative());

    std::vector<double> scaled = p;
    for (double& x : scaled) x *= 1.5;
    CHECK_THROWS_AS(DensityFunction::checked(g, scaled), NotADensity);
    CHECK(DensityFunction::measured(g, scaled).norm_error ==
          doctest::Approx(0.5).epsilon(1e-12));

    std::vector<double> nan_v = p;
    nan_v[0] = std::nan("");
    CHECK_THROWS_AS(DensityFunction::measured(g, nan_v), NotADensity);
}

TEST_CASE("charfn factories") {
    Grid tg = Grid::zero_aligned(0.125, 128);
    std::vector<cplx> m(128);
    for (int j = 0; j < 128; ++j) {
        double t = tg.point(j);
        m[j] = std::exp(-0.5 * t * t); // gaussian characteristic function
    }
    CharFn M = CharFn::checked(tg, m);
    CHECK(M.at_zero() == cplx(1.0, 0.0));
    CHECK(M.worst_hermitian_error == 0.0);
    CHECK(M.worst_modulus_excess == 0.0);

    // grid without theta = 0 is rejected
    Grid bad = Grid::centered(8.0, 128);
    CHECK_THROWS_AS(CharFn::checked(bad, m), GridIncompatible);

    // M(0) != 1 is rejected
    std::vector<cplx> m2 = m;
    m2[tg.zero_index()] = 0.5;
    CHECK_THROWS_AS(CharFn::checked(tg, m2), CharFnInvalid);
    CharFn Mm = CharFn::measured(tg, m2);
    CHECK(std::abs(Mm.at_zero() - 0.5) < 1e-15);

    // modulus > 1 is rejected
    std::vector<cplx> m3 = m;
    m3[10] = 1.25;
    CHECK_THROWS_AS(CharFn::checked(tg, m3), CharFnInvalid);

    // broken hermitian symmetry is rejected
    std::vector<cplx> m4 = m;
    m4[tg.zero_index() + 5] += cplx(0.0, 1e-3);
    CHECK_THROWS_AS(CharFn::checked(tg, m4), CharFnInvalid);
    CHECK(CharFn::measured(tg, m4).worst_hermitian_error ==
          doctest::Approx(1e-3).epsilon(1e-9));
}

TEST_CASE("distances") {
    Grid g(0.0, 1.0, 8);
    std::vector<double> a = {1, 1, 1, 1, 1, 1, 1, 1};
    std::vector<double> b = {1, 1, 1, 1, 1, 1, 1, 0};
    DensityFunction da = DensityFunction::measured(g, a);
    DensityFunction db = DensityFunction::measured(g, b);
    CHECK(distance(da, db, Metric::l1) == 0.125);
    CHECK(distance(da, db, Metric::linf) == 1.0);
    Grid g2(0.0, 2.0, 8);
    DensityFunction dc = DensityFunction::measured(g2, a);
    CHECK_THROWS_AS(distance(da, dc, Metric::l1), GridMismatch);
}
