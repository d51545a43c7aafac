#include "doctest.h"

#include <cmath>
#include <numbers>

#include "mindet/charfun.hpp"
#include "mindet/generators.hpp"

using namespace mindet;

namespace {

// shared fixture: half_width-1 standard bump on [-4, 4] x 4096 (dx = 2^-9)
struct Setup {
    Grid xg = Grid::centered(4.0, 4096);
    Grid tg = Grid::zero_aligned(8.0 / 4096, 4096);
    GridFunction f;
    CharFn M0;
    Setup()
        : f(make_bump(BumpSpec{}, xg)), M0(autocorrelation_charfun(f, tg)) {}
};

const double kBumpNormC = 2.741155145706972313;

// direct quadrature of C^2 int b(x) b(x + t) dx on a fine midpoint rule,
// independent of the grid machinery
double autocorr_oracle(double t) {
    auto b = [](double x) {
        return std::abs(x) < 1.0 ? std::exp(-1.0 / (1.0 - x * x)) : 0.0;
    };
    const int n = 200000;
    const double lo = -1.0, hi = 1.0;
    const double h = (hi - lo) / n;
    double acc = 0.0, comp = 0.0;
    for (int j = 0; j < n; ++j) {
        double x = lo + (j + 0.5) * h;
        double term = b(x) * b(x + t);
        double s = acc + term;
        comp += std::abs(acc) >= std::abs(term) ? (acc - s) + term
                                                : (term - s) + acc;
        acc = s;
    }
    return kBumpNormC * kBumpNormC * (acc + comp) * h;
}

} // namespace

TEST_CASE("autocorrelation charfun of the standard bump") {
    Setup s;
    CHECK(s.M0.at_zero() == cplx(1.0, 0.0));
    CHECK(s.M0.worst_modulus_excess == 0.0);

    // hard zeros beyond the doubled support
    double limit = 2.0 + s.xg.dx();
    for (int j = 0; j < s.M0.size(); ++j)
        if (std::abs(s.tg.point(j)) > limit) CHECK(s.M0.values[j] == cplx(0.0));

    // oracle first: direct quadrature of the shifted product
    double oracle_1 = autocorr_oracle(1.0);
    CHECK(oracle_1 == doctest::Approx(0.254480090848246).epsilon(1e-9));
    double oracle_half = autocorr_oracle(0.5);
    CHECK(oracle_half == doctest::Approx(0.711875143143354).epsilon(1e-9));

    int j0 = s.tg.zero_index();
    int cells_1 = static_cast<int>(std::round(1.0 / s.tg.dx()));
    CHECK(s.M0.values[j0 + cells_1].real() ==
          doctest::Approx(oracle_1).epsilon(1e-10));
    CHECK(s.M0.values[j0 + cells_1 / 2].real() ==
          doctest::Approx(oracle_half).epsilon(1e-10));

    // theta spacing must equal x spacing
    Grid bad = Grid::zero_aligned(2.0 * s.xg.dx(), 2048);
    CHECK_THROWS_AS(autocorrelation_charfun(s.f, bad), GridIncompatible);
}

TEST_CASE("support extent") {
    Setup s;
    CHECK(support_extent(s.M0, 1e-10) == 1.90234375);
    CHECK(support_extent(s.M0, 0.0) == 1.99609375); // 2 - 2dx exactly
    CHECK(support_extent(s.M0, 0.0) == 2.0 - 2.0 * s.xg.dx());

    // gaussian charfun never drops to the tolerance at the edge
    Grid tg = Grid::zero_aligned(0.0625, 128); // spans about [-4, 4]
    std::vector<cplx> m(128);
    for (int j = 0; j < 128; ++j) {
        double t = tg.point(j);
        m[j] = std::exp(-0.5 * t * t);
    }
    CharFn gauss = CharFn::checked(tg, m);
    CHECK_THROWS_AS(support_extent(gauss, 1e-10), NoCompactSupport);
}

TEST_CASE("density from charfun equals the squared transform") {
    Setup s;
    Grid rg = Grid::centered(512.0, 4096);
    DensityFunction P0 = density_from_charfun(s.M0, rg);
    CHECK(P0.norm_error < 1e-10);
    CHECK(P0.nonnegative());

    GridFunction F = fourier_transform(s.f, rg);
    double worst = 0.0;
    for (int j = 0; j < P0.size(); ++j)
        worst = std::max(worst, std::abs(P0.values[j] - std::norm(F.values[j])));
    CHECK(worst < 1e-8);

    // round trip back to the charfun
    CharFn back = charfun_from_density(P0, s.tg);
    double rt = 0.0;
    for (int j = 0; j < back.size(); ++j)
        rt = std::max(rt, std::abs(back.values[j] - s.M0.values[j]));
    CHECK(rt < 1e-8);

    // symmetric density gives a real charfun
    double im = 0.0;
    for (const cplx& z : back.values) im = std::max(im, std::abs(z.imag()));
    CHECK(im < 1e-10);
}

TEST_CASE("gaussian charfun inverts to the normal density") {
    Grid tg = Grid::zero_aligned(1.0 / 64, 2048); // spans [-16, 16]
    std::vector<cplx> m(2048);
    for (int j = 0; j < 2048; ++j) {
        double t = tg.point(j);
        m[j] = std::exp(-0.5 * t * t);
    }
    CharFn M = CharFn::checked(tg, m);
    Grid rg = Grid::centered(8.0, 512);
    DensityFunction P = density_from_charfun(M, rg);
    const double c = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    double worst = 0.0;
    for (int j = 0; j < P.size(); ++j) {
        double r = rg.point(j);
        worst = std::max(worst,
                         std::abs(P.values[j] - c * std::exp(-0.5 * r * r)));
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("moments from density: frozen values and derivative-route oracle") {
    Setup s;
    Grid rg = Grid::centered(512.0, 4096);
    // the construction-path base density |F|^2: positive by construction and
    // free of the inversion's tail roundoff, which r^8 weighting amplifies
    GridFunction F = fourier_transform(s.f, rg);
    std::vector<double> p(F.size());
    for (int j = 0; j < F.size(); ++j) p[j] = std::norm(F.values[j]);
    DensityFunction P0 = DensityFunction::checked(rg, p);
    MomentVector mv = moments_from_density(P0, 8);

    CHECK(mv.values[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(mv.sigma_ref == doctest::Approx(1.7543115832804).epsilon(1e-10));
    CHECK(mv.values[2] == doctest::Approx(3.07760913123178).epsilon(1e-10));
    CHECK(mv.values[4] == doctest::Approx(81.407946543236).epsilon(1e-10));
    CHECK(mv.values[6] == doctest::Approx(24066.478533778).epsilon(1e-10));
    CHECK(mv.values[8] == doctest::Approx(35562939.5425318).epsilon(1e-10));

    // odd moments vanish within the schedule
    for (int n = 1; n <= 7; n += 2)
        CHECK(std::abs(mv.values[n]) < moment_tolerance(mv, n));

    // independent operator-route oracle for m2: <f', f'>
    GridFunction d1 = spectral_derivative(s.f, 1);
    double m2_oracle = inner_product(d1, d1).real();
    CHECK(std::abs(mv.values[2] - m2_oracle) < 1e-7);

    CHECK_THROWS_AS(moments_from_density(P0, 13), OrderTooHigh);
}

TEST_CASE("moments from charfun: gaussian reference and two-path consistency") {
    Grid tg = Grid::zero_aligned(1.0 / 64, 512);
    std::vector<cplx> m(512);
    for (int j = 0; j < 512; ++j) {
        double t = tg.point(j);
        m[j] = std::exp(-0.5 * t * t);
    }
    CharFn M = CharFn::checked(tg, m);
    MomentVector mv = moments_from_charfun(M, 4);
    CHECK(mv.values[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(mv.values[1]) < 1e-8);
    CHECK(mv.values[2] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(mv.values[3]) < 1e-5);
    CHECK(mv.values[4] == doctest::Approx(3.0).epsilon(1e-5));
    CHECK_THROWS_AS(moments_from_charfun(M, 5), OrderTooHigh);

    // two-path equality on the bump construction
    Setup s;
    Grid rg = Grid::centered(512.0, 4096);
    GridFunction F = fourier_transform(s.f, rg);
    std::vector<double> p(F.size());
    for (int j = 0; j < F.size(); ++j) p[j] = std::norm(F.values[j]);
    DensityFunction P0 = DensityFunction::checked(rg, p);
    MomentVector dens = moments_from_density(P0, 4);
    MomentVector cf = moments_from_charfun(s.M0, 4);
    for (int n = 0; n <= 4; ++n)
        CHECK(std::abs(dens.values[n] - cf.values[n]) <
              moment_tolerance(dens, n));
}

TEST_CASE("moment tolerance schedule") {
    MomentVector mv;
    mv.n_max = 4;
    mv.values = {1.0, 0.0, 4.0, 0.0, 48.0};
    mv.sigma_ref = 2.0;
    CHECK(moment_tolerance(mv, 0) == doctest::Approx(1e-8 + 1e-6));
    CHECK(moment_tolerance(mv, 2) == doctest::Approx(4e-8 + 4e-6));
    CHECK(moment_tolerance(mv, 4) == doctest::Approx(16e-8 + 48e-6));
    CHECK_THROWS_AS(moment_tolerance(mv, 5), OrderTooHigh);
}
