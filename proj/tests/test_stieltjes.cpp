#include "doctest.h"

#include <cmath>

#include "mindet/stieltjes.hpp"

using namespace mindet;

namespace {

struct Family {
    Grid xg = Grid::centered(4.0, 4096);
    StieltjesFamilySpec spec;
    StieltjesFamily fam;
    Family() : fam(build_stieltjes_family(spec, xg)) {}
};

} // namespace

TEST_CASE("default stieltjes family builds with the documented structure") {
    Family t;
    CHECK(t.fam.members.size() == 5);
    CHECK(t.fam.extent == 1.90234375);
    CHECK(t.fam.base_density.norm_error < 1e-10);
    for (const auto& c : t.fam.condition_checks) CHECK(c.pass);

    // epsilon = 0 member is the base density, sample for sample
    const DensityFunction& p0 = t.fam.members[2];
    REQUIRE(t.fam.epsilons[2] == 0.0);
    for (int j = 0; j < p0.size(); ++j)
        CHECK(p0.values[j] == t.fam.base_density.values[j]);

    // members are valid densities without renormalization
    for (const auto& m : t.fam.members) {
        CHECK(m.norm_error <= 1e-8);
        CHECK(m.nonnegative());
    }
}

TEST_CASE("phase flip mirrors the perturbation") {
    Family t;
    StieltjesFamilySpec flipped = t.spec;
    flipped.phi = std::numbers::pi;
    StieltjesFamily fam_pi = build_stieltjes_family(flipped, t.xg);
    for (size_t i = 0; i < t.fam.members.size(); ++i) {
        const auto& a = t.fam.members[i];
        const auto& b = fam_pi.members[i];
        for (int j = 0; j < a.size(); ++j)
            CHECK(std::abs(a.values[j] + b.values[j] -
                           2.0 * t.fam.base_density.values[j]) < 1e-12);
    }
}

TEST_CASE("epsilon linearity of members") {
    Family t;
    // eps = 0.5 is the t = 3/4 mix of eps = -1 and eps = +1
    const auto& lo = t.fam.members[0];   // eps -1
    const auto& hi = t.fam.members[4];   // eps +1
    const auto& mid = t.fam.members[3];  // eps 0.5
    for (int j = 0; j < mid.size(); ++j)
        CHECK(std::abs(0.25 * lo.values[j] + 0.75 * hi.values[j] -
                       mid.values[j]) < 1e-12);
}

TEST_CASE("member distinctness follows the explicit perturbation") {
    Family t;
    // |P_eps - P_eps'| = |eps - eps'| P0 |cos(lambda x)|, so the L1 distance
    // is |eps - eps'| times the frozen quadrature value
    const double kL1Unit = 0.619031081404413; // int P0 |cos(2.5 x)| dx
    double d = distance(t.fam.members[0], t.fam.members[1], Metric::l1);
    CHECK(d == doctest::Approx(0.5 * kL1Unit).epsilon(1e-9));
    double dfull = distance(t.fam.members[0], t.fam.members[4], Metric::l1);
    CHECK(dfull == doctest::Approx(2.0 * kL1Unit).epsilon(1e-9));
}

TEST_CASE("q derivatives vanish for the valid family") {
    Family t;
    std::vector<double> q = q_derivatives_at_zero(t.fam.base_density, 2.5, 0.0,
                                                  8);
    MomentVector ref = moments_from_density(t.fam.base_density, 8);
    for (int n = 0; n <= 8; ++n)
        CHECK(std::abs(q[n]) < moment_tolerance(ref, n));
    // the n = 0 case is the headline cancellation
    CHECK(std::abs(q[0]) < 1e-9);
    CHECK_THROWS_AS(
        q_derivatives_at_zero(t.fam.base_density, 2.5, 0.0, 13), OrderTooHigh);
}

TEST_CASE("q derivatives expose a too-small lambda") {
    Family t;
    std::vector<double> q =
        q_derivatives_at_zero(t.fam.base_density, 1.0, 0.0, 0);
    // q0 = Re M0(1.0), the frozen autocorrelation value
    CHECK(q[0] == doctest::Approx(0.254480090848246).epsilon(1e-9));
    MomentVector ref = moments_from_density(t.fam.base_density, 0);
    CHECK(std::abs(q[0]) > 100.0 * moment_tolerance(ref, 0));
}

TEST_CASE("extent condition") {
    Family t;
    ExtentConditionReport ok = verify_finite_extent_condition(t.fam.charfun,
                                                              2.5);
    CHECK(ok.pass);
    CHECK(ok.extent == 1.90234375);
    CHECK(ok.margin == doctest::Approx(2.5 - 1.90234375).epsilon(1e-12));

    ExtentConditionReport low = verify_finite_extent_condition(t.fam.charfun,
                                                               1.0);
    CHECK_FALSE(low.pass);

    // exactly at the extent fails the strict inequality
    ExtentConditionReport at =
        verify_finite_extent_condition(t.fam.charfun, t.fam.extent);
    CHECK_FALSE(at.pass);
}

TEST_CASE("lambda gate on construction") {
    Grid xg = Grid::centered(4.0, 4096);
    StieltjesFamilySpec spec;
    spec.lambda = 1.0;
    CHECK_THROWS_AS(build_stieltjes_family(spec, xg), LambdaTooSmall);

    spec.enforce_extent_condition = false;
    StieltjesFamily broken = build_stieltjes_family(spec, xg);
    CHECK(broken.members.size() == 5);
    bool extent_ok = true;
    for (const auto& c : broken.condition_checks)
        if (c.name == "finite_extent_margin") extent_ok = c.pass;
    CHECK_FALSE(extent_ok);
}

TEST_CASE("spec validation") {
    Grid xg = Grid::centered(4.0, 4096);
    StieltjesFamilySpec spec;
    spec.epsilons = {0.0, 1.5};
    CHECK_THROWS_AS(build_stieltjes_family(spec, xg), Error);
    spec.epsilons = {};
    CHECK_THROWS_AS(build_stieltjes_family(spec, xg), Error);
    spec = StieltjesFamilySpec{};
    spec.lambda = -2.5;
    CHECK_THROWS_AS(build_stieltjes_family(spec, xg), Error);
    spec = StieltjesFamilySpec{};
    spec.n_max = 13;
    CHECK_THROWS_AS(build_stieltjes_family(spec, xg), OrderTooHigh);
}

TEST_CASE("custom h entry point") {
    Family t;
    const DensityFunction& P0 = t.fam.base_density;
    std::vector<double> h(P0.values.size());
    for (size_t j = 0; j < h.size(); ++j)
        h[j] = std::cos(2.5 * P0.grid.point(static_cast<int>(j)));
    std::vector<DensityFunction> members =
        stieltjes_members_from_h(P0, h, {-1.0, 0.5}, 8);
    REQUIRE(members.size() == 2);
    // matches the builder's own member for the same parameters
    for (int j = 0; j < members[0].size(); ++j)
        CHECK(std::abs(members[0].values[j] - t.fam.members[0].values[j]) <
              1e-15);

    // unbounded h rejected
    std::vector<double> big = h;
    for (double& v : big) v *= 1.5;
    CHECK_THROWS_AS(stieltjes_members_from_h(P0, big, {0.5}, 8), Error);

    // h that fails the moment gate rejected
    std::vector<double> bad(P0.values.size());
    for (size_t j = 0; j < bad.size(); ++j)
        bad[j] = std::cos(1.0 * P0.grid.point(static_cast<int>(j)));
    CHECK_THROWS_AS(stieltjes_members_from_h(P0, bad, {0.5}, 8), Error);
}
